//! The `vdwf1` text format: a header line `vdwf1 N=<int>` followed by the blue bit array
//! as lowercase hex. Byte `k` holds elements `8k+1 ..= 8k+8`, least significant bit first.

use std::path::Path;

use super::Colouring;
use crate::error::{Error, Result};

pub const FORMAT_TAG: &str = "vdwf1";

fn to_bytes(c: &Colouring) -> Vec<u8> {
    let n_bytes = c.n_max().div_ceil(8);
    c.words().iter().flat_map(|w| w.to_le_bytes()).take(n_bytes).collect()
}

pub fn write_colouring(c: &Colouring) -> String {
    format!("{FORMAT_TAG} N={}\n{}\n", c.n_max(), hex::encode(to_bytes(c)))
}

pub fn parse_colouring(text: &str) -> Result<Colouring> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some(FORMAT_TAG) {
        return Err(Error::Parse(format!("expected header starting with '{FORMAT_TAG}'")));
    }
    let n_max: usize = parts
        .next()
        .and_then(|p| p.strip_prefix("N="))
        .ok_or_else(|| Error::Parse("missing N=<int> in header".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad N: {e}")))?;
    if parts.next().is_some() {
        return Err(Error::Parse("trailing tokens in header".into()));
    }
    let body: String = lines.flat_map(|l| l.chars()).filter(|ch| !ch.is_whitespace()).collect();
    let bytes = hex::decode(&body).map_err(|e| Error::Parse(format!("bad hex: {e}")))?;
    if bytes.len() != n_max.div_ceil(8) {
        return Err(Error::Parse(format!("expected {} bytes, found {}", n_max.div_ceil(8), bytes.len())));
    }
    let tail = n_max % 8;
    if tail != 0 && bytes[bytes.len() - 1] >> tail != 0 {
        return Err(Error::Parse("padding bits beyond N are set".into()));
    }
    let mut words = vec![0u64; n_max.div_ceil(64)];
    for (i, b) in bytes.iter().enumerate() {
        words[i / 8] |= (*b as u64) << (8 * (i % 8));
    }
    Ok(Colouring::from_words(n_max, words))
}

pub fn read_colouring(path: impl AsRef<Path>) -> Result<Colouring> {
    parse_colouring(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_known_encoding() {
        let c = Colouring::from_blue(10, [1, 3, 9]).unwrap();
        assert_eq!(write_colouring(&c), "vdwf1 N=10\n0501\n");
        assert_eq!(parse_colouring("vdwf1 N=10\n0501\n").unwrap(), c);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_colouring("vdwf2 N=3\n00\n").is_err());
        assert!(parse_colouring("vdwf1 N=3\n0000\n").is_err());
        assert!(parse_colouring("vdwf1 N=3\nf0\n").is_err());
        assert!(parse_colouring("vdwf1 N=3\nzz\n").is_err());
    }

    #[test]
    fn empty_colouring() {
        let c = Colouring::all_red(0);
        assert_eq!(parse_colouring(&write_colouring(&c)).unwrap(), c);
    }
}
