use serde::{Deserialize, Serialize};

use super::{ApWitness, Colour, Colouring};
use crate::error::{invalid, Error, Result};

/// Blue density below which the pairwise search is used.
pub const DENSITY_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchStrategy {
    Auto,
    /// `O(|B|^2)` over pairs of blue elements.
    Pairwise,
    /// `O(N d / 64)` word-parallel scan over differences.
    Scan,
}

/// Finds a blue 3-term progression, returning the one with smallest difference and then
/// smallest start. Both strategies return the same witness.
pub fn find_blue_3ap(c: &Colouring) -> Option<ApWitness> {
    find_blue_3ap_with(c, SearchStrategy::Auto)
}

pub fn find_blue_3ap_with(c: &Colouring, strategy: SearchStrategy) -> Option<ApWitness> {
    let strategy = match strategy {
        SearchStrategy::Auto => {
            let density = c.blue_count() as f64 / c.n_max().max(1) as f64;
            if density < DENSITY_THRESHOLD {
                SearchStrategy::Pairwise
            } else {
                SearchStrategy::Scan
            }
        }
        s => s,
    };
    match strategy {
        SearchStrategy::Pairwise => pairwise_3ap(c),
        _ => scan_3ap(c),
    }
}

fn pairwise_3ap(c: &Colouring) -> Option<ApWitness> {
    let blue = c.blue_elements();
    let n = c.n_max();
    let mut best: Option<(usize, usize)> = None;
    for (i, &x) in blue.iter().enumerate() {
        for &y in &blue[i + 1..] {
            let d = y - x;
            if let Some((bd, _)) = best {
                if d > bd {
                    break;
                }
            }
            let z = y + d;
            if z <= n && c.is_blue(z) {
                let cand = (d, x);
                if best.map_or(true, |b| cand < b) {
                    best = Some(cand);
                }
            }
        }
    }
    best.map(|(d, x)| ApWitness::new(x, d, 3))
}

/// Word of bits `64k + shift .. 64k + shift + 63` (0-based bit positions).
#[inline]
fn shifted_word(words: &[u64], k: usize, shift: usize) -> u64 {
    let idx = k + shift / 64;
    let off = shift % 64;
    let lo = words.get(idx).copied().unwrap_or(0);
    if off == 0 {
        lo
    } else {
        let hi = words.get(idx + 1).copied().unwrap_or(0);
        (lo >> off) | (hi << (64 - off))
    }
}

fn scan_3ap(c: &Colouring) -> Option<ApWitness> {
    let n = c.n_max();
    if n < 3 {
        return None;
    }
    let words = c.words();
    for d in 1..=(n - 1) / 2 {
        let starts = n - 2 * d;
        for k in 0..starts.div_ceil(64) {
            let mut w = words[k] & shifted_word(words, k, d) & shifted_word(words, k, 2 * d);
            let valid = starts - 64 * k;
            if valid < 64 {
                w &= (1u64 << valid) - 1;
            }
            if w != 0 {
                let start = 64 * k + w.trailing_zeros() as usize + 1;
                return Some(ApWitness::new(start, d, 3));
            }
        }
    }
    None
}

/// Longest monochromatic progression found, with its witness when the length is positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LongestAp {
    pub length: usize,
    pub witness: Option<ApWitness>,
}

/// Longest progression of `colour` with difference at most `d_max`, in `O(N d_max)` time
/// by measuring runs within each residue class. Ties go to the smallest difference, then
/// the smallest start.
pub fn longest_mono_ap(c: &Colouring, colour: Colour, d_max: usize) -> Result<LongestAp> {
    let n = c.n_max();
    if d_max == 0 {
        return invalid("d_max must be at least 1");
    }
    if d_max > n.saturating_sub(1).max(1) {
        return Err(Error::InvalidArgument(format!("d_max = {d_max} exceeds N - 1 = {}", n.saturating_sub(1))));
    }
    let mut best = LongestAp { length: 0, witness: None };
    for d in 1..=d_max {
        let bound = if n == 0 { 0 } else { (n - 1) / d + 1 };
        if bound <= best.length {
            break;
        }
        for r in 1..=d.min(n) {
            let mut run = 0usize;
            let mut run_start = r;
            let mut m = r;
            while m <= n {
                if c.has_colour(m, colour) {
                    if run == 0 {
                        run_start = m;
                    }
                    run += 1;
                    if run > best.length || (run == best.length && d == best_d(&best) && run_start < best_start(&best)) {
                        best = LongestAp { length: run, witness: Some(ApWitness::new(run_start, d, run)) };
                    }
                } else {
                    run = 0;
                }
                m += d;
            }
        }
    }
    Ok(best)
}

fn best_d(b: &LongestAp) -> usize {
    b.witness.map_or(usize::MAX, |w| w.difference)
}

fn best_start(b: &LongestAp) -> usize {
    b.witness.map_or(usize::MAX, |w| w.start)
}

/// [`longest_mono_ap`] over every difference.
pub fn longest_mono_ap_full(c: &Colouring, colour: Colour) -> LongestAp {
    let d_max = c.n_max().saturating_sub(1).max(1);
    longest_mono_ap(c, colour, d_max).expect("full range is always valid")
}

/// Whether every element of `w` has colour `colour`. Errors when `w` leaves `[1, N]`.
pub fn ap_is_monochromatic(c: &Colouring, w: &ApWitness, colour: Colour) -> Result<bool> {
    if !w.fits(c.n_max()) {
        return Err(Error::OutOfRange(format!(
            "progression ({}, {}, {}) does not fit in [1, {}]",
            w.start,
            w.difference,
            w.length,
            c.n_max()
        )));
    }
    Ok(w.elements().all(|m| c.has_colour(m, colour)))
}
