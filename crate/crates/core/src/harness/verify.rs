use serde::Serialize;

use super::reference::{ReferenceEntry, ReferenceTable};
use crate::colouring::{find_blue_3ap, longest_mono_ap, ApWitness, Colour, Colouring, LongestAp};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    #[serde(rename = "N")]
    pub n: usize,
    pub blue_count: usize,
    pub blue_density: f64,
    pub blue_3ap: Option<ApWitness>,
    pub d_max: usize,
    pub longest_red: LongestAp,
}

impl VerifySummary {
    pub fn blue_3ap_free(&self) -> bool {
        self.blue_3ap.is_none()
    }
}

fn full_d_max(c: &Colouring) -> usize {
    c.n_max().saturating_sub(1).max(1)
}

/// Blue 3-term progressions over every difference, and the longest red progression with
/// difference at most `d_max` (all differences when `None`).
pub fn verify_colouring(c: &Colouring, d_max: Option<usize>) -> Result<VerifySummary> {
    let d_max = d_max.unwrap_or_else(|| full_d_max(c));
    let longest_red = longest_mono_ap(c, Colour::Red, d_max)?;
    let n = c.n_max();
    Ok(VerifySummary {
        n,
        blue_count: c.blue_count(),
        blue_density: if n == 0 { 0.0 } else { c.blue_count() as f64 / n as f64 },
        blue_3ap: find_blue_3ap(c),
        d_max,
        longest_red,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessVerdict {
    #[serde(rename = "N")]
    pub n: usize,
    pub k: usize,
    pub blue_3ap: Option<ApWitness>,
    pub longest_red: LongestAp,
    /// No blue 3-term progression and no red `k`-term progression, so `w(3, k) > N`.
    pub confirmed: bool,
    pub reference: Option<ReferenceEntry>,
}

/// Exhaustive check that `c` avoids blue 3-term and red `k`-term progressions.
pub fn verify_witness(c: &Colouring, k: usize) -> Result<WitnessVerdict> {
    if k < 2 {
        return invalid("k must be at least 2");
    }
    let s = verify_colouring(c, None)?;
    Ok(WitnessVerdict {
        n: s.n,
        k,
        confirmed: s.blue_3ap.is_none() && s.longest_red.length < k,
        blue_3ap: s.blue_3ap,
        longest_red: s.longest_red,
        reference: ReferenceTable::get(k),
    })
}
