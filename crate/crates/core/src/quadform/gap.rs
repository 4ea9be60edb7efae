use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{clique_pack, enumerate, BcGrid, BoxSpec, CliquePacking, FormSampler, QuadForm};
use crate::error::{invalid, Result};
use crate::rng::substream;
use crate::stats::{wilson, Interval, Z99};

const LO: f64 = 0.5;
const HI: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub dense: bool,
    /// Largest distance from a point of `[1/2, 3/2]` to the value set. Exact whenever it
    /// exceeds `epsilon / 16`; smaller gaps are reported as the largest gap between
    /// buckets of width `epsilon / 8`.
    pub worst_gap: f64,
    pub epsilon: f64,
    pub points: u64,
}

/// Largest `min(y - p, r - y)` over `y ∈ [p, r] ∩ [LO, HI]`.
fn segment_radius(p: f64, r: f64) -> f64 {
    let lo = p.max(LO);
    let hi = r.min(HI);
    if lo > hi {
        return 0.0;
    }
    if p == f64::NEG_INFINITY {
        return r - lo;
    }
    if r == f64::INFINITY {
        return hi - p;
    }
    let y = (0.5 * (p + r)).clamp(lo, hi);
    (y - p).min(r - y)
}

/// Whether `{q(x_1/L_1, ..., x_s/L_s) : 0 <= x_i < L_i}` is `L^{-B}`-dense in `[1/2, 3/2]`.
pub fn gap_density_check(q: &QuadForm, bx: &BoxSpec, b_exp: f64) -> Result<GapReport> {
    if q.s != bx.dim() {
        return invalid(format!("form has s = {} but the box has {} lengths", q.s, bx.dim()));
    }
    if !(b_exp > 0.0) {
        return invalid(format!("B must be positive, got {b_exp}"));
    }
    bx.check_budget()?;
    let eps = bx.base.powf(-b_exp);
    let h = eps / 8.0;
    let nb = ((HI - LO) / h).ceil() as usize;
    let mut mins = vec![f64::INFINITY; nb];
    let mut maxs = vec![f64::NEG_INFINITY; nb];
    let mut below = f64::NEG_INFINITY;
    let mut above = f64::INFINITY;
    let t = bx.grid();
    let w: Vec<Vec<f64>> = t.iter().map(|v| vec![1.0; v.len()]).collect();
    enumerate(q, &t, &w, |_, v| {
        if v < LO {
            below = below.max(v);
        } else if v > HI {
            above = above.min(v);
        } else {
            let k = (((v - LO) / h) as usize).min(nb - 1);
            mins[k] = mins[k].min(v);
            maxs[k] = maxs[k].max(v);
        }
    });
    let mut worst: f64 = 0.0;
    let mut prev = below;
    let mut any = below.is_finite() || above.is_finite();
    for k in 0..nb {
        if mins[k] <= maxs[k] {
            worst = worst.max(segment_radius(prev, mins[k]));
            prev = maxs[k];
            any = true;
        }
    }
    worst = worst.max(segment_radius(prev, above));
    if !any {
        worst = f64::INFINITY;
    }
    Ok(GapReport { dense: worst <= eps, worst_gap: worst, epsilon: eps, points: bx.points() })
}

/// Parameters of the event `Σ(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaParams {
    pub s: usize,
    pub q: f64,
    pub diag_min: f64,
    pub b_exp: f64,
    pub grid: BcGrid,
}

impl SigmaParams {
    fn sampler(&self) -> Result<FormSampler> {
        if self.s < 2 {
            return invalid(format!("s must be at least 2, got {}", self.s));
        }
        self.grid.validate()?;
        FormSampler::new(self.s, self.q, self.diag_min)
    }
}

/// One Monte-Carlo trial, as written to the JSON-lines output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub trial: u64,
    pub pass: bool,
    pub worst_gap: f64,
    pub combos: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaEstimate {
    pub trials: u64,
    pub passes: u64,
    pub frequency: f64,
    pub interval: Interval,
    pub b_fractions: Vec<f64>,
    pub c_values: Vec<f64>,
    pub records: Vec<TrialRecord>,
}

/// Checks `Σ` for the form `a` over the `(b, c)` grid. Returns the pass flag, the worst
/// gap and the number of grid points.
pub fn sigma_trial(a: &QuadForm, q: f64, bx: &BoxSpec, b_exp: f64, grid: &BcGrid, rng: &mut crate::rng::Rng) -> Result<(bool, f64, usize)> {
    let combos = grid.combos(&a.diagonal(), q, rng)?;
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for (b, c) in &combos {
        let r = gap_density_check(&a.with_bc(b.clone(), *c), bx, b_exp)?;
        pass &= r.dense;
        worst = worst.max(r.worst_gap);
    }
    Ok((pass, worst, combos.len()))
}

/// Empirical frequency of `Σ(a)` over `trials` random forms.
pub fn estimate_sigma_probability(p: &SigmaParams, bx: &BoxSpec, trials: u64, seed: u64) -> Result<SigmaEstimate> {
    let sampler = p.sampler()?;
    if bx.dim() != p.s {
        return invalid(format!("box has {} lengths, expected s = {}", bx.dim(), p.s));
    }
    bx.check_budget()?;
    let records = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = substream(seed, trial);
            let a = sampler.sample(&mut rng);
            let (pass, worst_gap, combos) = sigma_trial(&a, p.q, bx, p.b_exp, &p.grid, &mut rng)?;
            Ok(TrialRecord { seed, trial, pass, worst_gap, combos })
        })
        .collect::<Result<Vec<_>>>()?;
    let passes = records.iter().filter(|r| r.pass).count() as u64;
    Ok(SigmaEstimate {
        trials,
        passes,
        frequency: if trials == 0 { 0.0 } else { passes as f64 / trials as f64 },
        interval: wilson(passes, trials, Z99),
        b_fractions: p.grid.fractions(),
        c_values: p.grid.c_values(),
        records,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplifiedRecord {
    pub seed: u64,
    pub trial: u64,
    pub pass: bool,
    pub blocks_passed: Vec<bool>,
    pub disjoint: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplifiedEstimate {
    pub s: usize,
    pub m: usize,
    pub blocks: usize,
    pub trials: u64,
    pub passes: u64,
    pub frequency: f64,
    pub interval: Interval,
    pub block_frequencies: Vec<f64>,
    pub max_block_frequency: f64,
    pub disjointness_verified: bool,
    pub records: Vec<AmplifiedRecord>,
}

/// Frequency of `Σ` via the sub-events on the blocks of a clique packing of `[s]`.
pub fn amplified_gap_probability(p: &SigmaParams, m: usize, bx: &BoxSpec, trials: u64, seed: u64) -> Result<AmplifiedEstimate> {
    let packing = clique_pack(p.s, m)?;
    amplified_with_packing(p, &packing, bx, trials, seed)
}

pub fn amplified_with_packing(p: &SigmaParams, packing: &CliquePacking, bx: &BoxSpec, trials: u64, seed: u64) -> Result<AmplifiedEstimate> {
    let sampler = p.sampler()?;
    if bx.dim() != p.s || packing.s != p.s {
        return invalid(format!("box, packing and s = {} disagree", p.s));
    }
    if packing.blocks.iter().flatten().any(|&i| i >= p.s) {
        return invalid("packing block index out of range");
    }
    for blk in &packing.blocks {
        bx.restrict(blk).check_budget()?;
    }
    let records = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = substream(seed, trial);
            let a = sampler.sample(&mut rng);
            let mut used = HashSet::new();
            let mut disjoint = true;
            let mut blocks_passed = Vec::with_capacity(packing.blocks.len());
            for blk in &packing.blocks {
                for (x, &i) in blk.iter().enumerate() {
                    for &j in &blk[x + 1..] {
                        disjoint &= used.insert((i.min(j), i.max(j)));
                    }
                }
                let sub = a.restrict(blk);
                let (pass, _, _) = sigma_trial(&sub, p.q, &bx.restrict(blk), p.b_exp, &p.grid, &mut rng)?;
                blocks_passed.push(pass);
            }
            Ok(AmplifiedRecord { seed, trial, pass: blocks_passed.iter().any(|b| *b), blocks_passed, disjoint })
        })
        .collect::<Result<Vec<_>>>()?;
    let passes = records.iter().filter(|r| r.pass).count() as u64;
    let n = trials.max(1) as f64;
    let block_frequencies: Vec<f64> = (0..packing.blocks.len())
        .map(|l| records.iter().filter(|r| r.blocks_passed[l]).count() as f64 / n)
        .collect();
    Ok(AmplifiedEstimate {
        s: packing.s,
        m: packing.m,
        blocks: packing.blocks.len(),
        trials,
        passes,
        frequency: passes as f64 / n,
        interval: wilson(passes, trials, Z99),
        max_block_frequency: block_frequencies.iter().copied().fold(0.0, f64::max),
        block_frequencies,
        disjointness_verified: records.iter().all(|r| r.disjoint),
        records,
    })
}
