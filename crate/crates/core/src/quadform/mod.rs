//! Random quadratic forms on discrete boxes: gap density, exponential sums, determinant
//! tails and clique packings.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::torus::SymCoeffs;

mod clique;
mod det;
mod expsum;
mod gap;

pub use clique::{clique_pack, projective_plane_lines, CliquePacking, PackingCheck};
pub use det::{
    det_f2, fixed_diag_det_tail, linearity_check, measure_compare_f, random_sym_det_tail, DetTail, LinearityReport,
    DET_BLOCK,
};
pub use expsum::{
    cont_disc_compare, exp_sum_continuous, exp_sum_discrete, CompareConfig, CompareReport, ContinuousSum, Quadrature,
    XiGrid,
};
pub use gap::{
    amplified_gap_probability, amplified_with_packing, estimate_sigma_probability, gap_density_check, sigma_trial,
    AmplifiedEstimate, AmplifiedRecord, GapReport, SigmaEstimate, SigmaParams, TrialRecord,
};

/// Largest number of box points any enumeration will visit.
pub const ENUMERATION_BUDGET: u64 = 100_000_000;

/// `q(t) = Σ_{i<=j} a_ij t_i t_j + Σ b_i t_i + c`, with `a` stored row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadForm {
    pub s: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: f64,
}

impl QuadForm {
    pub fn new(s: usize, a: Vec<f64>, b: Vec<f64>, c: f64) -> Result<Self> {
        if s == 0 {
            return invalid("quadratic form needs s >= 1");
        }
        if a.len() != SymCoeffs::len_for(s) || b.len() != s {
            return invalid(format!("expected {} a-coefficients and {s} b-coefficients", SymCoeffs::len_for(s)));
        }
        Ok(QuadForm { s, a, b, c })
    }

    pub fn zero(s: usize) -> Self {
        QuadForm { s, a: vec![0.0; SymCoeffs::len_for(s)], b: vec![0.0; s], c: 0.0 }
    }

    /// `a_ij` for `i <= j` (arguments in either order).
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.a[SymCoeffs::index(self.s, i, j)]
    }

    pub fn eval(&self, t: &[f64]) -> f64 {
        let mut v = self.c;
        for i in 0..self.s {
            v += self.b[i] * t[i];
            for j in i..self.s {
                v += self.coeff(i, j) * t[i] * t[j];
            }
        }
        v
    }

    pub fn with_bc(&self, b: Vec<f64>, c: f64) -> Self {
        QuadForm { s: self.s, a: self.a.clone(), b, c }
    }

    /// The form in the coordinates `idx`, all others set to zero.
    pub fn restrict(&self, idx: &[usize]) -> Self {
        let s = idx.len();
        let mut a = Vec::with_capacity(SymCoeffs::len_for(s));
        for (p, &i) in idx.iter().enumerate() {
            for &j in &idx[p..] {
                a.push(self.coeff(i, j));
            }
        }
        QuadForm { s, a, b: idx.iter().map(|&i| self.b[i]).collect(), c: self.c }
    }

    /// The form with coordinate `i` of the result equal to coordinate `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        self.restrict(perm)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.s).map(|i| self.coeff(i, i)).collect()
    }
}

/// Box lengths `L_1, ..., L_s` with base length `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub lengths: Vec<f64>,
    pub base: f64,
    pub band_exponent: f64,
}

impl BoxSpec {
    pub fn new(lengths: Vec<f64>, base: f64) -> Result<Self> {
        if lengths.is_empty() || lengths.iter().any(|l| !(*l >= 1.0) || !l.is_finite()) || !(base >= 1.0) {
            return invalid("box lengths and base must be finite and >= 1");
        }
        Ok(BoxSpec { lengths, base, band_exponent: 1.0 / 48.0 })
    }

    pub fn uniform(s: usize, l: f64) -> Result<Self> {
        Self::new(vec![l; s], l)
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    /// Number of integers `0 <= x < L_i` per coordinate.
    pub fn counts(&self) -> Vec<usize> {
        self.lengths.iter().map(|l| l.ceil() as usize).collect()
    }

    pub fn points(&self) -> u64 {
        self.counts().iter().fold(1u64, |a, c| a.saturating_mul(*c as u64))
    }

    /// `L_i ∈ [L, L^{1+ε}]` for the band exponent `ε`.
    pub fn in_band(&self) -> bool {
        let hi = self.base.powf(1.0 + self.band_exponent);
        self.lengths.iter().all(|l| *l >= self.base && *l <= hi)
    }

    pub fn restrict(&self, idx: &[usize]) -> Self {
        BoxSpec { lengths: idx.iter().map(|&i| self.lengths[i]).collect(), base: self.base, band_exponent: self.band_exponent }
    }

    pub(crate) fn check_budget(&self) -> Result<()> {
        let n = self.points();
        if n > ENUMERATION_BUDGET {
            return Err(Error::BudgetExceeded(format!("{n} box points exceed the budget of {ENUMERATION_BUDGET}")));
        }
        Ok(())
    }

    /// The grid values `x / L_i`.
    pub(crate) fn grid(&self) -> Vec<Vec<f64>> {
        self.lengths.iter().zip(self.counts()).map(|(l, n)| (0..n).map(|x| x as f64 / l).collect()).collect()
    }
}

/// Random coefficient tuples: diagonal uniform in `[diag_min, Q]`, the rest uniform in `[-Q, Q]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormSampler {
    pub s: usize,
    pub q: f64,
    pub diag_min: f64,
}

impl FormSampler {
    pub const DEFAULT_DIAG_MIN: f64 = 32.0;

    pub fn new(s: usize, q: f64, diag_min: f64) -> Result<Self> {
        if s == 0 {
            return invalid("s must be positive");
        }
        if !(diag_min > 0.0) || !(q >= diag_min) {
            return invalid(format!("need 0 < diag_min <= Q, got diag_min = {diag_min}, Q = {q}"));
        }
        Ok(FormSampler { s, q, diag_min })
    }

    pub fn sample(&self, rng: &mut impl Rng) -> QuadForm {
        let mut a = Vec::with_capacity(SymCoeffs::len_for(self.s));
        for i in 0..self.s {
            for j in i..self.s {
                a.push(if i == j { rng.gen_range(self.diag_min..=self.q) } else { rng.gen_range(-self.q..=self.q) });
            }
        }
        QuadForm { s: self.s, a, b: vec![0.0; self.s], c: 0.0 }
    }

    /// Fixed diagonal, off-diagonal entries uniform in `[-Q, Q]`.
    pub fn sample_fixed_diag(&self, diag: &[f64], rng: &mut impl Rng) -> QuadForm {
        let mut a = Vec::with_capacity(SymCoeffs::len_for(self.s));
        for i in 0..self.s {
            for j in i..self.s {
                a.push(if i == j { diag[i] } else { rng.gen_range(-self.q..=self.q) });
            }
        }
        QuadForm { s: self.s, a, b: vec![0.0; self.s], c: 0.0 }
    }
}

/// Finite surrogate for the `(b, c)` quantifier: `c = j/(4 c_points)` for
/// `j = 1..=c_points`, and `b_i = f · min(Q, 2 sqrt(a_ii c))` for `f` evenly spaced in
/// `[-0.9, 0.9]`. Every grid point satisfies `|b_i| <= Q`, `|c| <= 1/4` and
/// `b_i² < 4 a_ii c`. With `sample = Some(k)`, each trial checks `k` grid points
/// drawn without replacement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcGrid {
    pub b_points: usize,
    pub c_points: usize,
    pub sample: Option<usize>,
}

impl Default for BcGrid {
    fn default() -> Self {
        BcGrid { b_points: 5, c_points: 5, sample: None }
    }
}

const GRID_BUDGET: u64 = 1_000_000;

impl BcGrid {
    pub fn fractions(&self) -> Vec<f64> {
        if self.b_points == 1 {
            return vec![0.0];
        }
        (0..self.b_points).map(|i| -0.9 + 1.8 * i as f64 / (self.b_points - 1) as f64).collect()
    }

    pub fn c_values(&self) -> Vec<f64> {
        (1..=self.c_points).map(|j| 0.25 * j as f64 / self.c_points as f64).collect()
    }

    pub fn size(&self, s: usize) -> Option<u64> {
        (self.b_points as u64).checked_pow(s as u32)?.checked_mul(self.c_points as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.b_points == 0 || self.c_points == 0 || self.sample == Some(0) {
            return invalid("b,c grid needs at least one point per axis");
        }
        Ok(())
    }

    /// The `(b, c)` pairs checked for a form with diagonal `diag`.
    pub fn combos(&self, diag: &[f64], q: f64, rng: &mut impl Rng) -> Result<Vec<(Vec<f64>, f64)>> {
        self.validate()?;
        let s = diag.len();
        let total = self.size(s);
        let indices: Vec<u64> = match (self.sample, total) {
            (Some(k), Some(t)) if (k as u64) < t && t <= usize::MAX as u64 => {
                let mut v: Vec<u64> = sample(rng, t as usize, k).into_iter().map(|i| i as u64).collect();
                v.sort_unstable();
                v
            }
            (Some(k), None) => (0..k).map(|_| rng.gen::<u64>()).collect(),
            (_, Some(t)) if t <= GRID_BUDGET => (0..t).collect(),
            _ => return Err(Error::BudgetExceeded(format!("b,c grid of {:?} points; set a sample size", total))),
        };
        let fr = self.fractions();
        let cs = self.c_values();
        Ok(indices
            .into_iter()
            .map(|idx| {
                let mut r = idx;
                let c = cs[(r % self.c_points as u64) as usize];
                r /= self.c_points as u64;
                let b = diag
                    .iter()
                    .map(|aii| {
                        let f = fr[(r % self.b_points as u64) as usize];
                        r /= self.b_points as u64;
                        f * q.min(2.0 * (aii * c).sqrt())
                    })
                    .collect();
                (b, c)
            })
            .collect())
    }
}

/// Visits every box point with `f(weight, q(x/L))`, where `weight` is the product of the
/// per-coordinate weights. Points of zero weight are skipped.
pub(crate) fn enumerate(q: &QuadForm, t: &[Vec<f64>], w: &[Vec<f64>], mut f: impl FnMut(f64, f64)) {
    let s = q.s;
    let mut lin = vec![vec![0.0; s]; s + 1];
    lin[0].copy_from_slice(&q.b);
    walk(q, t, w, 0, q.c, 1.0, &mut lin, &mut f);
}

#[allow(clippy::too_many_arguments)]
fn walk(q: &QuadForm, t: &[Vec<f64>], w: &[Vec<f64>], k: usize, konst: f64, weight: f64, lin: &mut [Vec<f64>], f: &mut impl FnMut(f64, f64)) {
    let s = q.s;
    let akk = q.coeff(k, k);
    if k + 1 == s {
        let bl = lin[k][k];
        for (tv, wv) in t[k].iter().zip(&w[k]) {
            if *wv != 0.0 {
                f(weight * wv, konst + (bl + akk * tv) * tv);
            }
        }
        return;
    }
    for (tv, wv) in t[k].iter().zip(&w[k]) {
        if *wv == 0.0 {
            continue;
        }
        let (head, tail) = lin.split_at_mut(k + 1);
        let cur = &head[k];
        let next = &mut tail[0];
        for j in k + 1..s {
            next[j] = cur[j] + q.coeff(k, j) * tv;
        }
        let kk = konst + (cur[k] + akk * tv) * tv;
        walk(q, t, w, k + 1, kk, weight * wv, lin, f);
    }
}
