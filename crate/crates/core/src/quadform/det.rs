use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::substream;
use crate::stats::{wilson, Interval, Z99};
use crate::torus::{sigma, sigma_inv, SymCoeffs};

/// Trials per random substream in the determinant experiments.
pub const DET_BLOCK: u64 = 1 << 16;
const MAX_N: usize = 12;
const MAX_TRIALS: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetTail {
    pub n: usize,
    pub trials: u64,
    pub deltas: Vec<f64>,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    pub intervals: Vec<Interval>,
}

fn det_small(m: &mut [[f64; MAX_N]; MAX_N], n: usize) -> f64 {
    let mut det = 1.0;
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if m[i][k].abs() > m[p][k].abs() {
                p = i;
            }
        }
        if m[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        let pivot = m[k][k];
        det *= pivot;
        for i in k + 1..n {
            let f = m[i][k] / pivot;
            for j in k + 1..n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    det
}

fn check(n: usize, deltas: &[f64], trials: u64) -> Result<()> {
    if n == 0 || n > MAX_N {
        return invalid(format!("n must lie in 1..={MAX_N}, got {n}"));
    }
    if trials > MAX_TRIALS {
        return invalid(format!("at most {MAX_TRIALS} trials, got {trials}"));
    }
    if let Some(d) = deltas.iter().find(|d| !(**d >= 0.0)) {
        return invalid(format!("delta must be non-negative, got {d}"));
    }
    Ok(())
}

fn tail(n: usize, deltas: &[f64], trials: u64, seed: u64, fill: impl Fn(&mut crate::rng::Rng, &mut [[f64; MAX_N]; MAX_N]) + Sync) -> DetTail {
    let blocks = trials.div_ceil(DET_BLOCK);
    let counts = (0..blocks)
        .into_par_iter()
        .map(|blk| {
            let mut rng = substream(seed, blk);
            let mut c = vec![0u64; deltas.len()];
            let len = DET_BLOCK.min(trials - blk * DET_BLOCK);
            let mut m = [[0.0; MAX_N]; MAX_N];
            for _ in 0..len {
                fill(&mut rng, &mut m);
                let d = det_small(&mut m, n).abs();
                for (ci, delta) in c.iter_mut().zip(deltas) {
                    if d <= *delta {
                        *ci += 1;
                    }
                }
            }
            c
        })
        .reduce(|| vec![0u64; deltas.len()], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    let frequencies = counts.iter().map(|c| if trials == 0 { 0.0 } else { *c as f64 / trials as f64 }).collect();
    let intervals = counts.iter().map(|c| wilson(*c, trials, Z99)).collect();
    DetTail { n, trials, deltas: deltas.to_vec(), counts, frequencies, intervals }
}

/// `P(|det W| <= δ)` for symmetric `W` with independent entries uniform in `[-1/n, 1/n]`.
pub fn random_sym_det_tail(n: usize, deltas: &[f64], trials: u64, seed: u64) -> Result<DetTail> {
    check(n, deltas, trials)?;
    let h = 1.0 / n as f64;
    Ok(tail(n, deltas, trials, seed, |rng, m| {
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(-h..=h);
                m[i][j] = v;
                m[j][i] = v;
            }
        }
    }))
}

/// `P(|det(a + aᵀ)| <= δ)` for upper-triangular `a` with the given diagonal and
/// off-diagonal entries uniform in `[-Q, Q]`.
pub fn fixed_diag_det_tail(diag: &[f64], q: f64, deltas: &[f64], trials: u64, seed: u64) -> Result<DetTail> {
    let n = diag.len();
    check(n, deltas, trials)?;
    if !(q > 0.0) {
        return invalid(format!("Q must be positive, got {q}"));
    }
    Ok(tail(n, deltas, trials, seed, |rng, m| {
        for i in 0..n {
            m[i][i] = 2.0 * diag[i];
            for j in i + 1..n {
                let v = rng.gen_range(-q..=q);
                m[i][j] = v;
                m[j][i] = v;
            }
        }
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearityReport {
    pub ratios: Vec<f64>,
    /// Half-width of each Wilson interval divided by its `δ`.
    pub ratio_half_widths: Vec<f64>,
    /// Largest `|r_i - r_j| - (h_i + h_j)` over pairs; non-positive when all pairs agree.
    pub max_excess: f64,
    pub passes: bool,
}

/// Whether `freq(δ)/δ` agrees across all pairs of positive `δ` within the sum of the
/// scaled 99% Wilson half-widths.
pub fn linearity_check(t: &DetTail) -> LinearityReport {
    let idx: Vec<usize> = (0..t.deltas.len()).filter(|&i| t.deltas[i] > 0.0).collect();
    let ratios: Vec<f64> = idx.iter().map(|&i| t.frequencies[i] / t.deltas[i]).collect();
    let hw: Vec<f64> = idx.iter().map(|&i| t.intervals[i].half_width() / t.deltas[i]).collect();
    let mut excess = f64::NEG_INFINITY;
    for i in 0..ratios.len() {
        for j in i + 1..ratios.len() {
            excess = excess.max((ratios[i] - ratios[j]).abs() - hw[i] - hw[j]);
        }
    }
    LinearityReport { passes: excess <= 0.0, ratios, ratio_half_widths: hw, max_excess: excess }
}

/// `f(x) = σ^{-1}((⟨(I + σ(x)) w_i, (I + σ(x)) w_j⟩)_{i,j})`.
pub fn measure_compare_f(x: &SymCoeffs, ws: &[Vec<f64>]) -> Result<SymCoeffs> {
    let d = x.dim;
    if ws.is_empty() || ws.iter().any(|w| w.len() != d) {
        return invalid(format!("vectors must have length D = {d}"));
    }
    let w = DMatrix::from_fn(d, ws.len(), |i, j| ws[j][i]);
    let sv = w.clone().singular_values();
    if ws.len() > d || sv.min() <= 1e-12 * sv.max() {
        return Err(Error::DependentGenerators("w_1, ..., w_s are not independent".into()));
    }
    let a = DMatrix::identity(d, d) + sigma(x);
    let aw = a * w;
    Ok(sigma_inv(&(aw.transpose() * aw)))
}

/// Determinant of the linear map `x ↦ σ^{-1}(Wᵀ σ(x) W)` on `D(D+1)/2` coordinates.
pub fn det_f2(w: &DMatrix<f64>) -> Result<f64> {
    let d = w.nrows();
    if d == 0 || w.ncols() != d {
        return invalid("W must be a non-empty square matrix");
    }
    let n = SymCoeffs::len_for(d);
    let mut m = DMatrix::zeros(n, n);
    for k in 0..n {
        let mut e = SymCoeffs::zeros(d);
        e.entries[k] = 1.0;
        let img = sigma_inv(&(w.transpose() * sigma(&e) * w));
        for (r, v) in img.entries.iter().enumerate() {
            m[(r, k)] = *v;
        }
    }
    Ok(m.determinant())
}
