use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

fn gram(vs: &[Vec<f64>]) -> DMatrix<f64> {
    let m = vs.len();
    DMatrix::from_fn(m, m, |i, j| dot(&vs[i], &vs[j]))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `sqrt(det Gram(v_1, ..., v_m))`, the m-dimensional volume of the parallelepiped.
pub fn gram_volume(vs: &[Vec<f64>]) -> f64 {
    if vs.is_empty() {
        return 1.0;
    }
    let d = gram(vs).determinant();
    if d < 0.0 {
        return 0.0;
    }
    d.sqrt()
}


/// Euclidean distance from `x` to `span(basis)`.
pub fn dist_to_span(x: &[f64], basis: &[Vec<f64>]) -> f64 {
    if basis.is_empty() {
        return norm(x);
    }
    let n = x.len();
    let a = DMatrix::from_fn(n, basis.len(), |i, j| basis[j][i]);
    let b = DVector::from_column_slice(x);
    let svd = a.clone().svd(true, true);
    let coef = svd.solve(&b, 1e-13).expect("svd computed with u and v");
    (b - a * coef).norm()
}

/// `|vol(w_1..w_m) - dist(w_m, span(w_1..w_{m-1})) vol(w_1..w_{m-1})|`.
pub fn base_times_height_check(vs: &[Vec<f64>]) -> Result<f64> {
    let Some((last, rest)) = vs.split_last() else { return invalid("need at least one vector") };
    Ok((gram_volume(vs) - dist_to_span(last, rest) * gram_volume(rest)).abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum Dichotomy {
    /// `k + 1` of the vectors span volume greater than `delta`.
    Volume { indices: Vec<usize>, volume: f64 },
    /// A subspace spanned by at most `k` of the vectors is within `delta^{1/k}` of all of them.
    Subspace { indices: Vec<usize>, max_distance: f64 },
}

/// Greedy volume dichotomy: starting from the first vector, repeatedly add the vector
/// farthest from the current span while that distance exceeds `delta^{1/k}`.
pub fn volume_dichotomy(vs: &[Vec<f64>], k: usize, delta: f64) -> Result<Dichotomy> {
    if k == 0 || k > vs.len() {
        return invalid(format!("k = {k} must lie in [1, {}]", vs.len()));
    }
    if !(delta > 0.0) {
        return invalid("delta must be positive");
    }
    let threshold = delta.powf(1.0 / k as f64);
    let mut chosen = vec![0usize];
    loop {
        let basis: Vec<Vec<f64>> = chosen.iter().map(|&i| vs[i].clone()).collect();
        let (far, dist) = (0..vs.len())
            .map(|i| (i, dist_to_span(&vs[i], &basis)))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        if dist <= threshold {
            return Ok(Dichotomy::Subspace { indices: chosen, max_distance: dist.max(0.0) });
        }
        chosen.push(far);
        if chosen.len() == k + 1 {
            let sel: Vec<Vec<f64>> = chosen.iter().map(|&i| vs[i].clone()).collect();
            return Ok(Dichotomy::Volume { volume: gram_volume(&sel), indices: chosen });
        }
    }
}
