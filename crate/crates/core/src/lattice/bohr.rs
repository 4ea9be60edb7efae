//! Multidimensional structure on the orbit `{θ d n : n <= X}` from the successive minima
//! of `Z (1/X, θd) ⊕ ({0} × Z^D)`.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gram::{dist_to_span, gram_volume, norm, volume_dichotomy, Dichotomy};
use super::minima::{successive_minima, MinimaConfig, MAX_EXACT_DIM};
use crate::error::{invalid, Error, Result};
use crate::rng::substream;
use crate::torus::TorusPoint;

/// Tuples of `ℓ` checked exhaustively for distinct sums up to this count, sampled beyond.
const EXHAUSTIVE_TUPLES: f64 = 2e6;
const SAMPLED_TUPLES: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BohrChecks {
    /// Sums `sum ℓ_i n_i` over `0 <= ℓ_i < L'_i` are pairwise distinct.
    pub distinct_sums: bool,
    /// The largest such sum, and whether it is at most `D^{-D} X`.
    pub max_sum: u128,
    pub sums_bounded: bool,
    pub tuples_checked: u64,
    pub exhaustive: bool,
    /// `‖θ d n_i‖ <= 1/L'_i` for all `i`.
    pub phases_bounded: bool,
    /// `prod L'_i` against `D^{-3D} X`.
    pub product: f64,
    pub product_bound: f64,
    pub product_ok: bool,
    /// `(D+1)^{-D-1} (2D)^{-D} X`, the bound Minkowski's second theorem guarantees; it
    /// exceeds `D^{-3D} X` only for `D >= 4`.
    pub minkowski_bound: f64,
    pub minkowski_ok: bool,
}

impl BohrChecks {
    pub fn all_pass(&self) -> bool {
        self.distinct_sums && self.sums_bounded && self.phases_bounded && self.product_ok
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawBohr {
    pub theta: TorusPoint,
    pub d: u64,
    pub x: u64,
    pub dim: usize,
    pub n: Vec<u64>,
    pub m: Vec<Vec<i64>>,
    pub lambdas: Vec<f64>,
    pub l_prime: Vec<f64>,
    pub checks: BohrChecks,
}

fn alpha_of(theta: &TorusPoint, d: u64) -> TorusPoint {
    theta.scale(d as i64)
}

/// Directional basis `b_i = (n_i/X, n_i α - m_i)`, `α = θ d`, with `n_i >= 0` and lengths
/// `L'_i = 1/((D+1) λ_i)`, followed by re-verification of the three structural properties.
pub fn bohr_structure(theta: &TorusPoint, d: u64, x: u64, cfg: &MinimaConfig) -> Result<RawBohr> {
    let dim = theta.dim();
    if x < 1 {
        return invalid("X must be at least 1");
    }
    if d < 1 {
        return invalid("d must be at least 1");
    }
    if dim == 0 || dim + 1 > MAX_EXACT_DIM {
        return invalid(format!("D = {dim} outside the exact range [1, {}]", MAX_EXACT_DIM - 1));
    }
    let alpha = alpha_of(theta, d);
    let df = dim as f64;
    // Coordinates scaled by X so the first one is the integer n.
    let mut basis = vec![std::iter::once(1.0).chain(alpha.0.iter().copied()).collect::<Vec<f64>>()];
    for j in 0..dim {
        basis.push((0..=dim).map(|k| f64::from(k == j + 1)).collect());
    }
    let mut half = vec![x as f64 * df.powf(-df)];
    half.extend(std::iter::repeat(0.5).take(dim));
    let sm = successive_minima(&basis, &half, cfg)?;
    let mut n = Vec::new();
    let mut m = Vec::new();
    for c in &sm.coeffs {
        let sign = if c[0] < 0 { -1 } else { 1 };
        n.push((c[0] * sign) as u64);
        m.push(c[1..].iter().map(|v| -v * sign).collect());
    }
    let l_prime: Vec<f64> = sm.lambdas.iter().map(|l| 1.0 / ((df + 1.0) * l)).collect();
    let checks = verify_raw(theta, d, x, &n, &l_prime);
    Ok(RawBohr { theta: theta.clone(), d, x, dim, n, m, lambdas: sm.lambdas, l_prime, checks })
}

fn verify_raw(theta: &TorusPoint, d: u64, x: u64, n: &[u64], l_prime: &[f64]) -> BohrChecks {
    let dim = theta.dim() as f64;
    let alpha = alpha_of(theta, d);
    let counts: Vec<u64> = l_prime.iter().map(|l| l.ceil().max(1.0) as u64).collect();
    let total: f64 = counts.iter().map(|&c| c as f64).product();
    let bound = x as f64 * dim.powf(-dim);
    let max_sum: u128 = counts.iter().zip(n).map(|(&c, &ni)| (c as u128 - 1) * ni as u128).sum();
    let sums_bounded = max_sum as f64 <= bound * (1.0 + 1e-12);
    let (distinct_sums, tuples_checked, exhaustive) = if total <= EXHAUSTIVE_TUPLES {
        let mut seen = HashSet::with_capacity(total as usize);
        let mut ell = vec![0u64; counts.len()];
        let mut ok = true;
        loop {
            let s: u128 = ell.iter().zip(n).map(|(&l, &ni)| l as u128 * ni as u128).sum();
            if !seen.insert(s) {
                ok = false;
            }
            let mut i = 0;
            while i < ell.len() && ell[i] + 1 == counts[i] {
                ell[i] = 0;
                i += 1;
            }
            if i == ell.len() {
                break;
            }
            ell[i] += 1;
        }
        (ok, total as u64, true)
    } else {
        let mut rng = substream(d ^ x.rotate_left(32), 0x5eed);
        let mut seen: std::collections::HashMap<u128, Vec<u64>> = Default::default();
        let mut ok = true;
        for _ in 0..SAMPLED_TUPLES {
            let ell: Vec<u64> = counts.iter().map(|&c| rng.gen_range(0..c)).collect();
            let s: u128 = ell.iter().zip(n).map(|(&l, &ni)| l as u128 * ni as u128).sum();
            if let Some(prev) = seen.insert(s, ell.clone()) {
                if prev != ell {
                    ok = false;
                }
            }
        }
        (ok, SAMPLED_TUPLES as u64, false)
    };
    let phases_bounded = n.iter().zip(l_prime).all(|(&ni, &l)| alpha.scale(ni as i64).norm() <= (1.0 / l) * (1.0 + 1e-9));
    let product: f64 = l_prime.iter().product();
    let product_bound = dim.powf(-3.0 * dim) * x as f64;
    let minkowski_bound = (dim + 1.0).powf(-dim - 1.0) * (2.0 * dim).powf(-dim) * x as f64;
    BohrChecks {
        distinct_sums,
        max_sum,
        sums_bounded,
        tuples_checked,
        exhaustive,
        phases_bounded,
        product,
        product_bound,
        product_ok: product >= product_bound,
        minkowski_bound,
        minkowski_ok: product >= minkowski_bound * (1.0 - 1e-12),
    }
}

/// Thresholds for pruning a raw structure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefineParams {
    /// Keep `i` only if `L_i <= D^{c1} L'_i` and `L_i <= X^{c1/D}`.
    pub c1: f64,
    /// Minimum Gram volume of the unit lift vectors.
    pub vol_min: f64,
    /// `sum n_i L_i <= sum_fraction * X`.
    pub sum_fraction: f64,
}

impl RefineParams {
    /// `vol_min = D^{-C_1 D}` with `C_1 = 2^11`.
    pub fn standard(dim: usize) -> Self {
        let c1 = 2048.0;
        let d = dim as f64;
        RefineParams { c1, vol_min: d.powf(-c1 * d), sum_fraction: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discard {
    pub index: usize,
    pub reason: String,
}

/// Pruned structure: positive integers `n_i` with `L_i = ‖θ d n_i‖^{-1}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BohrStructure {
    pub theta: TorusPoint,
    pub d: u64,
    pub x: u64,
    /// Indices into the raw structure that were kept.
    pub kept: Vec<usize>,
    pub n: Vec<u64>,
    pub lengths: Vec<f64>,
    pub lifts: Vec<Vec<f64>>,
    pub units: Vec<Vec<f64>>,
    pub discarded: Vec<Discard>,
    pub sum_nl: f64,
    pub volume: f64,
    /// `prod L_i`, reported against `X^{1/80}`.
    pub product: f64,
    pub sum_ok: bool,
    pub volume_ok: bool,
    pub lengths_ok: bool,
}

/// Discards indices until `sum n_i L_i <= X/2` (relaxable), `vol(w_i) >= vol_min` and
/// `L_i <= X^{c1/D}`; the volume step uses [`volume_dichotomy`].
pub fn refine_structure(raw: &RawBohr, params: &RefineParams) -> Result<BohrStructure> {
    let dim = raw.dim as f64;
    let x = raw.x as f64;
    let alpha = alpha_of(&raw.theta, raw.d);
    let mut discarded = Vec::new();
    let mut kept = Vec::new();
    let mut lengths = vec![0.0; raw.n.len()];
    let mut lifts = vec![Vec::new(); raw.n.len()];
    let len_cap = x.powf(params.c1 / dim);
    for (i, &ni) in raw.n.iter().enumerate() {
        let p = alpha.scale(ni as i64);
        let nrm = p.norm();
        if ni == 0 || nrm == 0.0 {
            discarded.push(Discard { index: i, reason: "degenerate: n_i = 0 or θ d n_i = 0".into() });
            continue;
        }
        let l = 1.0 / nrm;
        lengths[i] = l;
        lifts[i] = p.lift();
        if l > dim.powf(params.c1) * raw.l_prime[i] {
            discarded.push(Discard { index: i, reason: format!("L_i = {l:.4e} exceeds D^c1 L'_i") });
        } else if l > len_cap {
            discarded.push(Discard { index: i, reason: format!("L_i = {l:.4e} exceeds X^(c1/D) = {len_cap:.4e}") });
        } else {
            kept.push(i);
        }
    }
    let cap = params.sum_fraction * x;
    loop {
        let sum: f64 = kept.iter().map(|&i| raw.n[i] as f64 * lengths[i]).sum();
        if sum <= cap || kept.is_empty() {
            break;
        }
        let (pos, &worst) = kept
            .iter()
            .enumerate()
            .max_by(|a, b| (raw.n[*a.1] as f64 * lengths[*a.1]).total_cmp(&(raw.n[*b.1] as f64 * lengths[*b.1])))
            .expect("nonempty");
        discarded.push(Discard {
            index: worst,
            reason: format!("n_i L_i = {:.4e} pushes the sum over {cap:.4e}", raw.n[worst] as f64 * lengths[worst]),
        });
        kept.remove(pos);
    }
    let unit = |i: usize| -> Vec<f64> {
        let v = &lifts[i];
        let n = norm(v);
        v.iter().map(|y| y / n).collect()
    };
    loop {
        if kept.is_empty() {
            break;
        }
        let units: Vec<Vec<f64>> = kept.iter().map(|&i| unit(i)).collect();
        if gram_volume(&units) >= params.vol_min {
            break;
        }
        if kept.len() == 1 {
            discarded.push(Discard { index: kept[0], reason: "volume below vol_min".into() });
            kept.clear();
            break;
        }
        let k = kept.len() - 1;
        let keep_local = match volume_dichotomy(&units, k, params.vol_min)? {
            Dichotomy::Subspace { indices, .. } => indices,
            Dichotomy::Volume { indices, .. } => indices[..k].to_vec(),
        };
        let basis: Vec<Vec<f64>> = keep_local.iter().map(|&j| units[j].clone()).collect();
        let mut next = Vec::new();
        for (j, &i) in kept.iter().enumerate() {
            if keep_local.contains(&j) {
                next.push(i);
            } else {
                discarded.push(Discard {
                    index: i,
                    reason: format!("near-dependent lift: distance {:.3e} to span of kept units", dist_to_span(&units[j], &basis)),
                });
            }
        }
        next.sort_unstable();
        kept = next;
    }
    if kept.is_empty() {
        return Err(Error::InvalidArgument("every index was pruned; thresholds are too aggressive".into()));
    }
    let n: Vec<u64> = kept.iter().map(|&i| raw.n[i]).collect();
    let ls: Vec<f64> = kept.iter().map(|&i| lengths[i]).collect();
    let units: Vec<Vec<f64>> = kept.iter().map(|&i| unit(i)).collect();
    let sum_nl: f64 = n.iter().zip(&ls).map(|(&a, b)| a as f64 * b).sum();
    let volume = gram_volume(&units);
    discarded.sort_by_key(|d| d.index);
    Ok(BohrStructure {
        theta: raw.theta.clone(),
        d: raw.d,
        x: raw.x,
        lifts: kept.iter().map(|&i| lifts[i].clone()).collect(),
        product: ls.iter().product(),
        sum_ok: sum_nl <= cap,
        volume_ok: volume >= params.vol_min,
        lengths_ok: ls.iter().all(|&l| l <= len_cap),
        kept,
        n,
        lengths: ls,
        units,
        discarded,
        sum_nl,
        volume,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlabReport {
    pub count: u64,
    pub x: u64,
    /// `2 D^{(1 - ε C_1/2) D} X`.
    pub bound: f64,
}

/// Counts `n <= X` with `π^{-1}(θ d n)` in the ball of radius 1/10 and within `radius`
/// of the subspace spanned by `v_gens`.
pub fn slab_concentration(
    theta: &TorusPoint,
    d: u64,
    x: u64,
    v_gens: &[Vec<f64>],
    radius: f64,
    eps_c1: f64,
) -> Result<SlabReport> {
    let dim = theta.dim();
    if v_gens.iter().any(|g| g.len() != dim) {
        return invalid("subspace generators must have length D");
    }
    let alpha = alpha_of(theta, d);
    let mut count = 0;
    for n in 1..=x {
        let y = alpha.scale(n as i64).lift();
        if norm(&y) <= 0.1 && dist_to_span(&y, v_gens) <= radius {
            count += 1;
        }
    }
    let df = dim as f64;
    Ok(SlabReport { count, x, bound: 2.0 * df.powf((1.0 - eps_c1 / 2.0) * df) * x as f64 })
}
