use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::annulus::contains_with;
use super::{circle_norm, lift1, mul_mod1, AnnulusSystem, SymCoeffs, TorusPoint};
use crate::colouring::{ApWitness, Colouring};
use crate::error::{invalid, Result};

/// Parameter choices that follow the asymptotic construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstructionDefaults {
    pub rho: f64,
    pub width: f64,
    pub centres: usize,
}

impl ConstructionDefaults {
    /// `ρ = D^{-4}`, `w = N^{-4/D}`, `M = D^D`.
    pub fn standard(n: usize, dim: usize) -> Self {
        let d = dim as f64;
        ConstructionDefaults {
            rho: d.powi(-4),
            width: (n as f64).powf(-4.0 / d),
            centres: (dim as u32).checked_pow(dim as u32).map_or(usize::MAX, |v| v as usize),
        }
    }
}

/// Colours `n ∈ [N]` blue iff `θ n` lies in one of the annuli of `sys`.
pub fn build_colouring(n_max: usize, theta: &TorusPoint, sys: &AnnulusSystem) -> Result<Colouring> {
    sys.validate()?;
    if theta.dim() != sys.dim {
        return invalid("θ and the annulus system have different dimensions");
    }
    let a = sys.matrix();
    let reach = sys.lift_radius();
    let blue: Vec<bool> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let p: Vec<f64> = theta.0.iter().map(|&t| mul_mod1(t, n as i64)).collect();
            let mut y = vec![0.0; sys.dim];
            sys.centres.iter().any(|c| {
                for k in 0..sys.dim {
                    y[k] = lift1(p[k] - c.0[k]);
                    if y[k].abs() > reach {
                        return false;
                    }
                }
                contains_with(&a, sys.rho, sys.width, &y)
            })
        })
        .collect();
    Ok(Colouring::from_fn(n_max, |n| blue[n - 1]))
}

/// Blue iff every base-3 digit of `n` is 0 or 1.
pub fn folklore_colouring(n_max: usize) -> Colouring {
    Colouring::from_fn(n_max, |mut n| {
        while n > 0 {
            if n % 3 == 2 {
                return false;
            }
            n /= 3;
        }
        true
    })
}

/// Behrend's set: numbers `sum_{i<n} a_i (2d-1)^i` with digits `a_i ∈ [0, d)` and
/// `sum a_i^2` equal to the most popular value among elements of `[1, N]`. Digits never
/// carry, so a 3-term progression would force three lattice points on a sphere to be
/// collinear.
pub fn behrend_colouring(n_max: usize, d: usize, digits: usize) -> Result<Colouring> {
    if d < 2 || digits == 0 {
        return invalid("need d >= 2 and at least one digit");
    }
    let base = 2 * d - 1;
    let total = (d as f64).powi(digits as i32);
    if total > 1e8 {
        return invalid("digit space too large");
    }
    let mut by_radius: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    let mut a = vec![0usize; digits];
    loop {
        let value: usize = a.iter().rev().fold(0, |acc, &x| acc * base + x);
        if value >= 1 && value <= n_max {
            let r: usize = a.iter().map(|x| x * x).sum();
            by_radius.entry(r).or_default().push(value);
        }
        let mut i = 0;
        while i < digits && a[i] == d - 1 {
            a[i] = 0;
            i += 1;
        }
        if i == digits {
            break;
        }
        a[i] += 1;
    }
    let mut best: &[usize] = &[];
    for set in by_radius.values() {
        if set.len() > best.len() {
            best = set;
        }
    }
    Colouring::from_blue(n_max, best.iter().copied())
}

/// A single-annulus colouring with random frequency.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GreenWolf {
    #[serde(skip)]
    pub colouring: Colouring,
    pub theta: TorusPoint,
    pub system: AnnulusSystem,
}

/// One spherical annulus of radius `radius` and width `N^{-4/D}` about the origin, with
/// a uniformly random `θ`.
pub fn green_wolf_colouring(n_max: usize, dim: usize, radius: f64, rng: &mut impl Rng) -> Result<GreenWolf> {
    let width = (n_max as f64).powf(-4.0 / dim as f64);
    let system = AnnulusSystem::new(radius, width.min(radius / 2.0), SymCoeffs::zeros(dim), vec![TorusPoint::new(vec![0.0; dim])])?;
    let theta = TorusPoint::random(dim, rng);
    let colouring = build_colouring(n_max, &theta, &system)?;
    Ok(GreenWolf { colouring, theta, system })
}

/// The full random construction: `θ` uniform, perturbation entries uniform in
/// `[-e_bound, e_bound]`, and `M` uniform centres, drawn from `rng` in that order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GreenConstruction {
    #[serde(skip)]
    pub colouring: Colouring,
    pub theta: TorusPoint,
    pub system: AnnulusSystem,
}

pub fn green_colouring(
    n_max: usize,
    dim: usize,
    params: &ConstructionDefaults,
    e_bound: f64,
    rng: &mut impl Rng,
) -> Result<GreenConstruction> {
    if dim == 0 || params.centres == 0 {
        return invalid("need D >= 1 and M >= 1");
    }
    if params.centres > 1_000_000 {
        return Err(crate::error::Error::BudgetExceeded(format!("M = {} centres exceeds 10^6", params.centres)));
    }
    if !(e_bound >= 0.0) {
        return invalid("e_bound must be nonnegative");
    }
    let theta = TorusPoint::random(dim, rng);
    let e = SymCoeffs::random(dim, e_bound, rng);
    let centres: Vec<TorusPoint> = (0..params.centres).map(|_| TorusPoint::random(dim, rng)).collect();
    let system = AnnulusSystem::new(params.rho, params.width, e, centres)?;
    let colouring = build_colouring(n_max, &theta, &system)?;
    Ok(GreenConstruction { colouring, theta, system })
}

/// A progression of length `⌊√N / 10⌋` along which the first coordinate of `θ n` stays
/// at distance at least `radius` from 0, hence red for a single annulus of that radius
/// about the origin.
pub fn dirichlet_red_ap(n_max: usize, theta: &TorusPoint, radius: f64) -> Option<ApWitness> {
    let q = (n_max as f64).sqrt().floor() as usize;
    let k = ((n_max as f64).sqrt() / 10.0).floor().max(1.0) as usize;
    let t = *theta.0.first()?;
    let d = (1..=q.max(1)).min_by(|&a, &b| circle_norm(mul_mod1(t, a as i64)).total_cmp(&circle_norm(mul_mod1(t, b as i64))))?;
    let span = (k - 1) * d;
    if span >= n_max {
        return None;
    }
    (1..=(n_max - span).min(10 * q.max(1)))
        .map(|n0| ApWitness::new(n0, d, k))
        .find(|w| w.elements().all(|m| circle_norm(mul_mod1(t, m as i64)) > radius))
}
