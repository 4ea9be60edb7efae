//! Random centre sets for the annulus construction and certificates for the two
//! properties the construction needs: separation of second differences, and coverage
//! of every low-dimensional rational direction.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{circle_norm, frac, TorusPoint};
use crate::error::{invalid, Error, Result};
use crate::lattice::{coords_in_basis, integral_point_basis, points_in_subspace};

/// A rational subspace of `R^D` given by integer generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subspace {
    pub generators: Vec<Vec<i64>>,
}

impl Subspace {
    /// All coordinate subspaces of dimension `1..=max_dim`.
    pub fn coordinate_family(dim: usize, max_dim: usize) -> Vec<Subspace> {
        let mut out = Vec::new();
        for mask in 1u32..(1 << dim) {
            let k = mask.count_ones() as usize;
            if k > max_dim {
                continue;
            }
            let generators = (0..dim)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| (0..dim).map(|j| i64::from(i == j)).collect())
                .collect();
            out.push(Subspace { generators });
        }
        out.sort_by_key(|s| s.generators.len());
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CentreConfig {
    /// Number of centres `M`.
    pub count: usize,
    /// Frequencies `ξ ∈ V ∩ Z^D` with `|ξ| <= xi_max` are tested.
    pub xi_max: i64,
    /// Required closeness `‖ξ · (x_j - x)‖_T <= tolerance`.
    pub tolerance: f64,
    /// Test points per axis of the phase torus `T^{dim V}`.
    pub grid: usize,
    /// Second differences must have norm at least `separation * ρ`.
    pub separation: f64,
    /// Number of fresh centre sets to try.
    pub max_attempts: usize,
}

impl CentreConfig {
    /// `M = ⌈ρ^{-D/4}⌉` and `|ξ| <= ρ^{-3}`.
    pub fn standard(dim: usize, rho: f64) -> Self {
        CentreConfig {
            count: rho.powf(-(dim as f64) / 4.0).ceil() as usize,
            xi_max: rho.powi(-3).floor() as i64,
            tolerance: 0.01,
            grid: 17,
            separation: 10.0,
            max_attempts: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    /// `min ‖x_{i1} - 2 x_{i2} + x_{i3}‖` over index triples that are not all equal.
    pub min_value: f64,
    /// 1-based indices `(i1, i2, i3)` attaining the minimum.
    pub witness: Option<(usize, usize, usize)>,
    pub threshold: f64,
    pub passes: bool,
}

/// Exhaustive separation check; `O(M^3 D)`.
pub fn check_separation(centres: &[TorusPoint], rho: f64, factor: f64) -> Result<SeparationReport> {
    let m = centres.len();
    if (m as f64).powi(3) > 2e9 {
        return Err(Error::BudgetExceeded(format!("{m} centres is too many for the exhaustive triple check")));
    }
    let threshold = factor * rho;
    let mut min_value = f64::INFINITY;
    let mut witness = None;
    for i1 in 0..m {
        for i3 in i1..m {
            for i2 in 0..m {
                if i1 == i2 && i2 == i3 {
                    continue;
                }
                let v = (0..centres[i1].dim())
                    .map(|k| circle_norm(centres[i1].0[k] - 2.0 * centres[i2].0[k] + centres[i3].0[k]))
                    .fold(0.0, f64::max);
                if v < min_value {
                    min_value = v;
                    witness = Some((i1 + 1, i2 + 1, i3 + 1));
                }
            }
        }
    }
    let passes = min_value >= threshold;
    Ok(SeparationReport { min_value: min_value.min(f64::MAX), witness, threshold, passes })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub subspace: usize,
    pub dim: usize,
    pub frequencies: usize,
    pub grid_points: usize,
    pub uncovered: usize,
    /// First uncovered phase vector, if any.
    pub first_uncovered: Option<Vec<f64>>,
    pub passes: bool,
}

struct PreparedSubspace {
    dim: usize,
    /// Coordinates of the tested frequencies in the integral basis.
    coords: Vec<Vec<i64>>,
    basis: Vec<Vec<i64>>,
}

fn prepare(family: &[Subspace], dim: usize, cfg: &CentreConfig) -> Result<Vec<PreparedSubspace>> {
    let mut out = Vec::new();
    for s in family {
        let ib = integral_point_basis(&s.generators, dim, -1)?;
        let pts = points_in_subspace(&s.generators, dim, cfg.xi_max)?;
        let mut coords = Vec::new();
        for p in pts {
            if p.iter().all(|&v| v == 0) {
                continue;
            }
            coords.push(coords_in_basis(&ib.basis, &p)?.expect("integer point of V lies in V ∩ Z^D"));
        }
        let k = ib.basis.len();
        if (cfg.grid as f64).powi(k as i32) > 1e7 {
            return Err(Error::BudgetExceeded(format!("grid {}^{k} too large", cfg.grid)));
        }
        out.push(PreparedSubspace { dim: k, coords, basis: ib.basis });
    }
    Ok(out)
}

fn coverage(centres: &[TorusPoint], idx: usize, s: &PreparedSubspace, cfg: &CentreConfig) -> CoverageReport {
    let k = s.dim;
    let phases: Vec<Vec<f64>> = centres.iter().map(|c| s.basis.iter().map(|xi| c.dot_int(xi)).collect()).collect();
    let total = cfg.grid.pow(k as u32);
    let mut uncovered = 0;
    let mut first = None;
    let mut t = vec![0.0; k];
    for g in 0..total {
        let mut rem = g;
        for tk in t.iter_mut() {
            *tk = (rem % cfg.grid) as f64 / cfg.grid as f64;
            rem /= cfg.grid;
        }
        let covered = phases.iter().any(|p| {
            s.coords.iter().all(|n| {
                let v: f64 = n.iter().zip(p.iter().zip(&t)).map(|(&nk, (pk, tk))| nk as f64 * frac(pk - tk)).sum();
                circle_norm(v) <= cfg.tolerance
            })
        });
        if !covered {
            uncovered += 1;
            if first.is_none() {
                first = Some(t.clone());
            }
        }
    }
    CoverageReport {
        subspace: idx,
        dim: k,
        frequencies: s.coords.len(),
        grid_points: total,
        uncovered,
        first_uncovered: first,
        passes: uncovered == 0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentreCertificate {
    pub attempts: usize,
    pub separation: SeparationReport,
    pub coverage: Vec<CoverageReport>,
    pub separation_failures: usize,
    pub coverage_failures: usize,
    pub passes: bool,
}

/// Certifies a given centre set.
pub fn certify_centres(centres: &[TorusPoint], rho: f64, family: &[Subspace], cfg: &CentreConfig) -> Result<CentreCertificate> {
    let dim = centres.first().map_or(0, |c| c.dim());
    let prepared = prepare(family, dim, cfg)?;
    certify_prepared(centres, rho, &prepared, cfg, 1)
}

fn certify_prepared(
    centres: &[TorusPoint],
    rho: f64,
    prepared: &[PreparedSubspace],
    cfg: &CentreConfig,
    attempts: usize,
) -> Result<CentreCertificate> {
    let separation = check_separation(centres, rho, cfg.separation)?;
    let coverage: Vec<CoverageReport> = prepared.iter().enumerate().map(|(i, s)| coverage(centres, i, s, cfg)).collect();
    let cov_ok = coverage.iter().all(|c| c.passes);
    Ok(CentreCertificate {
        attempts,
        passes: separation.passes && cov_ok,
        separation_failures: usize::from(!separation.passes),
        coverage_failures: usize::from(!cov_ok),
        separation,
        coverage,
    })
}

/// Draws uniform centre sets until one satisfies both properties, trying at most
/// `cfg.max_attempts` sets. On exhaustion the error says which property failed more often.
pub fn sample_centres(
    dim: usize,
    rho: f64,
    family: &[Subspace],
    cfg: &CentreConfig,
    rng: &mut impl Rng,
) -> Result<(Vec<TorusPoint>, CentreCertificate)> {
    if dim == 0 || cfg.count == 0 || !(rho > 0.0) || cfg.grid == 0 {
        return invalid("need D >= 1, M >= 1, rho > 0 and a nonempty grid");
    }
    if family.iter().any(|s| s.generators.iter().any(|g| g.len() != dim)) {
        return invalid("subspace generators must have length D");
    }
    let prepared = prepare(family, dim, cfg)?;
    let (mut sep_fail, mut cov_fail) = (0, 0);
    for attempt in 1..=cfg.max_attempts {
        let centres: Vec<TorusPoint> = (0..cfg.count).map(|_| TorusPoint::random(dim, rng)).collect();
        let mut cert = certify_prepared(&centres, rho, &prepared, cfg, attempt)?;
        sep_fail += cert.separation_failures;
        cov_fail += cert.coverage_failures;
        cert.separation_failures = sep_fail;
        cert.coverage_failures = cov_fail;
        if cert.passes {
            return Ok((centres, cert));
        }
    }
    let worst = if sep_fail >= cov_fail { "separation of second differences" } else { "coverage of rational directions" };
    Err(Error::BudgetExceeded(format!(
        "no centre set certified in {} attempts; {worst} failed most often (separation {sep_fail}, coverage {cov_fail})",
        cfg.max_attempts
    )))
}
