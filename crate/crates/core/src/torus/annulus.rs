use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::TorusPoint;
use crate::error::{invalid, Result};

/// Comparison tolerance for annulus membership. Points this close to either boundary
/// sphere count as outside.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Coefficients `(t_ij)_{i <= j}` of a quadratic form, stored row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymCoeffs {
    pub dim: usize,
    pub entries: Vec<f64>,
}

impl SymCoeffs {
    pub fn zeros(dim: usize) -> Self {
        SymCoeffs { dim, entries: vec![0.0; dim * (dim + 1) / 2] }
    }

    pub fn len_for(dim: usize) -> usize {
        dim * (dim + 1) / 2
    }

    pub fn from_entries(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != Self::len_for(dim) {
            return invalid(format!("expected {} coefficients for D = {dim}", Self::len_for(dim)));
        }
        Ok(SymCoeffs { dim, entries })
    }

    /// Uniform coefficients in `[-bound, bound]`.
    pub fn random(dim: usize, bound: f64, rng: &mut impl Rng) -> Self {
        let entries = (0..Self::len_for(dim)).map(|_| rng.gen_range(-bound..=bound)).collect();
        SymCoeffs { dim, entries }
    }

    /// Position of `(i, j)` with `i <= j`.
    pub fn index(dim: usize, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * dim - i * (i + 1) / 2 + j
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[Self::index(self.dim, i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |a, x| a.max(x.abs()))
    }
}

/// The symmetric matrix with `σ(t)_ii = t_ii` and `σ(t)_ij = t_ij / 2` off the diagonal.
pub fn sigma(t: &SymCoeffs) -> DMatrix<f64> {
    DMatrix::from_fn(t.dim, t.dim, |i, j| if i == j { t.get(i, i) } else { t.get(i, j) / 2.0 })
}

/// Inverse of [`sigma`] on symmetric matrices.
pub fn sigma_inv(m: &DMatrix<f64>) -> SymCoeffs {
    let d = m.nrows();
    let mut entries = Vec::with_capacity(SymCoeffs::len_for(d));
    for i in 0..d {
        for j in i..d {
            entries.push(if i == j { m[(i, i)] } else { m[(i, j)] + m[(j, i)] });
        }
    }
    SymCoeffs { dim: d, entries }
}

/// Annuli `{x : ρ - w < ‖(I + σ(e)) π^{-1}(x - x_j)‖ < ρ}` around centres `x_j ∈ T^D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSystem {
    #[serde(rename = "D")]
    pub dim: usize,
    pub rho: f64,
    pub width: f64,
    pub e: SymCoeffs,
    pub centres: Vec<TorusPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl AnnulusSystem {
    pub fn new(rho: f64, width: f64, e: SymCoeffs, centres: Vec<TorusPoint>) -> Result<Self> {
        let sys = AnnulusSystem { dim: e.dim, rho, width, e, centres, seed: None };
        sys.validate()?;
        Ok(sys)
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::identity(self.dim, self.dim) + sigma(&self.e)
    }

    /// Largest `‖y‖_2` of a point in any annulus, `ρ / s_min(I + σ(e))`.
    pub fn lift_radius(&self) -> f64 {
        let s = self.matrix().singular_values();
        self.rho / s.min()
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return invalid("dimension must be positive");
        }
        if !(self.rho > 0.0) || !(self.width > 0.0) || self.width >= self.rho {
            return invalid(format!("need 0 < width < rho, got width = {}, rho = {}", self.width, self.rho));
        }
        if self.e.dim != self.dim || self.centres.iter().any(|c| c.dim() != self.dim) {
            return invalid("dimension mismatch between e, centres and D");
        }
        let s = self.matrix().singular_values();
        if s.min() <= 0.0 {
            return invalid("I + σ(e) is singular");
        }
        if self.lift_radius() >= 0.5 {
            return invalid(format!(
                "annuli of radius {} do not fit inside the fundamental cube without wrapping",
                self.rho
            ));
        }
        Ok(())
    }

    /// Whether lifted annuli fit in the ball of radius 1/5, the margin the no-blue-3AP
    /// argument needs.
    pub fn has_ap_margin(&self) -> bool {
        self.lift_radius() <= 0.2
    }
}

/// Strict membership `ρ - w < ‖(I + σ(e)) y‖_2 < ρ` for a lifted point `y`.
pub fn annulus_contains(sys: &AnnulusSystem, y: &[f64]) -> bool {
    contains_with(&sys.matrix(), sys.rho, sys.width, y)
}

#[inline]
pub(crate) fn contains_with(a: &DMatrix<f64>, rho: f64, width: f64, y: &[f64]) -> bool {
    let d = y.len();
    let mut s = 0.0;
    for i in 0..d {
        let mut r = 0.0;
        for j in 0..d {
            r += a[(i, j)] * y[j];
        }
        s += r * r;
    }
    let norm = s.sqrt();
    norm > rho - width + BOUNDARY_TOL && norm < rho - BOUNDARY_TOL
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_round_trip() {
        let t = SymCoeffs::from_entries(3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let m = sigma(&t);
        assert_eq!(m[(0, 1)], 1.0);
        assert_eq!(m[(1, 0)], 1.0);
        assert_eq!(m[(1, 1)], 4.0);
        assert_eq!(m[(1, 2)], 2.5);
        assert_eq!(sigma_inv(&m), t);
    }

    #[test]
    fn quadratic_form_identity() {
        let t = SymCoeffs::from_entries(2, vec![1.0, 3.0, -2.0]).unwrap();
        let x = [0.7, -1.3];
        let direct = t.get(0, 0) * x[0] * x[0] + t.get(0, 1) * x[0] * x[1] + t.get(1, 1) * x[1] * x[1];
        let m = sigma(&t);
        let v = nalgebra::DVector::from_column_slice(&x);
        assert!(((v.transpose() * &m * &v)[0] - direct).abs() < 1e-12);
    }

    #[test]
    fn membership_and_boundary() {
        let sys = AnnulusSystem::new(0.05, 0.005, SymCoeffs::zeros(4), vec![TorusPoint::new([0.0; 4])]).unwrap();
        let r = 0.05 - 0.0025;
        assert!(annulus_contains(&sys, &[r, 0.0, 0.0, 0.0]));
        assert!(!annulus_contains(&sys, &[0.05, 0.0, 0.0, 0.0]));
        assert!(!annulus_contains(&sys, &[0.045, 0.0, 0.0, 0.0]));
        assert!(!annulus_contains(&sys, &[0.0; 4]));
    }

    #[test]
    fn rejects_bad_parameters() {
        let c = vec![TorusPoint::new([0.0, 0.0])];
        assert!(AnnulusSystem::new(0.05, 0.06, SymCoeffs::zeros(2), c.clone()).is_err());
        assert!(AnnulusSystem::new(0.6, 0.1, SymCoeffs::zeros(2), c).is_err());
    }
}
