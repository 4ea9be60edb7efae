//! The torus `T^D = R^D / Z^D`, quadratic annuli on it, and the colourings they induce.

mod annulus;
mod centres;
mod construct;

pub use annulus::{annulus_contains, sigma, sigma_inv, AnnulusSystem, SymCoeffs, BOUNDARY_TOL};
pub use centres::{certify_centres, check_separation, sample_centres, CentreCertificate, CentreConfig, CoverageReport, SeparationReport, Subspace};
pub use construct::{
    behrend_colouring, build_colouring, dirichlet_red_ap, folklore_colouring, green_colouring, green_wolf_colouring, ConstructionDefaults,
    GreenConstruction, GreenWolf,
};

use serde::{Deserialize, Serialize};

/// Fractional part in `[0, 1)`.
#[inline]
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// `n x mod 1` for `x ∈ [0, 1)`, using an exact product split so the result carries
/// no error proportional to `|n|`.
#[inline]
pub fn mul_mod1(x: f64, n: i64) -> f64 {
    let nf = n as f64;
    let p = x * nf;
    let err = x.mul_add(nf, -p);
    frac(frac(p) + err)
}

/// Distance to the nearest integer.
#[inline]
pub fn circle_norm(x: f64) -> f64 {
    let f = frac(x);
    f.min(1.0 - f)
}

/// Representative of `x mod 1` in `(-1/2, 1/2]`.
#[inline]
pub fn lift1(x: f64) -> f64 {
    let f = frac(x);
    if f > 0.5 {
        f - 1.0
    } else {
        f
    }
}

/// A point of `T^D`, stored with coordinates in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TorusPoint(pub Vec<f64>);

impl TorusPoint {
    pub fn new(coords: impl IntoIterator<Item = f64>) -> Self {
        TorusPoint(coords.into_iter().map(frac).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn random(dim: usize, rng: &mut impl rand::Rng) -> Self {
        TorusPoint((0..dim).map(|_| rng.gen::<f64>()).collect())
    }

    /// `‖x‖_{T^D} = max_i ‖x_i‖_T`.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|&x| circle_norm(x)).fold(0.0, f64::max)
    }

    /// The lift `π^{-1}` into `(-1/2, 1/2]^D`.
    pub fn lift(&self) -> Vec<f64> {
        self.0.iter().map(|&x| lift1(x)).collect()
    }

    /// `n x`.
    pub fn scale(&self, n: i64) -> TorusPoint {
        TorusPoint(self.0.iter().map(|&x| mul_mod1(x, n)).collect())
    }

    pub fn sub(&self, other: &TorusPoint) -> TorusPoint {
        TorusPoint(self.0.iter().zip(&other.0).map(|(a, b)| frac(a - b)).collect())
    }

    pub fn add(&self, other: &TorusPoint) -> TorusPoint {
        TorusPoint(self.0.iter().zip(&other.0).map(|(a, b)| frac(a + b)).collect())
    }

    /// `ξ · x mod 1` for an integer vector `ξ`.
    pub fn dot_int(&self, xi: &[i64]) -> f64 {
        frac(self.0.iter().zip(xi).map(|(&x, &k)| mul_mod1(x, k)).sum::<f64>())
    }
}
