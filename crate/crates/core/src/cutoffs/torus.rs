use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::BandLimitedMinorant;
use crate::error::{invalid, Error, Result};

/// Tensor quadrature on `T^D` is refused above this dimension.
pub const MAX_QUADRATURE_DIM: usize = 6;
const QUADRATURE_BUDGET: u64 = 10_000_000;

/// `χ(x) = ∏ φ(x_i)` with `φ` the periodisation of `ψ(x/ε)`, `ε = X^{-1/D}`, for the
/// band-limited minorant `ψ`. Stored as the cosine coefficients `ε ψ̂(εξ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusBoxCutoff {
    pub x: f64,
    pub dim: usize,
    pub eps: f64,
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TorusBoxReport {
    pub x: f64,
    pub dim: usize,
    pub eps: f64,
    pub max_frequency: usize,
    /// Fourier coefficients vanish for `X^{1/D} <= |ξ| <= 4 X^{1/D}`.
    pub vanishing_ok: bool,
    pub min_on_small_box: f64,
    pub integral: f64,
    pub integral_bound: f64,
    pub periodisation_residual: f64,
    pub periodisation_tail: f64,
    pub passes: bool,
}

impl TorusBoxCutoff {
    pub fn new(x: f64, dim: usize) -> Result<Self> {
        if dim == 0 || !(x > 1.0) || !x.is_finite() {
            return invalid(format!("box cutoff needs D >= 1 and X > 1, got D = {dim}, X = {x}"));
        }
        let eps = x.powf(-1.0 / dim as f64);
        if !(eps > 1e-6) {
            return invalid(format!("eps = X^(-1/D) = {eps} too small to represent"));
        }
        let mut coeffs = Vec::new();
        for xi in 0.. {
            let c = Self::coefficient_for(eps, xi as i64);
            if c == 0.0 {
                break;
            }
            coeffs.push(c);
        }
        Ok(TorusBoxCutoff { x, dim, eps, coeffs })
    }

    fn coefficient_for(eps: f64, xi: i64) -> f64 {
        eps * BandLimitedMinorant::psi_hat(eps * xi as f64)
    }

    /// The Fourier coefficient `φ̂(ξ)`.
    pub fn coefficient(&self, xi: i64) -> f64 {
        Self::coefficient_for(self.eps, xi)
    }

    pub fn phi(&self, t: f64) -> f64 {
        let mut v = self.coeffs[0];
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            v += 2.0 * c * (2.0 * PI * k as f64 * t).cos();
        }
        v
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        x.iter().map(|t| self.phi(*t)).product()
    }

    /// `Σ_{|n| <= n_max} ψ((t + n)/ε)` and the estimated remainder of the full series.
    pub fn periodised_direct(&self, t: f64, n_max: i64) -> (f64, f64) {
        let e = self.eps;
        let mut s = 0.0;
        for n in -n_max..=n_max {
            s += BandLimitedMinorant::psi((t + n as f64) / e);
        }
        let s1 = 1f64.sin().powi(2);
        let nm = n_max as f64;
        let tail = e * e / (2.0 * s1) * (1.0 / (nm + 0.5 + t) + 1.0 / (nm + 0.5 - t));
        (s, tail)
    }

    pub fn report(&self, samples: usize, seed: u64) -> Result<TorusBoxReport> {
        if self.dim > MAX_QUADRATURE_DIM {
            return invalid(format!("quadrature refused for D = {} > {MAX_QUADRATURE_DIM}", self.dim));
        }
        let lim = self.x.powf(1.0 / self.dim as f64);
        let mut vanishing_ok = true;
        let top = (4.0 * lim).ceil() as i64;
        for xi in 0..=top {
            if xi as f64 >= lim && (self.coefficient(xi) != 0.0 || self.coefficient(-xi) != 0.0) {
                vanishing_ok = false;
            }
        }
        let mut rng = crate::rng::substream(seed, 0);
        let mut min_small = f64::INFINITY;
        for _ in 0..samples {
            let p: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-self.eps..=self.eps)).collect();
            min_small = min_small.min(self.eval(&p));
        }
        // The trapezoid rule with n > max frequency nodes is exact on trigonometric polynomials.
        let n = 2 * self.coeffs.len() + 2;
        let total = (n as u64).checked_pow(self.dim as u32).unwrap_or(u64::MAX);
        if total > QUADRATURE_BUDGET {
            return Err(Error::BudgetExceeded(format!("{total} quadrature nodes")));
        }
        let mut integral = 0.0;
        let mut idx = vec![0usize; self.dim];
        let mut p = vec![0.0; self.dim];
        for _ in 0..total {
            for (pi, ii) in p.iter_mut().zip(&idx) {
                *pi = *ii as f64 / n as f64;
            }
            integral += self.eval(&p);
            for ii in idx.iter_mut() {
                *ii += 1;
                if *ii < n {
                    break;
                }
                *ii = 0;
            }
        }
        integral /= total as f64;
        let mut residual: f64 = 0.0;
        let mut tail: f64 = 0.0;
        for &t in &[0.0, 0.137, 0.5] {
            let (s, est) = self.periodised_direct(t, 2_000_000);
            residual = residual.max((self.phi(t) - s - est).abs());
            tail = tail.max(est);
        }
        let bound = 5f64.powi(self.dim as i32) / self.x;
        Ok(TorusBoxReport {
            x: self.x,
            dim: self.dim,
            eps: self.eps,
            max_frequency: self.coeffs.len() - 1,
            vanishing_ok,
            min_on_small_box: min_small,
            integral,
            integral_bound: bound,
            periodisation_residual: residual,
            periodisation_tail: tail,
            passes: vanishing_ok && min_small >= 1.0 && integral <= bound && residual < 1e-8,
        })
    }
}

/// Largest `k` accepted by [`TorusBallMinorant`].
pub const MAX_BALL_K: usize = 50;

/// `χ = ψ/∫ψ` with `ψ(x) = 4^k (Σ cos²πx_i)^k - 4^k (D - ρ^{7/3})^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusBallMinorant {
    pub dim: usize,
    pub rho: f64,
    pub k: usize,
    pub k_default: f64,
    pub threshold: f64,
    /// `∫ ψ` over `T^D`, from the moments of `Σ cos²πx_i`.
    pub integral: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TorusBallReport {
    pub dim: usize,
    pub rho: f64,
    pub k: usize,
    pub k_default: f64,
    pub value_at_zero: f64,
    pub samples: usize,
    pub sign_violations: usize,
    pub quadrature_integral: f64,
    pub fourier_checked: bool,
    pub fourier_min_off_zero: f64,
    pub fourier_support_ok: bool,
    pub passes: bool,
}

impl TorusBallMinorant {
    pub fn new(dim: usize, rho: f64, k_override: Option<usize>) -> Result<Self> {
        if dim == 0 || !(rho > 0.0 && rho < 1.0) {
            return invalid(format!("ball minorant needs D >= 1 and 0 < rho < 1, got D = {dim}, rho = {rho}"));
        }
        let k_default = rho.powi(-3).floor();
        let k = match k_override {
            Some(k) => k,
            None if k_default <= MAX_BALL_K as f64 => k_default as usize,
            None => return invalid(format!("k = floor(rho^-3) = {k_default} too large; supply k_override <= {MAX_BALL_K}")),
        };
        if k == 0 || k > MAX_BALL_K {
            return invalid(format!("k must lie in 1..={MAX_BALL_K}, got {k}"));
        }
        let threshold = dim as f64 - rho.powf(7.0 / 3.0);
        // E[Y^j] = C(2j, j)/4^j for Y = cos²πx.
        let mut ym = vec![1.0; k + 1];
        for j in 1..=k {
            ym[j] = ym[j - 1] * (2 * j - 1) as f64 / (2 * j) as f64;
        }
        let mut mom = vec![0.0; k + 1];
        mom[0] = 1.0;
        for _ in 0..dim {
            let mut next = vec![0.0; k + 1];
            for (j, nj) in next.iter_mut().enumerate() {
                let mut binom = 1.0;
                for i in 0..=j {
                    *nj += binom * mom[j - i] * ym[i];
                    binom *= (j - i) as f64 / (i + 1) as f64;
                }
            }
            mom = next;
        }
        let integral = 4f64.powi(k as i32) * (mom[k] - threshold.powi(k as i32));
        if !(integral > 0.0) {
            return invalid(format!("∫ψ = {integral} is not positive for D = {dim}, rho = {rho}, k = {k}"));
        }
        Ok(TorusBallMinorant { dim, rho, k, k_default, threshold, integral })
    }

    fn cos_sum(x: &[f64]) -> f64 {
        x.iter().map(|t| (PI * t).cos().powi(2)).sum()
    }

    pub fn psi(&self, x: &[f64]) -> f64 {
        let k = self.k as i32;
        4f64.powi(k) * (Self::cos_sum(x).powi(k) - self.threshold.powi(k))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.psi(x) / self.integral
    }

    /// Coefficients of `(2D + Σ (e(x_i) + e(-x_i)))^k`, keyed by frequency. Only for tiny `(D, k)`.
    pub fn expansion(&self) -> Result<BTreeMap<Vec<i32>, f64>> {
        let terms = (2 * self.k + 1) as f64;
        if terms.powi(self.dim as i32) > 1e6 {
            return Err(Error::BudgetExceeded(format!("expansion for D = {}, k = {}", self.dim, self.k)));
        }
        let mut poly: BTreeMap<Vec<i32>, f64> = BTreeMap::new();
        poly.insert(vec![0; self.dim], 1.0);
        for _ in 0..self.k {
            let mut next: BTreeMap<Vec<i32>, f64> = BTreeMap::new();
            for (f, c) in &poly {
                *next.entry(f.clone()).or_insert(0.0) += 2.0 * self.dim as f64 * c;
                for i in 0..self.dim {
                    for s in [-1, 1] {
                        let mut g = f.clone();
                        g[i] += s;
                        *next.entry(g).or_insert(0.0) += c;
                    }
                }
            }
            poly = next;
        }
        Ok(poly)
    }

    pub fn report(&self, samples: usize, seed: u64) -> Result<TorusBallReport> {
        if self.dim > MAX_QUADRATURE_DIM {
            return invalid(format!("quadrature refused for D = {} > {MAX_QUADRATURE_DIM}", self.dim));
        }
        let mut rng = crate::rng::substream(seed, 1);
        let cut = self.rho.powf(7.0 / 6.0);
        let mut violations = 0;
        let mut taken = 0;
        // The region ‖x‖ > ρ^{7/6} is empty on T^D once ρ^{7/6} >= 1/2.
        let samples = if cut < 0.5 { samples } else { 0 };
        while taken < samples {
            let mut p: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
            if taken % 2 == 1 {
                // Points just outside the sup-norm ball.
                let i = rng.gen_range(0..self.dim);
                p[i] = cut * (1.0 + 1e-9) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                for (j, pj) in p.iter_mut().enumerate() {
                    if j != i {
                        *pj = rng.gen_range(-cut..=cut);
                    }
                }
            }
            if p.iter().fold(0f64, |a, t| a.max(t.abs())) <= cut {
                continue;
            }
            taken += 1;
            if Self::cos_sum(&p) > self.threshold {
                violations += 1;
            }
        }
        let n = 2 * self.k + 2;
        let total = (n as u64).checked_pow(self.dim as u32).unwrap_or(u64::MAX);
        if total > QUADRATURE_BUDGET {
            return Err(Error::BudgetExceeded(format!("{total} quadrature nodes")));
        }
        let mut quad = 0.0;
        let mut idx = vec![0usize; self.dim];
        let mut p = vec![0.0; self.dim];
        for _ in 0..total {
            for (pi, ii) in p.iter_mut().zip(&idx) {
                *pi = *ii as f64 / n as f64;
            }
            quad += self.eval(&p);
            for ii in idx.iter_mut() {
                *ii += 1;
                if *ii < n {
                    break;
                }
                *ii = 0;
            }
        }
        quad /= total as f64;
        let (checked, min_off, support_ok) = match self.expansion() {
            Ok(poly) => {
                let zero = vec![0; self.dim];
                let min_off = poly.iter().filter(|(f, _)| **f != zero).map(|(_, c)| *c).fold(f64::INFINITY, f64::min);
                let support_ok = poly.keys().all(|f| f.iter().map(|x| x.unsigned_abs() as usize).sum::<usize>() <= self.k);
                (true, min_off, support_ok)
            }
            Err(_) => (false, f64::NAN, true),
        };
        let value_at_zero = self.eval(&vec![0.0; self.dim]);
        Ok(TorusBallReport {
            dim: self.dim,
            rho: self.rho,
            k: self.k,
            k_default: self.k_default,
            value_at_zero,
            samples,
            sign_violations: violations,
            quadrature_integral: quad,
            fourier_checked: checked,
            fourier_min_off_zero: min_off,
            fourier_support_ok: support_ok,
            passes: violations == 0
                && (quad - 1.0).abs() < 1e-6
                && value_at_zero > 0.0
                && support_ok
                && (!checked || min_off >= 0.0),
        })
    }
}
