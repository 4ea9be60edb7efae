//! Smooth cutoffs on `R`, `Z` and `T^D` in closed form, with property reports.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quad::{breakpoints, GaussLegendre};

mod torus;

pub use torus::{TorusBallMinorant, TorusBallReport, TorusBoxCutoff, TorusBoxReport, MAX_QUADRATURE_DIM};

/// A weight supported on `[0, 1]`, as used for the smoothed box sums.
pub trait Weight: Sync {
    fn eval(&self, x: f64) -> f64;
    /// Points where the weight fails to be smooth, in `[0, 1]`.
    fn breakpoints(&self) -> Vec<f64>;
}

/// An even profile `χ` on `R` with an explicit Fourier transform
/// `χ̂(ξ) = ∫ χ(x) e(-xξ) dx`.
pub trait FourierProfile: Sync {
    fn eval(&self, x: f64) -> f64;
    /// Absolutely continuous part of `χ̂`.
    fn fourier(&self, xi: f64) -> f64;
    /// Radius outside which `χ̂` vanishes, if any.
    fn fourier_support(&self) -> Option<f64>;
    /// Bound on `∫_{|ξ| > r} |χ̂(ξ)| dξ`.
    fn fourier_tail(&self, r: f64) -> f64;
    /// Points where `χ̂` fails to be smooth.
    fn fourier_kinks(&self) -> Vec<f64> {
        vec![0.0]
    }
    /// Mass of a Dirac atom of `χ̂` at `ξ = 0`.
    fn atom(&self) -> f64 {
        0.0
    }
}

/// Antiderivative of the triangle `(h - |x|)_+`.
fn tri_cdf(x: f64, h: f64) -> f64 {
    if x <= -h {
        0.0
    } else if x <= 0.0 {
        0.5 * (x + h) * (x + h)
    } else if x < h {
        h * h - 0.5 * (h - x) * (h - x)
    } else {
        h * h
    }
}

fn tri(x: f64, h: f64) -> f64 {
    (h - x.abs()).max(0.0)
}

/// `sin(πaξ) / (πξ)`, the transform of `1_{[-a/2, a/2]}`.
fn box_ft(a: f64, xi: f64) -> f64 {
    let t = PI * xi;
    if t.abs() < 1e-8 {
        a * (1.0 - (t * a).powi(2) / 6.0)
    } else {
        (t * a).sin() / t
    }
}

/// `w = (4/η²) 1_{[η/2, 1-η/2]} * 1_{[-η/4, η/4]} * 1_{[-η/4, η/4]}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tent {
    pub eta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TentReport {
    pub eta: f64,
    pub support_ok: bool,
    pub plateau_ok: bool,
    pub range_ok: bool,
    pub max_derivative: f64,
    /// `η · max |w'|`.
    pub derivative_constant: f64,
    pub passes: bool,
}

impl Tent {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta < 0.5) {
            return invalid(format!("tent needs 0 < eta < 1/2, got {eta}"));
        }
        Ok(Tent { eta })
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            return 0.0;
        }
        let h = self.eta / 2.0;
        let v = (4.0 / (self.eta * self.eta)) * (tri_cdf(x - h, h) - tri_cdf(x - (1.0 - h), h));
        v.clamp(0.0, 1.0)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let h = self.eta / 2.0;
        (4.0 / (self.eta * self.eta)) * (tri(x - h, h) - tri(x - (1.0 - h), h))
    }

    /// Checks on a grid of `points` samples, with `max |w'|` from finite differences.
    pub fn report(&self, points: usize) -> TentReport {
        let eta = self.eta;
        let mut support_ok = true;
        let mut plateau_ok = true;
        let mut range_ok = true;
        let mut max_d: f64 = 0.0;
        let step = 1.4 / points as f64;
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..=points {
            let x = -0.2 + i as f64 * step;
            let v = self.eval(x);
            if !(0.0..=1.0).contains(&v) {
                range_ok = false;
            }
            if (x <= 0.0 || x >= 1.0) && v != 0.0 {
                support_ok = false;
            }
            if x >= eta && x <= 1.0 - eta && v != 1.0 {
                plateau_ok = false;
            }
            if let Some((px, pv)) = prev {
                max_d = max_d.max(((v - pv) / (x - px)).abs());
            }
            prev = Some((x, v));
        }
        let k = max_d * eta;
        TentReport {
            eta,
            support_ok,
            plateau_ok,
            range_ok,
            max_derivative: max_d,
            derivative_constant: k,
            passes: support_ok && plateau_ok && range_ok && (1.0..=20.0).contains(&k),
        }
    }
}

impl Weight for Tent {
    fn eval(&self, x: f64) -> f64 {
        Tent::eval(self, x)
    }
    fn breakpoints(&self) -> Vec<f64> {
        let e = self.eta;
        vec![0.0, e / 2.0, e, 1.0 - e, 1.0 - e / 2.0, 1.0]
    }
}

/// `w ≡ 1` on `[0, 1)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitBox;

impl Weight for UnitBox {
    fn eval(&self, x: f64) -> f64 {
        if (0.0..1.0).contains(&x) {
            1.0
        } else {
            0.0
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        vec![0.0, 1.0]
    }
}

/// `w = (25/X) 1 * 1` on `Z`, with `1` the indicator of `[-X/10, X/10]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FejerWeight {
    pub x: f64,
    pub k: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FejerReport {
    pub x: f64,
    pub support_radius: i64,
    pub support_ok: bool,
    pub total: f64,
    pub total_ge_x: bool,
    pub dc_matches: bool,
    pub min_fourier: f64,
    pub bound_violations: usize,
    pub grid: usize,
    pub passes: bool,
}

impl FejerWeight {
    pub fn new(x: f64) -> Result<Self> {
        if !(x >= 10.0) || !x.is_finite() {
            return invalid(format!("Fejér weight needs X >= 10, got {x}"));
        }
        Ok(FejerWeight { x, k: (x / 10.0).floor() as i64 })
    }

    pub fn weight(&self, n: i64) -> f64 {
        let c = 2 * self.k + 1 - n.abs();
        if c <= 0 {
            0.0
        } else {
            25.0 / self.x * c as f64
        }
    }

    pub fn support_radius(&self) -> i64 {
        2 * self.k
    }

    pub fn total(&self) -> f64 {
        let m = (2 * self.k + 1) as f64;
        25.0 / self.x * m * m
    }

    /// `ŵ(β) = Σ_n w(n) e(-βn)`, computed as a squared modulus.
    pub fn fourier(&self, beta: f64) -> f64 {
        let m = (2 * self.k + 1) as f64;
        let s = (PI * beta).sin();
        let d = if s.abs() < 1e-12 { m } else { (PI * m * beta).sin() / s };
        25.0 / self.x * d * d
    }

    pub fn report(&self, grid: usize) -> FejerReport {
        let r = self.support_radius();
        let support_ok = r as f64 <= self.x / 5.0 && self.weight(r + 1) == 0.0 && self.weight(-r - 1) == 0.0;
        let direct: f64 = (-r..=r).map(|n| self.weight(n)).sum();
        let total = self.total();
        let dc_matches = (self.fourier(0.0) - direct).abs() <= 1e-9 * direct;
        let mut min_f = f64::INFINITY;
        let mut violations = 0;
        for j in 0..grid {
            let beta = j as f64 / grid as f64;
            let f = self.fourier(beta);
            min_f = min_f.min(f);
            let dist = beta.min(1.0 - beta);
            if dist > 0.0 && f.abs() > 32.0 / (self.x * dist * dist) * (1.0 + 1e-12) {
                violations += 1;
            }
        }
        FejerReport {
            x: self.x,
            support_radius: r,
            support_ok,
            total,
            total_ge_x: total >= self.x,
            dc_matches,
            min_fourier: min_f,
            bound_violations: violations,
            grid,
            passes: support_ok && total >= self.x && dc_matches && min_f >= 0.0 && violations == 0,
        }
    }
}

/// `χ_δ(x) = ψ(x/δ)` with `ψ = 16 · 1_{[-3/4, 3/4]} * 1_{[-1/8, 1/8]} * 1_{[-1/8, 1/8]}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalMajorant {
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntervalReport {
    pub delta: f64,
    pub plateau_ok: bool,
    pub support_ok: bool,
    /// `∫χ / δ` by quadrature.
    pub integral_ratio: f64,
    /// Smallest `K` with `|ψ̂(u)| <= K min(1, |u|^-3)` on the sample grid.
    pub decay_constant: f64,
    pub fourier_matches: bool,
    pub passes: bool,
}

impl IntervalMajorant {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return invalid(format!("interval majorant needs 0 < delta < 1, got {delta}"));
        }
        Ok(IntervalMajorant { delta })
    }

    pub fn psi(u: f64) -> f64 {
        if u.abs() >= 1.0 {
            return 0.0;
        }
        16.0 * (tri_cdf(u + 0.75, 0.25) - tri_cdf(u - 0.75, 0.25))
    }

    pub fn psi_hat(u: f64) -> f64 {
        let s = box_ft(0.25, u);
        16.0 * box_ft(1.5, u) * s * s
    }

    pub fn report(&self) -> IntervalReport {
        let d = self.delta;
        let mut plateau_ok = true;
        let mut support_ok = true;
        for i in 0..=2000 {
            let x = -1.5 * d + 3.0 * d * i as f64 / 2000.0;
            let v = self.eval(x);
            if x.abs() <= d / 2.0 && v < 1.0 {
                plateau_ok = false;
            }
            if x.abs() > d && v != 0.0 {
                support_ok = false;
            }
        }
        let g = GaussLegendre::new(8);
        let kinks: Vec<f64> = [-1.0, -0.75, -0.5, 0.5, 0.75, 1.0].iter().map(|k| k * d).collect();
        let br = breakpoints(-d, d, &kinks);
        let integral: f64 = br.windows(2).map(|p| g.integrate(p[0], p[1], |x| self.eval(x))).sum();
        let (xs, ws) = g.composite(&[0.0, 0.5, 0.75, 1.0], 16);
        let mut k: f64 = 0.0;
        let mut fourier_matches = true;
        for i in 0..4000 {
            let u = i as f64 * 0.01;
            let v = Self::psi_hat(u).abs();
            k = k.max(v / 1f64.min(u.powi(-3)));
            if i % 50 == 0 && u <= 5.0 {
                let numeric: f64 = xs.iter().zip(&ws).map(|(x, w)| 2.0 * w * Self::psi(*x) * (2.0 * PI * u * x).cos()).sum();
                if (numeric - Self::psi_hat(u)).abs() > 1e-9 {
                    fourier_matches = false;
                }
            }
        }
        let ratio = integral / d;
        IntervalReport {
            delta: d,
            plateau_ok,
            support_ok,
            integral_ratio: ratio,
            decay_constant: k,
            fourier_matches,
            passes: plateau_ok && support_ok && (1.0..=5.0).contains(&ratio) && k.is_finite() && fourier_matches,
        }
    }
}

impl FourierProfile for IntervalMajorant {
    fn eval(&self, x: f64) -> f64 {
        Self::psi(x / self.delta)
    }
    fn fourier(&self, xi: f64) -> f64 {
        self.delta * Self::psi_hat(self.delta * xi)
    }
    fn fourier_support(&self) -> Option<f64> {
        None
    }
    fn fourier_tail(&self, r: f64) -> f64 {
        let u = self.delta * r;
        if u <= 0.0 {
            f64::INFINITY
        } else {
            16.0 / (PI.powi(3) * u * u)
        }
    }
}

/// `ψ(x) = sin²x / (x² sin²1)`, whose transform is supported in `|ξ| <= 1/π`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BandLimitedMinorant;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinorantReport {
    pub value_at_zero: f64,
    pub nonnegative: bool,
    pub at_least_one_on_unit: bool,
    pub integral: f64,
    pub fourier_support: f64,
    /// Largest deviation of a numerical transform from the closed form.
    pub fourier_error: f64,
    pub passes: bool,
}

impl BandLimitedMinorant {
    pub fn psi(x: f64) -> f64 {
        let s1 = 1f64.sin();
        if x.abs() < 1e-8 {
            return (1.0 - x * x / 3.0) / (s1 * s1);
        }
        let r = x.sin() / x;
        r * r / (s1 * s1)
    }

    pub fn psi_hat(xi: f64) -> f64 {
        let s1 = 1f64.sin();
        PI * (1.0 - PI * xi.abs()).max(0.0) / (s1 * s1)
    }

    pub fn report(&self) -> MinorantReport {
        let mut nonneg = true;
        let mut ge_one = true;
        for i in 0..=20000 {
            let x = -50.0 + i as f64 * 0.005;
            let v = Self::psi(x);
            if v < 0.0 {
                nonneg = false;
            }
            if x.abs() <= 1.0 && v < 1.0 - 1e-15 {
                ge_one = false;
            }
        }
        // Quadrature over [0, R] with R a multiple of π, plus the averaged tail ∫_R^∞ 1/(2x²).
        let g = GaussLegendre::new(16);
        let r = 4000.0 * PI;
        let s1 = 1f64.sin();
        let (xs, ws) = g.composite(&[0.0, r], 16000);
        let panels = |f: &dyn Fn(f64) -> f64| -> f64 { xs.iter().zip(&ws).map(|(x, w)| w * f(*x)).sum() };
        let integral = 2.0 * (panels(&Self::psi) + 1.0 / (2.0 * r * s1 * s1));
        let mut err: f64 = 0.0;
        for &xi in &[0.0, 0.05, 0.1, 0.2, 0.3, 0.5, 1.0, 2.0] {
            let numeric = 2.0 * panels(&|x| Self::psi(x) * (2.0 * PI * xi * x).cos()) + if xi == 0.0 { 1.0 / (r * s1 * s1) } else { 0.0 };
            err = err.max((numeric - Self::psi_hat(xi)).abs());
        }
        MinorantReport {
            value_at_zero: Self::psi(0.0),
            nonnegative: nonneg,
            at_least_one_on_unit: ge_one,
            integral,
            fourier_support: 1.0 / PI,
            fourier_error: err,
            passes: nonneg && ge_one && (3.0..=5.0).contains(&integral) && err < 1e-3,
        }
    }
}

impl FourierProfile for BandLimitedMinorant {
    fn eval(&self, x: f64) -> f64 {
        Self::psi(x)
    }
    fn fourier(&self, xi: f64) -> f64 {
        Self::psi_hat(xi)
    }
    fn fourier_support(&self) -> Option<f64> {
        Some(1.0 / PI)
    }
    fn fourier_tail(&self, r: f64) -> f64 {
        if r >= 1.0 / PI {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn fourier_kinks(&self) -> Vec<f64> {
        vec![-1.0 / PI, 0.0, 1.0 / PI]
    }
}

/// `x ↦ χ(x/δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dilated<P> {
    pub profile: P,
    pub delta: f64,
}

impl<P: FourierProfile> FourierProfile for Dilated<P> {
    fn eval(&self, x: f64) -> f64 {
        self.profile.eval(x / self.delta)
    }
    fn fourier(&self, xi: f64) -> f64 {
        self.delta * self.profile.fourier(self.delta * xi)
    }
    fn fourier_support(&self) -> Option<f64> {
        self.profile.fourier_support().map(|r| r / self.delta)
    }
    fn fourier_tail(&self, r: f64) -> f64 {
        self.profile.fourier_tail(r * self.delta)
    }
    fn fourier_kinks(&self) -> Vec<f64> {
        self.profile.fourier_kinks().iter().map(|k| k / self.delta).collect()
    }
    fn atom(&self) -> f64 {
        self.delta * self.profile.atom()
    }
}

/// The constant profile, whose transform is an atom at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constant(pub f64);

impl FourierProfile for Constant {
    fn eval(&self, _x: f64) -> f64 {
        self.0
    }
    fn fourier(&self, _xi: f64) -> f64 {
        0.0
    }
    fn fourier_support(&self) -> Option<f64> {
        Some(0.0)
    }
    fn fourier_tail(&self, _r: f64) -> f64 {
        0.0
    }
    fn atom(&self) -> f64 {
        self.0
    }
}

/// Reports for all six constructions at fixed demonstration parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CutoffSuite {
    pub tent: TentReport,
    pub fejer: FejerReport,
    pub interval: IntervalReport,
    pub minorant: MinorantReport,
    pub torus_box: TorusBoxReport,
    pub torus_ball: TorusBallReport,
}

impl CutoffSuite {
    pub fn all_pass(&self) -> bool {
        self.tent.passes
            && self.fejer.passes
            && self.interval.passes
            && self.minorant.passes
            && self.torus_box.passes
            && self.torus_ball.passes
    }
}

pub fn cutoff_suite(seed: u64) -> Result<CutoffSuite> {
    Ok(CutoffSuite {
        tent: Tent::new(0.1)?.report(100_000),
        fejer: FejerWeight::new(100.0)?.report(10_000),
        interval: IntervalMajorant::new(0.1)?.report(),
        minorant: BandLimitedMinorant.report(),
        torus_box: TorusBoxCutoff::new(16.0, 2)?.report(2000, seed)?,
        torus_ball: TorusBallMinorant::new(2, 0.5, Some(50))?.report(2000, seed)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tri_cdf_total_mass() {
        assert_eq!(tri_cdf(1.0, 0.25), 0.0625);
        assert_eq!(tri_cdf(-1.0, 0.25), 0.0);
        assert!((tri_cdf(0.0, 0.25) - 0.03125).abs() < 1e-16);
    }

    #[test]
    fn psi_hat_at_zero() {
        assert!((IntervalMajorant::psi_hat(0.0) - 1.5).abs() < 1e-12);
        assert_eq!(IntervalMajorant::psi(0.0), 1.0);
    }
}
