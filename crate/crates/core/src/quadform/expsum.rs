use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{enumerate, BcGrid, BoxSpec, QuadForm};
use crate::cutoffs::{FourierProfile, Weight};
use crate::error::{invalid, Error, Result};
use crate::quad::{breakpoints, GaussLegendre};
use crate::rng::substream;

fn e(x: f64) -> Complex64 {
    let (s, c) = (2.0 * PI * x).sin_cos();
    Complex64::new(c, s)
}

/// `S(ξ) = ∫ w^{⊗s}(t) e(ξ q(t)) dμ_disc(t)` over the uniform measure on the box points.
pub fn exp_sum_discrete(q: &QuadForm, bx: &BoxSpec, w: &dyn Weight, xi: f64) -> Result<Complex64> {
    if q.s != bx.dim() {
        return invalid(format!("form has s = {} but the box has {} lengths", q.s, bx.dim()));
    }
    bx.check_budget()?;
    let t = bx.grid();
    let wv: Vec<Vec<f64>> = t.iter().map(|v| v.iter().map(|x| w.eval(*x)).collect()).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    enumerate(q, &t, &wv, |wt, v| acc += wt * e(xi * v));
    Ok(acc / bx.points() as f64)
}

/// Composite Gauss–Legendre settings for the continuous sum. Each smooth piece of `w`
/// starts with `panels` sub-panels, doubled until successive estimates agree to `tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub order: usize,
    pub panels: usize,
    pub max_panels: usize,
    pub tol: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { order: 10, panels: 1, max_panels: 256, tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousSum {
    pub re: f64,
    pub im: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

impl ContinuousSum {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

const TENSOR_BUDGET: u64 = 50_000_000;

fn tensor_rule(q: &QuadForm, w: &dyn Weight, xi: f64, g: &GaussLegendre, panels: usize) -> Result<Complex64> {
    let br = breakpoints(0.0, 1.0, &w.breakpoints());
    let (xs, ws) = g.composite(&br, panels);
    let n = (xs.len() as u64).checked_pow(q.s as u32).unwrap_or(u64::MAX);
    if n > TENSOR_BUDGET {
        return Err(Error::BudgetExceeded(format!("{n} tensor quadrature nodes")));
    }
    let wq: Vec<f64> = xs.iter().zip(&ws).map(|(x, wt)| wt * w.eval(*x)).collect();
    let t = vec![xs; q.s];
    let wv = vec![wq; q.s];
    let mut acc = Complex64::new(0.0, 0.0);
    enumerate(q, &t, &wv, |wt, v| acc += wt * e(xi * v));
    Ok(acc)
}

/// `T(ξ) = ∫ w^{⊗s}(t) e(ξ q(t)) dt` by tensor Gauss–Legendre quadrature.
pub fn exp_sum_continuous(q: &QuadForm, w: &dyn Weight, xi: f64, quad: &Quadrature) -> Result<ContinuousSum> {
    if quad.order == 0 || quad.panels == 0 {
        return invalid("quadrature order and panel count must be positive");
    }
    let g = GaussLegendre::new(quad.order);
    let mut p = quad.panels;
    let mut prev = tensor_rule(q, w, xi, &g, p)?;
    loop {
        if 2 * p > quad.max_panels {
            return Err(Error::NonConvergence(format!("T({xi}) not resolved with {} panels per piece", quad.max_panels)));
        }
        p *= 2;
        let cur = tensor_rule(q, w, xi, &g, p)?;
        let err = (cur - prev).norm();
        if err < quad.tol {
            return Ok(ContinuousSum { re: cur.re, im: cur.im, error_estimate: err, panels: p });
        }
        prev = cur;
    }
}

/// Nodes for the `ξ` integral over `[0, xi_max]`. Without `xi_max` the Fourier support of
/// `χ` is used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiGrid {
    pub xi_max: Option<f64>,
    pub panels: usize,
    pub order: usize,
}

impl Default for XiGrid {
    fn default() -> Self {
        XiGrid { xi_max: None, panels: 4, order: 12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub q: f64,
    pub b_exp: f64,
    pub grid: BcGrid,
    pub xi: XiGrid,
    pub quad: Quadrature,
    /// Largest admissible contribution of the transform beyond `xi_max`.
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub max_difference: f64,
    pub argmax_b: Vec<f64>,
    pub argmax_c: f64,
    pub differences: Vec<f64>,
    /// `L^{-B-1/4}`.
    pub bound: f64,
    pub within_bound: bool,
    pub xi_max: f64,
    pub xi_nodes: usize,
    pub tail: f64,
    pub quadrature_error: f64,
}

/// `max_{b,c} |∫ w^{⊗s} χ(q_{a,b,c}) dμ - ∫ w^{⊗s} χ(q_{a,b,c}) dμ_disc|`, computed as
/// `∫ χ̂(ξ) (T(ξ) - S(ξ)) dξ` over the `ξ` grid.
pub fn cont_disc_compare(
    a: &QuadForm,
    bx: &BoxSpec,
    w: &dyn Weight,
    chi: &dyn FourierProfile,
    cfg: &CompareConfig,
    seed: u64,
) -> Result<CompareReport> {
    let r = match (chi.fourier_support(), cfg.xi.xi_max) {
        (Some(s), None) => s,
        (Some(s), Some(x)) => x.min(s),
        (None, Some(x)) => x,
        (None, None) => return invalid("xi_max is required when the transform of chi has unbounded support"),
    };
    let tail = chi.fourier_tail(r);
    // |T - S| <= 2 sup w^{⊗s}, and the tail counts on both sides of the origin.
    if 2.0 * tail > cfg.tolerance {
        return invalid(format!("xi grid too coarse: tail {tail:.3e} beyond {r} exceeds tolerance {}", cfg.tolerance));
    }
    if cfg.xi.panels == 0 || cfg.xi.order == 0 {
        return invalid("xi grid needs positive panel count and order");
    }
    let (nodes, weights) = if r > 0.0 {
        let kinks: Vec<f64> = chi.fourier_kinks();
        GaussLegendre::new(cfg.xi.order).composite(&breakpoints(0.0, r, &kinks), cfg.xi.panels)
    } else {
        (Vec::new(), Vec::new())
    };
    let chat: Vec<f64> = nodes.iter().map(|x| chi.fourier(*x)).collect();
    let mut rng = substream(seed, 0);
    let combos = cfg.grid.combos(&a.diagonal(), cfg.q, &mut rng)?;
    let atom = chi.atom();
    let mut differences = Vec::with_capacity(combos.len());
    let mut best = (f64::NEG_INFINITY, 0usize);
    let mut qerr: f64 = 0.0;
    let mut cache: Vec<(Vec<f64>, Complex64, Vec<Complex64>)> = Vec::new();
    for (idx, (b, c)) in combos.iter().enumerate() {
        if !cache.iter().any(|(cb, _, _)| cb == b) {
            let qb = a.with_bc(b.clone(), 0.0);
            let d0 = if atom != 0.0 {
                exp_sum_continuous(&qb, w, 0.0, &cfg.quad)?.value() - exp_sum_discrete(&qb, bx, w, 0.0)?
            } else {
                Complex64::new(0.0, 0.0)
            };
            let ds = nodes
                .par_iter()
                .map(|xi| {
                    let t = exp_sum_continuous(&qb, w, *xi, &cfg.quad)?;
                    Ok((t.value() - exp_sum_discrete(&qb, bx, w, *xi)?, t.error_estimate))
                })
                .collect::<Result<Vec<_>>>()?;
            qerr = ds.iter().fold(qerr, |m, (_, e)| m.max(*e));
            cache.push((b.clone(), d0, ds.into_iter().map(|(d, _)| d).collect()));
        }
        let (_, d0, ds) = cache.iter().find(|(cb, _, _)| cb == b).unwrap();
        let mut v = atom * d0.re;
        for k in 0..nodes.len() {
            v += 2.0 * weights[k] * chat[k] * (e(nodes[k] * c) * ds[k]).re;
        }
        let v = v.abs();
        if v > best.0 {
            best = (v, idx);
        }
        differences.push(v);
    }
    let bound = bx.base.powf(-cfg.b_exp - 0.25);
    let (b, c) = combos.get(best.1).cloned().unwrap_or_default();
    Ok(CompareReport {
        max_difference: best.0.max(0.0),
        argmax_b: b,
        argmax_c: c,
        differences,
        bound,
        within_bound: best.0 <= bound,
        xi_max: r,
        xi_nodes: nodes.len(),
        tail,
        quadrature_error: qerr,
    })
}
