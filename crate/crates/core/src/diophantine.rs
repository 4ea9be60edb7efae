//! Checks of the two conditions under which a frequency `θ ∈ T^D` counts as diophantine:
//! few small frequencies `ξ` with `n ξ·θ` near an integer, and no concentration of the
//! orbit `θ d n` near the origin.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::{for_each_box_point, rational_rank, BOX_BUDGET};
use crate::rng::substream;
use crate::torus::{circle_norm, mul_mod1, TorusPoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdRule {
    /// `X^{9/10}`.
    Standard,
    /// `N^{1/(10r)}`, the stricter variant for the alternative definition of the
    /// admissible set.
    Alternative,
}

impl std::str::FromStr for ThresholdRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(ThresholdRule::Standard),
            "alternative" => Ok(ThresholdRule::Alternative),
            _ => Err(Error::InvalidArgument(format!("threshold: unknown rule '{s}' (standard, alternative)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DioParams {
    pub n: u64,
    pub r: u32,
    #[serde(rename = "D")]
    pub dim: usize,
    pub xi_bound: i64,
    pub phase_tolerance: f64,
    pub concentration_threshold: f64,
    pub ball_radius: f64,
}

impl DioParams {
    /// `X = N^{1/r}`.
    pub fn x(&self) -> f64 {
        (self.n as f64).powf(1.0 / self.r as f64)
    }

    /// `|ξ| <= D^{C_2}`, tolerance `D^{C_2 D} / X`, threshold by `rule`, radius `X^{-1/D}`.
    pub fn standard(n: u64, r: u32, dim: usize, c2: f64, rule: ThresholdRule) -> Self {
        let d = dim as f64;
        let x = (n as f64).powf(1.0 / r as f64);
        let concentration_threshold = match rule {
            ThresholdRule::Standard => x.powf(0.9),
            ThresholdRule::Alternative => (n as f64).powf(1.0 / (10.0 * r as f64)),
        };
        DioParams {
            n,
            r,
            dim,
            xi_bound: d.powf(c2).floor() as i64,
            phase_tolerance: d.powf(c2 * d) / x,
            concentration_threshold,
            ball_radius: x.powf(-1.0 / d),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 || self.r < 1 || self.dim < 1 {
            return invalid("need N, r, D >= 1");
        }
        if self.xi_bound < 0 || !(self.phase_tolerance >= 0.0) || !(self.ball_radius >= 0.0) {
            return invalid("bounds must be nonnegative");
        }
        Ok(())
    }
}

/// The values of `n` at which condition one is tested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NSample {
    pub values: Vec<u64>,
    /// Fraction of `[1, N]` covered.
    pub coverage: f64,
    pub exhaustive: bool,
}

impl NSample {
    /// Powers of two up to `N` together with `extra` uniform draws; all of `[1, N]` when
    /// that is no larger.
    pub fn ladder(n_max: u64, extra: usize, seed: u64) -> Self {
        let ladder_len = 64 - n_max.leading_zeros() as u64;
        if n_max <= ladder_len + extra as u64 {
            return NSample { values: (1..=n_max).collect(), coverage: 1.0, exhaustive: true };
        }
        let mut v: Vec<u64> = std::iter::successors(Some(1u64), |&p| p.checked_mul(2)).take_while(|&p| p <= n_max).collect();
        let mut rng = substream(seed, 0xd10);
        v.extend((0..extra).map(|_| rng.gen_range(1..=n_max)));
        v.sort_unstable();
        v.dedup();
        let coverage = v.len() as f64 / n_max as f64;
        NSample { values: v, coverage, exhaustive: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionOneWitness {
    pub n: u64,
    /// Linearly independent frequencies with `‖n ξ·θ‖ <= tolerance`.
    pub xis: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionOne {
    pub checked: usize,
    pub coverage: f64,
    pub exhaustive: bool,
    pub max_rank: usize,
    pub rank_limit: usize,
    pub passes: bool,
    pub witness: Option<ConditionOneWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionTwoWitness {
    pub d: u64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionTwo {
    pub d_checked: u64,
    pub d_range: (u64, u64),
    pub max_count: u64,
    pub argmax_d: u64,
    pub threshold: f64,
    pub passes: bool,
    pub witness: Option<ConditionTwoWitness>,
}

/// Full diophantine report; witnesses can be replayed with [`verify_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DioReport {
    pub theta: TorusPoint,
    pub params: DioParams,
    pub condition_one: Option<ConditionOne>,
    pub condition_two: Option<ConditionTwo>,
    pub diophantine: bool,
}

fn phase(ntheta: &[f64], xi: &[i64]) -> f64 {
    ntheta.iter().zip(xi).map(|(&y, &k)| mul_mod1(y, k)).sum::<f64>()
}

/// Independent frequencies `ξ` with `|ξ| <= xi_bound` and `‖n ξ·θ‖ <= tol`, greedily in
/// lexicographic order, together with the rank of the whole set.
fn small_frequencies(theta: &TorusPoint, n: u64, p: &DioParams) -> Result<Vec<Vec<i64>>> {
    let ntheta = theta.scale(n as i64).0;
    let mut basis: Vec<Vec<i64>> = Vec::new();
    let dim = theta.dim();
    for_each_box_point(dim, p.xi_bound, |xi| {
        if basis.len() == dim || xi.iter().all(|&v| v == 0) {
            return;
        }
        if circle_norm(phase(&ntheta, xi)) <= p.phase_tolerance {
            let mut rows = basis.clone();
            rows.push(xi.to_vec());
            if rational_rank(&rows) > basis.len() {
                basis.push(xi.to_vec());
            }
        }
    })?;
    Ok(basis)
}

fn guard(p: &DioParams) -> Result<()> {
    let size = ((2 * p.xi_bound + 1) as f64).powi(p.dim as i32);
    if size > BOX_BUDGET {
        return Err(Error::BudgetExceeded(format!("(2 xi_bound + 1)^D = {size:.3e} exceeds {BOX_BUDGET:e}")));
    }
    Ok(())
}

/// Condition one: for each sampled `n`, the frequencies `ξ` with `|ξ| <= xi_bound` and
/// `‖n ξ·θ‖ <= tol` span a space of dimension less than `4r`.
pub fn check_condition_one(theta: &TorusPoint, p: &DioParams, sample: &NSample) -> Result<ConditionOne> {
    p.validate()?;
    if theta.dim() != p.dim {
        return invalid("θ has the wrong dimension");
    }
    guard(p)?;
    let limit = 4 * p.r as usize;
    let mut max_rank = 0;
    let mut witness = None;
    for &n in &sample.values {
        let basis = small_frequencies(theta, n, p)?;
        max_rank = max_rank.max(basis.len());
        if basis.len() >= limit && witness.is_none() {
            witness = Some(ConditionOneWitness { n, xis: basis });
        }
    }
    Ok(ConditionOne {
        checked: sample.values.len(),
        coverage: sample.coverage,
        exhaustive: sample.exhaustive,
        max_rank,
        rank_limit: limit,
        passes: witness.is_none(),
        witness,
    })
}

fn count_near_origin(theta: &TorusPoint, d: u64, x: u64, radius: f64) -> u64 {
    let alpha = theta.scale(d as i64);
    (1..=x).filter(|&n| alpha.scale(n as i64).norm() <= radius).count() as u64
}

/// Condition two: for each `d` in `d_range`, `#{n <= X : ‖θ d n‖ <= X^{-1/D}}` is at most
/// the concentration threshold.
pub fn check_condition_two(theta: &TorusPoint, p: &DioParams, d_range: (u64, u64)) -> Result<ConditionTwo> {
    p.validate()?;
    if theta.dim() != p.dim {
        return invalid("θ has the wrong dimension");
    }
    let (lo, hi) = d_range;
    if lo < 1 || hi < lo {
        return invalid("d range must satisfy 1 <= lo <= hi");
    }
    let x = p.x().floor() as u64;
    if (hi - lo + 1) as f64 * x as f64 > 1e10 {
        return Err(Error::BudgetExceeded("d range times X exceeds 1e10 evaluations".into()));
    }
    let mut max_count = 0;
    let mut argmax_d = lo;
    let mut witness = None;
    for d in lo..=hi {
        let c = count_near_origin(theta, d, x, p.ball_radius);
        if c > max_count {
            max_count = c;
            argmax_d = d;
        }
        if c as f64 > p.concentration_threshold && witness.is_none() {
            witness = Some(ConditionTwoWitness { d, count: c });
        }
    }
    Ok(ConditionTwo {
        d_checked: hi - lo + 1,
        d_range,
        max_count,
        argmax_d,
        threshold: p.concentration_threshold,
        passes: witness.is_none(),
        witness,
    })
}

pub fn dio_report(theta: &TorusPoint, p: &DioParams, sample: &NSample, d_range: (u64, u64)) -> Result<DioReport> {
    let one = check_condition_one(theta, p, sample)?;
    let two = check_condition_two(theta, p, d_range)?;
    Ok(DioReport {
        diophantine: one.passes && two.passes,
        theta: theta.clone(),
        params: p.clone(),
        condition_one: Some(one),
        condition_two: Some(two),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub condition_one: Option<bool>,
    pub condition_two: Option<bool>,
}

impl WitnessCheck {
    pub fn all_confirmed(&self) -> bool {
        self.condition_one.unwrap_or(true) && self.condition_two.unwrap_or(true)
    }
}

/// Recomputes every witness carried by a report. `Some(true)` means the witness shows the
/// condition really fails.
pub fn verify_report(report: &DioReport) -> Result<WitnessCheck> {
    let p = &report.params;
    p.validate()?;
    let c1 = match report.condition_one.as_ref().and_then(|c| c.witness.as_ref()) {
        None => None,
        Some(w) => {
            let ntheta = report.theta.scale(w.n as i64).0;
            let small = w.xis.iter().all(|xi| {
                xi.len() == p.dim
                    && xi.iter().all(|v| v.abs() <= p.xi_bound)
                    && circle_norm(phase(&ntheta, xi)) <= p.phase_tolerance
            });
            Some(small && rational_rank(&w.xis) >= 4 * p.r as usize)
        }
    };
    let c2 = match report.condition_two.as_ref().and_then(|c| c.witness.as_ref()) {
        None => None,
        Some(w) => {
            let x = p.x().floor() as u64;
            let c = count_near_origin(&report.theta, w.d, x, p.ball_radius);
            Some(c == w.count && c as f64 > p.concentration_threshold)
        }
    };
    Ok(WitnessCheck { condition_one: c1, condition_two: c2 })
}
