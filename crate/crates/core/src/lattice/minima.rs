//! Successive minima of a lattice with respect to a centred box.

use serde::{Deserialize, Serialize};

use super::intmat::rational_rank;
use crate::error::{invalid, Error, Result};

/// Largest dimension handled by exact enumeration.
pub const MAX_EXACT_DIM: usize = 8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinimaConfig {
    /// Maximum number of enumeration nodes per minimum.
    pub node_budget: u64,
    pub lll_delta: f64,
}

impl Default for MinimaConfig {
    fn default() -> Self {
        MinimaConfig { node_budget: 50_000_000, lll_delta: 0.99 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuccessiveMinima {
    pub lambdas: Vec<f64>,
    /// `b_i ∈ λ_i K`, in ambient coordinates.
    pub vectors: Vec<Vec<f64>>,
    /// Integer coordinates of `b_i` in the input basis.
    pub coeffs: Vec<Vec<i64>>,
    /// `|det B|`.
    pub covolume: f64,
    /// `vol(K)`.
    pub body_volume: f64,
    pub nodes: u64,
}

impl SuccessiveMinima {
    /// `λ_1 ... λ_n vol(K) / (2^n det Λ)`, at most 1 by Minkowski's second theorem.
    pub fn minkowski_ratio(&self) -> f64 {
        let n = self.lambdas.len() as i32;
        self.lambdas.iter().product::<f64>() * self.body_volume / (2f64.powi(n) * self.covolume)
    }

    /// `λ_1 ... λ_n vol(K) n! / (2^n det Λ)`, at least 1.
    pub fn minkowski_lower_ratio(&self) -> f64 {
        let n = self.lambdas.len();
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        self.minkowski_ratio() * fact
    }
}

/// Box norm `max_j |v_j| / k_j`.
pub fn box_norm(v: &[f64], half_widths: &[f64]) -> f64 {
    v.iter().zip(half_widths).map(|(x, k)| (x / k).abs()).fold(0.0, f64::max)
}

fn gram_schmidt(b: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<f64>) {
    let n = b.len();
    let mut bs: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut mu = vec![vec![0.0; n]; n];
    let mut norms = vec![0.0; n];
    for i in 0..n {
        let mut v = b[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&b[i], &bs[j]) / norms[j];
            for (x, y) in v.iter_mut().zip(&bs[j]) {
                *x -= mu[i][j] * y;
            }
        }
        norms[i] = dot(&v, &v);
        bs.push(v);
    }
    (bs, mu, norms)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Floating-point LLL. Returns the reduced basis and the integer transform `T` with
/// `reduced = T * basis`.
pub fn lll(basis: &[Vec<f64>], delta: f64) -> (Vec<Vec<f64>>, Vec<Vec<i64>>) {
    let n = basis.len();
    let mut b = basis.to_vec();
    let mut t: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    if n <= 1 {
        return (b, t);
    }
    let mut k = 1;
    let mut guard = 0;
    while k < n && guard < 100_000 {
        guard += 1;
        for j in (0..k).rev() {
            let (_, mu, _) = gram_schmidt(&b);
            let q = mu[k][j].round();
            if q != 0.0 {
                let qi = q as i64;
                let (bj, tj) = (b[j].clone(), t[j].clone());
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= q * y;
                }
                for (x, y) in t[k].iter_mut().zip(&tj) {
                    *x -= qi * y;
                }
            }
        }
        let (_, mu, norms) = gram_schmidt(&b);
        if norms[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            t.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    (b, t)
}

struct Search<'a> {
    b: &'a [Vec<f64>],
    t: &'a [Vec<i64>],
    mu: Vec<Vec<f64>>,
    norms: Vec<f64>,
    chosen: &'a [Vec<i64>],
    best: Option<(f64, Vec<i64>, Vec<f64>)>,
    radius: f64,
    x: Vec<i64>,
    nodes: u64,
    budget: u64,
}

const TIE: f64 = 1e-12;

impl Search<'_> {
    fn bound2(&self) -> f64 {
        let n = self.b.len() as f64;
        n * self.radius * self.radius * (1.0 + 1e-9)
    }

    fn recurse(&mut self, level: usize, partial: f64) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(format!("enumeration exceeded {} nodes", self.budget)));
        }
        let n = self.b.len();
        let centre: f64 = -(level + 1..n).map(|j| self.x[j] as f64 * self.mu[j][level]).sum::<f64>();
        let room = self.bound2() - partial;
        if room < 0.0 {
            return Ok(());
        }
        let r = (room / self.norms[level]).sqrt();
        let lo = (centre - r).ceil() as i64;
        let hi = (centre + r).floor() as i64;
        for xi in lo..=hi {
            let diff = xi as f64 - centre;
            let p = partial + diff * diff * self.norms[level];
            if p > self.bound2() {
                continue;
            }
            self.x[level] = xi;
            if level == 0 {
                self.leaf();
            } else {
                self.recurse(level - 1, p)?;
            }
        }
        self.x[level] = 0;
        Ok(())
    }

    fn leaf(&mut self) {
        if self.x.iter().all(|&v| v == 0) {
            return;
        }
        let n = self.b.len();
        let dim = self.b[0].len();
        let v: Vec<f64> = (0..dim).map(|j| (0..n).map(|i| self.x[i] as f64 * self.b[i][j]).sum()).collect();
        let s = v.iter().fold(0.0f64, |a, y| a.max(y.abs()));
        if s > self.radius * (1.0 + TIE) {
            return;
        }
        let mut c: Vec<i64> = (0..n).map(|j| (0..n).map(|i| self.x[i] * self.t[i][j]).sum()).collect();
        let mut v = v;
        if c.iter().find(|&&z| z != 0).is_some_and(|&z| z < 0) {
            c.iter_mut().for_each(|z| *z = -*z);
            v.iter_mut().for_each(|z| *z = -*z);
        }
        if let Some((bs, bc, _)) = &self.best {
            let better = s < bs * (1.0 - TIE) || ((s - bs).abs() <= TIE * bs && c < *bc);
            if !better {
                return;
            }
        }
        let mut rows = self.chosen.to_vec();
        rows.push(c.clone());
        if rational_rank(&rows) <= self.chosen.len() {
            return;
        }
        self.radius = self.radius.min(s);
        self.best = Some((s, c, v));
    }
}

/// Successive minima `λ_1 <= ... <= λ_n` of the lattice spanned by the rows of `basis`
/// with respect to the box `K = prod [-k_j, k_j]`, with a directional basis `b_i ∈ λ_i K`.
/// Exact enumeration after LLL preprocessing; ties are broken by the lexicographic order
/// of integer coordinates.
pub fn successive_minima(basis: &[Vec<f64>], half_widths: &[f64], cfg: &MinimaConfig) -> Result<SuccessiveMinima> {
    let n = basis.len();
    if n == 0 || n > MAX_EXACT_DIM {
        return invalid(format!("dimension {n} outside [1, {MAX_EXACT_DIM}]"));
    }
    if basis.iter().any(|r| r.len() != n) || half_widths.len() != n {
        return invalid("basis must be square and match the box dimension");
    }
    if half_widths.iter().any(|k| !(*k > 0.0)) {
        return invalid("box half-widths must be positive");
    }
    let covolume = nalgebra::DMatrix::from_fn(n, n, |i, j| basis[i][j]).determinant().abs();
    if !(covolume > 0.0) {
        return Err(Error::DependentGenerators("basis is singular".into()));
    }
    let scaled: Vec<Vec<f64>> = basis.iter().map(|r| r.iter().zip(half_widths).map(|(x, k)| x / k).collect()).collect();
    let (b, t) = lll(&scaled, cfg.lll_delta);
    let (_, mu, norms) = gram_schmidt(&b);
    let mut chosen: Vec<Vec<i64>> = Vec::new();
    let mut lambdas = Vec::new();
    let mut vectors = Vec::new();
    let mut nodes = 0;
    for _ in 0..n {
        let mut radius = f64::INFINITY;
        for (i, row) in b.iter().enumerate() {
            let mut rows = chosen.clone();
            rows.push(t[i].clone());
            if rational_rank(&rows) > chosen.len() {
                radius = radius.min(row.iter().fold(0.0f64, |a, y| a.max(y.abs())));
            }
        }
        let mut s = Search {
            b: &b,
            t: &t,
            mu: mu.clone(),
            norms: norms.clone(),
            chosen: &chosen,
            best: None,
            radius,
            x: vec![0; n],
            nodes: 0,
            budget: cfg.node_budget,
        };
        s.recurse(n - 1, 0.0)?;
        nodes += s.nodes;
        let (lam, c, _) = s.best.expect("a basis vector outside the span always exists");
        let v: Vec<f64> = (0..n).map(|j| (0..n).map(|i| c[i] as f64 * basis[i][j]).sum()).collect();
        lambdas.push(lam);
        vectors.push(v);
        chosen.push(c);
    }
    let body_volume = half_widths.iter().map(|k| 2.0 * k).product();
    Ok(SuccessiveMinima { lambdas, vectors, coeffs: chosen, covolume, body_volume, nodes })
}
