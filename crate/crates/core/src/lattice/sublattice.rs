use rand::Rng;
use serde::{Deserialize, Serialize};

use super::intmat::{det_abs_big, rational_rank, row_hnf, saturation_and_kernel, to_i128, to_i64, IntMatrix};
use crate::error::{Error, Result};
use crate::rng::substream;

/// Largest box `(2Q+1)^n` any enumeration here will walk.
pub const BOX_BUDGET: f64 = 1e8;

/// Integer coordinates of `x` in the basis `rows`, or `None` when `x` is not in the lattice.
pub fn coords_in_basis(rows: &[Vec<i64>], x: &[i64]) -> Result<Option<Vec<i64>>> {
    let m = rows.len();
    if m == 0 {
        return Ok(if x.iter().all(|&v| v == 0) { Some(Vec::new()) } else { None });
    }
    let hnf = row_hnf(&to_i128(rows))?;
    if hnf.rank < m {
        return Err(Error::DependentGenerators("basis vectors are dependent".into()));
    }
    let mut y = vec![0i128; m];
    for k in 0..m {
        let p = hnf.pivots[k];
        let mut acc = x[p] as i128;
        for i in 0..k {
            acc -= y[i] * hnf.h[i][p];
        }
        if acc % hnf.h[k][p] != 0 {
            return Ok(None);
        }
        y[k] = acc / hnf.h[k][p];
    }
    for (j, &xj) in x.iter().enumerate() {
        let v: i128 = (0..m).map(|i| y[i] * hnf.h[i][j]).sum();
        if v != xj as i128 {
            return Ok(None);
        }
    }
    let c: Vec<i128> = (0..m).map(|j| (0..m).map(|i| y[i] * hnf.u[i][j]).sum()).collect();
    Ok(Some(to_i64(&[c])?.remove(0)))
}

fn combine(coeffs: &[i64], rows: &[Vec<i64>]) -> Vec<i64> {
    let n = rows.first().map_or(0, |r| r.len());
    (0..n).map(|j| coeffs.iter().zip(rows).map(|(c, r)| c * r[j]).sum()).collect()
}

/// Basis of a sublattice in upper-triangular Hermite form relative to the ambient basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubBasis {
    /// New basis vectors `e'_i` in ambient coordinates.
    pub basis: IntMatrix,
    /// `e'_i = sum_j coords[i][j] e_j`, upper triangular with `0 <= coords[i][j] < coords[j][j]`.
    pub coords: IntMatrix,
    /// Largest observed `max|x'| / max|x|` over sampled lattice points.
    pub max_growth: f64,
    /// The guaranteed bound `2^m`.
    pub growth_bound: f64,
    pub samples: usize,
}

/// Given `sub ⊆ sup`, both of rank `m`, returns a basis `e'_i = d_i e_i + sum_{j>i} b_ij e_j`
/// of `sub` with `0 <= b_ij < d_j`. Coordinates are checked to grow by at most `2^m`
/// on `samples` random points.
pub fn hnf_sub_basis(sub: &[Vec<i64>], sup: &[Vec<i64>], samples: usize, seed: u64) -> Result<SubBasis> {
    let m = sup.len();
    if sub.len() != m {
        return Err(Error::InvalidArgument(format!("sublattice has {} generators, lattice has {m}", sub.len())));
    }
    if rational_rank(sup) < m || rational_rank(sub) < m {
        return Err(Error::DependentGenerators("bases must be linearly independent".into()));
    }
    let mut c = Vec::with_capacity(m);
    for (i, v) in sub.iter().enumerate() {
        match coords_in_basis(sup, v)? {
            Some(x) => c.push(x),
            None => return Err(Error::NotASublattice(format!("generator {} is not in the lattice", i + 1))),
        }
    }
    let hnf = row_hnf(&to_i128(&c))?;
    let coords = to_i64(&hnf.h)?;
    let basis: IntMatrix = coords.iter().map(|row| combine(row, sup)).collect();
    let growth_bound = 2f64.powi(m as i32);
    let mut rng = substream(seed, 0);
    let mut max_growth: f64 = 0.0;
    let mut taken = 0;
    while taken < samples {
        let xp: Vec<i64> = (0..m).map(|_| rng.gen_range(-50..=50)).collect();
        if xp.iter().all(|&v| v == 0) {
            continue;
        }
        let x = combine(&xp, &coords);
        let num = xp.iter().map(|v| v.abs()).max().unwrap() as f64;
        let den = x.iter().map(|v| v.abs()).max().unwrap() as f64;
        max_growth = max_growth.max(num / den);
        taken += 1;
    }
    Ok(SubBasis { basis, coords, max_growth, growth_bound, samples })
}

/// Basis of `V ∩ Z^n` for `V` spanned by integer generators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntegralBasis {
    pub basis: IntMatrix,
    /// Integer basis of `{v : g . v = 0 for all generators g}`, used as a membership test.
    pub kernel: IntMatrix,
    /// Largest coefficient needed to write a point with `|x| <= Q` in `basis`, if checked.
    pub max_coeff: Option<i64>,
    /// `m! (2Q)^m`.
    pub coeff_bound: f64,
}

impl IntegralBasis {
    pub fn contains(&self, x: &[i64]) -> bool {
        self.kernel.iter().all(|k| k.iter().zip(x).map(|(a, b)| (*a as i128) * (*b as i128)).sum::<i128>() == 0)
    }
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

/// Basis of `V ∩ Z^n` where `V` is spanned by `gens`, chosen (via a Hermite basis relative
/// to the lattice spanned by the generators) so every integer point of `V` with `|x| <= q`
/// has coordinates at most `m! (2q)^m`. The bound is verified by enumeration when the box
/// is within budget.
pub fn integral_point_basis(gens: &[Vec<i64>], n: usize, q: i64) -> Result<IntegralBasis> {
    if gens.iter().any(|g| g.len() != n) {
        return Err(Error::InvalidArgument("generator length mismatch".into()));
    }
    let m = gens.len();
    let (sat, kernel) = saturation_and_kernel(gens, n)?;
    let coeff_bound = factorial(m) * (2.0 * q as f64).powi(m as i32);
    if m == 0 {
        return Ok(IntegralBasis { basis: Vec::new(), kernel, max_coeff: Some(0), coeff_bound });
    }
    let mut gc = Vec::with_capacity(m);
    for g in gens {
        gc.push(coords_in_basis(&sat, g)?.expect("generators lie in their saturation"));
    }
    let index = i64::try_from(det_abs_big(&gc)).map_err(|_| Error::OutOfRange("index too large".into()))?;
    let scaled: IntMatrix = sat.iter().map(|r| r.iter().map(|x| x * index).collect()).collect();
    let sb = hnf_sub_basis(&scaled, gens, 0, 0)?;
    let basis: IntMatrix = sb.basis.iter().map(|r| r.iter().map(|x| x / index).collect()).collect();
    let mut out = IntegralBasis { basis, kernel, max_coeff: None, coeff_bound };
    if q >= 0 && ((2 * q + 1) as f64).powi(n as i32) <= BOX_BUDGET {
        let mut worst = 0i64;
        for x in box_points_in(&out, n, q)? {
            let c = coords_in_basis(&out.basis, &x)?.expect("integral point lies in the lattice");
            worst = worst.max(c.iter().map(|v| v.abs()).max().unwrap_or(0));
        }
        out.max_coeff = Some(worst);
    }
    Ok(out)
}

fn box_points_in(ib: &IntegralBasis, n: usize, q: i64) -> Result<Vec<Vec<i64>>> {
    let mut out = Vec::new();
    for_each_box_point(n, q, |x| {
        if ib.contains(x) {
            out.push(x.to_vec());
        }
    })?;
    Ok(out)
}

/// Calls `f` on every `x ∈ Z^n` with `|x|_inf <= q`, in lexicographic order.
pub fn for_each_box_point(n: usize, q: i64, mut f: impl FnMut(&[i64])) -> Result<()> {
    let size = ((2 * q + 1) as f64).powi(n as i32);
    if q < 0 {
        return Err(Error::InvalidArgument("box radius must be nonnegative".into()));
    }
    if size > BOX_BUDGET {
        return Err(Error::BudgetExceeded(format!("box of {size:.3e} points exceeds {BOX_BUDGET:e}")));
    }
    let mut x = vec![-q; n];
    loop {
        f(&x);
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if x[i] < q {
                x[i] += 1;
                break;
            }
            x[i] = -q;
        }
    }
}

/// Integer points of a rational subspace within a box.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspaceCount {
    pub count: u64,
    /// `20^n m^{n/2} Q^m`.
    pub bound: f64,
}

/// Counts `x ∈ Z^n ∩ V` with `|x| <= q`, where `V` is spanned by `gens`.
pub fn count_points_in_subspace(gens: &[Vec<i64>], n: usize, q: i64) -> Result<SubspaceCount> {
    let (_, kernel) = saturation_and_kernel(gens, n)?;
    let ib = IntegralBasis { basis: Vec::new(), kernel, max_coeff: None, coeff_bound: 0.0 };
    let mut count = 0u64;
    for_each_box_point(n, q, |x| {
        if ib.contains(x) {
            count += 1;
        }
    })?;
    let m = gens.len() as f64;
    let nf = n as f64;
    let bound = if gens.is_empty() { 1.0 } else { 20f64.powf(nf) * m.powf(nf / 2.0) * (q as f64).powf(m) };
    Ok(SubspaceCount { count, bound })
}

/// All integer points of `V` with `|x| <= q`.
pub fn points_in_subspace(gens: &[Vec<i64>], n: usize, q: i64) -> Result<Vec<Vec<i64>>> {
    let (_, kernel) = saturation_and_kernel(gens, n)?;
    let ib = IntegralBasis { basis: Vec::new(), kernel, max_coeff: None, coeff_bound: 0.0 };
    box_points_in(&ib, n, q)
}
