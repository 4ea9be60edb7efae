//! Exact integer linear algebra: rank by fraction-free elimination and row Hermite
//! normal form with unimodular transforms.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub type IntMatrix = Vec<Vec<i64>>;

fn overflow() -> Error {
    Error::OutOfRange("integer overflow in exact elimination".into())
}

/// Rank over Q of the given integer vectors (rows), by fraction-free Gaussian elimination.
/// Runs in `i128` and falls back to big integers on overflow.
pub fn rational_rank(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    match bareiss_rank_i128(m) {
        Some(r) => r,
        None => {
            let m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            bareiss_rank_big(m)
        }
    }
}

fn bareiss_rank_i128(mut a: Vec<Vec<i128>>) -> Option<usize> {
    let rows = a.len();
    let cols = a[0].len();
    let mut rank = 0;
    let mut prev: i128 = 1;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| a[i][col] != 0) else { continue };
        a.swap(rank, p);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let v = a[i][j].checked_mul(a[rank][col])?.checked_sub(a[i][col].checked_mul(a[rank][j])?)?;
                a[i][j] = v / prev;
            }
            a[i][col] = 0;
        }
        prev = a[rank][col];
        rank += 1;
    }
    Some(rank)
}

fn bareiss_rank_big(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    let cols = a[0].len();
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(rank, p);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let v = &a[i][j] * &a[rank][col] - &a[i][col] * &a[rank][j];
                a[i][j] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Row Hermite normal form `H = U A` with `U` unimodular. `H` is in row echelon form with
/// positive pivots and entries above each pivot reduced into `[0, pivot)`.
#[derive(Debug, Clone)]
pub struct RowHnf {
    pub h: Vec<Vec<i128>>,
    pub u: Vec<Vec<i128>>,
    pub u_inv: Vec<Vec<i128>>,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

struct Tracker {
    a: Vec<Vec<i128>>,
    u: Vec<Vec<i128>>,
    u_inv: Vec<Vec<i128>>,
}

impl Tracker {
    fn swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        self.u.swap(i, j);
        for row in self.u_inv.iter_mut() {
            row.swap(i, j);
        }
    }

    fn negate(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -*x;
        }
        for x in self.u[i].iter_mut() {
            *x = -*x;
        }
        for row in self.u_inv.iter_mut() {
            row[i] = -row[i];
        }
    }

    /// row_i += k * row_j
    fn add(&mut self, i: usize, j: usize, k: i128) -> Result<()> {
        if k == 0 {
            return Ok(());
        }
        for m in [&mut self.a, &mut self.u] {
            let (src, dst) = if i < j {
                let (lo, hi) = m.split_at_mut(j);
                (&hi[0], &mut lo[i])
            } else {
                let (lo, hi) = m.split_at_mut(i);
                (&lo[j], &mut hi[0])
            };
            for (d, s) in dst.iter_mut().zip(src.iter()) {
                *d = s.checked_mul(k).and_then(|v| d.checked_add(v)).ok_or_else(overflow)?;
            }
        }
        for row in self.u_inv.iter_mut() {
            row[j] = row[i].checked_mul(k).and_then(|v| row[j].checked_sub(v)).ok_or_else(overflow)?;
        }
        Ok(())
    }
}

fn identity(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

pub fn row_hnf(a: &[Vec<i128>]) -> Result<RowHnf> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut t = Tracker { a: a.to_vec(), u: identity(rows), u_inv: identity(rows) };
    let mut row = 0;
    let mut pivots = Vec::new();
    for col in 0..cols {
        if row == rows {
            break;
        }
        loop {
            let Some(p) = (row..rows).filter(|&i| t.a[i][col] != 0).min_by_key(|&i| (t.a[i][col].abs(), i)) else {
                break;
            };
            t.swap(row, p);
            let mut done = true;
            for i in row + 1..rows {
                if t.a[i][col] != 0 {
                    let q = t.a[i][col].div_euclid(t.a[row][col]);
                    t.add(i, row, -q)?;
                    if t.a[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if t.a[row][col] == 0 {
            continue;
        }
        if t.a[row][col] < 0 {
            t.negate(row);
        }
        let piv = t.a[row][col];
        for i in 0..row {
            let q = t.a[i][col].div_euclid(piv);
            t.add(i, row, -q)?;
        }
        pivots.push(col);
        row += 1;
    }
    Ok(RowHnf { h: t.a, u: t.u, u_inv: t.u_inv, rank: row, pivots })
}

pub fn to_i128(m: &[Vec<i64>]) -> Vec<Vec<i128>> {
    m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect()
}

pub fn to_i64(m: &[Vec<i128>]) -> Result<IntMatrix> {
    m.iter()
        .map(|r| r.iter().map(|&x| i64::try_from(x).map_err(|_| overflow())).collect())
        .collect()
}

pub fn transpose<T: Copy>(m: &[Vec<T>], cols: usize) -> Vec<Vec<T>> {
    (0..cols).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

/// For generators `G` (rows, `m x n`, rank `m`), returns a Z-basis of `span_Q(G) ∩ Z^n`
/// and a Z-basis of the integer kernel `{v : G v = 0}`.
pub fn saturation_and_kernel(gens: &[Vec<i64>], n: usize) -> Result<(IntMatrix, IntMatrix)> {
    let m = gens.len();
    if m == 0 {
        let kernel = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        return Ok((Vec::new(), kernel));
    }
    let gt = transpose(&to_i128(gens), n);
    let hnf = row_hnf(&gt)?;
    if hnf.rank < m {
        return Err(Error::DependentGenerators(format!("rank {} < {m} generators", hnf.rank)));
    }
    // G U^T = H^T, so G = H^T (U^{-1})^T and the first m columns of U^{-1} span the saturation.
    let sat: Vec<Vec<i128>> = (0..m).map(|j| (0..n).map(|i| hnf.u_inv[i][j]).collect()).collect();
    let ker: Vec<Vec<i128>> = hnf.u[m..].to_vec();
    Ok((to_i64(&sat)?, to_i64(&ker)?))
}

/// `|det|` of a square integer matrix via fraction-free elimination.
pub fn det_abs_big(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut prev = BigInt::from(1);
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else { return BigInt::zero() };
        a.swap(k, p);
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        BigInt::from(1)
    } else {
        a[n - 1][n - 1].abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
        let k = b.len();
        let c = b[0].len();
        a.iter().map(|r| (0..c).map(|j| (0..k).map(|t| r[t] * b[t][j]).sum()).collect()).collect()
    }

    #[test]
    fn hnf_transform_is_consistent() {
        let a = to_i128(&[vec![4, 6, 2], vec![2, 8, 4], vec![6, 2, 2], vec![1, 1, 1]]);
        let r = row_hnf(&a).unwrap();
        assert_eq!(mul(&r.u, &a), r.h);
        assert_eq!(mul(&r.u, &r.u_inv), identity(4));
        assert_eq!(r.rank, 3);
        for (row, &c) in r.pivots.iter().enumerate() {
            assert!(r.h[row][c] > 0);
            for i in 0..row {
                assert!(r.h[i][c] >= 0 && r.h[i][c] < r.h[row][c]);
            }
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rational_rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rational_rank(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]), 3);
        assert_eq!(rational_rank(&[vec![0, 0]]), 0);
        let big = i64::MAX / 3;
        assert_eq!(rational_rank(&[vec![big, big - 1], vec![big - 2, big - 5]]), 2);
    }

    #[test]
    fn saturation_of_even_vectors() {
        let (sat, ker) = saturation_and_kernel(&[vec![2, 0], vec![0, 2]], 2).unwrap();
        assert_eq!(det_abs_big(&sat), BigInt::from(1));
        assert!(ker.is_empty());
        let (sat, ker) = saturation_and_kernel(&[vec![2, 4, 6]], 3).unwrap();
        assert_eq!(sat.len(), 1);
        assert_eq!(sat[0].iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(ker.len(), 2);
        for k in &ker {
            assert_eq!(2 * k[0] + 4 * k[1] + 6 * k[2], 0);
        }
    }
}
