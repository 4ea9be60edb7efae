use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Blocks `I_1, ..., I_k ⊆ {0, ..., s-1}` of size `m` sharing at most one element pairwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliquePacking {
    pub s: usize,
    pub m: usize,
    pub p: usize,
    pub copies: usize,
    pub blocks: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingCheck {
    pub k: usize,
    pub sizes_ok: bool,
    pub in_range: bool,
    pub edge_disjoint: bool,
    pub max_shared: usize,
    /// `k · C(m, 2) <= C(s, 2)`.
    pub pair_count_ok: bool,
    /// `k >= s/16` whenever `s >= 16 m²`.
    pub density_ok: bool,
}

impl PackingCheck {
    pub fn passes(&self) -> bool {
        self.sizes_ok && self.in_range && self.edge_disjoint && self.pair_count_ok && self.density_ok
    }
}

impl CliquePacking {
    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    /// Exhaustive re-verification over all pairs of blocks.
    pub fn check(&self) -> PackingCheck {
        let k = self.blocks.len();
        let sizes_ok = self.blocks.iter().all(|b| b.len() == self.m && b.iter().collect::<HashSet<_>>().len() == self.m);
        let in_range = self.blocks.iter().flatten().all(|&i| i < self.s);
        let sets: Vec<HashSet<usize>> = self.blocks.iter().map(|b| b.iter().copied().collect()).collect();
        let mut max_shared = 0;
        for i in 0..k {
            for j in i + 1..k {
                max_shared = max_shared.max(sets[i].intersection(&sets[j]).count());
            }
        }
        let pairs = |n: usize| n * n.saturating_sub(1) / 2;
        PackingCheck {
            k,
            sizes_ok,
            in_range,
            edge_disjoint: max_shared <= 1,
            max_shared,
            pair_count_ok: k * pairs(self.m) <= pairs(self.s),
            density_ok: self.s < 16 * self.m * self.m || 16 * k >= self.s,
        }
    }
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Normalised homogeneous triples over `F_p`: first non-zero coordinate equal to 1.
fn points(p: usize) -> Vec<[usize; 3]> {
    let mut v = Vec::with_capacity(p * p + p + 1);
    for y in 0..p {
        for z in 0..p {
            v.push([1, y, z]);
        }
    }
    for z in 0..p {
        v.push([0, 1, z]);
    }
    v.push([0, 0, 1]);
    v
}

/// Lines of `PG(2, p)` as sorted point indices, in the order of their normalised
/// coordinate triples.
pub fn projective_plane_lines(p: usize) -> Vec<Vec<usize>> {
    let pts = points(p);
    pts.iter()
        .map(|l| {
            (0..pts.len())
                .filter(|&i| (l[0] * pts[i][0] + l[1] * pts[i][1] + l[2] * pts[i][2]) % p == 0)
                .collect()
        })
        .collect()
}

/// Edge-disjoint `m`-cliques in `K_s` from the lines of `PG(2, p)`, `p` the least prime in
/// `[m, 2m)`, repeated over `⌊s/(p²+p+1)⌋` disjoint copies of the point set.
pub fn clique_pack(s: usize, m: usize) -> Result<CliquePacking> {
    if m < 2 {
        return invalid(format!("m must be at least 2, got {m}"));
    }
    let p = (m..2 * m).find(|&p| is_prime(p)).expect("Bertrand's postulate");
    let n = p * p + p + 1;
    if s < n {
        return invalid(format!("s = {s} is smaller than p^2 + p + 1 = {n} for p = {p}"));
    }
    let lines = projective_plane_lines(p);
    let copies = s / n;
    let mut blocks = Vec::with_capacity(copies * n);
    for c in 0..copies {
        for l in &lines {
            blocks.push(l[..m].iter().map(|i| c * n + i).collect());
        }
    }
    Ok(CliquePacking { s, m, p, copies, blocks })
}
