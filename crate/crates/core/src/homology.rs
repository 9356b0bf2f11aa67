//! Betti numbers over the two-element field.
//!
//! `beta_q = #q-simplices - rank d_q - rank d_(q+1)`. The rank of `d_1`
//! follows from connected components; higher boundary ranks come from a
//! sparse column reduction with low-pivot bookkeeping.

use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};

/// Disjoint-set forest with union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    /// Merges the sets of `a` and `b`; returns false if already joined.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        true
    }

    /// Sizes of all sets.
    pub fn set_sizes(&mut self) -> Vec<u32> {
        let roots: Vec<u32> = (0..self.parent.len() as u32)
            .filter(|&x| self.find(x) == x)
            .collect();
        roots.into_iter().map(|x| self.size[x as usize]).collect()
    }
}

/// Component sizes of the 1-skeleton.
pub fn component_sizes(complex: &SimplicialComplex) -> Vec<u32> {
    let vertices = complex.vertices();
    let mut uf = UnionFind::new(vertices.len());
    for e in complex.iter(1) {
        let a = vertices.binary_search(&e[0]).expect("face-closed") as u32;
        let b = vertices.binary_search(&e[1]).expect("face-closed") as u32;
        uf.union(a, b);
    }
    uf.set_sizes()
}

/// Number of connected components (`beta_0`).
pub fn connected_components(complex: &SimplicialComplex) -> usize {
    component_sizes(complex).len()
}

/// Boundary operator `d_q` as sparse columns: one column per `q`-simplex
/// listing the row indices of its `q+1` faces in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMatrix {
    pub dim: usize,
    pub rows: usize,
    entries: Vec<u32>,
}

impl BoundaryMatrix {
    pub fn new(complex: &SimplicialComplex, dim: usize) -> Result<Self> {
        if dim == 0 || dim > complex.max_dim() {
            return Err(Error::invalid(format!(
                "boundary dimension {dim} outside 1..={}",
                complex.max_dim()
            )));
        }
        let mut entries = Vec::with_capacity(complex.count(dim) * (dim + 1));
        let mut face = Vec::with_capacity(dim);
        let mut column = Vec::with_capacity(dim + 1);
        for s in complex.iter(dim) {
            column.clear();
            for skip in 0..s.len() {
                face.clear();
                face.extend(s.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &v)| v));
                let row = complex
                    .index_of(dim - 1, &face)
                    .ok_or_else(|| Error::precondition("complex is not closed under faces"))?;
                column.push(row as u32);
            }
            column.sort_unstable();
            entries.extend_from_slice(&column);
        }
        Ok(BoundaryMatrix {
            dim,
            rows: complex.count(dim - 1),
            entries,
        })
    }

    pub fn columns(&self) -> usize {
        self.entries.len() / (self.dim + 1)
    }

    pub fn column(&self, j: usize) -> &[u32] {
        let k = self.dim + 1;
        &self.entries[j * k..(j + 1) * k]
    }

    /// Rank over GF(2).
    pub fn rank(&self) -> usize {
        rank_gf2(self.rows, (0..self.columns()).map(|j| self.column(j)))
    }
}

/// Rank over GF(2) of a matrix given as sparse columns with ascending row
/// indices.
pub fn rank_gf2<'a>(rows: usize, columns: impl Iterator<Item = &'a [u32]>) -> usize {
    const NONE: u32 = u32::MAX;
    // pivot row -> reduced column stored in `store`
    let mut pivot: Vec<u32> = vec![NONE; rows];
    let mut store: Vec<Vec<u32>> = Vec::new();
    let mut col: Vec<u32> = Vec::new();
    let mut tmp: Vec<u32> = Vec::new();
    for c in columns {
        col.clear();
        col.extend_from_slice(c);
        while let Some(&low) = col.last() {
            let p = pivot[low as usize];
            if p == NONE {
                pivot[low as usize] = store.len() as u32;
                store.push(std::mem::take(&mut col));
                break;
            }
            symmetric_difference(&col, &store[p as usize], &mut tmp);
            std::mem::swap(&mut col, &mut tmp);
        }
    }
    store.len()
}

fn symmetric_difference(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// Betti numbers `beta_0..=beta_q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiVector {
    pub betti: Vec<u64>,
    /// The top entry belongs to the `q`-skeleton rather than the full
    /// complex because `(q+1)`-simplices were not built.
    pub truncated_top: bool,
}

impl BettiVector {
    pub fn get(&self, q: usize) -> Option<u64> {
        self.betti.get(q).copied()
    }

    /// Alternating sum `beta_0 - beta_1 + ...`.
    pub fn euler_characteristic(&self) -> i64 {
        self.betti
            .iter()
            .enumerate()
            .map(|(q, &b)| if q % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }
}

/// Ranks of `d_1..=d_top` (index `k` holds rank `d_k`; index 0 is unused).
fn boundary_ranks(complex: &SimplicialComplex, top: usize) -> Result<Vec<usize>> {
    let mut ranks = vec![0usize; top + 1];
    if top >= 1 {
        ranks[1] = complex.count(0) - connected_components(complex);
    }
    for (k, rank) in ranks.iter_mut().enumerate().skip(2) {
        *rank = BoundaryMatrix::new(complex, k)?.rank();
    }
    Ok(ranks)
}

/// Betti numbers up to `up_to_q`.
///
/// Needs `max_dim >= up_to_q`. When `max_dim == up_to_q` the top entry is
/// that of the `up_to_q`-skeleton and is flagged as truncated.
pub fn betti_numbers(complex: &SimplicialComplex, up_to_q: usize) -> Result<BettiVector> {
    let max_dim = complex.max_dim();
    if max_dim < up_to_q {
        return Err(Error::invalid(format!(
            "Betti number {up_to_q} needs simplices up to dimension {up_to_q}, complex stops at {max_dim}"
        )));
    }
    let top = (up_to_q + 1).min(max_dim);
    let ranks = boundary_ranks(complex, top)?;
    let rank = |k: usize| if k == 0 || k > top { 0 } else { ranks[k] };
    let betti = (0..=up_to_q)
        .map(|q| (complex.count(q) - rank(q) - rank(q + 1)) as u64)
        .collect();
    Ok(BettiVector {
        betti,
        truncated_top: max_dim == up_to_q,
    })
}
