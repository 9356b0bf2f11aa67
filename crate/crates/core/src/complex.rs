//! Simplicial complexes stored as lexicographically sorted vertex tuples,
//! clique expansion of graphs and generalized degree distributions.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{palm_edges, EdgeSet};
use crate::point_process::{ModelParams, PalmSample, Vertex};
use crate::scalar::Real;

/// A face-closed simplicial complex truncated at `max_dim`.
///
/// Dimension `k` holds a flat buffer of sorted `(k+1)`-tuples of vertex ids
/// in lexicographic order, without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimplicialComplex {
    max_dim: usize,
    simplices: Vec<Vec<u32>>,
}

impl SimplicialComplex {
    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    /// Number of `k`-simplices; zero above `max_dim`.
    pub fn count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, |s| s.len() / (k + 1))
    }

    /// Simplex counts for dimensions `0..=max_dim`.
    pub fn f_vector(&self) -> Vec<usize> {
        (0..=self.max_dim).map(|k| self.count(k)).collect()
    }

    pub fn vertices(&self) -> &[u32] {
        self.simplices.first().map_or(&[], |s| s.as_slice())
    }

    pub fn simplex(&self, k: usize, i: usize) -> &[u32] {
        &self.simplices[k][i * (k + 1)..(i + 1) * (k + 1)]
    }

    pub fn iter(&self, k: usize) -> std::slice::ChunksExact<'_, u32> {
        match self.simplices.get(k) {
            Some(s) => s.chunks_exact(k + 1),
            None => [].chunks_exact(k + 1),
        }
    }

    /// Position of a sorted tuple among the `k`-simplices.
    pub fn index_of(&self, k: usize, simplex: &[u32]) -> Option<usize> {
        debug_assert_eq!(simplex.len(), k + 1);
        let flat = self.simplices.get(k)?;
        let stride = k + 1;
        let (mut lo, mut hi) = (0, flat.len() / stride);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match flat[mid * stride..(mid + 1) * stride].cmp(simplex) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn contains(&self, simplex: &[u32]) -> bool {
        let mut s = simplex.to_vec();
        s.sort_unstable();
        !s.is_empty() && s.len() <= self.max_dim + 1 && self.index_of(s.len() - 1, &s).is_some()
    }

    /// Complex generated by the given simplices: every face of dimension at
    /// most `max_dim` of every generator is included.
    pub fn from_generators<I, S>(generators: I, max_dim: usize) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u32]>,
    {
        let mut buffers: Vec<Vec<u32>> = vec![Vec::new(); max_dim + 1];
        let mut sorted = Vec::new();
        let mut face = Vec::new();
        for g in generators {
            sorted.clear();
            sorted.extend_from_slice(g.as_ref());
            sorted.sort_unstable();
            sorted.dedup();
            let top = sorted.len().min(max_dim + 1);
            for size in 1..=top {
                for_each_combination(sorted.len(), size, |idx| {
                    face.clear();
                    face.extend(idx.iter().map(|&i| sorted[i]));
                    buffers[size - 1].extend_from_slice(&face);
                });
            }
        }
        Self::from_buffers(buffers, max_dim)
    }

    fn from_buffers(buffers: Vec<Vec<u32>>, max_dim: usize) -> Self {
        let simplices = buffers
            .into_iter()
            .enumerate()
            .map(|(k, flat)| sort_dedup_flat(flat, k + 1))
            .collect();
        SimplicialComplex { max_dim, simplices }
    }

    /// The `k`-skeleton (`k <= max_dim`).
    pub fn skeleton(&self, k: usize) -> Self {
        let k = k.min(self.max_dim);
        SimplicialComplex {
            max_dim: k,
            simplices: self.simplices[..=k].to_vec(),
        }
    }

    /// Checks that every codimension-one face of every stored simplex is
    /// stored.
    pub fn is_face_closed(&self) -> bool {
        let mut face = Vec::new();
        (1..=self.max_dim).all(|k| {
            self.iter(k).all(|s| {
                (0..s.len()).all(|skip| {
                    face.clear();
                    face.extend(s.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &v)| v));
                    self.index_of(k - 1, &face).is_some()
                })
            })
        })
    }
}

/// Calls `f` with every increasing `size`-subset of `0..n`.
pub(crate) fn for_each_combination(n: usize, size: usize, mut f: impl FnMut(&[usize])) {
    if size > n {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        f(&idx);
        let mut i = size;
        while i > 0 && idx[i - 1] == n - size + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn sort_array_chunks<const K: usize>(flat: Vec<u32>) -> Vec<u32> {
    let mut rows: Vec<[u32; K]> = flat
        .chunks_exact(K)
        .map(|c| c.try_into().expect("chunk of length K"))
        .collect();
    rows.par_sort_unstable();
    rows.dedup();
    rows.into_iter().flatten().collect()
}

/// Sorts a flat buffer of `stride`-tuples lexicographically and removes
/// duplicates.
fn sort_dedup_flat(flat: Vec<u32>, stride: usize) -> Vec<u32> {
    match stride {
        1 => sort_array_chunks::<1>(flat),
        2 => sort_array_chunks::<2>(flat),
        3 => sort_array_chunks::<3>(flat),
        4 => sort_array_chunks::<4>(flat),
        5 => sort_array_chunks::<5>(flat),
        _ => {
            let mut rows: Vec<&[u32]> = flat.chunks_exact(stride).collect();
            rows.sort_unstable();
            rows.dedup();
            rows.into_iter().flatten().copied().collect()
        }
    }
}

/// Clique complex of a graph given by vertex ids and undirected pairs.
///
/// Cliques are listed by ordered expansion: vertices are ranked by
/// `(degree, id)` and a clique only grows by common neighbours of higher
/// rank, so each clique is produced once.
pub fn clique_complex_from_pairs(
    vertex_ids: &[u32],
    pairs: &[(u32, u32)],
    max_dim: usize,
) -> Result<SimplicialComplex> {
    if max_dim < 1 {
        return Err(Error::invalid("clique complex needs max_dim >= 1"));
    }
    let mut ids = vertex_ids.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let local = |id: u32| -> Result<u32> {
        ids.binary_search(&id)
            .map(|i| i as u32)
            .map_err(|_| Error::precondition(format!("edge endpoint {id} is not a vertex")))
    };
    let n = ids.len();
    let mut degree = vec![0u32; n];
    let mut local_pairs = Vec::with_capacity(pairs.len());
    for &(a, b) in pairs {
        if a == b {
            return Err(Error::precondition(format!("self loop at vertex {a}")));
        }
        let (la, lb) = (local(a)?, local(b)?);
        degree[la as usize] += 1;
        degree[lb as usize] += 1;
        local_pairs.push((la, lb));
    }
    let rank_key = |i: u32| (degree[i as usize], i);
    // forward adjacency in CSR form, each list sorted by local index
    let mut offsets = vec![0usize; n + 1];
    for &(a, b) in &local_pairs {
        let lo = if rank_key(a) < rank_key(b) { a } else { b };
        offsets[lo as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut forward = vec![0u32; local_pairs.len()];
    for &(a, b) in &local_pairs {
        let (lo, hi) = if rank_key(a) < rank_key(b) { (a, b) } else { (b, a) };
        forward[fill[lo as usize]] = hi;
        fill[lo as usize] += 1;
    }
    for i in 0..n {
        let list = &mut forward[offsets[i]..offsets[i + 1]];
        list.sort_unstable();
        if list.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::precondition("duplicate undirected edge"));
        }
    }
    let fwd = |i: u32| &forward[offsets[i as usize]..offsets[i as usize + 1]];

    let higher: Vec<Vec<u32>> = (0..n as u32)
        .into_par_iter()
        .fold(
            || vec![Vec::new(); max_dim],
            |mut bufs, root| {
                let mut clique = vec![root];
                expand(&fwd, &ids, &mut clique, fwd(root), max_dim, &mut bufs);
                bufs
            },
        )
        .reduce(
            || vec![Vec::new(); max_dim],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    x.extend(y);
                }
                a
            },
        );
    let mut buffers = Vec::with_capacity(max_dim + 1);
    buffers.push(ids.clone());
    buffers.extend(higher);
    Ok(SimplicialComplex::from_buffers(buffers, max_dim))
}

fn expand<'a>(
    fwd: &impl Fn(u32) -> &'a [u32],
    ids: &[u32],
    clique: &mut Vec<u32>,
    candidates: &[u32],
    max_dim: usize,
    out: &mut [Vec<u32>],
) {
    let dim = clique.len(); // dimension of clique + one vertex
    let mut next = Vec::new();
    let mut tuple = Vec::with_capacity(dim + 1);
    for &c in candidates {
        clique.push(c);
        tuple.clear();
        tuple.extend(clique.iter().map(|&l| ids[l as usize]));
        tuple.sort_unstable();
        out[dim - 1].extend_from_slice(&tuple);
        if dim < max_dim {
            intersect_sorted(candidates, fwd(c), &mut next);
            if !next.is_empty() {
                let cands = std::mem::take(&mut next);
                expand(fwd, ids, clique, &cands, max_dim, out);
                next = cands;
            }
        }
        clique.pop();
    }
}

fn intersect_sorted(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

/// Clique complex of a model graph up to dimension `max_dim`.
pub fn clique_complex<T: Real>(
    edge_set: &EdgeSet,
    vertices: &[Vertex<T>],
    max_dim: usize,
) -> Result<SimplicialComplex> {
    let ids: Vec<u32> = vertices.iter().map(|v| v.id).collect();
    clique_complex_from_pairs(&ids, &edge_set.undirected_pairs(), max_dim)
}

/// Distribution of `deg_{m'}` over the `m`-simplices of a complex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    pub m: usize,
    pub m_prime: usize,
    /// Degree value to number of `m`-simplices with that degree.
    pub counts: BTreeMap<u64, u64>,
}

impl DegreeDistribution {
    pub fn new(m: usize, m_prime: usize) -> Self {
        DegreeDistribution {
            m,
            m_prime,
            counts: BTreeMap::new(),
        }
    }

    pub fn from_values(m: usize, m_prime: usize, values: impl IntoIterator<Item = u64>) -> Self {
        let mut d = Self::new(m, m_prime);
        d.extend(values);
        d
    }

    pub fn extend(&mut self, values: impl IntoIterator<Item = u64>) {
        for v in values {
            *self.counts.entry(v).or_default() += 1;
        }
    }

    /// Adds every count of `other` (same `m`, `m'`).
    pub fn merge(&mut self, other: &DegreeDistribution) {
        for (&v, &c) in &other.counts {
            *self.counts.entry(v).or_default() += c;
        }
    }

    /// Number of observations.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn mean(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        self.counts.iter().map(|(&v, &c)| v as f64 * c as f64).sum::<f64>() / total as f64
    }

    pub fn max_value(&self) -> Option<u64> {
        self.counts.keys().next_back().copied()
    }
}

fn check_degree_dims(max_dim: usize, m: usize, m_prime: usize) -> Result<()> {
    if m > m_prime || m_prime > max_dim {
        return Err(Error::invalid(format!(
            "need m <= m' <= max_dim, got m={m}, m'={m_prime}, max_dim={max_dim}"
        )));
    }
    Ok(())
}

/// `deg_{m'}` of every `m`-simplex, aligned with the complex's order.
pub fn generalized_degree_values(complex: &SimplicialComplex, m: usize, m_prime: usize) -> Result<Vec<u64>> {
    check_degree_dims(complex.max_dim(), m, m_prime)?;
    let mut degrees = vec![0u64; complex.count(m)];
    if m == m_prime {
        degrees.iter_mut().for_each(|d| *d = 1);
        return Ok(degrees);
    }
    let mut face = Vec::with_capacity(m + 1);
    for s in complex.iter(m_prime) {
        for_each_combination(s.len(), m + 1, |idx| {
            face.clear();
            face.extend(idx.iter().map(|&i| s[i]));
            let at = complex.index_of(m, &face).expect("face-closed complex");
            degrees[at] += 1;
        });
    }
    Ok(degrees)
}

/// Distribution of the number of `m'`-simplices containing each `m`-simplex.
pub fn generalized_degrees(complex: &SimplicialComplex, m: usize, m_prime: usize) -> Result<DegreeDistribution> {
    let values = generalized_degree_values(complex, m, m_prime)?;
    Ok(DegreeDistribution::from_values(m, m_prime, values))
}

/// Clique complex of a Palm sample, with the centre's id.
pub fn palm_complex<T: Real, R: Rng + ?Sized>(
    sample: &PalmSample<T>,
    params: &ModelParams<T>,
    max_dim: usize,
    rng: &mut R,
) -> Result<SimplicialComplex> {
    let (vertices, edges) = palm_edges(sample, params, rng)?;
    clique_complex(&edges, &vertices, max_dim.max(1))
}

/// Degrees of the `m`-simplices that contain the centre of a Palm complex.
pub fn palm_degree_values(complex: &SimplicialComplex, m: usize, m_prime: usize) -> Result<Vec<u64>> {
    let center = PalmSample::<f64>::CENTER_ID;
    let all = generalized_degree_values(complex, m, m_prime)?;
    Ok(complex
        .iter(m)
        .zip(all)
        .filter(|(s, _)| s.contains(&center))
        .map(|(_, d)| d)
        .collect())
}

/// Generalized degrees of the simplices through the centre of one Palm
/// sample. Simplices away from the centre are incomplete by construction
/// and are never reported.
pub fn palm_generalized_degrees<T: Real, R: Rng + ?Sized>(
    sample: &PalmSample<T>,
    params: &ModelParams<T>,
    m: usize,
    m_prime: usize,
    rng: &mut R,
) -> Result<DegreeDistribution> {
    if m > m_prime {
        return Err(Error::invalid(format!("need m <= m', got m={m}, m'={m_prime}")));
    }
    let complex = palm_complex(sample, params, m_prime, rng)?;
    Ok(DegreeDistribution::from_values(
        m,
        m_prime,
        palm_degree_values(&complex, m, m_prime)?,
    ))
}
