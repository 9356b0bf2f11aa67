//! Directed younger-to-older edge sets: kernel evaluation through a layered
//! spatial index, protected/exposed classification and thinning.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point_process::{check_thinning, ModelParams, PalmSample, Vertex};
use crate::rng::{draw_key, keyed_uniform};
use crate::scalar::Real;

/// A directed edge from a younger vertex to an older one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub younger: u32,
    pub older: u32,
    pub protected: bool,
}

/// Edge list sorted by `(younger, older)` without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeSet {
    edges: Vec<Edge>,
    classified: bool,
}

impl EdgeSet {
    /// Builds a set from arbitrary edges; sorts and rejects duplicates and
    /// loops.
    pub fn from_edges(mut edges: Vec<Edge>) -> Result<Self> {
        edges.sort_unstable_by_key(|e| (e.younger, e.older));
        for w in edges.windows(2) {
            if (w[0].younger, w[0].older) == (w[1].younger, w[1].older) {
                return Err(Error::precondition(format!(
                    "duplicate edge {} -> {}",
                    w[0].younger, w[0].older
                )));
            }
        }
        if let Some(e) = edges.iter().find(|e| e.younger == e.older) {
            return Err(Error::precondition(format!("self loop at vertex {}", e.younger)));
        }
        let set = EdgeSet {
            edges,
            classified: false,
        };
        if set.undirected_pairs().windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::precondition("edge present in both directions"));
        }
        Ok(set)
    }

    fn from_sorted(edges: Vec<Edge>) -> Self {
        EdgeSet {
            edges,
            classified: false,
        }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Whether protected flags have been computed.
    pub fn is_classified(&self) -> bool {
        self.classified
    }

    pub fn contains(&self, younger: u32, older: u32) -> bool {
        self.edges
            .binary_search_by_key(&(younger, older), |e| (e.younger, e.older))
            .is_ok()
    }

    /// Undirected pairs `(min id, max id)`, sorted.
    pub fn undirected_pairs(&self) -> Vec<(u32, u32)> {
        let mut pairs: Vec<_> = self
            .edges
            .iter()
            .map(|e| (e.younger.min(e.older), e.younger.max(e.older)))
            .collect();
        pairs.sort_unstable();
        pairs
    }

    /// Older neighbours of each younger vertex as `(younger, range)` runs
    /// into [`EdgeSet::edges`].
    fn runs(&self) -> impl Iterator<Item = (u32, std::ops::Range<usize>)> + '_ {
        let mut start = 0;
        std::iter::from_fn(move || {
            if start >= self.edges.len() {
                return None;
            }
            let y = self.edges[start].younger;
            let mut end = start + 1;
            while end < self.edges.len() && self.edges[end].younger == y {
                end += 1;
            }
            let r = start..end;
            start = end;
            Some((y, r))
        })
    }

    /// Out-degree (number of older neighbours) per vertex id.
    pub fn out_degrees(&self, vertex_count: usize) -> Vec<u32> {
        let mut deg = vec![0u32; vertex_count];
        for e in &self.edges {
            deg[e.younger as usize] += 1;
        }
        deg
    }

    /// Undirected degree per vertex id.
    pub fn degrees(&self, vertex_count: usize) -> Vec<u32> {
        let mut deg = vec![0u32; vertex_count];
        for e in &self.edges {
            deg[e.younger as usize] += 1;
            deg[e.older as usize] += 1;
        }
        deg
    }
}

/// Lookup from vertex id to slot in a vertex slice.
struct IdIndex {
    slot: Vec<u32>,
}

impl IdIndex {
    fn new<T: Real>(vertices: &[Vertex<T>]) -> Result<Self> {
        let max = vertices.iter().map(|v| v.id).max().map_or(0, |m| m as usize + 1);
        let mut slot = vec![u32::MAX; max];
        for (i, v) in vertices.iter().enumerate() {
            if slot[v.id as usize] != u32::MAX {
                return Err(Error::precondition(format!("duplicate vertex id {}", v.id)));
            }
            slot[v.id as usize] = i as u32;
        }
        Ok(IdIndex { slot })
    }

    fn get(&self, id: u32) -> Result<usize> {
        match self.slot.get(id as usize) {
            Some(&s) if s != u32::MAX => Ok(s as usize),
            _ => Err(Error::precondition(format!("unknown vertex id {id}"))),
        }
    }
}

fn check_sorted<T: Real>(vertices: &[Vertex<T>]) -> Result<()> {
    if let Some(i) = vertices.windows(2).position(|w| !(w[0].birth <= w[1].birth)) {
        return Err(Error::precondition(format!(
            "vertices must be sorted by birth (violated at position {})",
            i + 1
        )));
    }
    if let Some(v) = vertices.iter().find(|v| !(v.birth > T::zero() && v.birth <= T::one())) {
        return Err(Error::precondition(format!(
            "vertex {} has birth {} outside (0, 1]",
            v.id, v.birth
        )));
    }
    Ok(())
}

/// Spatial distance, periodic on `[0, n)` when `torus` is set.
#[inline]
fn distance<T: Real>(x: T, y: T, params: &ModelParams<T>) -> T {
    let d = (x - y).abs();
    if params.torus {
        d.min(params.window_length - d)
    } else {
        d
    }
}

/// Older vertices bucketed into dyadic birth layers `(2^-k-1, 2^-k]`, each
/// sorted by position.
struct LayeredIndex<T> {
    /// `(position, slot)` per layer.
    layers: Vec<Vec<(T, u32)>>,
}

const MAX_LAYER: usize = 1000;

fn layer_of<T: Real>(birth: T) -> usize {
    let k = (-birth.log2()).floor();
    k.to_usize().unwrap_or(0).min(MAX_LAYER)
}

impl<T: Real> LayeredIndex<T> {
    fn new(vertices: &[Vertex<T>]) -> Self {
        let depth = vertices.iter().map(|v| layer_of(v.birth)).max().map_or(0, |k| k + 1);
        let mut layers = vec![Vec::new(); depth];
        for (slot, v) in vertices.iter().enumerate() {
            layers[layer_of(v.birth)].push((v.position, slot as u32));
        }
        for layer in &mut layers {
            layer.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite positions"));
        }
        LayeredIndex { layers }
    }

    /// Slots whose position lies within `radius` of `y` in layer `k`.
    fn query(&self, k: usize, y: T, radius: T, params: &ModelParams<T>, out: &mut Vec<u32>) {
        let layer = &self.layers[k];
        let mut scan = |lo: T, hi: T| {
            let start = layer.partition_point(|p| p.0 < lo);
            for p in &layer[start..] {
                if p.0 > hi {
                    break;
                }
                out.push(p.1);
            }
        };
        if params.torus {
            let n = params.window_length;
            if radius * T::of(2.0) >= n {
                out.extend(layer.iter().map(|p| p.1));
                return;
            }
            let (lo, hi) = (y - radius, y + radius);
            scan(lo.max(T::zero()), hi.min(n));
            if lo < T::zero() {
                scan(lo + n, n);
            }
            if hi > n {
                scan(T::zero(), hi - n);
            }
        } else {
            scan(y - radius, y + radius);
        }
    }
}

/// Candidate edges from `younger` (slot `j`) to every older vertex, in
/// ascending older-id order.
fn older_neighbours<T: Real>(
    vertices: &[Vertex<T>],
    index: &LayeredIndex<T>,
    j: usize,
    params: &ModelParams<T>,
    key: u64,
    scratch: &mut Vec<u32>,
) -> Vec<Edge> {
    let me = vertices[j];
    let v = me.birth;
    let scale = params.profile_a * params.beta * v.powf(params.gamma - T::one());
    let keep = params.retention_probability().as_f64();
    let deterministic = params.is_deterministic_kernel();
    scratch.clear();
    let top = layer_of(v);
    // layers strictly older than `v`'s own layer, plus its own layer
    for k in (top..index.layers.len()).rev() {
        if index.layers[k].is_empty() {
            continue;
        }
        let min_birth = T::of(2.0).powi(-(k as i32) - 1);
        let radius = scale * min_birth.powf(-params.gamma);
        index.query(k, me.position, radius, params, scratch);
    }
    let mut out: Vec<Edge> = scratch
        .iter()
        .map(|&s| &vertices[s as usize])
        .filter(|o| o.is_older_than(&me))
        .filter(|o| distance(o.position, me.position, params) <= scale * o.birth.powf(-params.gamma))
        .filter(|o| deterministic || keyed_uniform(key, me.id as u64, o.id as u64) < keep)
        .map(|o| Edge {
            younger: me.id,
            older: o.id,
            protected: false,
        })
        .collect();
    out.sort_unstable_by_key(|e| e.older);
    out
}

/// Builds the directed edge set on vertices sorted by birth.
///
/// An older vertex `(x, u)` and a younger one `(y, v)` form a candidate when
/// `|x - y| <= a beta u^-gamma v^(gamma-1)`; for `a = 1/2` every candidate is
/// an edge, otherwise candidates are kept independently with probability
/// `1/(2a)`. The random source is only consulted for `a > 1/2`.
pub fn build_edges<T: Real, R: Rng + ?Sized>(
    vertices: &[Vertex<T>],
    params: &ModelParams<T>,
    rng: &mut R,
) -> Result<EdgeSet> {
    params.validate_relaxed()?;
    check_sorted(vertices)?;
    IdIndex::new(vertices)?;
    let key = if params.is_deterministic_kernel() {
        0
    } else {
        draw_key(rng)
    };
    let index = LayeredIndex::new(vertices);
    let per_vertex: Vec<Vec<Edge>> = (0..vertices.len())
        .into_par_iter()
        .map_init(Vec::new, |scratch, j| {
            older_neighbours(vertices, &index, j, params, key, scratch)
        })
        .collect();
    let mut edges: Vec<Edge> = per_vertex.into_iter().flatten().collect();
    edges.sort_unstable_by_key(|e| (e.younger, e.older));
    Ok(EdgeSet::from_sorted(edges))
}

/// Marks every edge protected or exposed.
///
/// `(z, w) -> (x, u)` is protected when `w <= 2u`, or when `(z, w)` also
/// connects to another vertex `(y, v)` with `v <= 2u <= 4v`. Classification
/// uses the unthinned graph.
pub fn classify_protected<T: Real>(edge_set: &EdgeSet, vertices: &[Vertex<T>]) -> Result<EdgeSet> {
    let index = IdIndex::new(vertices)?;
    let mut edges = edge_set.edges.clone();
    let two = T::of(2.0);
    let mut births: Vec<T> = Vec::new();
    for (younger, run) in edge_set.runs() {
        let w = vertices[index.get(younger)?].birth;
        births.clear();
        for e in &edge_set.edges[run.clone()] {
            births.push(vertices[index.get(e.older)?].birth);
        }
        let mut sorted = births.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite births"));
        for (offset, &u) in births.iter().enumerate() {
            let protected = if w <= two * u {
                true
            } else {
                // births in [u/2, 2u], the edge's own older endpoint included
                let lo = sorted.partition_point(|&b| b < u / two);
                let hi = sorted.partition_point(|&b| b <= two * u);
                hi - lo >= 2
            };
            edges[run.start + offset].protected = protected;
        }
    }
    Ok(EdgeSet {
        edges,
        classified: true,
    })
}

/// Thinning configuration: exposed edges to an older vertex born at `u`
/// survive with probability `u^eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thinning<T = f64> {
    pub gamma: T,
    pub eta: T,
    /// Skip the admissibility check on `(gamma, eta)`.
    pub force: bool,
}

impl<T: Real> Thinning<T> {
    pub fn from_params(params: &ModelParams<T>) -> Self {
        Thinning {
            gamma: params.gamma,
            eta: params.eta,
            force: false,
        }
    }
}

/// Removes exposed edges independently; protected edges always survive.
/// Draws are keyed by the edge's vertex ids so the result does not depend
/// on scheduling.
pub fn thin<T: Real, R: Rng + ?Sized>(
    edge_set: &EdgeSet,
    vertices: &[Vertex<T>],
    thinning: &Thinning<T>,
    rng: &mut R,
) -> Result<EdgeSet> {
    if !edge_set.classified {
        return Err(Error::precondition("edges must be classified before thinning"));
    }
    if !(thinning.eta >= T::zero()) {
        return Err(Error::invalid(format!("eta must be non-negative, got {}", thinning.eta)));
    }
    if !thinning.force {
        check_thinning(thinning.gamma, thinning.eta)?;
    }
    if thinning.eta == T::zero() {
        return Ok(edge_set.clone());
    }
    let index = IdIndex::new(vertices)?;
    let key = draw_key(rng);
    let eta = thinning.eta.as_f64();
    let mut kept = Vec::with_capacity(edge_set.len());
    for e in &edge_set.edges {
        if e.protected {
            kept.push(*e);
            continue;
        }
        let u = vertices[index.get(e.older)?].birth.as_f64();
        if keyed_uniform(key, e.younger as u64, e.older as u64) < u.powf(eta) {
            kept.push(*e);
        }
    }
    Ok(EdgeSet {
        edges: kept,
        classified: true,
    })
}

/// Full edge construction for a model: kernel, then classification and
/// thinning when `eta > 0`.
pub fn build_model_edges<T: Real, R: Rng + ?Sized>(
    vertices: &[Vertex<T>],
    params: &ModelParams<T>,
    rng: &mut R,
) -> Result<EdgeSet> {
    let edges = build_edges(vertices, params, rng)?;
    if params.eta > T::zero() {
        let classified = classify_protected(&edges, vertices)?;
        let thinning = Thinning {
            gamma: params.gamma,
            eta: params.eta,
            force: true,
        };
        thin(&classified, vertices, &thinning, rng)
    } else {
        Ok(edges)
    }
}

/// Edges of a Palm sample: every neighbour is joined to the centre and
/// neighbour pairs follow the kernel on their absolute coordinates. The
/// window is treated as the whole line.
pub fn palm_edges<T: Real, R: Rng + ?Sized>(
    sample: &PalmSample<T>,
    params: &ModelParams<T>,
    rng: &mut R,
) -> Result<(Vec<Vertex<T>>, EdgeSet)> {
    let vertices = sample.vertices();
    let center = PalmSample::<T>::CENTER_ID;
    let mut line = *params;
    line.torus = false;
    let neighbours: Vec<Vertex<T>> = vertices.iter().copied().filter(|v| v.id != center).collect();
    let mut edges = build_edges(&neighbours, &line, rng)?.edges;
    edges.extend(sample.older.iter().map(|o| Edge {
        younger: center,
        older: o.id,
        protected: false,
    }));
    edges.extend(sample.younger.iter().map(|y| Edge {
        younger: y.id,
        older: center,
        protected: false,
    }));
    edges.sort_unstable_by_key(|e| (e.younger, e.older));
    Ok((vertices, EdgeSet::from_sorted(edges)))
}
