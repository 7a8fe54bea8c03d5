//! Grids, edge classes, j-degrees, vertex and graph weights, and the
//! constructive nice-embedding algorithm.
//!
//! A grid is a strictly increasing threshold vector 0 = t0 < t1 < ... < tk = m
//! splitting the labels 1..m into k classes: an edge of label L belongs to
//! class j when t(j-1) < L <= tj. The j-degree of a vertex counts its class-j
//! edges, its weight is the minimum j-degree over all classes, and it is
//! heavy when that weight reaches the pattern's vertex count. A nice
//! embedding additionally maps every right vertex to a heavy vertex and every
//! pattern edge at the i-th left vertex to a class-i host edge.
//!
//! When the host weight reaches 2*ell*(u+1)*n, `nice_embed` is guaranteed to
//! succeed on any u-edge subpattern; below that threshold it is best-effort.

use crate::graph::{EdgeOrderedGraph, Embedding};
use crate::oracle::verify_embedding;
use crate::pattern::ForbiddenForest;
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WeightError {
    #[error("thresholds must satisfy 0 = t0 < t1 < ... < tk")]
    BadThresholds,
    #[error("grid/graph mismatch (t_k = {tk}, labels require {needed})")]
    Mismatch { tk: i64, needed: i64 },
}

/// Integer thresholds 0 = t0 < t1 < ... < tk = m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    thresholds: Vec<i64>,
}

impl Grid {
    pub fn new(thresholds: Vec<i64>) -> Result<Self, WeightError> {
        if thresholds.len() < 2 || thresholds[0] != 0 {
            return Err(WeightError::BadThresholds);
        }
        if !thresholds.windows(2).all(|w| w[0] < w[1]) {
            return Err(WeightError::BadThresholds);
        }
        Ok(Grid { thresholds })
    }

    /// Number of classes k.
    pub fn k(&self) -> usize {
        self.thresholds.len() - 1
    }

    /// Top threshold t_k.
    pub fn top(&self) -> i64 {
        *self.thresholds.last().unwrap()
    }

    pub fn thresholds(&self) -> &[i64] {
        &self.thresholds
    }

    /// 1-based class of a label in (0, t_k].
    pub fn class_of(&self, label: i64) -> usize {
        debug_assert!(label > 0 && label <= self.top());
        // first j with label <= t_j
        match self.thresholds.binary_search(&label) {
            Ok(j) => j,
            Err(j) => j,
        }
    }
}

/// Per-vertex j-degrees, weights and the graph weight for one (graph, grid)
/// pair.
#[derive(Debug, Clone)]
pub struct WeightProfile {
    pub k: usize,
    /// `degrees[v][j-1]` = class-j degree of v.
    pub degrees: Vec<Vec<usize>>,
    /// `weights[v]` = min over j of the j-degree.
    pub weights: Vec<usize>,
    /// Sum of all vertex weights.
    pub total: u64,
}

impl WeightProfile {
    pub fn is_heavy(&self, v: usize, ell: usize) -> bool {
        self.weights[v] >= ell
    }

    /// Vertices with weight at least `ell`, ascending.
    pub fn heavy_vertices(&self, ell: usize) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&v| self.weights[v] >= ell)
            .collect()
    }
}

/// Classify every edge of `g` by the grid and compute the weight profile.
///
/// Labels must lie in (0, t_k]; a normalized host additionally needs
/// t_k = m exactly (subgraphs of a normalized host keep their original
/// labels, so for them t_k may exceed the remaining edge count).
pub fn classify(g: &EdgeOrderedGraph, t: &Grid) -> Result<WeightProfile, WeightError> {
    if g.is_normalized() && g.m() > 0 && t.top() != g.m() as i64 {
        return Err(WeightError::Mismatch { tk: t.top(), needed: g.m() as i64 });
    }
    classify_lenient(g, t)
}

/// Like [`classify`] but only requires labels in (0, t_k]: subgraphs of a
/// normalized host keep their original labels, which may happen to be a
/// prefix 1..m' without the grid referring to m'.
pub fn classify_lenient(g: &EdgeOrderedGraph, t: &Grid) -> Result<WeightProfile, WeightError> {
    let max_label = g.edges().iter().map(|e| e.label).max().unwrap_or(0);
    if max_label > t.top() || g.edges().iter().any(|e| e.label <= 0) {
        return Err(WeightError::Mismatch { tk: t.top(), needed: max_label });
    }
    let k = t.k();
    let mut degrees = vec![vec![0usize; k]; g.n()];
    for e in g.edges() {
        let j = t.class_of(e.label);
        degrees[e.u][j - 1] += 1;
        degrees[e.v][j - 1] += 1;
    }
    let weights: Vec<usize> = degrees
        .iter()
        .map(|d| d.iter().copied().min().unwrap_or(0))
        .collect();
    let total = weights.iter().map(|&w| w as u64).sum();
    Ok(WeightProfile { k, degrees, weights, total })
}

/// Weight of a single vertex from its sorted incident labels: the minimum
/// over grid classes of the number of incident labels falling in that class.
/// Cheaper than a full profile when only one vertex matters.
pub fn vertex_weight(labels: &[i64], t: &Grid) -> usize {
    debug_assert!(labels.windows(2).all(|w| w[0] < w[1]));
    let ts = t.thresholds();
    (1..ts.len())
        .map(|j| {
            labels.partition_point(|&l| l <= ts[j]) - labels.partition_point(|&l| l <= ts[j - 1])
        })
        .min()
        .unwrap_or(0)
}

/// The weight threshold 2*ell*(u+1)*n above which a u-edge subpattern is
/// guaranteed a nice embedding.
pub fn weight_threshold(ell: usize, u: usize, n: usize) -> u64 {
    2 * ell as u64 * (u as u64 + 1) * n as u64
}

/// An embedding certified nice with respect to a grid.
#[derive(Debug, Clone)]
pub struct NiceEmbedding {
    pub embedding: Embedding,
    pub grid: Grid,
}

/// Check the nice-embedding conditions directly from a freshly computed
/// weight profile: a valid order-preserving embedding, right vertices on
/// heavy host vertices, each edge at the i-th left vertex on a class-i edge.
pub fn verify_nice(
    pattern: &ForbiddenForest,
    host: &EdgeOrderedGraph,
    ne: &NiceEmbedding,
) -> bool {
    if !verify_embedding(host, &pattern.graph, &ne.embedding) {
        return false;
    }
    let Ok(profile) = classify_lenient(host, &ne.grid) else {
        return false;
    };
    for &y in &pattern.witness.other_side {
        if !profile.is_heavy(ne.embedding.map[y], pattern.ell) {
            return false;
        }
    }
    for (_, w, y, class) in pattern.classed_edges() {
        let hidx = host
            .edge_between(ne.embedding.map[w], ne.embedding.map[y])
            .expect("verified embedding maps edges to edges");
        if ne.grid.class_of(host.edges()[hidx].label) != class {
            return false;
        }
    }
    true
}

/// Construct a nice embedding of the full pattern in `host` with respect to
/// grid `t`, following the inductive proof step by step:
///
/// * no edges left: map right vertices injectively onto heavy vertices and
///   left vertices onto remaining vertices;
/// * a left leaf wi exists: embed the rest, then extend along a class-i edge
///   from the image of wi's neighbor to a vertex outside the image;
/// * otherwise: walk along extremal (lowest-or-highest, never backtracking)
///   edges to a right leaf y with neighbor wi, delete for every host vertex
///   its ell smallest (resp. largest) eligible edges — class-i edges whose
///   other endpoint is heavy — embed the rest in the smaller host, and
///   extend using one of the deleted eligible edges at the image of wi.
///
/// Deterministic: the extension vertex is always the smallest admissible host
/// id. Returns `None` only below the weight threshold.
pub fn nice_embed(
    pattern: &ForbiddenForest,
    host: &EdgeOrderedGraph,
    t: &Grid,
) -> Option<NiceEmbedding> {
    let all_vertices: Vec<usize> = (0..pattern.graph.n()).collect();
    let all_edges: Vec<usize> = (0..pattern.graph.m()).collect();
    let map = embed_rec(pattern, &all_vertices, &all_edges, host, t)?;
    let embedding = Embedding::new(map.iter().map(|v| v.expect("total map")).collect());
    let ne = NiceEmbedding { embedding, grid: t.clone() };
    verify_nice(pattern, host, &ne).then_some(ne)
}

/// One step of the induction on the subpattern (`h_verts`, `h_edges`).
/// Returns a partial map defined exactly on `h_verts`.
fn embed_rec(
    pattern: &ForbiddenForest,
    h_verts: &[usize],
    h_edges: &[usize],
    host: &EdgeOrderedGraph,
    t: &Grid,
) -> Option<Vec<Option<usize>>> {
    let profile = classify_lenient(host, t).ok()?;
    let ell = pattern.ell;

    if h_edges.is_empty() {
        return base_case(pattern, h_verts, host, &profile);
    }

    // degree of each pattern vertex within the subpattern
    let mut deg = vec![0usize; pattern.graph.n()];
    for &ei in h_edges {
        let e = pattern.graph.edges()[ei];
        deg[e.u] += 1;
        deg[e.v] += 1;
    }

    // left-leaf case, smallest left index first for determinism
    let left_leaf = pattern
        .witness
        .left_order
        .iter()
        .copied()
        .find(|&w| h_verts.contains(&w) && deg[w] == 1);
    if let Some(wi) = left_leaf {
        let class = pattern.left_index(wi).expect("left vertex");
        let leaf_edge = *h_edges
            .iter()
            .find(|&&ei| pattern.graph.edges()[ei].touches(wi))
            .expect("degree 1");
        let y = pattern.graph.edges()[leaf_edge].other(wi);
        let sub_verts: Vec<usize> = h_verts.iter().copied().filter(|&v| v != wi).collect();
        let sub_edges: Vec<usize> = h_edges.iter().copied().filter(|&e| e != leaf_edge).collect();
        let mut map = embed_rec(pattern, &sub_verts, &sub_edges, host, t)?;
        let fy = map[y].expect("y embedded");
        let image: HashSet<usize> = map.iter().flatten().copied().collect();
        let x = host
            .incident(fy)
            .iter()
            .map(|&hi| host.edges()[hi])
            .filter(|he| t.class_of(he.label) == class)
            .map(|he| he.other(fy))
            .filter(|x| !image.contains(x))
            .min()?;
        map[wi] = Some(x);
        return Some(map);
    }

    // no left leaf: extremal walk to a right leaf
    let (y, wi, smallest) = extremal_walk(pattern, h_verts, h_edges, &deg)?;
    let class = pattern.left_index(wi).expect("left vertex");
    let leaf_edge = *h_edges
        .iter()
        .find(|&&ei| pattern.graph.edges()[ei].touches(y))
        .expect("leaf has one edge");

    // per host vertex z, the ell smallest (resp. largest) eligible edges:
    // class-`class` edges xz with x heavy in the current host
    let mut removed: HashSet<usize> = HashSet::new();
    let mut removed_for: Vec<Vec<usize>> = vec![Vec::new(); host.n()];
    for z in 0..host.n() {
        let eligible = eligible_edges(host, t, &profile, ell, z, class);
        let chosen: Vec<usize> = if smallest {
            eligible.iter().copied().take(ell).collect()
        } else {
            eligible.iter().rev().copied().take(ell).collect()
        };
        removed.extend(chosen.iter().copied());
        removed_for[z] = chosen;
    }
    let sub_host = host.without_edges(&removed);
    let sub_verts: Vec<usize> = h_verts.iter().copied().filter(|&v| v != y).collect();
    let sub_edges: Vec<usize> = h_edges.iter().copied().filter(|&e| e != leaf_edge).collect();
    let mut map = embed_rec(pattern, &sub_verts, &sub_edges, &sub_host, t)?;
    let fw = map[wi].expect("wi embedded");
    let image: HashSet<usize> = map.iter().flatten().copied().collect();
    let x = removed_for[fw]
        .iter()
        .map(|&hi| host.edges()[hi].other(fw))
        .filter(|x| !image.contains(x))
        .min()?;
    map[y] = Some(x);
    Some(map)
}

/// Edge indices at `z` that are eligible for `z`: class `class` and other
/// endpoint heavy. Ascending by label.
fn eligible_edges(
    host: &EdgeOrderedGraph,
    t: &Grid,
    profile: &WeightProfile,
    ell: usize,
    z: usize,
    class: usize,
) -> Vec<usize> {
    host.incident(z)
        .iter()
        .copied()
        .filter(|&hi| {
            let he = host.edges()[hi];
            t.class_of(he.label) == class && profile.is_heavy(he.other(z), ell)
        })
        .collect()
}

/// Map right vertices onto heavy vertices and left vertices onto the
/// remaining ones, all injectively and in ascending id order.
fn base_case(
    pattern: &ForbiddenForest,
    h_verts: &[usize],
    host: &EdgeOrderedGraph,
    profile: &WeightProfile,
) -> Option<Vec<Option<usize>>> {
    let heavy = profile.heavy_vertices(pattern.ell);
    let mut map = vec![None; pattern.graph.n()];
    let mut used = vec![false; host.n()];
    let rights: Vec<usize> = h_verts
        .iter()
        .copied()
        .filter(|&v| !pattern.is_left(v))
        .collect();
    let lefts: Vec<usize> = h_verts
        .iter()
        .copied()
        .filter(|&v| pattern.is_left(v))
        .collect();
    // prefer heavy images for everyone, as in the proof's base case
    let mut heavy_iter = heavy.iter().copied();
    for &v in rights.iter().chain(lefts.iter()) {
        let img = heavy_iter.find(|&x| !used[x]).or_else(|| {
            if pattern.is_left(v) {
                (0..host.n()).find(|&x| !used[x])
            } else {
                None
            }
        })?;
        used[img] = true;
        map[v] = Some(img);
    }
    Some(map)
}

/// Walk from the lowest-id non-isolated vertex, always leaving on the lowest
/// incident edge unless that backtracks, in which case the highest. Forests
/// force this walk into a leaf, which (with no left leaves present) is a
/// right leaf whose edge is extremal at its neighbor. Returns
/// (leaf, neighbor, leaf edge is smallest at the neighbor).
fn extremal_walk(
    pattern: &ForbiddenForest,
    h_verts: &[usize],
    h_edges: &[usize],
    deg: &[usize],
) -> Option<(usize, usize, bool)> {
    let edge_set: HashSet<usize> = h_edges.iter().copied().collect();
    let incident = |v: usize| -> Vec<usize> {
        pattern
            .graph
            .incident(v)
            .iter()
            .copied()
            .filter(|ei| edge_set.contains(ei))
            .collect() // ascending by label
    };
    let start = h_verts.iter().copied().filter(|&v| deg[v] > 0).min()?;
    let mut prev: Option<usize> = None;
    let mut cur = start;
    loop {
        let inc = incident(cur);
        if inc.len() == 1 {
            if let Some(p) = prev {
                // reached a leaf; no left leaves exist, so it is a right leaf
                debug_assert!(!pattern.is_left(cur));
                let e = pattern.graph.edges()[inc[0]];
                debug_assert_eq!(e.other(cur), p);
                let at_p = incident(p);
                let smallest = at_p.first() == Some(&inc[0]);
                let largest = at_p.last() == Some(&inc[0]);
                debug_assert!(smallest || largest, "walk must arrive on an extremal edge");
                return Some((cur, p, smallest));
            }
        }
        let lowest = *inc.first().unwrap();
        let highest = *inc.last().unwrap();
        let step = if Some(pattern.graph.edges()[lowest].other(cur)) == prev {
            highest
        } else {
            lowest
        };
        let next = pattern.graph.edges()[step].other(cur);
        prev = Some(cur);
        cur = next;
    }
}
