//! Classification of forbidden edge-ordered forests: close vertices, the
//! order-chromatic-number-2 witness, and the left-vertex enumeration used by
//! the grid machinery.
//!
//! A vertex is *close* when its incident edges are consecutive in the
//! edge-order. A forest has order chromatic number 2 exactly when it admits a
//! proper 2-coloring with one color class (the *left* side) entirely close;
//! the left vertices can then be enumerated w1..wk so that every edge at wi
//! precedes every edge at wj for i < j.

use crate::graph::EdgeOrderedGraph;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("underlying graph is not a forest")]
    NotForest,
    #[error("pattern has no edges")]
    NoEdges,
    #[error("order chromatic number exceeds 2: no all-close side exists")]
    NoWitness,
}

/// Witness that a forest has order chromatic number 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ocn2Witness {
    /// The all-close color class (left vertices), unordered.
    pub close_side: Vec<usize>,
    /// The other color class (right vertices).
    pub other_side: Vec<usize>,
    /// Enumeration w1..wk of the close side: edge-touching vertices ordered by
    /// their label intervals, isolated close-side vertices appended last.
    pub left_order: Vec<usize>,
}

/// An edge-ordered forest certified to have order chromatic number 2.
#[derive(Debug, Clone)]
pub struct ForbiddenForest {
    pub graph: EdgeOrderedGraph,
    pub witness: Ocn2Witness,
    /// Number of left vertices.
    pub k: usize,
    /// Total vertex count.
    pub ell: usize,
    /// True when k = 1, i.e. the pattern is an edge-ordered star (plus
    /// possibly isolated vertices); stars have a single edge-ordering up to
    /// isomorphism and a linear extremal function, so the driver shortcuts.
    pub star: bool,
}

impl ForbiddenForest {
    /// 1-based left index of vertex `v` (the class its edges must land in),
    /// or `None` for right vertices.
    pub fn left_index(&self, v: usize) -> Option<usize> {
        self.witness.left_order.iter().position(|&w| w == v).map(|i| i + 1)
    }

    pub fn is_left(&self, v: usize) -> bool {
        self.witness.close_side.contains(&v)
    }

    /// Pattern edges as (edge index, left vertex, right vertex, class).
    /// Class = the 1-based position of the left endpoint in the left order.
    pub fn classed_edges(&self) -> Vec<(usize, usize, usize, usize)> {
        self.graph
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let (w, y) = if self.is_left(e.u) { (e.u, e.v) } else { (e.v, e.u) };
                (i, w, y, self.left_index(w).expect("left endpoint"))
            })
            .collect()
    }
}

/// Exactly the vertices whose incident labels form a contiguous block in the
/// sorted label sequence. Isolated and degree-1 vertices are always close.
pub fn close_vertices(g: &EdgeOrderedGraph) -> Vec<usize> {
    (0..g.n()).filter(|&v| is_close(g, v)).collect()
}

pub fn is_close(g: &EdgeOrderedGraph, v: usize) -> bool {
    // edges are stored sorted by label, so the incident edge indices are the
    // label ranks; close ⟺ the ranks are consecutive
    let inc = g.incident(v);
    match (inc.first(), inc.last()) {
        (Some(&first), Some(&last)) => last - first + 1 == inc.len(),
        _ => true,
    }
}

/// Find a proper 2-coloring with one side all-close, if one exists.
///
/// Per component both bipartition sides are examined; when both qualify the
/// smaller one is chosen (ties broken toward the side containing the smaller
/// vertex id), keeping k minimal. Isolated vertices join the close side and
/// come last in the left order.
pub fn ocn2_witness(h: &EdgeOrderedGraph) -> Result<Option<Ocn2Witness>, PatternError> {
    if h.m() == 0 {
        return Err(PatternError::NoEdges);
    }
    if !h.is_forest() {
        return Err(PatternError::NotForest);
    }
    let mut close_side = Vec::new();
    let mut other_side = Vec::new();
    for comp in h.components() {
        if comp.len() == 1 {
            close_side.push(comp[0]);
            continue;
        }
        let (a, b) = bipartition(h, &comp);
        let a_close = a.iter().all(|&v| is_close(h, v));
        let b_close = b.iter().all(|&v| is_close(h, v));
        let take_a = match (a_close, b_close) {
            (true, true) => {
                a.len() < b.len() || (a.len() == b.len() && a.iter().min() < b.iter().min())
            }
            (true, false) => true,
            (false, true) => false,
            (false, false) => return Ok(None),
        };
        if take_a {
            close_side.extend(a);
            other_side.extend(b);
        } else {
            close_side.extend(b);
            other_side.extend(a);
        }
    }
    close_side.sort_unstable();
    other_side.sort_unstable();
    let left_order = left_order(h, &close_side).expect("disjoint intervals on an all-close side");
    Ok(Some(Ocn2Witness { close_side, other_side, left_order }))
}

/// Order the close-side vertices by their incident label intervals. Distinct
/// close vertices on one side of a proper 2-coloring share no edges, so their
/// intervals of label ranks are disjoint and totally ordered; `None` if that
/// fails (which would mean the input is not a valid all-close side).
pub fn left_order(h: &EdgeOrderedGraph, close_side: &[usize]) -> Option<Vec<usize>> {
    let mut with_edges: Vec<usize> = close_side
        .iter()
        .copied()
        .filter(|&v| h.degree(v) > 0)
        .collect();
    for &v in &with_edges {
        if !is_close(h, v) {
            return None;
        }
    }
    with_edges.sort_by_key(|&v| h.incident(v)[0]);
    // verify the intervals are pairwise disjoint and in order
    let mut prev_last: Option<usize> = None;
    for &v in &with_edges {
        let inc = h.incident(v);
        let (first, last) = (inc[0], *inc.last().unwrap());
        if let Some(p) = prev_last {
            if first <= p {
                return None;
            }
        }
        prev_last = Some(last);
    }
    let mut order = with_edges;
    order.extend(close_side.iter().copied().filter(|&v| h.degree(v) == 0));
    Some(order)
}

/// Bipartition of a connected component (BFS 2-coloring from its smallest
/// vertex). Forests are always bipartite.
fn bipartition(h: &EdgeOrderedGraph, comp: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let start = comp[0];
    let mut color = vec![None; h.n()];
    color[start] = Some(0u8);
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        let c = color[v].unwrap();
        for w in h.neighbors(v) {
            if color[w].is_none() {
                color[w] = Some(1 - c);
                queue.push_back(w);
            }
        }
    }
    let a = comp.iter().copied().filter(|&v| color[v] == Some(0)).collect();
    let b = comp.iter().copied().filter(|&v| color[v] == Some(1)).collect();
    (a, b)
}

/// Machine-check a witness against its type invariants.
pub fn witness_valid(h: &EdgeOrderedGraph, w: &Ocn2Witness) -> bool {
    let mut side = vec![None; h.n()];
    for &v in &w.close_side {
        side[v] = Some(true);
    }
    for &v in &w.other_side {
        if side[v].is_some() {
            return false;
        }
        side[v] = Some(false);
    }
    if side.iter().any(|s| s.is_none()) {
        return false;
    }
    // proper 2-coloring
    if h.edges().iter().any(|e| side[e.u] == side[e.v]) {
        return false;
    }
    // every close-side vertex close
    if !w.close_side.iter().all(|&v| is_close(h, v)) {
        return false;
    }
    // the left order lists exactly the close side and respects the intervals
    let mut sorted = w.left_order.clone();
    sorted.sort_unstable();
    let mut cs = w.close_side.clone();
    cs.sort_unstable();
    if sorted != cs {
        return false;
    }
    let mut prev_last: Option<usize> = None;
    for &v in &w.left_order {
        let inc = h.incident(v);
        if inc.is_empty() {
            continue; // isolated, placed last by convention
        }
        let (first, last) = (inc[0], *inc.last().unwrap());
        if let Some(p) = prev_last {
            if first <= p {
                return false;
            }
        }
        prev_last = Some(last);
    }
    true
}

/// Certify a forest as a forbidden pattern with order chromatic number 2.
pub fn certify(h: &EdgeOrderedGraph) -> Result<ForbiddenForest, PatternError> {
    let witness = ocn2_witness(h)?.ok_or(PatternError::NoWitness)?;
    let k = witness.close_side.len();
    Ok(ForbiddenForest {
        graph: h.clone(),
        star: k == 1,
        k,
        ell: h.n(),
        witness,
    })
}
