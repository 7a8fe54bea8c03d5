//! Core types: edge-ordered graphs, the EOG text format, P-notation paths,
//! label normalization and edge-ordered isomorphism.

use num::{BigInt, BigRational};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("duplicate label {0}")]
    DuplicateLabel(i64),
    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: String },
    #[error("graph has no vertices")]
    Empty,
    #[error("bad path notation {notation:?}: {reason}")]
    PathNotation { notation: String, reason: String },
}

/// A single labeled edge. Endpoints are stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub label: i64,
}

impl Edge {
    /// The endpoint that is not `w`. Panics if `w` is not an endpoint.
    pub fn other(&self, w: usize) -> usize {
        if self.u == w {
            self.v
        } else {
            assert_eq!(self.v, w);
            self.u
        }
    }

    pub fn touches(&self, w: usize) -> bool {
        self.u == w || self.v == w
    }
}

/// A simple graph with an injective integer labeling of its edges.
///
/// Invariants (enforced by every constructor): no self-loops, no parallel
/// edges, pairwise distinct labels, vertex ids in `[0, n)`. Edges are stored
/// sorted by label, so `edges()[i]` is the `i`-th edge in the edge-order.
/// Values are immutable after construction.
#[derive(Debug, Clone)]
pub struct EdgeOrderedGraph {
    n: usize,
    edges: Vec<Edge>,
    /// Per-vertex incident edge indices, sorted by label.
    adj: Vec<Vec<usize>>,
}

impl PartialEq for EdgeOrderedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}
impl Eq for EdgeOrderedGraph {}

impl EdgeOrderedGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize, i64)>) -> Result<Self, GraphError> {
        let mut seen_pairs = HashSet::new();
        let mut seen_labels = HashSet::new();
        let mut es = Vec::with_capacity(edges.len());
        for (u, v, label) in edges {
            if u >= n {
                return Err(GraphError::VertexOutOfRange { vertex: u, n });
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            if !seen_pairs.insert((a, b)) {
                return Err(GraphError::DuplicateEdge(a, b));
            }
            if !seen_labels.insert(label) {
                return Err(GraphError::DuplicateLabel(label));
            }
            es.push(Edge { u: a, v: b, label });
        }
        es.sort_by_key(|e| e.label);
        let mut adj = vec![Vec::new(); n];
        for (i, e) in es.iter().enumerate() {
            adj[e.u].push(i);
            adj[e.v].push(i);
        }
        Ok(EdgeOrderedGraph { n, edges: es, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted by label.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Indices (into `edges()`) of the edges incident to `v`, sorted by label.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Labels of the edges incident to `v`, ascending.
    pub fn incident_labels(&self, v: usize) -> Vec<i64> {
        self.adj[v].iter().map(|&i| self.edges[i].label).collect()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().map(move |&i| self.edges[i].other(v))
    }

    /// Index of the edge joining `u` and `v`, if present.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.adj[u]
            .iter()
            .copied()
            .find(|&i| self.edges[i].other(u) == v)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(|a| a.len()).max().unwrap_or(0)
    }

    /// Average degree 2m/n as an exact rational.
    pub fn average_degree(&self) -> Result<BigRational, GraphError> {
        if self.n == 0 {
            return Err(GraphError::Empty);
        }
        Ok(BigRational::new(
            BigInt::from(2 * self.m()),
            BigInt::from(self.n),
        ))
    }

    /// Order-isomorphic copy whose labels are exactly 1..m (rank map).
    pub fn normalize_labels(&self) -> Self {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.u, e.v, (i + 1) as i64))
            .collect();
        Self::new(self.n, edges).expect("relabeling preserves invariants")
    }

    /// True iff the labels are exactly 1..m.
    pub fn is_normalized(&self) -> bool {
        self.edges
            .iter()
            .enumerate()
            .all(|(i, e)| e.label == (i + 1) as i64)
    }

    /// Copy with the edges at the given indices removed (same vertex set,
    /// labels kept).
    pub fn without_edges(&self, remove: &HashSet<usize>) -> Self {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !remove.contains(i))
            .map(|(_, e)| (e.u, e.v, e.label))
            .collect();
        Self::new(self.n, edges).expect("edge removal preserves invariants")
    }

    /// Subgraph spanned by the given edge indices, compacted onto its
    /// non-isolated vertices. Returns the subgraph (labels kept) and the map
    /// from new vertex ids to old ones.
    pub fn compact_subgraph(&self, edge_indices: &[usize]) -> (Self, Vec<usize>) {
        let mut old_ids: Vec<usize> = edge_indices
            .iter()
            .flat_map(|&i| [self.edges[i].u, self.edges[i].v])
            .collect();
        old_ids.sort_unstable();
        old_ids.dedup();
        let new_id: HashMap<usize, usize> =
            old_ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges = edge_indices
            .iter()
            .map(|&i| {
                let e = &self.edges[i];
                (new_id[&e.u], new_id[&e.v], e.label)
            })
            .collect();
        let g = Self::new(old_ids.len(), edges).expect("subgraph preserves invariants");
        (g, old_ids)
    }

    /// Parse the EOG text format: first line `n m`, then m lines `u v label`.
    /// `#` starts a comment that runs to the end of the line.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        let mut edge_lines = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let lineno = lineno + 1;
            if header.is_none() {
                if fields.len() != 2 {
                    return Err(GraphError::Parse {
                        line: lineno,
                        kind: format!("expected header \"n m\", got {:?}", line),
                    });
                }
                let n = parse_field(fields[0], lineno)?;
                let m = parse_field(fields[1], lineno)?;
                header = Some((n, m));
            } else {
                if fields.len() != 3 {
                    return Err(GraphError::Parse {
                        line: lineno,
                        kind: format!("expected edge \"u v label\", got {:?}", line),
                    });
                }
                let u: usize = parse_field(fields[0], lineno)?;
                let v: usize = parse_field(fields[1], lineno)?;
                let label: i64 = parse_field(fields[2], lineno)?;
                edges.push((u, v, label));
                edge_lines.push(lineno);
                // validate the prefix now so the error carries this line number
                let (n, _) = header.unwrap();
                if let Err(e) = Self::new(n, edges.clone()) {
                    return Err(GraphError::Parse {
                        line: lineno,
                        kind: e.to_string(),
                    });
                }
            }
        }
        let (n, m) = header.ok_or(GraphError::Parse {
            line: 0,
            kind: "empty input".into(),
        })?;
        if edges.len() != m {
            return Err(GraphError::Parse {
                line: 0,
                kind: format!("header declares {} edges, found {}", m, edges.len()),
            });
        }
        Self::new(n, edges)
    }

    /// Emit the EOG text format, edges sorted by label. `parse ∘ serialize`
    /// is the identity on valid graphs.
    pub fn serialize(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.m());
        for e in &self.edges {
            out.push_str(&format!("{} {} {}\n", e.u, e.v, e.label));
        }
        out
    }

    /// Parse path notation like `P5^1342` (one digit per label) or
    /// `P10^1,3,2,4,5,6,7,8,9` (comma-separated labels). A `Pk^...` string
    /// denotes the path v0..v(k-1) whose edge v(i)v(i+1) carries the i-th
    /// listed label.
    pub fn parse_path_notation(s: &str) -> Result<Self, GraphError> {
        let err = |reason: &str| GraphError::PathNotation {
            notation: s.to_string(),
            reason: reason.to_string(),
        };
        let rest = s.strip_prefix('P').ok_or_else(|| err("must start with 'P'"))?;
        let (k_str, labels_str) = rest.split_once('^').ok_or_else(|| err("missing '^'"))?;
        let k: usize = k_str.parse().map_err(|_| err("bad vertex count"))?;
        if k < 2 {
            return Err(err("path needs at least 2 vertices"));
        }
        let labels: Vec<i64> = if labels_str.contains(',') {
            labels_str
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| err("bad label")))
                .collect::<Result<_, _>>()?
        } else {
            labels_str
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as i64).ok_or_else(|| err("bad digit label")))
                .collect::<Result<_, _>>()?
        };
        if labels.len() != k - 1 {
            return Err(err(&format!(
                "path on {} vertices needs {} labels, got {}",
                k,
                k - 1,
                labels.len()
            )));
        }
        let edges = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (i, i + 1, l))
            .collect();
        Self::new(k, edges).map_err(|e| err(&e.to_string()))
    }

    /// Connected components of the underlying simple graph, each a sorted
    /// vertex list.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// True iff the underlying simple graph is acyclic.
    pub fn is_forest(&self) -> bool {
        // a simple graph is a forest iff m = n - #components
        self.m() + self.components().len() == self.n
    }
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize) -> Result<T, GraphError> {
    s.parse().map_err(|_| GraphError::Parse {
        line,
        kind: format!("bad integer {:?}", s),
    })
}

impl fmt::Display for EdgeOrderedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.serialize())
    }
}

/// An injective vertex map pattern → host. `map[p]` is the host image of
/// pattern vertex `p`. Validity (edge and order preservation) is checked by
/// `oracle::verify_embedding`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub map: Vec<usize>,
}

impl Embedding {
    pub fn new(map: Vec<usize>) -> Self {
        Embedding { map }
    }

    /// Rewrite images through `vertex_map` (new id -> outer id), for lifting
    /// an embedding found in a compacted subgraph back to the original host.
    pub fn lift(&self, vertex_map: &[usize]) -> Embedding {
        Embedding {
            map: self.map.iter().map(|&v| vertex_map[v]).collect(),
        }
    }
}

/// Edge-ordered isomorphism: does some vertex bijection induce a
/// label-order-preserving edge bijection?
///
/// Since both edge lists are sorted by label and an isomorphism must preserve
/// the order, the i-th edge of `a` has to map to the i-th edge of `b`; we
/// backtrack over the two orientations of each edge and extend by unmatched
/// isolated vertices, which is cheap at desk scale.
pub fn is_isomorphic(a: &EdgeOrderedGraph, b: &EdgeOrderedGraph) -> bool {
    if a.n() != b.n() || a.m() != b.m() {
        return false;
    }
    fn go(
        a: &EdgeOrderedGraph,
        b: &EdgeOrderedGraph,
        idx: usize,
        fwd: &mut [Option<usize>],
        used: &mut [bool],
    ) -> bool {
        if idx == a.m() {
            return true; // leftover vertices are isolated on both sides (n, m equal)
        }
        let ea = a.edges()[idx];
        let eb = b.edges()[idx];
        for (x, y) in [(eb.u, eb.v), (eb.v, eb.u)] {
            let ok_u = fwd[ea.u].map_or(!used[x], |img| img == x);
            let ok_v = fwd[ea.v].map_or(!used[y], |img| img == y);
            if ok_u && ok_v {
                let set_u = fwd[ea.u].is_none();
                let set_v = fwd[ea.v].is_none();
                if set_u {
                    fwd[ea.u] = Some(x);
                    used[x] = true;
                }
                if set_v {
                    fwd[ea.v] = Some(y);
                    used[y] = true;
                }
                if go(a, b, idx + 1, fwd, used) {
                    return true;
                }
                if set_u {
                    fwd[ea.u] = None;
                    used[x] = false;
                }
                if set_v {
                    fwd[ea.v] = None;
                    used[y] = false;
                }
            }
        }
        false
    }
    let mut fwd = vec![None; a.n()];
    let mut used = vec![false; b.n()];
    go(a, b, 0, &mut fwd, &mut used)
}

/// Equivalence up to reversal of the edge order: `a` and `b` are equivalent
/// if `b` is isomorphic to `a` or to `a` with its edge-order reversed.
/// Reversal-equivalent graphs have the same extremal function, and it is in
/// this sense that the exceptional 4-edge paths with label sequences 1342 and
/// 4213 are the same case; they are not isomorphic in the strict sense.
pub fn is_equivalent(a: &EdgeOrderedGraph, b: &EdgeOrderedGraph) -> bool {
    is_isomorphic(a, b) || is_isomorphic(&a.reverse_order(), b)
}

impl EdgeOrderedGraph {
    /// Copy with the edge-order reversed (labels negated, then normalized).
    pub fn reverse_order(&self) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|e| (e.u, e.v, -e.label))
            .collect();
        Self::new(self.n, edges)
            .expect("negating labels preserves invariants")
            .normalize_labels()
    }
}
