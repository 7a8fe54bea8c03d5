//! Exact extremal numbers at desk scale by exhaustive search: descending
//! over edge counts, enumerating simple graphs up to isomorphism and edge
//! orderings up to the host's automorphisms, pruning every ordering prefix
//! that already contains the pattern. Ground truth for the bound and the
//! pipeline at tiny n.

use crate::graph::EdgeOrderedGraph;
use crate::oracle;
use crate::par;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExmaxError {
    #[error("n must be at least 2 (got {0})")]
    TooFewVertices(usize),
    #[error("pattern must have at least one edge")]
    EmptyPattern,
    #[error(
        "budget exhausted: verified lower bound {lower}, smallest refuted upper bound {}",
        refuted_above.map(|m| m.to_string()).unwrap_or_else(|| "none".into())
    )]
    BudgetExceeded {
        /// Largest edge count with a verified avoider (0 is always verified).
        lower: usize,
        /// Smallest edge count proven to admit no avoider, if any.
        refuted_above: Option<usize>,
    },
    #[error("cache I/O: {0}")]
    Cache(#[from] std::io::Error),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SearchStats {
    /// Canonical simple graphs whose orderings were searched.
    pub graphs: u64,
    /// Ordering-search nodes (label assignments tried).
    pub nodes: u64,
}

/// An exact extremal value with its witness and exhaustiveness record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExmaxResult {
    pub n: usize,
    /// Canonical (normalized) serialized pattern, the cache key.
    pub pattern: String,
    pub value: usize,
    /// Serialized extremal witness: n vertices, `value` edges, avoids the
    /// pattern; first avoider in the deterministic search order.
    pub witness: String,
    pub stats: SearchStats,
}

/// All pairs (u, v), u < v, in lexicographic order.
fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect()
}

/// All permutations of 0..n (n <= 7 at desk scale).
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn go(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                go(n, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    go(n, &mut cur, &mut used, &mut out);
    out
}

fn apply_perm(perm: &[usize], pairs: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut mapped: Vec<(usize, usize)> = pairs
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (perm[u], perm[v]);
            (a.min(b), a.max(b))
        })
        .collect();
    mapped.sort_unstable();
    mapped
}

/// Simple graphs on n vertices with exactly m edges, one representative per
/// isomorphism class: the lexicographically least edge list under vertex
/// relabeling. Enumerates edge subsets and keeps the self-canonical ones.
pub fn canonical_graphs(n: usize, m: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs = all_pairs(n);
    if m > pairs.len() {
        return Vec::new();
    }
    let perms = permutations(n);
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        let subset: Vec<(usize, usize)> = idx.iter().map(|&i| pairs[i]).collect();
        if perms.iter().all(|p| apply_perm(p, &subset) >= subset) {
            out.push(subset);
        }
        // next m-combination of 0..pairs.len()
        if m == 0 {
            break;
        }
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < pairs.len() - (m - i) {
                idx[i] += 1;
                for j in i + 1..m {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
    out
}

/// Automorphisms of the simple graph given by its sorted edge list.
fn automorphisms(n: usize, pairs: &[(usize, usize)]) -> Vec<Vec<usize>> {
    permutations(n)
        .into_iter()
        .filter(|p| apply_perm(p, pairs) == *pairs)
        .collect()
}

/// Depth-first search over edge orderings of one simple graph, returning the
/// first pattern-avoiding ordering in lexicographic order (by edge index
/// sequence), or `None` after exhaustion.
///
/// Pruning is twofold and both prunes are sound:
/// - prefix avoidance: if the labeled prefix already contains the pattern,
///   every completion does too (later labels are larger, so an existing
///   embedding persists);
/// - symmetry: a candidate edge is skipped when an automorphism fixing the
///   prefix (as a labeled sequence) maps it to a sibling tried earlier.
fn avoiding_ordering(
    n: usize,
    pairs: &[(usize, usize)],
    pattern: &EdgeOrderedGraph,
    budget: &AtomicU64,
    nodes: &AtomicU64,
) -> Result<Option<Vec<usize>>, ExmaxError> {
    let auts = automorphisms(n, pairs);
    let mut chosen: Vec<usize> = Vec::with_capacity(pairs.len());
    let mut used = vec![false; pairs.len()];

    fn maps_pair(perm: &[usize], p: (usize, usize)) -> (usize, usize) {
        let (a, b) = (perm[p.0], perm[p.1]);
        (a.min(b), a.max(b))
    }

    fn go(
        n: usize,
        pairs: &[(usize, usize)],
        pattern: &EdgeOrderedGraph,
        alive: &[&Vec<usize>],
        chosen: &mut Vec<usize>,
        used: &mut [bool],
        budget: &AtomicU64,
        nodes: &AtomicU64,
    ) -> Result<Option<Vec<usize>>, ExmaxError> {
        if chosen.len() == pairs.len() {
            return Ok(Some(chosen.clone()));
        }
        let mut tried: Vec<(usize, usize)> = Vec::new();
        for e in 0..pairs.len() {
            if used[e] {
                continue;
            }
            if alive
                .iter()
                .any(|p| tried.contains(&maps_pair(p, pairs[e])))
            {
                continue; // symmetric to an exhausted sibling
            }
            tried.push(pairs[e]);
            nodes.fetch_add(1, Ordering::Relaxed);
            if budget.fetch_update(Ordering::Relaxed, Ordering::Relaxed, |b| b.checked_sub(1))
                .is_err()
            {
                return Err(ExmaxError::BudgetExceeded { lower: 0, refuted_above: None });
            }
            chosen.push(e);
            used[e] = true;
            let partial = EdgeOrderedGraph::new(
                n,
                chosen
                    .iter()
                    .enumerate()
                    .map(|(i, &ei)| (pairs[ei].0, pairs[ei].1, i as i64 + 1))
                    .collect(),
            )
            .expect("distinct edges and labels");
            let contained = partial.m() >= pattern.m()
                && oracle::contains(&partial, pattern).expect("nonempty pattern").is_some();
            if !contained {
                let alive_next: Vec<&Vec<usize>> = alive
                    .iter()
                    .copied()
                    .filter(|p| maps_pair(p, pairs[e]) == pairs[e])
                    .collect();
                if let Some(ord) =
                    go(n, pairs, pattern, &alive_next, chosen, used, budget, nodes)?
                {
                    return Ok(Some(ord));
                }
            }
            used[e] = false;
            chosen.pop();
        }
        Ok(None)
    }

    let alive: Vec<&Vec<usize>> = auts.iter().collect();
    go(n, pairs, pattern, &alive, &mut chosen, &mut used, budget, nodes)
}

/// An n-vertex, m-edge edge-ordered graph avoiding `pattern`, or `None` once
/// exhaustion certifies absence. Deterministic: first hit in the canonical
/// graph order, lexicographically least ordering within it.
pub fn avoider_exists(
    n: usize,
    m: usize,
    pattern: &EdgeOrderedGraph,
    budget: u64,
) -> Result<Option<EdgeOrderedGraph>, ExmaxError> {
    let counter = AtomicU64::new(budget);
    let nodes = AtomicU64::new(0);
    avoider_exists_counted(n, m, pattern, &counter, &nodes)
}

fn avoider_exists_counted(
    n: usize,
    m: usize,
    pattern: &EdgeOrderedGraph,
    budget: &AtomicU64,
    nodes: &AtomicU64,
) -> Result<Option<EdgeOrderedGraph>, ExmaxError> {
    if pattern.m() == 0 {
        return Err(ExmaxError::EmptyPattern);
    }
    if m == 0 {
        return Ok(Some(EdgeOrderedGraph::new(n, Vec::new()).expect("empty graph")));
    }
    let graphs = canonical_graphs(n, m);
    // Search graphs in parallel; find_map_first keeps the verdict
    // deterministic (first Some in input order wins).
    enum Hit {
        Avoider(EdgeOrderedGraph),
        OutOfBudget,
    }
    let hit = par::find_map_first(graphs, |pairs| {
        match avoiding_ordering(n, &pairs, pattern, budget, nodes) {
            Ok(Some(order)) => {
                let g = EdgeOrderedGraph::new(
                    n,
                    order
                        .iter()
                        .enumerate()
                        .map(|(i, &ei)| (pairs[ei].0, pairs[ei].1, i as i64 + 1))
                        .collect(),
                )
                .expect("valid ordering");
                Some(Hit::Avoider(g))
            }
            Ok(None) => None,
            Err(_) => Some(Hit::OutOfBudget),
        }
    });
    match hit {
        Some(Hit::Avoider(g)) => Ok(Some(g)),
        Some(Hit::OutOfBudget) => {
            Err(ExmaxError::BudgetExceeded { lower: 0, refuted_above: None })
        }
        None => Ok(None),
    }
}

/// Exact ex_<(n, pattern) by descending search over edge counts: the first m
/// (from C(n,2) downward) admitting an avoider is the answer, and every level
/// above it was refuted exhaustively. The witness is re-verified against the
/// oracle before returning.
pub fn brute_force_ex(
    n: usize,
    pattern: &EdgeOrderedGraph,
    budget: u64,
) -> Result<ExmaxResult, ExmaxError> {
    if n < 2 {
        return Err(ExmaxError::TooFewVertices(n));
    }
    if pattern.m() == 0 {
        return Err(ExmaxError::EmptyPattern);
    }
    let counter = AtomicU64::new(budget);
    let nodes = AtomicU64::new(0);
    let mut stats = SearchStats::default();
    let max_m = n * (n - 1) / 2;
    for m in (0..=max_m).rev() {
        stats.graphs += canonical_graphs(n, m).len() as u64;
        match avoider_exists_counted(n, m, pattern, &counter, &nodes) {
            Ok(Some(witness)) => {
                stats.nodes = nodes.load(Ordering::Relaxed);
                // double-entry bookkeeping: the witness must re-verify
                assert_eq!(witness.m(), m);
                assert_eq!(witness.n(), n);
                assert!(
                    m < pattern.m()
                        || oracle::contains(&witness, pattern)
                            .expect("nonempty pattern")
                            .is_none(),
                    "witness failed oracle re-verification"
                );
                return Ok(ExmaxResult {
                    n,
                    pattern: pattern.normalize_labels().serialize(),
                    value: m,
                    witness: witness.serialize(),
                    stats,
                });
            }
            Ok(None) => continue,
            Err(ExmaxError::BudgetExceeded { .. }) => {
                return Err(ExmaxError::BudgetExceeded {
                    lower: 0,
                    refuted_above: if m < max_m { Some(m + 1) } else { None },
                });
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!("m = 0 always admits the empty avoider")
}

/// Look up or compute-and-append one exact value in the append-only JSON-lines
/// cache keyed by (n, canonical pattern form).
pub fn cached_brute_force_ex(
    path: Option<&Path>,
    n: usize,
    pattern: &EdgeOrderedGraph,
    budget: u64,
) -> Result<ExmaxResult, ExmaxError> {
    let key = pattern.normalize_labels().serialize();
    if let Some(path) = path {
        if path.exists() {
            let file = std::fs::File::open(path)?;
            for line in std::io::BufReader::new(file).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                if let Ok(hit) = serde_json::from_str::<ExmaxResult>(&line) {
                    if hit.n == n && hit.pattern == key {
                        return Ok(hit);
                    }
                }
            }
        }
    }
    let result = brute_force_ex(n, pattern, budget)?;
    if let Some(path) = path {
        let mut file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)?;
        writeln!(file, "{}", serde_json::to_string(&result).expect("serializable"))?;
    }
    Ok(result)
}
