//! Ground-truth containment testing of an edge-ordered pattern in an
//! edge-ordered host.
//!
//! `contains` runs a backtracking search over pattern edges in increasing
//! label order: since an embedding must preserve the edge-order, the host
//! labels of the images are forced to increase along that sequence, which
//! prunes hard. `contains_exhaustive` enumerates every injective vertex map
//! and is the definitional cross-check used by the test suites.

use crate::graph::{EdgeOrderedGraph, Embedding};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("pattern has no edges; containment is about edge order")]
    EmptyPattern,
}

/// Result of a budgeted search. `Absent` certifies exhaustion;
/// `BudgetExceeded` does not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Embedding),
    Absent,
    BudgetExceeded,
}

impl SearchOutcome {
    pub fn found(&self) -> Option<&Embedding> {
        match self {
            SearchOutcome::Found(e) => Some(e),
            _ => None,
        }
    }
}

pub const DEFAULT_BUDGET: u64 = u64::MAX;

/// First embedding of `pattern` in `host` in the canonical search order, or
/// `None`. Unbudgeted; see [`contains_budgeted`] for the capped variant.
pub fn contains(
    host: &EdgeOrderedGraph,
    pattern: &EdgeOrderedGraph,
) -> Result<Option<Embedding>, OracleError> {
    match contains_budgeted(host, pattern, DEFAULT_BUDGET)? {
        SearchOutcome::Found(e) => Ok(Some(e)),
        SearchOutcome::Absent => Ok(None),
        SearchOutcome::BudgetExceeded => unreachable!("unbounded budget"),
    }
}

/// Backtracking containment search capped at `budget` search nodes.
///
/// Canonical order: pattern edges are processed in increasing label; host
/// candidate edges are tried in increasing label, and when an edge admits
/// both orientations the lower host id is tried for the lower pattern
/// endpoint first. The first embedding in this order is returned, so results
/// are reproducible.
pub fn contains_budgeted(
    host: &EdgeOrderedGraph,
    pattern: &EdgeOrderedGraph,
    budget: u64,
) -> Result<SearchOutcome, OracleError> {
    if pattern.m() == 0 {
        return Err(OracleError::EmptyPattern);
    }
    if pattern.n() > host.n() || pattern.m() > host.m() {
        return Ok(SearchOutcome::Absent);
    }
    let mut st = State {
        host,
        pattern,
        pmap: vec![None; pattern.n()],
        used: vec![false; host.n()],
        nodes: 0,
        budget,
    };
    match st.extend(0, -1) {
        Step::Found(map) => {
            let non_isolated: Vec<usize> = map.iter().map(|v| v.unwrap_or(usize::MAX)).collect();
            // pattern vertices untouched by edges get the smallest unused host ids
            let mut map = non_isolated;
            for img in map.iter_mut() {
                if *img == usize::MAX {
                    let x = (0..host.n()).find(|&x| !st.used[x]).expect("n checked");
                    st.used[x] = true;
                    *img = x;
                }
            }
            Ok(SearchOutcome::Found(Embedding::new(map)))
        }
        Step::Exhausted => Ok(SearchOutcome::Absent),
        Step::OutOfBudget => Ok(SearchOutcome::BudgetExceeded),
    }
}

enum Step {
    Found(Vec<Option<usize>>),
    Exhausted,
    OutOfBudget,
}

struct State<'a> {
    host: &'a EdgeOrderedGraph,
    pattern: &'a EdgeOrderedGraph,
    pmap: Vec<Option<usize>>,
    used: Vec<bool>,
    nodes: u64,
    budget: u64,
}

impl State<'_> {
    /// Place pattern edge `idx` with a host edge of index > `last` in the
    /// label-sorted host edge list.
    fn extend(&mut self, idx: usize, last: isize) -> Step {
        if idx == self.pattern.m() {
            return Step::Found(self.pmap.clone());
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Step::OutOfBudget;
        }
        // the remaining pattern edges all need host labels above this point
        let remaining = self.pattern.m() - idx;
        let pe = self.pattern.edges()[idx];
        let lo = (last + 1) as usize;
        if self.host.m() < lo + remaining {
            return Step::Exhausted;
        }
        let mut out_of_budget = false;
        for hidx in lo..=(self.host.m() - remaining) {
            let he = self.host.edges()[hidx];
            for (x, y) in [(he.u, he.v), (he.v, he.u)] {
                if !self.admissible(pe.u, x) || !self.admissible(pe.v, y) {
                    continue;
                }
                if self.pmap[pe.u].is_none() && self.pmap[pe.v].is_none() && x == y {
                    continue; // cannot happen for simple edges, defensive unreachable
                }
                let set_u = self.pmap[pe.u].is_none();
                let set_v = self.pmap[pe.v].is_none();
                if set_u {
                    self.pmap[pe.u] = Some(x);
                    self.used[x] = true;
                }
                if set_v {
                    self.pmap[pe.v] = Some(y);
                    self.used[y] = true;
                }
                match self.extend(idx + 1, hidx as isize) {
                    Step::Found(m) => return Step::Found(m),
                    Step::OutOfBudget => out_of_budget = true,
                    Step::Exhausted => {}
                }
                if set_u {
                    self.pmap[pe.u] = None;
                    self.used[x] = false;
                }
                if set_v {
                    self.pmap[pe.v] = None;
                    self.used[y] = false;
                }
                if out_of_budget {
                    return Step::OutOfBudget;
                }
            }
        }
        Step::Exhausted
    }

    /// Can pattern vertex `p` be mapped to (or is it already mapped to) host
    /// vertex `x`? Degree forward-check included.
    fn admissible(&self, p: usize, x: usize) -> bool {
        match self.pmap[p] {
            Some(img) => img == x,
            None => !self.used[x] && self.host.degree(x) >= self.pattern.degree(p),
        }
    }
}

/// True iff `e` is injective, maps every pattern edge to a host edge, and
/// preserves the label order.
pub fn verify_embedding(host: &EdgeOrderedGraph, pattern: &EdgeOrderedGraph, e: &Embedding) -> bool {
    if e.map.len() != pattern.n() {
        return false;
    }
    if e.map.iter().any(|&v| v >= host.n()) {
        return false;
    }
    let mut seen = vec![false; host.n()];
    for &v in &e.map {
        if seen[v] {
            return false;
        }
        seen[v] = true;
    }
    let mut prev: Option<i64> = None;
    for pe in pattern.edges() {
        let Some(hidx) = host.edge_between(e.map[pe.u], e.map[pe.v]) else {
            return false;
        };
        let label = host.edges()[hidx].label;
        if let Some(p) = prev {
            if label <= p {
                return false;
            }
        }
        prev = Some(label);
    }
    true
}

/// Definitional brute force: enumerate all injective vertex maps
/// pattern → host and test each with [`verify_embedding`]. `budget` caps the
/// number of injections tried. Test-suite cross-check only.
pub fn contains_exhaustive(
    host: &EdgeOrderedGraph,
    pattern: &EdgeOrderedGraph,
    budget: u64,
) -> Result<SearchOutcome, OracleError> {
    if pattern.m() == 0 {
        return Err(OracleError::EmptyPattern);
    }
    if pattern.n() > host.n() {
        return Ok(SearchOutcome::Absent);
    }
    let mut map = Vec::with_capacity(pattern.n());
    let mut used = vec![false; host.n()];
    let mut tried: u64 = 0;
    fn go(
        host: &EdgeOrderedGraph,
        pattern: &EdgeOrderedGraph,
        map: &mut Vec<usize>,
        used: &mut [bool],
        tried: &mut u64,
        budget: u64,
    ) -> Option<Step2> {
        if map.len() == pattern.n() {
            *tried += 1;
            if *tried > budget {
                return Some(Step2::OutOfBudget);
            }
            if verify_embedding(host, pattern, &Embedding::new(map.clone())) {
                return Some(Step2::Found);
            }
            return None;
        }
        for x in 0..host.n() {
            if used[x] {
                continue;
            }
            map.push(x);
            used[x] = true;
            let r = go(host, pattern, map, used, tried, budget);
            if matches!(r, Some(Step2::Found)) {
                return r;
            }
            map.pop();
            used[x] = false;
            if matches!(r, Some(Step2::OutOfBudget)) {
                return r;
            }
        }
        None
    }
    enum Step2 {
        Found,
        OutOfBudget,
    }
    match go(host, pattern, &mut map, &mut used, &mut tried, budget) {
        Some(Step2::Found) => Ok(SearchOutcome::Found(Embedding::new(map))),
        Some(Step2::OutOfBudget) => Ok(SearchOutcome::BudgetExceeded),
        None => Ok(SearchOutcome::Absent),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn p(s: &str) -> EdgeOrderedGraph {
        EdgeOrderedGraph::parse_path_notation(s).unwrap()
    }

    fn complete(n: usize) -> EdgeOrderedGraph {
        let mut label = 0;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                label += 1;
                edges.push((u, v, label));
            }
        }
        EdgeOrderedGraph::new(n, edges).unwrap()
    }

    fn matching(pairs: usize) -> EdgeOrderedGraph {
        let edges = (0..pairs).map(|i| (2 * i, 2 * i + 1, i as i64 + 1)).collect();
        EdgeOrderedGraph::new(2 * pairs, edges).unwrap()
    }

    #[test]
    fn single_edge_embeds_anywhere() {
        let host = matching(3);
        let pat = EdgeOrderedGraph::new(2, vec![(0, 1, 7)]).unwrap();
        let e = contains(&host, &pat).unwrap().unwrap();
        assert!(verify_embedding(&host, &pat, &e));
    }

    #[test]
    fn matching_avoids_p3() {
        let host = matching(3);
        assert_eq!(contains(&host, &p("P3^12")).unwrap(), None);
    }

    #[test]
    fn too_few_vertices() {
        assert_eq!(contains(&complete(4), &p("P5^1342")).unwrap(), None);
    }

    #[test]
    fn empty_pattern_rejected() {
        let empty = EdgeOrderedGraph::new(3, vec![]).unwrap();
        assert_eq!(contains(&complete(3), &empty), Err(OracleError::EmptyPattern));
        assert_eq!(
            contains_exhaustive(&complete(3), &empty, 10),
            Err(OracleError::EmptyPattern)
        );
    }

    #[test]
    fn verify_checks() {
        let g = p("P3^12");
        assert!(verify_embedding(&g, &g, &Embedding::new(vec![0, 1, 2])));
        // collapsing two pattern vertices fails injectivity
        assert!(!verify_embedding(&g, &g, &Embedding::new(vec![0, 1, 1])));
        // P3^12 into a P3^21 host: keep the middle, swap the ends
        let host = p("P3^21");
        assert!(verify_embedding(&host, &g, &Embedding::new(vec![2, 1, 0])));
    }

    #[test]
    fn k5_contains_exceptional_path() {
        let host = complete(5);
        let pat = p("P5^1342");
        let e = contains(&host, &pat).unwrap().expect("K5 contains every 4-edge path ordering");
        assert!(verify_embedding(&host, &pat, &e));
    }

    #[test]
    fn deterministic_embedding() {
        let host = complete(6);
        let pat = p("P4^132");
        let a = contains(&host, &pat).unwrap().unwrap();
        let b = contains(&host, &pat).unwrap().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn budget_exceeded_reported() {
        let host = complete(7);
        let pat = p("P6^15423");
        // with a single node allowed the search cannot finish
        let r = contains_budgeted(&host, &pat, 1).unwrap();
        assert_eq!(r, SearchOutcome::BudgetExceeded);
    }

    fn arb_small_graph(nmax: usize, mmax: usize) -> impl Strategy<Value = EdgeOrderedGraph> {
        (2usize..=nmax).prop_flat_map(move |n| {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
                .collect();
            let cap = pairs.len().min(mmax);
            proptest::sample::subsequence(pairs, 0..=cap).prop_flat_map(move |chosen| {
                let m = chosen.len();
                proptest::collection::vec(0i64..10_000, m).prop_filter_map(
                    "distinct labels",
                    move |labels| {
                        let mut seen = HashSet::new();
                        if !labels.iter().all(|l| seen.insert(*l)) {
                            return None;
                        }
                        EdgeOrderedGraph::new(
                            n,
                            chosen.iter().zip(&labels).map(|(&(u, v), &l)| (u, v, l)).collect(),
                        )
                        .ok()
                    },
                )
            })
        })
    }

    proptest! {
        // backtracking and definitional enumeration agree on small instances
        #[test]
        fn agrees_with_exhaustive(
            host in arb_small_graph(6, 15),
            pattern in arb_small_graph(5, 4),
        ) {
            prop_assume!(pattern.m() >= 1);
            let fast = contains(&host, &pattern).unwrap();
            let slow = contains_exhaustive(&host, &pattern, u64::MAX).unwrap();
            match (&fast, &slow) {
                (Some(e), SearchOutcome::Found(f)) => {
                    prop_assert!(verify_embedding(&host, &pattern, e));
                    prop_assert!(verify_embedding(&host, &pattern, f));
                }
                (None, SearchOutcome::Absent) => {}
                other => prop_assert!(false, "disagreement: {:?}", other),
            }
        }

        // adding edges to the host preserves containment
        #[test]
        fn monotone_under_supergraph(
            host in arb_small_graph(6, 10),
            pattern in arb_small_graph(4, 3),
            extra_label in 10_001i64..20_000,
        ) {
            prop_assume!(pattern.m() >= 1);
            if contains(&host, &pattern).unwrap().is_some() {
                // add one absent edge with a fresh label, if any pair is free
                let free = (0..host.n())
                    .flat_map(|u| ((u + 1)..host.n()).map(move |v| (u, v)))
                    .find(|&(u, v)| host.edge_between(u, v).is_none());
                if let Some((u, v)) = free {
                    let mut edges: Vec<_> = host
                        .edges()
                        .iter()
                        .map(|e| (e.u, e.v, e.label))
                        .collect();
                    edges.push((u, v, extra_label));
                    let bigger = EdgeOrderedGraph::new(host.n(), edges).unwrap();
                    prop_assert!(contains(&bigger, &pattern).unwrap().is_some());
                }
            }
        }
    }

    #[test]
    fn containment_in_complete_host_agrees_for_equivalent_patterns() {
        // K_n is closed under order reversal, so containment of a pattern and
        // of its reversal must agree there
        let host = complete(5);
        let a = contains(&host, &p("P5^1342")).unwrap().is_some();
        let b = contains(&host, &p("P5^4213")).unwrap().is_some();
        assert!(crate::graph::is_equivalent(&p("P5^1342"), &p("P5^4213")));
        assert_eq!(a, b);
    }
}
