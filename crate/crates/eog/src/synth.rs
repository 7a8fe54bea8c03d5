//! Instance generators: complete hosts, matchings, engineered bipartite
//! hosts with balanced class windows, and seeded random graphs and forests.
//! Shared by the CLI examples, the benchmarks and the test suites.

use crate::graph::EdgeOrderedGraph;
use crate::weights::Grid;
use rand::seq::SliceRandom;
use rand::Rng;

/// Complete graph on n vertices with labels 1..C(n,2) in lexicographic pair
/// order.
pub fn complete(n: usize) -> EdgeOrderedGraph {
    let mut label = 0i64;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            label += 1;
            edges.push((u, v, label));
        }
    }
    EdgeOrderedGraph::new(n, edges).unwrap()
}

/// Perfect matching with `pairs` edges, labels 1..pairs.
pub fn matching(pairs: usize) -> EdgeOrderedGraph {
    let edges = (0..pairs).map(|i| (2 * i, 2 * i + 1, i as i64 + 1)).collect();
    EdgeOrderedGraph::new(2 * pairs, edges).unwrap()
}

/// Complete bipartite host K(nn, nn) whose labels are arranged so every
/// vertex has exactly nn/k edges in each of the k grid classes: the edge
/// (i, nn + j) lands in class (i + j) mod k and classes get consecutive label
/// blocks. Returns the host together with the matching grid. `nn` must be a
/// multiple of `k`.
pub fn balanced_bipartite(nn: usize, k: usize) -> (EdgeOrderedGraph, Grid) {
    assert!(k >= 1 && nn % k == 0, "nn must be a multiple of k");
    let mut by_class: Vec<Vec<(usize, usize)>> = vec![Vec::new(); k];
    for i in 0..nn {
        for j in 0..nn {
            by_class[(i + j) % k].push((i, nn + j));
        }
    }
    let mut edges = Vec::new();
    let mut label = 0i64;
    let mut thresholds = vec![0i64];
    for class in by_class {
        for (u, v) in class {
            label += 1;
            edges.push((u, v, label));
        }
        thresholds.push(label);
    }
    (
        EdgeOrderedGraph::new(2 * nn, edges).unwrap(),
        Grid::new(thresholds).unwrap(),
    )
}

/// Random simple graph: each pair kept with probability `p`, labels a random
/// permutation of 1..m.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> EdgeOrderedGraph {
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(p) {
                pairs.push((u, v));
            }
        }
    }
    let mut labels: Vec<i64> = (1..=pairs.len() as i64).collect();
    labels.shuffle(rng);
    let edges = pairs.iter().zip(&labels).map(|(&(u, v), &l)| (u, v, l)).collect();
    EdgeOrderedGraph::new(n, edges).unwrap()
}

/// Random graph with exactly `m` edges chosen uniformly among the pairs,
/// labels a random permutation of 1..m.
pub fn random_graph_with_edges<R: Rng>(rng: &mut R, n: usize, m: usize) -> EdgeOrderedGraph {
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .collect();
    assert!(m <= pairs.len());
    pairs.shuffle(rng);
    pairs.truncate(m);
    let mut labels: Vec<i64> = (1..=m as i64).collect();
    labels.shuffle(rng);
    let edges = pairs.iter().zip(&labels).map(|(&(u, v), &l)| (u, v, l)).collect();
    EdgeOrderedGraph::new(n, edges).unwrap()
}

/// Random labeled forest on n vertices: a uniform random subset of a random
/// spanning tree's edges, labels a random permutation.
pub fn random_forest<R: Rng>(rng: &mut R, n: usize, keep: f64) -> EdgeOrderedGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs = Vec::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        if rng.gen_bool(keep) {
            pairs.push((order[i], order[j]));
        }
    }
    let mut labels: Vec<i64> = (1..=pairs.len() as i64).collect();
    labels.shuffle(rng);
    let edges = pairs.iter().zip(&labels).map(|(&(u, v), &l)| (u, v, l)).collect();
    EdgeOrderedGraph::new(n, edges).unwrap()
}

/// Relabel a graph with a fresh random permutation of 1..m.
pub fn shuffle_labels<R: Rng>(rng: &mut R, g: &EdgeOrderedGraph) -> EdgeOrderedGraph {
    let mut labels: Vec<i64> = (1..=g.m() as i64).collect();
    labels.shuffle(rng);
    let edges = g
        .edges()
        .iter()
        .zip(&labels)
        .map(|(e, &l)| (e.u, e.v, l))
        .collect();
    EdgeOrderedGraph::new(g.n(), edges).unwrap()
}
