//! The density-increment step: window length f, tame/wild classification by
//! optimal interval covering, the greedy wild-vertex intervals, the doubly
//! covered subgraph G*, its label-window slices, and the step itself.
//!
//! On a host avoiding the pattern the step always produces a subgraph with at
//! most f edges and average degree at least d/(4k-4). If the doubly covered
//! subgraph ends up smaller than m/2 the host cannot avoid the pattern; the
//! step then hunts for a grid of weight at least 2*ell^2*n and extracts an
//! embedding constructively.

use crate::graph::EdgeOrderedGraph;
use crate::par;
use crate::pattern::ForbiddenForest;
use crate::weights::{classify, vertex_weight, weight_threshold, Grid, NiceEmbedding};
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IncrementError {
    #[error("pattern must have k >= 2 left vertices (got {0}); stars take the linear shortcut")]
    KTooSmall(usize),
    #[error("host must be normalized to labels 1..m")]
    NotNormalized,
    #[error("host has no edges")]
    NoEdges,
    #[error("window length f = 0; slices are undefined")]
    ZeroWindow,
    #[error("diagnostic failure: {msg}")]
    Diagnostic { msg: String, audit: Box<StepAudit> },
}

/// Parameters of one increment step.
#[derive(Debug, Clone)]
pub struct StepParams {
    pub k: usize,
    pub ell: usize,
    pub m: usize,
    pub n: usize,
    /// Average degree 2m/n, exact.
    pub d: BigRational,
    /// Window length floor((134*k*ell^2/d)^(1/(k-1)) * m), exact.
    pub f: BigInt,
}

impl StepParams {
    pub fn for_host(
        pattern: &ForbiddenForest,
        g: &EdgeOrderedGraph,
    ) -> Result<Self, IncrementError> {
        if pattern.k < 2 {
            return Err(IncrementError::KTooSmall(pattern.k));
        }
        if g.m() == 0 {
            return Err(IncrementError::NoEdges);
        }
        let d = g.average_degree().expect("m >= 1 implies n >= 1");
        let f = compute_f(pattern.k, pattern.ell, &d, g.m() as u64)
            .expect("k >= 2 and d > 0 hold here");
        Ok(StepParams {
            k: pattern.k,
            ell: pattern.ell,
            m: g.m(),
            n: g.n(),
            d,
            f,
        })
    }

    /// f truncated to the label range; intervals and windows longer than m
    /// behave identically to length-m ones.
    pub fn f_len(&self) -> i64 {
        self.f
            .clone()
            .clamp(BigInt::zero(), BigInt::from(self.m))
            .to_i64()
            .unwrap()
    }
}

/// floor((134*k*ell^2/d)^(1/(k-1)) * m), evaluated exactly: the answer is the
/// largest f with q*f^(k-1) <= p*m^(k-1) where p/q = 134*k*ell^2/d in lowest
/// terms, found by integer bracketing (no floating point).
pub fn compute_f(k: usize, ell: usize, d: &BigRational, m: u64) -> Result<BigInt, IncrementError> {
    if k < 2 {
        return Err(IncrementError::KTooSmall(k));
    }
    if !d.is_positive() {
        return Err(IncrementError::NoEdges);
    }
    let radicand = BigRational::from(BigInt::from(134u32 * k as u32))
        * BigRational::from(BigInt::from(ell as u64 * ell as u64))
        / d;
    let e = (k - 1) as u32;
    let rhs = radicand * BigRational::from(BigInt::from(m).pow(e));
    // largest f with f^e <= rhs
    let ok = |f: &BigInt| BigRational::from(f.pow(e)) <= rhs;
    let mut hi = BigInt::one();
    while ok(&hi) {
        hi *= 2;
    }
    let mut lo = BigInt::zero();
    // invariant: ok(lo), !ok(hi)
    while &lo + 1u32 < hi {
        let mid: BigInt = (&lo + &hi) / 2;
        if ok(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// C(n, r) as a big integer.
pub fn binomial(n: u64, r: u64) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigInt::one();
    for i in 0..r {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Number of grids for m labels and k classes: C(m-1, k-1).
pub fn grid_count(m: usize, k: usize) -> BigInt {
    binomial(m as u64 - 1, k as u64 - 1)
}

/// All C(m-1, k-1) grids, thresholds chosen from 1..m-1, in lexicographic
/// order. Requires m >= k.
pub fn all_grids(m: usize, k: usize) -> Vec<Grid> {
    assert!(m >= k && k >= 1);
    let mut out = Vec::new();
    let mut cuts: Vec<i64> = (1..k as i64).collect(); // first combination
    loop {
        let mut ts = vec![0i64];
        ts.extend(&cuts);
        ts.push(m as i64);
        out.push(Grid::new(ts).expect("strictly increasing"));
        // next combination of k-1 values from 1..=m-1
        let r = k - 1;
        if r == 0 {
            break;
        }
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cuts[i] < (m - 1) as i64 - (r - 1 - i) as i64 {
                cuts[i] += 1;
                for j in i + 1..r {
                    cuts[j] = cuts[j - 1] + 1;
                }
                break;
            }
        }
    }
    out
}

/// One grid drawn uniformly from the C(m-1, k-1) possibilities.
pub fn sample_grid<R: rand::Rng>(rng: &mut R, m: usize, k: usize) -> Grid {
    assert!(m >= k && k >= 1);
    let mut cuts: Vec<i64> = rand::seq::index::sample(rng, m - 1, k - 1)
        .into_iter()
        .map(|i| i as i64 + 1)
        .collect();
    cuts.sort_unstable();
    let mut ts = vec![0i64];
    ts.extend(cuts);
    ts.push(m as i64);
    Grid::new(ts).expect("distinct sorted cuts")
}

/// Exact expectation of the weight of a vertex with the given sorted incident
/// labels over all grids. Enumeration; use only at small m.
pub fn exact_expected_weight(labels: &[i64], m: usize, k: usize) -> BigRational {
    let grids = all_grids(m, k);
    let total: u64 = grids.iter().map(|t| vertex_weight(labels, t) as u64).sum();
    BigRational::new(BigInt::from(total), BigInt::from(grids.len()))
}

/// The bound d_v * (f+1)^(k-1) / (10 * k * C(m-1, k-1)) on the expected
/// weight of a wild vertex, exact.
pub fn expected_weight_lower_bound(d_v: usize, f: &BigInt, k: usize, m: usize) -> BigRational {
    assert!(m >= k && k >= 2);
    let num = BigInt::from(d_v) * (f + 1u32).pow((k - 1) as u32);
    let den = BigInt::from(10 * k as u64) * grid_count(m, k);
    BigRational::new(num, den)
}

/// Maximum number of sorted labels coverable by `count` closed integer
/// intervals [a, a+length], with a witness list of interval starts.
///
/// Dynamic program over the sorted labels; interval starts can be restricted
/// to label values without loss (slide each interval right until its lowest
/// covered label is its start).
pub fn best_interval_cover(labels: &[i64], count: usize, length: i64) -> (usize, Vec<i64>) {
    assert!(length >= 0);
    let d = labels.len();
    let count = count.min(d);
    if d == 0 || count == 0 {
        return (0, Vec::new());
    }
    debug_assert!(labels.windows(2).all(|w| w[0] < w[1]));
    // end[i] = first index beyond the interval starting at labels[i]
    let end: Vec<usize> = (0..d)
        .map(|i| labels.partition_point(|&l| l <= labels[i] + length))
        .collect();
    // dp[i][c] = max coverable from index i with c intervals left
    let mut dp = vec![vec![0usize; count + 1]; d + 1];
    for i in (0..d).rev() {
        for c in 1..=count {
            let skip = dp[i + 1][c];
            let take = (end[i] - i) + dp[end[i]][c - 1];
            dp[i][c] = skip.max(take);
        }
    }
    let mut starts = Vec::new();
    let (mut i, mut c) = (0usize, count);
    while i < d && c > 0 {
        let take = (end[i] - i) + dp[end[i]][c - 1];
        if take >= dp[i + 1][c] {
            starts.push(labels[i]);
            i = end[i];
            c -= 1;
        } else {
            i += 1;
        }
    }
    (dp[0][count], starts)
}

/// The greedy interval sequence for a wild vertex: I1 starts at the c-th
/// smallest label, each next interval at the c-th smallest label above the
/// previous one, stopping when fewer than c labels remain above. Exactly
/// c-1 labels lie strictly between consecutive intervals.
pub fn wild_intervals(labels: &[i64], f: i64, c: usize) -> Vec<(i64, i64)> {
    assert!(c >= 1 && !labels.is_empty());
    let mut out = Vec::new();
    let mut from = 0usize; // labels[from..] are above the last interval
    while labels.len() - from >= c {
        let a = labels[from + c - 1];
        out.push((a, a + f));
        from = labels.partition_point(|&l| l <= a + f);
    }
    out
}

/// Tame/wild verdict for one vertex.
#[derive(Debug, Clone, Serialize)]
pub struct VertexCover {
    pub tame: bool,
    /// Starts of the chosen intervals (each of length f).
    pub interval_starts: Vec<i64>,
    pub covered: usize,
    pub degree: usize,
}

/// Per-vertex cover report for one (host, f) pair.
#[derive(Debug, Clone, Serialize)]
pub struct CoverReport {
    /// Interval length used (f truncated to the label range).
    pub f: i64,
    /// Intervals allowed per vertex: k - 1.
    pub count: usize,
    pub per_vertex: Vec<VertexCover>,
}

impl CoverReport {
    pub fn tame_count(&self) -> usize {
        self.per_vertex.iter().filter(|v| v.tame).count()
    }

    pub fn wild_degree_sum(&self) -> usize {
        self.per_vertex.iter().filter(|v| !v.tame).map(|v| v.degree).sum()
    }
}

/// Classify every vertex: tame iff k-1 intervals of length f cover at least
/// 0.9 of its incident labels (compared as 10*covered >= 9*degree, exact).
/// Data-parallel over vertices.
pub fn tame_wild(g: &EdgeOrderedGraph, k: usize, f: i64) -> CoverReport {
    let per_vertex = par::map((0..g.n()).collect(), cover_one(g, k, f));
    CoverReport { f, count: k - 1, per_vertex }
}

/// Sequential [`tame_wild`], kept as the benchmark baseline.
pub fn tame_wild_seq(g: &EdgeOrderedGraph, k: usize, f: i64) -> CoverReport {
    let per_vertex = par::map_seq((0..g.n()).collect(), cover_one(g, k, f));
    CoverReport { f, count: k - 1, per_vertex }
}

fn cover_one(g: &EdgeOrderedGraph, k: usize, f: i64) -> impl Fn(usize) -> VertexCover + Sync + '_ {
    move |v| {
        let labels = g.incident_labels(v);
        let (covered, interval_starts) = best_interval_cover(&labels, k - 1, f);
        VertexCover {
            tame: 10 * covered >= 9 * labels.len(),
            interval_starts,
            covered,
            degree: labels.len(),
        }
    }
}

/// Total weight of every grid against `g`, data-parallel over grids; returns
/// the index and weight of the heaviest (ties to the lowest index).
pub fn heaviest_grid(g: &EdgeOrderedGraph, grids: &[Grid]) -> (usize, u64) {
    let weights = par::map(grids.to_vec(), |t| {
        classify(g, &t).expect("labels fit the grid").total
    });
    argmax(&weights)
}

/// Sequential [`heaviest_grid`], kept as the benchmark baseline.
pub fn heaviest_grid_seq(g: &EdgeOrderedGraph, grids: &[Grid]) -> (usize, u64) {
    let weights = par::map_seq(grids.to_vec(), |t| {
        classify(g, &t).expect("labels fit the grid").total
    });
    argmax(&weights)
}

fn argmax(weights: &[u64]) -> (usize, u64) {
    weights
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, &w)| (i, w))
        .expect("at least one grid")
}

/// The doubly covered subgraph G*: tame vertices, and the edges whose label
/// is covered by an interval of each endpoint. Returned as indices into the
/// host's edge list.
pub fn build_gstar(g: &EdgeOrderedGraph, report: &CoverReport) -> Vec<usize> {
    let covers = |v: usize, label: i64| {
        report.per_vertex[v]
            .interval_starts
            .iter()
            .any(|&a| a <= label && label <= a + report.f)
    };
    g.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| {
            report.per_vertex[e.u].tame
                && report.per_vertex[e.v].tame
                && covers(e.u, e.label)
                && covers(e.v, e.label)
        })
        .map(|(i, _)| i)
        .collect()
}

/// One label-window slice of G*.
#[derive(Debug, Clone)]
pub struct Slice {
    /// 1-based window index j: labels in ((j-1)f, jf].
    pub j: usize,
    pub edge_indices: Vec<usize>,
    /// Vertices incident to at least one slice edge.
    pub vertices: Vec<usize>,
}

impl Slice {
    /// Average degree 2e/v of the slice, exact; zero for an empty slice.
    pub fn average_degree(&self) -> BigRational {
        if self.vertices.is_empty() {
            return BigRational::zero();
        }
        BigRational::new(
            BigInt::from(2 * self.edge_indices.len()),
            BigInt::from(self.vertices.len()),
        )
    }
}

/// Partition G* (given by edge indices into `g`) into ceil(m/f) label-window
/// slices; a vertex belongs to a slice iff it has an incident edge there.
pub fn partition_slices(
    g: &EdgeOrderedGraph,
    gstar_edges: &[usize],
    f: i64,
    m: usize,
) -> Result<Vec<Slice>, IncrementError> {
    if f <= 0 {
        return Err(IncrementError::ZeroWindow);
    }
    let windows = (m as i64 + f - 1) / f;
    let mut slices: Vec<Slice> = (1..=windows as usize)
        .map(|j| Slice { j, edge_indices: Vec::new(), vertices: Vec::new() })
        .collect();
    for &ei in gstar_edges {
        let label = g.edges()[ei].label;
        let j = ((label + f - 1) / f) as usize; // label in ((j-1)f, jf]
        slices[j - 1].edge_indices.push(ei);
    }
    for s in &mut slices {
        let mut vs: Vec<usize> = s
            .edge_indices
            .iter()
            .flat_map(|&ei| [g.edges()[ei].u, g.edges()[ei].v])
            .collect();
        vs.sort_unstable();
        vs.dedup();
        s.vertices = vs;
    }
    Ok(slices)
}

/// Outcome of one increment step.
#[derive(Debug, Clone)]
pub enum IncrementOutcome {
    /// A subgraph with at most f edges and average degree at least d/(4k-4),
    /// as indices into the host's edge list.
    DenseSubgraph {
        edge_indices: Vec<usize>,
        average_degree: BigRational,
    },
    /// A verified embedding of the pattern.
    FoundEmbedding(NiceEmbedding),
    /// m < k: the host itself already satisfies the step's conclusion.
    HostReturned,
}

/// Serializable audit trace of one step.
#[derive(Debug, Clone, Serialize, Default)]
pub struct StepAudit {
    pub k: usize,
    pub ell: usize,
    pub m: usize,
    pub n: usize,
    pub d: String,
    pub f: String,
    pub tame: usize,
    pub wild: usize,
    pub gstar_edges: usize,
    /// (j, edge count, vertex count) per nonempty slice.
    pub slices: Vec<(usize, usize, usize)>,
    pub chosen_slice: Option<usize>,
    pub grids_examined: u64,
    pub grids_enumerated: bool,
    pub best_grid_weight: u64,
    pub outcome: String,
}

/// Knobs for the heavy-grid search of the embedding branch.
#[derive(Debug, Clone)]
pub struct StepConfig {
    pub seed: u64,
    /// Enumerate all grids when C(m-1, k-1) is at most this; otherwise sample.
    pub grid_cap: u64,
    /// Sample size when enumeration is off.
    pub samples: usize,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig { seed: 0, grid_cap: 200_000, samples: 10_000 }
    }
}

pub struct StepResult {
    pub outcome: IncrementOutcome,
    pub audit: StepAudit,
}

/// One density-increment step.
///
/// For m < k the host itself is returned. Otherwise tame/wild classification
/// builds G*; if it kept at least half the edges, the densest label-window
/// slice is returned (ties to the lowest window) with both postconditions
/// asserted exactly. A smaller G* is impossible for an avoiding host, so in
/// that case a grid of weight >= 2*ell^2*n exists; it is found by
/// enumeration or seeded sampling and turned into an embedding. Failing to
/// find one is reported as a diagnostic error with the full audit, never
/// silently.
pub fn increment_step(
    g: &EdgeOrderedGraph,
    pattern: &ForbiddenForest,
    cfg: &StepConfig,
) -> Result<StepResult, IncrementError> {
    if !g.is_normalized() {
        return Err(IncrementError::NotNormalized);
    }
    let params = StepParams::for_host(pattern, g)?;
    let mut audit = StepAudit {
        k: params.k,
        ell: params.ell,
        m: params.m,
        n: params.n,
        d: params.d.to_string(),
        f: params.f.to_string(),
        ..StepAudit::default()
    };
    if params.m < params.k {
        audit.outcome = "host-returned".into();
        return Ok(StepResult { outcome: IncrementOutcome::HostReturned, audit });
    }
    let f_len = params.f_len();
    if f_len == 0 {
        return Err(IncrementError::ZeroWindow);
    }
    let report = tame_wild(g, params.k, f_len);
    audit.tame = report.tame_count();
    audit.wild = g.n() - audit.tame;
    let gstar = build_gstar(g, &report);
    audit.gstar_edges = gstar.len();

    if 2 * gstar.len() >= params.m {
        let slices = partition_slices(g, &gstar, f_len, params.m)?;
        audit.slices = slices
            .iter()
            .filter(|s| !s.edge_indices.is_empty())
            .map(|s| (s.j, s.edge_indices.len(), s.vertices.len()))
            .collect();
        let best = slices
            .iter()
            .filter(|s| !s.edge_indices.is_empty())
            .max_by(|a, b| {
                a.average_degree()
                    .cmp(&b.average_degree())
                    .then(b.j.cmp(&a.j)) // ties to the lowest j
            })
            .expect("G* has >= m/2 >= 1 edges");
        audit.chosen_slice = Some(best.j);
        audit.outcome = "dense-subgraph".into();
        // postconditions, exact
        let avg = best.average_degree();
        let target = &params.d / BigRational::from(BigInt::from(4 * (params.k as i64 - 1)));
        if BigInt::from(best.edge_indices.len()) > params.f || avg < target {
            return Err(IncrementError::Diagnostic {
                msg: format!(
                    "densest slice violates the step postconditions: {} edges (f = {}), average degree {} < {}",
                    best.edge_indices.len(),
                    params.f,
                    avg,
                    target
                ),
                audit: Box::new(audit),
            });
        }
        return Ok(StepResult {
            outcome: IncrementOutcome::DenseSubgraph {
                edge_indices: best.edge_indices.clone(),
                average_degree: avg,
            },
            audit,
        });
    }

    // |E(G*)| < m/2: the host contains the pattern; find a heavy grid
    let threshold = weight_threshold(params.ell, params.ell - 1, params.n); // 2*ell^2*n
    let count = grid_count(params.m, params.k);
    let enumerate = count <= BigInt::from(cfg.grid_cap);
    audit.grids_enumerated = enumerate;
    let grids = if enumerate {
        all_grids(params.m, params.k)
    } else {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
        (0..cfg.samples)
            .map(|_| sample_grid(&mut rng, params.m, params.k))
            .collect()
    };
    audit.grids_examined = grids.len() as u64;
    let (best_idx, best_weight) = heaviest_grid(g, &grids);
    audit.best_grid_weight = best_weight;
    if best_weight >= threshold {
        if let Some(ne) = crate::weights::nice_embed(pattern, g, &grids[best_idx]) {
            audit.outcome = "found-embedding".into();
            return Ok(StepResult { outcome: IncrementOutcome::FoundEmbedding(ne), audit });
        }
        return Err(IncrementError::Diagnostic {
            msg: format!(
                "grid of weight {} >= {} found but the constructive embedding failed",
                best_weight, threshold
            ),
            audit: Box::new(audit),
        });
    }
    Err(IncrementError::Diagnostic {
        msg: format!(
            "G* kept {} < m/2 of {} edges, yet no grid of weight >= {} found ({} grids {})",
            audit.gstar_edges,
            params.m,
            threshold,
            audit.grids_examined,
            if enumerate { "enumerated" } else { "sampled" }
        ),
        audit: Box::new(audit),
    })
}
