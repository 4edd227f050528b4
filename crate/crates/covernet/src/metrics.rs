//! Classical network metrics, threshold sweeps, and random-graph baselines.
//!
//! Six metrics are computed per graph: density, number of (weakly)
//! connected components, size of the largest strongly connected component,
//! number of isolated nodes, efficiency, and mean local clustering
//! coefficient. A threshold sweep pairs each thresholded graph with the
//! Monte Carlo mean of the same metrics over uniform random directed graphs
//! with matching node and link counts.
//!
//! Internals use dense bit-matrix adjacency so that all-pairs traversals
//! stay fast at a few thousand nodes.

use crate::error::{Error, Result};
use crate::graph::{self, threshold_graph, Network};
use crate::matrix::DissimilarityMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::io::{self, Write};

/// Distance convention for the efficiency metric.
///
/// `HopCount` uses unweighted shortest paths, which keeps efficiency in
/// [0, 1] with no further normalization and is the default everywhere.
/// `Weighted` uses shortest paths over edge weights and normalizes by the
/// ideal harmonic sum of the direct matrix weights, clamped to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EfficiencyMode {
    HopCount,
    Weighted,
}

/// One row of metrics. Count-valued fields are `f64` so the same shape can
/// carry Monte Carlo means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow {
    pub threshold: f64,
    pub density: f64,
    pub component_count: f64,
    pub giant_strong_size: f64,
    pub isolated_count: f64,
    pub efficiency: f64,
    pub clustering_coefficient: f64,
}

impl MetricsRow {
    fn zeros() -> Self {
        MetricsRow {
            threshold: 0.0,
            density: 0.0,
            component_count: 0.0,
            giant_strong_size: 0.0,
            isolated_count: 0.0,
            efficiency: 0.0,
            clustering_coefficient: 0.0,
        }
    }

    fn values(&self) -> [f64; 6] {
        [
            self.density,
            self.component_count,
            self.giant_strong_size,
            self.isolated_count,
            self.efficiency,
            self.clustering_coefficient,
        ]
    }

    fn from_values(threshold: f64, v: [f64; 6]) -> Self {
        MetricsRow {
            threshold,
            density: v[0],
            component_count: v[1],
            giant_strong_size: v[2],
            isolated_count: v[3],
            efficiency: v[4],
            clustering_coefficient: v[5],
        }
    }

    pub fn with_threshold(mut self, t: f64) -> Self {
        self.threshold = t;
        self
    }
}

/// Monte Carlo summary of the random-graph baseline at matched (n, links).
#[derive(Debug, Clone)]
pub struct ErBaseline {
    pub mean: MetricsRow,
    /// Sample standard deviation across trials (single-graph spread).
    pub sd: MetricsRow,
    /// Standard error of the mean (`sd / sqrt(trials)`).
    pub stderr: MetricsRow,
}

/// A sweep entry: the thresholded graph's metrics and its matched baseline.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub real: MetricsRow,
    pub baseline: ErBaseline,
}

// ---------------------------------------------------------------------------
// Dense directed scratch representation
// ---------------------------------------------------------------------------

struct DenseDigraph {
    n: usize,
    words: usize,
    /// Row i = bitset of out-neighbors of i.
    out_bits: Vec<u64>,
    /// Row i = bitset of the undirected projection's neighbors of i.
    undir_bits: Vec<u64>,
    out_adj: Vec<Vec<u32>>,
    in_deg: Vec<u32>,
    arc_count: usize,
}

impl DenseDigraph {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        DenseDigraph {
            n,
            words,
            out_bits: vec![0; n * words],
            undir_bits: vec![0; n * words],
            out_adj: vec![Vec::new(); n],
            in_deg: vec![0; n],
            arc_count: 0,
        }
    }

    fn add_arc(&mut self, u: usize, v: usize) {
        let w = self.words;
        self.out_bits[u * w + v / 64] |= 1 << (v % 64);
        self.undir_bits[u * w + v / 64] |= 1 << (v % 64);
        self.undir_bits[v * w + u / 64] |= 1 << (u % 64);
        self.out_adj[u].push(v as u32);
        self.in_deg[v] += 1;
        self.arc_count += 1;
    }

    fn out_row(&self, u: usize) -> &[u64] {
        &self.out_bits[u * self.words..(u + 1) * self.words]
    }

    fn undir_row(&self, u: usize) -> &[u64] {
        &self.undir_bits[u * self.words..(u + 1) * self.words]
    }
}

fn for_each_bit(row: &[u64], mut f: impl FnMut(usize)) {
    for (wi, &word) in row.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            f(wi * 64 + b);
            bits &= bits - 1;
        }
    }
}

/// Sum over nodes reachable from `src` of 1/hops, via level-synchronous
/// BFS on the bit matrix.
fn hop_inverse_sum(g: &DenseDigraph, src: usize) -> f64 {
    let words = g.words;
    let mut visited = vec![0u64; words];
    let mut frontier = vec![0u64; words];
    visited[src / 64] |= 1 << (src % 64);
    frontier[src / 64] |= 1 << (src % 64);
    let mut next = vec![0u64; words];
    let mut sum = 0.0;
    let mut dist = 0u32;
    loop {
        dist += 1;
        next.iter_mut().for_each(|w| *w = 0);
        for_each_bit(&frontier, |u| {
            let row = g.out_row(u);
            for (nw, &rw) in next.iter_mut().zip(row) {
                *nw |= rw;
            }
        });
        let mut count = 0u32;
        for i in 0..words {
            next[i] &= !visited[i];
            count += next[i].count_ones();
            visited[i] |= next[i];
        }
        if count == 0 {
            return sum;
        }
        sum += f64::from(count) / f64::from(dist);
        std::mem::swap(&mut frontier, &mut next);
    }
}

/// Mean local clustering coefficient of the undirected projection.
/// Nodes of degree < 2 contribute 0.
fn mean_local_clustering(g: &DenseDigraph) -> f64 {
    let n = g.n;
    if n == 0 {
        return 0.0;
    }
    let per_node: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|u| {
            let row = g.undir_row(u);
            let deg: u32 = row.iter().map(|w| w.count_ones()).sum();
            if deg < 2 {
                return 0.0;
            }
            let mut among = 0u64;
            for_each_bit(row, |v| {
                let other = g.undir_row(v);
                among += row
                    .iter()
                    .zip(other)
                    .map(|(&a, &b)| u64::from((a & b).count_ones()))
                    .sum::<u64>();
            });
            // Each edge inside the neighborhood was counted twice.
            let links = (among / 2) as f64;
            let deg = f64::from(deg);
            2.0 * links / (deg * (deg - 1.0))
        })
        .collect();
    per_node.iter().sum::<f64>() / n as f64
}

fn metrics_of_dense(g: &DenseDigraph) -> MetricsRow {
    let n = g.n;
    if n == 0 {
        return MetricsRow::zeros();
    }
    let pairs = (n * (n - 1)) as f64;
    let density = if n > 1 { g.arc_count as f64 / pairs } else { 0.0 };

    // Weak components over the undirected projection.
    let mut dsu = graph::DisjointSets::new(n);
    for (u, nbrs) in g.out_adj.iter().enumerate() {
        for &v in nbrs {
            dsu.union(u, v as usize);
        }
    }
    let mut seen = vec![false; n];
    let mut component_count = 0usize;
    for i in 0..n {
        let r = dsu.find(i);
        if !seen[r] {
            seen[r] = true;
            component_count += 1;
        }
    }

    let (scc, scc_count) = graph::scc_labels(n, &g.out_adj);
    let mut sizes = vec![0usize; scc_count];
    for &c in &scc {
        sizes[c] += 1;
    }
    let giant_strong_size = sizes.iter().copied().max().unwrap_or(0) as f64;

    let isolated_count = (0..n)
        .filter(|&i| g.out_adj[i].is_empty() && g.in_deg[i] == 0)
        .count() as f64;

    let efficiency = if n > 1 {
        let sums: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|s| hop_inverse_sum(g, s))
            .collect();
        (sums.iter().sum::<f64>() / pairs).clamp(0.0, 1.0)
    } else {
        0.0
    };

    let clustering_coefficient = mean_local_clustering(g);

    MetricsRow {
        threshold: 0.0,
        density,
        component_count: component_count as f64,
        giant_strong_size,
        isolated_count,
        efficiency,
        clustering_coefficient,
    }
}

fn dense_from_network(g: &Network) -> DenseDigraph {
    let mut dense = DenseDigraph::new(g.n());
    for e in g.edges() {
        dense.add_arc(e.source, e.target);
        if !g.directed() {
            dense.add_arc(e.target, e.source);
        }
    }
    dense
}

/// Dijkstra-based efficiency over edge weights, normalized by the ideal
/// harmonic sum of the direct matrix weights and clamped to [0, 1].
/// Zero-weight pairs are skipped in both sums.
fn weighted_efficiency(g: &Network, m: &DissimilarityMatrix) -> f64 {
    let n = g.n();
    if n < 2 {
        return 0.0;
    }
    let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for e in g.edges() {
        adj[e.source].push((e.target as u32, e.weight));
        if !g.directed() {
            adj[e.target].push((e.source as u32, e.weight));
        }
    }
    let raw: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|src| {
            let mut dist = vec![f64::INFINITY; n];
            dist[src] = 0.0;
            let mut heap: BinaryHeap<Reverse<(HeapF64, u32)>> = BinaryHeap::new();
            heap.push(Reverse((HeapF64(0.0), src as u32)));
            let mut sum = 0.0;
            while let Some(Reverse((HeapF64(d), u))) = heap.pop() {
                let u = u as usize;
                if d > dist[u] {
                    continue;
                }
                if u != src && d > 0.0 {
                    sum += 1.0 / d;
                }
                for &(v, w) in &adj[u] {
                    let nd = d + w;
                    if nd < dist[v as usize] {
                        dist[v as usize] = nd;
                        heap.push(Reverse((HeapF64(nd), v)));
                    }
                }
            }
            sum
        })
        .collect();
    let mut ideal = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let w = m.get(i, j);
                if w > 0.0 {
                    ideal += 1.0 / w;
                }
            }
        }
    }
    if ideal <= 0.0 {
        return 0.0;
    }
    (raw.iter().sum::<f64>() / ideal).clamp(0.0, 1.0)
}

#[derive(PartialEq)]
struct HeapF64(f64);

impl Eq for HeapF64 {}

impl PartialOrd for HeapF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

/// Computes the six metrics of `g`. The matrix supplies direct weights for
/// the weighted efficiency normalization and is otherwise unused.
pub fn compute_metrics(g: &Network, m: &DissimilarityMatrix, mode: EfficiencyMode) -> MetricsRow {
    let dense = dense_from_network(g);
    let mut row = metrics_of_dense(&dense);
    if mode == EfficiencyMode::Weighted {
        row.efficiency = weighted_efficiency(g, m);
    }
    row
}

/// Samples `links` distinct directed arcs uniformly (Floyd's algorithm)
/// and returns them via the dense scratch graph.
fn sample_er(n: usize, links: usize, rng: &mut ChaCha8Rng) -> DenseDigraph {
    let total = n * (n - 1);
    let mut chosen = vec![0u64; total.div_ceil(64).max(1)];
    let is_set = |bits: &[u64], idx: usize| bits[idx / 64] >> (idx % 64) & 1 == 1;
    let mut graph = DenseDigraph::new(n);
    let add_idx = |g: &mut DenseDigraph, idx: usize| {
        let i = idx / (n - 1);
        let r = idx % (n - 1);
        let j = if r < i { r } else { r + 1 };
        g.add_arc(i, j);
    };
    for j in (total - links)..total {
        let t = rng.random_range(0..=j as u64) as usize;
        if is_set(&chosen, t) {
            chosen[j / 64] |= 1 << (j % 64);
            add_idx(&mut graph, j);
        } else {
            chosen[t / 64] |= 1 << (t % 64);
            add_idx(&mut graph, t);
        }
    }
    graph
}

/// Monte Carlo baseline over uniform random directed graphs with exactly
/// `links` arcs, with per-trial derived seeds so results are independent of
/// scheduling. Efficiency uses hop counts (the graphs are unweighted).
pub fn er_baseline_stats(n: usize, links: usize, trials: usize, seed: u64) -> Result<ErBaseline> {
    if n == 0 {
        return Err(Error::invalid("baseline needs at least one node"));
    }
    if links > n * (n - 1) {
        return Err(Error::invalid(format!(
            "links {links} exceeds maximum {} for n={n}",
            n * (n - 1)
        )));
    }
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let rows: Vec<[f64; 6]> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let g = sample_er(n, links, &mut rng);
            metrics_of_dense(&g).values()
        })
        .collect();
    let t = trials as f64;
    let mut mean = [0.0; 6];
    for row in &rows {
        for k in 0..6 {
            mean[k] += row[k];
        }
    }
    for v in &mut mean {
        *v /= t;
    }
    let mut var = [0.0; 6];
    if trials > 1 {
        for row in &rows {
            for k in 0..6 {
                let d = row[k] - mean[k];
                var[k] += d * d;
            }
        }
        for v in &mut var {
            *v /= t - 1.0;
        }
    }
    let sd: [f64; 6] = var.map(f64::sqrt);
    let stderr: [f64; 6] = sd.map(|s| s / t.sqrt());
    Ok(ErBaseline {
        mean: MetricsRow::from_values(0.0, mean),
        sd: MetricsRow::from_values(0.0, sd),
        stderr: MetricsRow::from_values(0.0, stderr),
    })
}

/// Mean metrics over `trials` uniform random directed graphs with exactly
/// `links` arcs.
pub fn er_baseline(n: usize, links: usize, trials: usize, seed: u64) -> Result<MetricsRow> {
    Ok(er_baseline_stats(n, links, trials, seed)?.mean)
}

/// For each threshold, computes the directed thresholded graph's metrics
/// and the matched random baseline. Thresholds must be strictly increasing.
pub fn threshold_sweep(
    m: &DissimilarityMatrix,
    thresholds: &[f64],
    trials: usize,
    seed: u64,
    mode: EfficiencyMode,
) -> Result<Vec<SweepRow>> {
    if thresholds.is_empty() {
        return Err(Error::invalid("at least one threshold required"));
    }
    for pair in thresholds.windows(2) {
        if !(pair[0] < pair[1]) {
            return Err(Error::invalid("thresholds must be strictly increasing"));
        }
    }
    let mut rows = Vec::with_capacity(thresholds.len());
    for (ti, &t) in thresholds.iter().enumerate() {
        let g = threshold_graph(m, t, true)?;
        let real = compute_metrics(&g, m, mode).with_threshold(t);
        let link_count = g.edge_count();
        let er_seed = seed ^ (ti as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let mut baseline = er_baseline_stats(m.n(), link_count, trials, er_seed)?;
        baseline.mean.threshold = t;
        baseline.sd.threshold = t;
        baseline.stderr.threshold = t;
        rows.push(SweepRow { real, baseline });
    }
    Ok(rows)
}

/// CSV with a header row: the threshold, the six real metrics, then the six
/// baseline means.
pub fn write_sweep_csv<W: Write>(out: &mut W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(
        out,
        "threshold,density,component_count,giant_strong_size,isolated_count,efficiency,\
         clustering_coefficient,er_density,er_component_count,er_giant_strong_size,\
         er_isolated_count,er_efficiency,er_clustering_coefficient"
    )?;
    for row in rows {
        let r = &row.real;
        let b = &row.baseline.mean;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.threshold,
            r.density,
            r.component_count,
            r.giant_strong_size,
            r.isolated_count,
            r.efficiency,
            r.clustering_coefficient,
            b.density,
            b.component_count,
            b.giant_strong_size,
            b.isolated_count,
            b.efficiency,
            b.clustering_coefficient
        )?;
    }
    Ok(())
}
