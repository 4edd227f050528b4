//! Monte Carlo cross-checks for the network metrics: an independent naive
//! implementation over an independently sampled edge set must agree with
//! the library's bit-matrix path, structure-free matrices must look like
//! the random baseline, and planted structure must beat it the right way.

use covernet::datasets::{generate_collection, GeneratorParams};
use covernet::graph::{strong_components, threshold_graph};
use covernet::matrix::DissimilarityMatrix;
use covernet::metrics::{
    compute_metrics, er_baseline_stats, threshold_sweep, EfficiencyMode, MetricsRow,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;

/// Naive metrics over a directed arc list, written without bitsets or
/// union-find so it shares nothing with the library implementation.
fn naive_metrics(n: usize, arcs: &[(usize, usize)]) -> MetricsRow {
    let mut out = vec![Vec::new(); n];
    let mut undirected = vec![vec![false; n]; n];
    for &(u, v) in arcs {
        out[u].push(v);
        undirected[u][v] = true;
        undirected[v][u] = true;
    }
    let density = arcs.len() as f64 / (n * (n - 1)) as f64;

    // Weak components by repeated DFS over the projection.
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = count;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if undirected[u][v] && comp[v] == usize::MAX {
                    comp[v] = count;
                    stack.push(v);
                }
            }
        }
        count += 1;
    }

    // Strong components by Kosaraju.
    let mut order = Vec::new();
    let mut visited = vec![false; n];
    fn dfs1(u: usize, out: &[Vec<usize>], visited: &mut [bool], order: &mut Vec<usize>) {
        visited[u] = true;
        for &v in &out[u] {
            if !visited[v] {
                dfs1(v, out, visited, order);
            }
        }
        order.push(u);
    }
    for u in 0..n {
        if !visited[u] {
            dfs1(u, &out, &mut visited, &mut order);
        }
    }
    let mut incoming = vec![Vec::new(); n];
    for &(u, v) in arcs {
        incoming[v].push(u);
    }
    let mut scc = vec![usize::MAX; n];
    let mut scc_count = 0;
    for &u in order.iter().rev() {
        if scc[u] != usize::MAX {
            continue;
        }
        let mut stack = vec![u];
        scc[u] = scc_count;
        while let Some(x) = stack.pop() {
            for &w in &incoming[x] {
                if scc[w] == usize::MAX {
                    scc[w] = scc_count;
                    stack.push(w);
                }
            }
        }
        scc_count += 1;
    }
    let mut scc_sizes = vec![0usize; scc_count];
    for &c in &scc {
        scc_sizes[c] += 1;
    }

    let isolated = (0..n)
        .filter(|&u| out[u].is_empty() && incoming[u].is_empty())
        .count();

    // Hop efficiency by plain BFS.
    let mut eff = 0.0;
    for src in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &v in &out[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for (v, &d) in dist.iter().enumerate() {
            if v != src && d != usize::MAX {
                eff += 1.0 / d as f64;
            }
        }
    }
    eff /= (n * (n - 1)) as f64;

    // Mean local clustering over the projection.
    let mut cc = 0.0;
    for u in 0..n {
        let neighbors: Vec<usize> = (0..n).filter(|&v| undirected[u][v]).collect();
        if neighbors.len() < 2 {
            continue;
        }
        let mut links = 0usize;
        for (a, &x) in neighbors.iter().enumerate() {
            for &y in &neighbors[a + 1..] {
                if undirected[x][y] {
                    links += 1;
                }
            }
        }
        cc += 2.0 * links as f64 / (neighbors.len() * (neighbors.len() - 1)) as f64;
    }
    cc /= n as f64;

    MetricsRow {
        threshold: 0.0,
        density,
        component_count: count as f64,
        giant_strong_size: scc_sizes.iter().copied().max().unwrap_or(0) as f64,
        isolated_count: isolated as f64,
        efficiency: eff,
        clustering_coefficient: cc,
    }
}

/// Independent uniform sampler: shuffle all arc slots, take the first L.
fn naive_er(n: usize, links: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut slots: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    slots.shuffle(rng);
    slots.truncate(links);
    slots
}

#[test]
fn er_baseline_agrees_with_independent_monte_carlo() {
    let n = 20;
    let links = 40;
    let trials = 200;
    let baseline = er_baseline_stats(n, links, trials, 1234).unwrap();

    // Exact density in both implementations.
    assert!((baseline.mean.density - links as f64 / (n * (n - 1)) as f64).abs() < 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(999_999);
    let mut sums = [0.0f64; 6];
    let mut sq = [0.0f64; 6];
    for _ in 0..trials {
        let arcs = naive_er(n, links, &mut rng);
        let row = naive_metrics(n, &arcs);
        let vals = [
            row.density,
            row.component_count,
            row.giant_strong_size,
            row.isolated_count,
            row.efficiency,
            row.clustering_coefficient,
        ];
        for k in 0..6 {
            sums[k] += vals[k];
            sq[k] += vals[k] * vals[k];
        }
    }
    let t = trials as f64;
    let lib = [
        baseline.mean.density,
        baseline.mean.component_count,
        baseline.mean.giant_strong_size,
        baseline.mean.isolated_count,
        baseline.mean.efficiency,
        baseline.mean.clustering_coefficient,
    ];
    let lib_se = [
        baseline.stderr.density,
        baseline.stderr.component_count,
        baseline.stderr.giant_strong_size,
        baseline.stderr.isolated_count,
        baseline.stderr.efficiency,
        baseline.stderr.clustering_coefficient,
    ];
    let names = [
        "density",
        "components",
        "giant_strong",
        "isolated",
        "efficiency",
        "clustering",
    ];
    for k in 0..6 {
        let oracle_mean = sums[k] / t;
        let oracle_var = (sq[k] / t - oracle_mean * oracle_mean).max(0.0);
        let oracle_se = (oracle_var / t).sqrt();
        let combined = (lib_se[k] * lib_se[k] + oracle_se * oracle_se).sqrt();
        let diff = (lib[k] - oracle_mean).abs();
        assert!(
            diff <= 3.0 * combined + 1e-9,
            "{}: library {} vs oracle {} (3se = {})",
            names[k],
            lib[k],
            oracle_mean,
            3.0 * combined
        );
    }
}

#[test]
fn single_graph_metrics_match_naive_implementation() {
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    for trial in 0..20 {
        let n = 12;
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    rows[i][j] = rng.random::<f64>();
                }
            }
        }
        let m = DissimilarityMatrix::from_rows(rows.clone(), vec![1.0; n]).unwrap();
        let g = threshold_graph(&m, 0.35, true).unwrap();
        let row = compute_metrics(&g, &m, EfficiencyMode::HopCount);
        let arcs: Vec<(usize, usize)> =
            g.edges().iter().map(|e| (e.source, e.target)).collect();
        let oracle = naive_metrics(n, &arcs);
        assert!((row.density - oracle.density).abs() < 1e-12, "trial {trial}");
        assert_eq!(row.component_count, oracle.component_count);
        assert_eq!(row.giant_strong_size, oracle.giant_strong_size);
        assert_eq!(row.isolated_count, oracle.isolated_count);
        assert!((row.efficiency - oracle.efficiency).abs() < 1e-12);
        assert!(
            (row.clustering_coefficient - oracle.clustering_coefficient).abs() < 1e-12,
            "trial {trial}"
        );
    }
}

#[test]
fn structure_free_matrix_stays_within_three_sd_of_baseline() {
    // Asymmetric iid noise: the thresholded graph is a uniform random
    // directed graph, so every metric must sit inside the baseline spread.
    let n = 50;
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                rows[i][j] = 0.02 + 0.98 * rng.random::<f64>();
            }
        }
    }
    let m = DissimilarityMatrix::from_rows(rows, vec![1.0; n]).unwrap();
    let rows = threshold_sweep(&m, &[0.3, 0.45, 0.6], 40, 777, EfficiencyMode::HopCount).unwrap();
    for row in rows {
        let real = [
            row.real.component_count,
            row.real.giant_strong_size,
            row.real.isolated_count,
            row.real.efficiency,
            row.real.clustering_coefficient,
        ];
        let mean = [
            row.baseline.mean.component_count,
            row.baseline.mean.giant_strong_size,
            row.baseline.mean.isolated_count,
            row.baseline.mean.efficiency,
            row.baseline.mean.clustering_coefficient,
        ];
        let sd = [
            row.baseline.sd.component_count,
            row.baseline.sd.giant_strong_size,
            row.baseline.sd.isolated_count,
            row.baseline.sd.efficiency,
            row.baseline.sd.clustering_coefficient,
        ];
        for k in 0..5 {
            assert!(
                (real[k] - mean[k]).abs() <= 3.0 * sd[k] + 1e-6,
                "t={}: metric {k}: {} vs {} +- {}",
                row.real.threshold,
                real[k],
                mean[k],
                sd[k]
            );
        }
        // Density matches exactly by construction of the baseline.
        assert!((row.real.density - row.baseline.mean.density).abs() < 1e-12);
    }
}

#[test]
fn planted_isolated_count_sits_below_baseline_at_three_sigma() {
    // Mean over 20 generator seeds of (real - baseline) isolated counts at
    // a mid threshold must be negative with 3-sigma room.
    let mut diffs = Vec::new();
    for seed in 0..20 {
        let (_, m) = generate_collection(&GeneratorParams::default(), 100, seed).unwrap();
        let rows = threshold_sweep(&m, &[0.22], 20, seed ^ 0xABCD, EfficiencyMode::HopCount)
            .unwrap();
        diffs.push(rows[0].real.isolated_count - rows[0].baseline.mean.isolated_count);
    }
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (diffs.len() - 1) as f64;
    let se = (var / diffs.len() as f64).sqrt();
    assert!(
        mean + 3.0 * se < 0.0,
        "mean diff {mean} + 3se {se} not below zero"
    );
}

#[test]
fn density_is_monotone_and_partitions_cover_all_nodes() {
    let (_, m) = generate_collection(&GeneratorParams::default(), 30, 8).unwrap();
    let thresholds: Vec<f64> = (1..=8).map(|i| 0.07 * i as f64).collect();
    let rows = threshold_sweep(&m, &thresholds, 3, 5, EfficiencyMode::HopCount).unwrap();
    let mut last = -1.0;
    for row in &rows {
        assert!(row.real.density >= last);
        last = row.real.density;
    }
    // Component sizes always sum to n, on both weak and strong views.
    for &t in &thresholds {
        let g = threshold_graph(&m, t, true).unwrap();
        let strong = strong_components(&g);
        let weak = covernet::graph::connected_components(&g);
        assert_eq!(strong.groups().iter().map(Vec::len).sum::<usize>(), m.n());
        assert_eq!(weak.groups().iter().map(Vec::len).sum::<usize>(), m.n());
    }
}
