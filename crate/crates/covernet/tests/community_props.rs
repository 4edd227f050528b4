//! Property and oracle checks for the community detectors: triangle counts
//! against exhaustive triple enumeration, modularity against a direct
//! double sum, detector reductions, and relabeling equivariance.

use covernet::communities::{
    detect_mo, detect_pm1, detect_pm2, detect_pm3, modularity, triangle_objective,
    CommunityConfig, WeightScheme,
};
use covernet::datasets::{generate_collection, GeneratorParams};
use covernet::graph::{threshold_graph, Edge, Network};
use covernet::matrix::DissimilarityMatrix;
use covernet::partition::Partition;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Network {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                edges.push(Edge {
                    source: i,
                    target: j,
                    weight: 0.3 + 0.5 * rng.random::<f64>(),
                });
            }
        }
    }
    Network::new(n, false, edges).unwrap()
}

/// Global coherence score N_triangles - alpha * N_wedges by full triple
/// enumeration over an adjacency matrix.
fn global_coherence(adj: &[Vec<bool>], alpha: f64) -> f64 {
    let n = adj.len();
    let mut triangles = 0usize;
    let mut wedges = 0usize;
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                let edges =
                    usize::from(adj[a][b]) + usize::from(adj[a][c]) + usize::from(adj[b][c]);
                match edges {
                    3 => triangles += 1,
                    2 => wedges += 1,
                    _ => {}
                }
            }
        }
    }
    triangles as f64 - alpha * wedges as f64
}

#[test]
fn triangle_objective_matches_triple_enumeration_for_all_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for trial in 0..40 {
        let n = 3 + (trial % 6); // 3..=8
        let g = random_graph(n, 0.45, &mut rng);
        let mut adj = vec![vec![false; n]; n];
        for e in g.edges() {
            adj[e.source][e.target] = true;
            adj[e.target][e.source] = true;
        }
        let alpha = 0.5 + 0.5 * ((trial % 3) as f64);
        for i in 0..n {
            for j in (i + 1)..n {
                // Local counts by brute force.
                let mut common = 0usize;
                let mut exclusive = 0usize;
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    match (adj[i][k], adj[j][k]) {
                        (true, true) => common += 1,
                        (true, false) | (false, true) => exclusive += 1,
                        _ => {}
                    }
                }
                let (f_with, f_without) = triangle_objective(&g, i, j, alpha);
                assert_eq!(f_with, common as f64 - alpha * exclusive as f64);
                assert_eq!(f_without, -alpha * common as f64);

                // The with/without difference equals the change of the
                // global objective when toggling the pair edge.
                let mut with_adj = adj.clone();
                with_adj[i][j] = true;
                with_adj[j][i] = true;
                let mut without_adj = adj.clone();
                without_adj[i][j] = false;
                without_adj[j][i] = false;
                let global_delta =
                    global_coherence(&with_adj, alpha) - global_coherence(&without_adj, alpha);
                assert!(
                    (f_with - f_without - global_delta).abs() < 1e-9,
                    "trial {trial} pair ({i}, {j})"
                );
            }
        }
    }
}

#[test]
fn modularity_matches_independent_double_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for trial in 0..20 {
        let n = 10;
        let g = random_graph(n, 0.4, &mut rng);
        if g.edge_count() == 0 {
            continue;
        }
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..3u64) as usize).collect();
        let p = Partition::from_labels(&labels);
        let q = modularity(&g, &p, WeightScheme::Unit, 1.0).unwrap();

        // Oracle: full double sum over the adjacency matrix.
        let mut a = vec![vec![0.0; n]; n];
        let mut degree = vec![0.0; n];
        let mut two_m = 0.0;
        for e in g.edges() {
            a[e.source][e.target] = 1.0;
            a[e.target][e.source] = 1.0;
            degree[e.source] += 1.0;
            degree[e.target] += 1.0;
            two_m += 2.0;
        }
        let mut oracle = 0.0;
        for i in 0..n {
            for j in 0..n {
                if p.same_group(i, j) {
                    oracle += a[i][j] - degree[i] * degree[j] / two_m;
                }
            }
        }
        oracle /= two_m;
        assert!((q - oracle).abs() < 1e-12, "trial {trial}: {q} vs {oracle}");
    }
}

#[test]
fn detect_mo_recovers_planted_communities() {
    let params = GeneratorParams {
        intra_mean: 0.2,
        intra_sd: 0.03,
        inter_mean: 0.6,
        inter_sd: 0.05,
        prototype_pull: 0.0,
        asymmetry_jitter: 0.01,
        backbone_scale: 1.0,
        cardinality_weights: vec![(5, 1.0)],
    };
    let (c, m) = generate_collection(&params, 5, 3).unwrap();
    let sym = m.symmetrize();
    let cfg = CommunityConfig::new(0.35, 3, 1.0, 0.05, 0).unwrap();
    let detected = detect_mo(&sym, &cfg).unwrap();
    let truth = c.truth_partition();
    let report = covernet::eval::per_song_f(&detected, &truth).unwrap();
    assert!(report.f >= 0.9, "F = {}", report.f);
}

#[test]
fn detect_mo_never_below_singleton_modularity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..10 {
        let n = 20;
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.05 + 0.6 * rng.random::<f64>();
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        let m = DissimilarityMatrix::from_rows(rows, vec![1.0; n]).unwrap();
        let cfg = CommunityConfig::new(0.3, 3, 1.0, 0.05, 0).unwrap();
        let detected = detect_mo(&m, &cfg).unwrap();
        let g = threshold_graph(&m, cfg.w_th, false).unwrap();
        if g.edge_count() == 0 {
            assert_eq!(detected.group_count(), n);
            continue;
        }
        let q_detected = modularity(&g, &detected, WeightScheme::Complement, cfg.w_th).unwrap();
        let q_singletons = modularity(
            &g,
            &Partition::singletons(n),
            WeightScheme::Complement,
            cfg.w_th,
        )
        .unwrap();
        assert!(
            q_detected >= q_singletons - 1e-12,
            "trial {trial}: {q_detected} < {q_singletons}"
        );
    }
}

fn permute_matrix(m: &DissimilarityMatrix, perm: &[usize]) -> DissimilarityMatrix {
    let n = m.n();
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            rows[perm[i]][perm[j]] = m.get(i, j);
        }
    }
    DissimilarityMatrix::from_rows(rows, vec![1.0; n]).unwrap()
}

#[test]
fn pm1_is_equivariant_under_relabeling() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let n = 14;
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.05 + 0.6 * rng.random::<f64>();
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    let m = DissimilarityMatrix::from_rows(rows, vec![1.0; n]).unwrap();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=(i as u64)) as usize;
        perm.swap(i, j);
    }
    let cfg = CommunityConfig::new(0.3, 2, 1.0, 0.05, 0).unwrap();
    let base = detect_pm1(&m, &cfg).unwrap();
    let permuted = detect_pm1(&permute_matrix(&m, &perm), &cfg).unwrap();
    for i in 0..n {
        for j in 0..n {
            assert_eq!(
                base.same_group(i, j),
                permuted.same_group(perm[i], perm[j]),
                "pair ({i}, {j})"
            );
        }
    }
}

#[test]
fn pm2_stays_close_to_pm1_on_30_node_instances() {
    // Paired comparison on planted instances: the coherence pass may lose
    // a little accuracy but not more than 0.05 F.
    for seed in 0..6 {
        let params = GeneratorParams {
            cardinality_weights: vec![(4, 1.0), (5, 1.0)],
            ..GeneratorParams::default()
        };
        let (c, m) = generate_collection(&params, 7, 400 + seed).unwrap();
        let sym = m.symmetrize();
        let truth = c.truth_partition();
        // The coherence detector's tuned configuration: a denser working
        // graph and a milder incomplete-triangle penalty.
        let cfg = CommunityConfig::new(0.30, 3, 0.5, 0.05, 0).unwrap();
        let f_pm1 = covernet::eval::per_song_f(&detect_pm1(&sym, &cfg).unwrap(), &truth)
            .unwrap()
            .f;
        let f_pm2 = covernet::eval::per_song_f(&detect_pm2(&sym, &cfg).unwrap(), &truth)
            .unwrap()
            .f;
        assert!(
            f_pm2 >= f_pm1 - 0.05,
            "seed {seed}: PM2 {f_pm2} vs PM1 {f_pm1}"
        );
    }
}

#[test]
fn detectors_return_valid_partitions() {
    let (_, m) = generate_collection(&GeneratorParams::default(), 12, 9).unwrap();
    let sym = m.symmetrize();
    let cfg = CommunityConfig::default();
    for p in [
        detect_mo(&sym, &cfg).unwrap(),
        detect_pm1(&sym, &cfg).unwrap(),
        detect_pm2(&sym, &cfg).unwrap(),
        detect_pm3(&sym, &cfg).unwrap(),
    ] {
        assert_eq!(p.n(), sym.n());
        // Dense ids: every id below group_count appears.
        let mut seen = vec![false; p.group_count()];
        for i in 0..p.n() {
            seen[p.group(i)] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }
}
