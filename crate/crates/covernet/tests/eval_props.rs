//! Direct-formula oracles and invariants for the evaluation measures.

use covernet::eval::{
    average_precision, map_score, per_song_f, refine_matrix, relative_map_increase,
};
use covernet::matrix::DissimilarityMatrix;
use covernet::partition::Partition;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

fn random_partition(n: usize, groups: usize, rng: &mut ChaCha8Rng) -> Partition {
    let labels: Vec<usize> = (0..n)
        .map(|_| rng.random_range(0..groups as u64) as usize)
        .collect();
    Partition::from_labels(&labels)
}

/// Set-based per-song F oracle, written independently of the library's
/// counting loop.
fn oracle_f(predicted: &Partition, truth: &Partition) -> (f64, f64, f64) {
    let n = truth.n();
    let mut precision_sum = 0.0;
    let mut recall_sum = 0.0;
    for song in 0..n {
        let claimed: HashSet<usize> = (0..n)
            .filter(|&j| j != song && predicted.same_group(song, j))
            .collect();
        let covers: HashSet<usize> = (0..n)
            .filter(|&j| j != song && truth.same_group(song, j))
            .collect();
        let tp = claimed.intersection(&covers).count() as f64;
        let precision = if claimed.is_empty() {
            1.0
        } else {
            tp / claimed.len() as f64
        };
        let recall = if covers.is_empty() {
            1.0
        } else {
            tp / covers.len() as f64
        };
        precision_sum += precision;
        recall_sum += recall;
    }
    let p = precision_sum / n as f64;
    let r = recall_sum / n as f64;
    let f = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
    (p, r, f)
}

#[test]
fn per_song_f_matches_set_oracle_on_random_partitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for trial in 0..20 {
        let n = 6 + (trial % 10);
        let predicted = random_partition(n, 4, &mut rng);
        let truth = random_partition(n, 3, &mut rng);
        let report = per_song_f(&predicted, &truth).unwrap();
        let (p, r, f) = oracle_f(&predicted, &truth);
        assert!((report.mean_precision - p).abs() < 1e-12);
        assert!((report.mean_recall - r).abs() < 1e-12);
        assert!((report.f - f).abs() < 1e-12, "trial {trial}");
    }
}

#[test]
fn f_is_invariant_under_group_relabeling() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let n = 12;
    let predicted = random_partition(n, 4, &mut rng);
    let truth = random_partition(n, 3, &mut rng);
    // Relabel by reversing group ids.
    let relabel = |p: &Partition| {
        let k = p.group_count();
        let labels: Vec<usize> = (0..p.n()).map(|i| k - 1 - p.group(i)).collect();
        Partition::from_labels(&labels)
    };
    let a = per_song_f(&predicted, &truth).unwrap();
    let b = per_song_f(&relabel(&predicted), &relabel(&truth)).unwrap();
    assert_eq!(a.f, b.f);
}

/// Direct double-sum average precision.
fn oracle_ap(rank_list: &[usize], relevant: &HashSet<usize>, c: usize) -> f64 {
    let mut total = 0.0;
    for (r0, item) in rank_list.iter().enumerate() {
        let r = r0 + 1;
        if !relevant.contains(item) {
            continue;
        }
        let hits_at_r = rank_list[..r]
            .iter()
            .filter(|x| relevant.contains(x))
            .count();
        total += hits_at_r as f64 / r as f64;
    }
    total / (c - 1) as f64
}

#[test]
fn average_precision_matches_double_sum_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let n = 9;
        let mut items: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=(i as u64)) as usize;
            items.swap(i, j);
        }
        let relevant: HashSet<usize> = [1, 4, 7].into_iter().collect();
        let got = average_precision(&items, &[1, 4, 7], 4).unwrap();
        let expected = oracle_ap(&items, &relevant, 4);
        assert!((got - expected).abs() < 1e-12);
    }
}

fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> DissimilarityMatrix {
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.05 + 0.9 * rng.random::<f64>();
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    DissimilarityMatrix::from_rows(rows, vec![1.0; n]).unwrap()
}

/// From-scratch MAP: re-sorts and recomputes everything with local code.
fn oracle_map(m: &DissimilarityMatrix, truth: &Partition) -> f64 {
    let n = m.n();
    let mut aps = Vec::new();
    for q in 0..n {
        let relevant: HashSet<usize> = (0..n)
            .filter(|&j| j != q && truth.same_group(q, j))
            .collect();
        if relevant.is_empty() {
            continue;
        }
        let mut answers: Vec<usize> = (0..n).filter(|&j| j != q).collect();
        answers.sort_by(|&a, &b| m.get(q, a).total_cmp(&m.get(q, b)).then(a.cmp(&b)));
        aps.push(oracle_ap(&answers, &relevant, relevant.len() + 1));
    }
    aps.iter().sum::<f64>() / aps.len() as f64
}

#[test]
fn map_matches_from_scratch_oracle_on_20_node_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for trial in 0..20 {
        let m = random_symmetric(20, &mut rng);
        let truth = random_partition(20, 5, &mut rng);
        if truth.groups().iter().all(|g| g.len() < 2) {
            continue;
        }
        let got = map_score(&m, &truth).unwrap();
        let expected = oracle_map(&m, &truth);
        assert!((got - expected).abs() < 1e-12, "trial {trial}");
    }
}

fn rankings(m: &DissimilarityMatrix) -> Vec<Vec<usize>> {
    let n = m.n();
    (0..n)
        .map(|q| {
            let mut answers: Vec<usize> = (0..n).filter(|&j| j != q).collect();
            answers.sort_by(|&a, &b| m.get(q, a).total_cmp(&m.get(q, b)).then(a.cmp(&b)));
            answers
        })
        .collect()
}

#[test]
fn refinement_rankings_do_not_depend_on_the_constant() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..20 {
        let m = random_symmetric(12, &mut rng);
        let p = random_partition(12, 4, &mut rng);
        let reference = rankings(&refine_matrix(&m, &p, 1.5).unwrap());
        for c in [2.0, 10.0] {
            let got = rankings(&refine_matrix(&m, &p, c).unwrap());
            assert_eq!(reference, got, "c = {c}");
        }
    }
}

#[test]
fn refinement_with_true_partition_never_lowers_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    for trial in 0..15 {
        let m = random_symmetric(14, &mut rng);
        let truth = random_partition(14, 4, &mut rng);
        if truth.groups().iter().all(|g| g.len() < 2) {
            continue;
        }
        let base = map_score(&m, &truth).unwrap();
        let refined = refine_matrix(&m, &truth, 2.0).unwrap();
        let improved = map_score(&refined, &truth).unwrap();
        assert!(
            improved >= base - 1e-12,
            "trial {trial}: {improved} < {base}"
        );
        let delta = relative_map_increase(improved, base).unwrap();
        assert!(delta >= -1e-9);
    }
}

#[test]
fn average_precision_range_and_top_rank_condition() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let n = 8;
        let mut items: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=(i as u64)) as usize;
            items.swap(i, j);
        }
        let relevant = [2, 5];
        let ap = average_precision(&items, &relevant, 3).unwrap();
        assert!((0.0..=1.0).contains(&ap));
        let top = items[..2].iter().all(|x| relevant.contains(x));
        assert_eq!(ap == 1.0, top);
    }
}
