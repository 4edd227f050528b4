//! Baseline grouping algorithms: K-medoids and agglomerative hierarchical
//! clustering with threshold and inconsistency cuts.
//!
//! All algorithms take a symmetric dissimilarity matrix, break ties by
//! lowest index, and are deterministic given their seed.

use crate::error::{Error, Result};
use crate::graph::DisjointSets;
use crate::matrix::DissimilarityMatrix;
use crate::partition::Partition;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Linkage criteria for agglomerative clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkageMethod {
    /// Minimum pairwise distance (SL).
    Single,
    /// Maximum pairwise distance (CL).
    Complete,
    /// Size-weighted group average (UPGMA).
    GroupAverage,
    /// Plain average of the two merged clusters (WPGMA).
    WeightedAverage,
}

/// One agglomerative merge. Cluster ids follow the usual convention:
/// 0..n-1 are the original items, merge `k` creates cluster `n + k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub distance: f64,
    pub size: usize,
}

/// Stepwise dendrogram: `n - 1` merges over `n` items.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<Merge>,
    monotonic: bool,
}

impl Dendrogram {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// True when merge distances never decrease. Single, complete, and
    /// group-average linkage always produce monotone dendrograms; weighted
    /// average may not.
    pub fn monotonic(&self) -> bool {
        self.monotonic
    }
}

fn require_symmetric(m: &DissimilarityMatrix) -> Result<()> {
    if m.is_symmetric() {
        Ok(())
    } else {
        Err(Error::invalid(
            "this algorithm requires a symmetric matrix; symmetrize first",
        ))
    }
}

/// Agglomerative hierarchical clustering via Lance-Williams updates.
///
/// Among equally distant pairs the one with the lexicographically smallest
/// cluster ids merges first.
pub fn linkage(m: &DissimilarityMatrix, method: LinkageMethod) -> Result<Dendrogram> {
    require_symmetric(m)?;
    let n = m.n();
    if n == 1 {
        return Ok(Dendrogram {
            n,
            merges: vec![],
            monotonic: true,
        });
    }

    // Active cluster slots; slot i initially holds item i.
    let mut dist = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            dist[i * n + j] = m.get(i, j);
        }
    }
    let mut active: Vec<bool> = vec![true; n];
    let mut cluster_id: Vec<usize> = (0..n).collect();
    let mut size: Vec<usize> = vec![1; n];
    let mut merges = Vec::with_capacity(n - 1);
    let mut monotonic = true;
    let mut last_height = f64::NEG_INFINITY;

    for step in 0..(n - 1) {
        // Find the closest active pair; ties by smallest (id_lo, id_hi).
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for a in 0..n {
            if !active[a] {
                continue;
            }
            for b in (a + 1)..n {
                if !active[b] {
                    continue;
                }
                let d = dist[a * n + b];
                let (lo, hi) = if cluster_id[a] < cluster_id[b] {
                    (cluster_id[a], cluster_id[b])
                } else {
                    (cluster_id[b], cluster_id[a])
                };
                let better = match &best {
                    None => true,
                    Some((bd, blo, bhi, _, _)) => match d.total_cmp(bd) {
                        std::cmp::Ordering::Less => true,
                        std::cmp::Ordering::Greater => false,
                        std::cmp::Ordering::Equal => (lo, hi) < (*blo, *bhi),
                    },
                };
                if better {
                    best = Some((d, lo, hi, a, b));
                }
            }
        }
        let (d, lo, hi, a, b) = best.expect("at least one active pair");
        if d < last_height {
            monotonic = false;
        }
        last_height = d;
        merges.push(Merge {
            left: lo,
            right: hi,
            distance: d,
            size: size[a] + size[b],
        });

        // Lance-Williams update into slot a; slot b retires.
        let (sa, sb) = (size[a] as f64, size[b] as f64);
        for h in 0..n {
            if !active[h] || h == a || h == b {
                continue;
            }
            let dah = dist[a * n + h];
            let dbh = dist[b * n + h];
            let nd = match method {
                LinkageMethod::Single => dah.min(dbh),
                LinkageMethod::Complete => dah.max(dbh),
                LinkageMethod::GroupAverage => (sa * dah + sb * dbh) / (sa + sb),
                LinkageMethod::WeightedAverage => (dah + dbh) / 2.0,
            };
            dist[a * n + h] = nd;
            dist[h * n + a] = nd;
        }
        active[b] = false;
        size[a] += size[b];
        cluster_id[a] = n + step;
    }

    Ok(Dendrogram {
        n,
        merges,
        monotonic,
    })
}

/// Marks which merges are applied (a merge applies when `ok` holds for it
/// and for every merge below it) and unions the corresponding items.
fn cut_by<F: Fn(usize) -> bool>(d: &Dendrogram, ok: F) -> Partition {
    let n = d.n;
    if n == 0 {
        return Partition::from_labels(&[]);
    }
    // rep[c] = a representative item of cluster id c.
    let mut rep: Vec<usize> = (0..n).collect();
    rep.resize(n + d.merges.len(), 0);
    let mut applied = vec![false; d.merges.len()];
    let mut dsu = DisjointSets::new(n);
    for (k, merge) in d.merges.iter().enumerate() {
        let child_ok = |c: usize| c < n || applied[c - n];
        applied[k] = ok(k) && child_ok(merge.left) && child_ok(merge.right);
        rep[n + k] = rep[merge.left];
        if applied[k] {
            dsu.union(rep[merge.left], rep[merge.right]);
        }
    }
    let labels: Vec<usize> = (0..n).map(|i| dsu.find(i)).collect();
    Partition::from_labels(&labels)
}

/// Flat clusters from all maximal subtrees whose merges stay at or below
/// `d_th`.
pub fn cut_dendrogram(d: &Dendrogram, d_th: f64) -> Partition {
    cut_by(d, |k| d.merges[k].distance <= d_th)
}

/// Inconsistency coefficient of each merge: its height minus the mean
/// height of descendant merges within `depth` levels, over their standard
/// deviation; zero when fewer than two descendants exist.
pub fn inconsistency_coefficients(d: &Dendrogram, depth: usize) -> Vec<f64> {
    let n = d.n;
    let mut coeffs = vec![0.0; d.merges.len()];
    for k in 0..d.merges.len() {
        // Walk down from merge k, collecting merge heights for `depth`
        // levels strictly below it.
        let mut level: Vec<usize> = vec![k];
        let mut heights: Vec<f64> = Vec::new();
        for _ in 0..depth {
            let mut next = Vec::new();
            for &mk in &level {
                for child in [d.merges[mk].left, d.merges[mk].right] {
                    if child >= n {
                        let ck = child - n;
                        heights.push(d.merges[ck].distance);
                        next.push(ck);
                    }
                }
            }
            level = next;
            if level.is_empty() {
                break;
            }
        }
        if heights.len() < 2 {
            continue;
        }
        let mean = heights.iter().sum::<f64>() / heights.len() as f64;
        let var = heights.iter().map(|h| (h - mean).powi(2)).sum::<f64>() / heights.len() as f64;
        let sd = var.sqrt();
        if sd > 0.0 {
            coeffs[k] = (d.merges[k].distance - mean) / sd;
        }
    }
    coeffs
}

/// Flat clusters from all maximal subtrees whose merges have inconsistency
/// coefficient at most `t`.
pub fn cut_inconsistent(d: &Dendrogram, depth: usize, t: f64) -> Result<Partition> {
    if depth == 0 {
        return Err(Error::invalid("depth must be at least 1"));
    }
    let coeffs = inconsistency_coefficients(d, depth);
    Ok(cut_by(d, |k| coeffs[k] <= t))
}

/// K-medoids result: the grouping plus the elected medoids and the final
/// sum of node-to-medoid dissimilarities.
#[derive(Debug, Clone)]
pub struct Kmedoids {
    pub partition: Partition,
    pub medoids: Vec<usize>,
    pub objective: f64,
}

/// PAM-style alternation: assign every item to its nearest medoid, then
/// re-elect each group's medoid, until stable. Initial medoids are greedy
/// farthest points from a seeded start node.
pub fn kmedoids(m: &DissimilarityMatrix, k: usize, seed: u64) -> Result<Kmedoids> {
    require_symmetric(m)?;
    let n = m.n();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("k={k} out of range for n={n}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = rng.random_range(0..n as u64) as usize;
    let mut medoids = vec![start];
    let mut nearest = vec![f64::INFINITY; n];
    while medoids.len() < k {
        let last = *medoids.last().unwrap();
        for i in 0..n {
            nearest[i] = nearest[i].min(m.get(i, last));
        }
        // Farthest point from the chosen set; ties by lowest index.
        let mut best = usize::MAX;
        let mut best_d = f64::NEG_INFINITY;
        for i in 0..n {
            if medoids.contains(&i) {
                continue;
            }
            if nearest[i] > best_d {
                best_d = nearest[i];
                best = i;
            }
        }
        medoids.push(best);
    }
    medoids.sort_unstable();

    let assign = |medoids: &[usize], assignment: &mut [usize]| {
        for i in 0..n {
            if let Ok(pos) = medoids.binary_search(&i) {
                assignment[i] = pos;
                continue;
            }
            let mut best_pos = 0;
            let mut best_d = f64::INFINITY;
            for (pos, &med) in medoids.iter().enumerate() {
                let d = m.get(i, med);
                if d < best_d {
                    best_d = d;
                    best_pos = pos;
                }
            }
            assignment[i] = best_pos;
        }
    };

    let mut assignment = vec![0usize; n];
    for _ in 0..1000 {
        assign(&medoids, &mut assignment);
        // Update step: per group, the member minimizing the within-group
        // dissimilarity sum; ties by lowest index.
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (i, &g) in assignment.iter().enumerate() {
            members[g].push(i);
        }
        let mut new_medoids = Vec::with_capacity(k);
        for group in &members {
            let mut best = group[0];
            let mut best_sum = f64::INFINITY;
            for &cand in group {
                let sum: f64 = group.iter().map(|&j| m.get(cand, j)).sum();
                if sum < best_sum {
                    best_sum = sum;
                    best = cand;
                }
            }
            new_medoids.push(best);
        }
        new_medoids.sort_unstable();
        if new_medoids == medoids {
            break;
        }
        medoids = new_medoids;
    }
    assign(&medoids, &mut assignment);

    let objective = (0..n).map(|i| m.get(i, medoids[assignment[i]])).sum();
    Ok(Kmedoids {
        partition: Partition::from_labels(&assignment),
        medoids,
        objective,
    })
}

/// Mean silhouette of a grouping. Items in singleton groups score 0; with a
/// single group the score is defined as 0.
pub fn mean_silhouette(m: &DissimilarityMatrix, p: &Partition) -> f64 {
    let n = m.n();
    if n == 0 || p.group_count() < 2 {
        return 0.0;
    }
    let groups = p.groups();
    let mut total = 0.0;
    for i in 0..n {
        let own = p.group(i);
        if groups[own].len() < 2 {
            continue; // silhouette 0
        }
        let a = groups[own]
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| m.get(i, j))
            .sum::<f64>()
            / (groups[own].len() - 1) as f64;
        let mut b = f64::INFINITY;
        for (g, members) in groups.iter().enumerate() {
            if g == own || members.is_empty() {
                continue;
            }
            let mean = members.iter().map(|&j| m.get(i, j)).sum::<f64>() / members.len() as f64;
            b = b.min(mean);
        }
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    total / n as f64
}

/// Picks the k in `[k_lo, k_hi]` whose K-medoids solution maximizes the
/// mean silhouette; ties resolve to the smallest k.
pub fn select_k(m: &DissimilarityMatrix, k_range: (usize, usize), seed: u64) -> Result<usize> {
    require_symmetric(m)?;
    let (lo, hi) = k_range;
    if lo == 0 || lo > hi || hi > m.n() {
        return Err(Error::invalid(format!(
            "k range [{lo}, {hi}] invalid for n={}",
            m.n()
        )));
    }
    let scores: Vec<(usize, f64)> = (lo..=hi)
        .into_par_iter()
        .map(|k| {
            let km = kmedoids(m, k, seed).expect("validated k");
            (k, mean_silhouette(m, &km.partition))
        })
        .collect();
    let mut best_k = lo;
    let mut best_score = f64::NEG_INFINITY;
    for (k, score) in scores {
        if score > best_score {
            best_score = score;
            best_k = k;
        }
    }
    Ok(best_k)
}
