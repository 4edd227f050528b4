//! Network-based community detectors.
//!
//! Four detectors share one configuration: modularity optimization over the
//! thresholded similarity graph, plain threshold-plus-nearest-neighbor
//! pruning with connected components, and two refinements of the latter
//! that reinforce triangle coherence before extracting components.

use crate::error::{Error, Result};
use crate::graph::{
    connected_components, knn_prune_with_rule, threshold_graph, KnnRule, Network,
};
use crate::matrix::DissimilarityMatrix;
use crate::partition::Partition;
use std::collections::{BTreeMap, HashSet};

/// How dissimilarity edge weights are turned into similarities for
/// modularity computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightScheme {
    /// `s = w_th - w`: linear, zero at the threshold, no singularities.
    Complement,
    /// `s = 1 / w`; grows without bound as w approaches 0.
    Reciprocal,
    /// Every edge counts 1.
    Unit,
}

/// Shared detector configuration.
#[derive(Debug, Clone, Copy)]
pub struct CommunityConfig {
    /// Dissimilarity threshold: pairs at or below it become edges.
    pub w_th: f64,
    /// Per-node nearest-neighbor cap applied after thresholding.
    pub r_th: usize,
    /// Penalty weight for incomplete triangles in the coherence objective.
    pub alpha: f64,
    /// Only pairs with |w - w_th| <= margin enter the restricted pass.
    pub margin: f64,
    pub seed: u64,
    /// Edge survival rule for the nearest-neighbor pruning.
    pub knn_rule: KnnRule,
    /// Similarity mapping used by modularity optimization.
    pub weight_scheme: WeightScheme,
    /// Iterate the coherence pass to a fixpoint (capped at 10 passes)
    /// instead of the single documented pass.
    pub pm2_fixpoint: bool,
}

impl CommunityConfig {
    pub fn new(w_th: f64, r_th: usize, alpha: f64, margin: f64, seed: u64) -> Result<Self> {
        if !(w_th > 0.0) {
            return Err(Error::invalid(format!("w_th must be positive, got {w_th}")));
        }
        if r_th == 0 {
            return Err(Error::invalid("r_th must be at least 1"));
        }
        if !(alpha >= 0.0) {
            return Err(Error::invalid(format!("alpha must be >= 0, got {alpha}")));
        }
        if !(margin >= 0.0) {
            return Err(Error::invalid(format!("margin must be >= 0, got {margin}")));
        }
        Ok(CommunityConfig {
            w_th,
            r_th,
            alpha,
            margin,
            seed,
            knn_rule: KnnRule::Union,
            weight_scheme: WeightScheme::Complement,
            pm2_fixpoint: false,
        })
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }
}

impl Default for CommunityConfig {
    /// Parameters from the in-sample grid search on the small setups.
    fn default() -> Self {
        CommunityConfig::new(0.30, 2, 1.0, 0.05, 0).expect("valid defaults")
    }
}

fn similarity(scheme: WeightScheme, w_th: f64, w: f64) -> f64 {
    match scheme {
        WeightScheme::Complement => w_th - w,
        WeightScheme::Reciprocal => 1.0 / w,
        WeightScheme::Unit => 1.0,
    }
}

/// Newman-Girvan weighted modularity of a partition over an undirected
/// graph, with edge weights mapped through `scheme` (pass the `w_th` the
/// graph was thresholded at for the complement scheme).
pub fn modularity(g: &Network, p: &Partition, scheme: WeightScheme, w_th: f64) -> Result<f64> {
    if g.directed() {
        return Err(Error::invalid("modularity requires an undirected graph"));
    }
    if p.n() != g.n() {
        return Err(Error::invalid("partition and graph sizes differ"));
    }
    let groups = p.group_count();
    let mut intra = vec![0.0; groups];
    let mut degree = vec![0.0; groups];
    let mut total = 0.0;
    for e in g.edges() {
        let s = similarity(scheme, w_th, e.weight);
        total += s;
        degree[p.group(e.source)] += s;
        degree[p.group(e.target)] += s;
        if p.same_group(e.source, e.target) {
            intra[p.group(e.source)] += s;
        }
    }
    if total <= 0.0 {
        return Err(Error::invalid(
            "graph has zero total weight; modularity undefined",
        ));
    }
    let two_m = 2.0 * total;
    let mut q = 0.0;
    for c in 0..groups {
        q += 2.0 * intra[c] / two_m - (degree[c] / two_m).powi(2);
    }
    Ok(q)
}

// ---------------------------------------------------------------------------
// Modularity optimization (greedy local moves + aggregation)
// ---------------------------------------------------------------------------

/// Working graph for the aggregation phases: adjacency without self-loops
/// plus an explicit per-node loop weight.
struct MoGraph {
    adj: Vec<Vec<(usize, f64)>>,
    loops: Vec<f64>,
    total_weight: f64,
}

impl MoGraph {
    fn node_count(&self) -> usize {
        self.adj.len()
    }

    fn degree(&self, i: usize) -> f64 {
        2.0 * self.loops[i] + self.adj[i].iter().map(|&(_, w)| w).sum::<f64>()
    }
}

/// Greedy local moves in fixed node order until no move improves
/// modularity. Returns dense community labels and whether anything moved.
fn local_moves(g: &MoGraph) -> (Vec<usize>, bool) {
    let n = g.node_count();
    let m = g.total_weight;
    let mut community: Vec<usize> = (0..n).collect();
    let degree: Vec<f64> = (0..n).map(|i| g.degree(i)).collect();
    let mut community_degree = degree.clone();
    let mut any_move = false;

    let mut moved = true;
    while moved {
        moved = false;
        for node in 0..n {
            let current = community[node];
            let k_i = degree[node];
            // Edge weight from `node` into each neighboring community;
            // BTreeMap keeps candidate order deterministic.
            let mut weight_to: BTreeMap<usize, f64> = BTreeMap::new();
            for &(nb, w) in &g.adj[node] {
                *weight_to.entry(community[nb]).or_insert(0.0) += w;
            }
            community_degree[current] -= k_i;
            let baseline = weight_to.get(&current).copied().unwrap_or(0.0)
                - community_degree[current] * k_i / (2.0 * m);
            let mut best_comm = current;
            let mut best_gain = baseline;
            for (&cand, &w_to) in &weight_to {
                if cand == current {
                    continue;
                }
                let gain = w_to - community_degree[cand] * k_i / (2.0 * m);
                if gain > best_gain + 1e-12 {
                    best_gain = gain;
                    best_comm = cand;
                }
            }
            community_degree[best_comm] += k_i;
            if best_comm != current {
                community[node] = best_comm;
                moved = true;
                any_move = true;
            }
        }
    }
    let relabeled = Partition::from_labels(&community);
    (relabeled.as_slice().to_vec(), any_move)
}

fn aggregate(g: &MoGraph, community: &[usize], groups: usize) -> MoGraph {
    let mut loops = vec![0.0; groups];
    let mut maps: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); groups];
    for (i, nbrs) in g.adj.iter().enumerate() {
        let ci = community[i];
        loops[ci] += g.loops[i];
        for &(j, w) in nbrs {
            let cj = community[j];
            if ci == cj {
                // Each undirected edge appears twice across adjacency lists.
                loops[ci] += w / 2.0;
            } else {
                *maps[ci].entry(cj).or_insert(0.0) += w;
            }
        }
    }
    let adj = maps.into_iter().map(|m| m.into_iter().collect()).collect();
    MoGraph {
        adj,
        loops,
        total_weight: g.total_weight,
    }
}

/// Full optimization: local moves, aggregate, repeat until stable.
/// Deterministic because nodes are visited in index order.
fn optimize_modularity(n: usize, edges: &[(usize, usize, f64)]) -> Vec<usize> {
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut total = 0.0;
    for &(u, v, w) in edges {
        adj[u].push((v, w));
        adj[v].push((u, w));
        total += w;
    }
    let mut graph = MoGraph {
        adj,
        loops: vec![0.0; n],
        total_weight: total,
    };
    // node_map[i] = current community of original node i.
    let mut node_map: Vec<usize> = (0..n).collect();
    loop {
        let (community, moved) = local_moves(&graph);
        let groups = community.iter().copied().max().map_or(0, |g| g + 1);
        for slot in node_map.iter_mut() {
            *slot = community[*slot];
        }
        if !moved || groups == graph.node_count() {
            break;
        }
        graph = aggregate(&graph, &community, groups);
    }
    node_map
}

/// Thresholds the symmetric matrix at `w_th`, maps surviving edges to
/// similarities, and maximizes modularity. An empty thresholded graph
/// yields all singletons.
pub fn detect_mo(m: &DissimilarityMatrix, cfg: &CommunityConfig) -> Result<Partition> {
    let g = threshold_graph(m, cfg.w_th, false)?;
    let edges: Vec<(usize, usize, f64)> = g
        .edges()
        .iter()
        .map(|e| {
            (
                e.source,
                e.target,
                similarity(cfg.weight_scheme, cfg.w_th, e.weight),
            )
        })
        .filter(|&(_, _, s)| s > 0.0)
        .collect();
    if edges.is_empty() {
        return Ok(Partition::singletons(m.n()));
    }
    let labels = optimize_modularity(m.n(), &edges);
    Ok(Partition::from_labels(&labels))
}

/// The thresholded, nearest-neighbor-pruned working graph shared by the
/// proposed detectors.
fn pruned_graph(m: &DissimilarityMatrix, cfg: &CommunityConfig) -> Result<Network> {
    let g = threshold_graph(m, cfg.w_th, false)?;
    knn_prune_with_rule(&g, m, cfg.r_th, cfg.knn_rule)
}

/// Threshold, prune to nearest neighbors, and read connected components as
/// communities.
pub fn detect_pm1(m: &DissimilarityMatrix, cfg: &CommunityConfig) -> Result<Partition> {
    Ok(connected_components(&pruned_graph(m, cfg)?))
}

/// Coherence objective for the pair `(i, j)`: the value with the edge
/// present and with it absent. Counts are local to the pair's
/// neighborhoods: with the edge, each common neighbor closes a triangle and
/// each exclusive neighbor leaves one incomplete; without it, each common
/// neighbor is itself an incomplete triangle.
pub fn triangle_objective(g: &Network, i: usize, j: usize, alpha: f64) -> (f64, f64) {
    let mut common = 0usize;
    let mut exclusive = 0usize;
    let mut a = g.neighbors(i).iter().map(|&(v, _)| v).filter(|&v| v != j).peekable();
    let mut b = g.neighbors(j).iter().map(|&(v, _)| v).filter(|&v| v != i).peekable();
    loop {
        match (a.peek().copied(), b.peek().copied()) {
            (Some(u), Some(v)) => match u.cmp(&v) {
                std::cmp::Ordering::Equal => {
                    common += 1;
                    a.next();
                    b.next();
                }
                std::cmp::Ordering::Less => {
                    exclusive += 1;
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    exclusive += 1;
                    b.next();
                }
            },
            (Some(_), None) => {
                exclusive += 1;
                a.next();
            }
            (None, Some(_)) => {
                exclusive += 1;
                b.next();
            }
            (None, None) => break,
        }
    }
    let f_with = common as f64 - alpha * exclusive as f64;
    let f_without = -alpha * common as f64;
    (f_with, f_without)
}

/// Counters from one coherence pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PassStats {
    pub pairs_visited: usize,
    pub edges_added: usize,
    pub edges_removed: usize,
}

/// Mutable adjacency used during the pass.
struct WorkingGraph {
    sets: Vec<HashSet<usize>>,
}

impl WorkingGraph {
    fn from_network(g: &Network) -> Self {
        let mut sets = vec![HashSet::new(); g.n()];
        for e in g.edges() {
            sets[e.source].insert(e.target);
            sets[e.target].insert(e.source);
        }
        WorkingGraph { sets }
    }

    fn has_edge(&self, i: usize, j: usize) -> bool {
        self.sets[i].contains(&j)
    }

    /// (common, exclusive) neighbor counts for the pair, ignoring the pair
    /// edge itself.
    fn pair_counts(&self, i: usize, j: usize) -> (usize, usize) {
        let (small, large) = if self.sets[i].len() <= self.sets[j].len() {
            (i, j)
        } else {
            (j, i)
        };
        let mut common = 0usize;
        for &v in &self.sets[small] {
            if v != i && v != j && self.sets[large].contains(&v) {
                common += 1;
            }
        }
        let size_i = self.sets[i].len() - usize::from(self.sets[i].contains(&j));
        let size_j = self.sets[j].len() - usize::from(self.sets[j].contains(&i));
        (common, size_i + size_j - 2 * common)
    }
}

/// One sequential pass over candidate pairs in lexicographic order. A pair
/// is visited when the optional margin filter accepts its matrix weight and
/// the pair is currently connected or shares a neighbor; pairs farther than
/// two hops can never profit from an edge, so skipping them is exact.
fn coherence_pass(
    work: &mut WorkingGraph,
    m: &DissimilarityMatrix,
    alpha: f64,
    margin: Option<(f64, f64)>,
    stats: &mut PassStats,
) -> bool {
    let n = m.n();
    let mut changed = false;
    for i in 0..n {
        for j in (i + 1)..n {
            if let Some((w_th, margin)) = margin {
                if (m.get(i, j) - w_th).abs() > margin {
                    continue;
                }
            }
            let has = work.has_edge(i, j);
            let (common, exclusive) = work.pair_counts(i, j);
            if !has && common == 0 {
                continue;
            }
            stats.pairs_visited += 1;
            let f_with = common as f64 - alpha * exclusive as f64;
            let f_without = -alpha * common as f64;
            if f_with > f_without && !has {
                work.sets[i].insert(j);
                work.sets[j].insert(i);
                stats.edges_added += 1;
                changed = true;
            } else if f_without > f_with && has {
                work.sets[i].remove(&j);
                work.sets[j].remove(&i);
                stats.edges_removed += 1;
                changed = true;
            }
        }
    }
    changed
}

fn components_of_working(work: &WorkingGraph) -> Partition {
    let n = work.sets.len();
    let mut dsu = crate::graph::DisjointSets::new(n);
    for (i, nbrs) in work.sets.iter().enumerate() {
        for &j in nbrs {
            dsu.union(i, j);
        }
    }
    let labels: Vec<usize> = (0..n).map(|i| dsu.find(i)).collect();
    Partition::from_labels(&labels)
}

fn detect_coherence(
    m: &DissimilarityMatrix,
    cfg: &CommunityConfig,
    margin: Option<(f64, f64)>,
) -> Result<(Partition, PassStats)> {
    let base = pruned_graph(m, cfg)?;
    let mut work = WorkingGraph::from_network(&base);
    let mut stats = PassStats::default();
    let passes = if cfg.pm2_fixpoint { 10 } else { 1 };
    for _ in 0..passes {
        let changed = coherence_pass(&mut work, m, cfg.alpha, margin, &mut stats);
        if !changed {
            break;
        }
    }
    Ok((components_of_working(&work), stats))
}

/// Triangle-coherence detector: start from the pruned graph, settle every
/// candidate pair on whichever of edge/no-edge scores higher, then read
/// components.
pub fn detect_pm2(m: &DissimilarityMatrix, cfg: &CommunityConfig) -> Result<Partition> {
    Ok(detect_coherence(m, cfg, None)?.0)
}

/// [`detect_pm2`] with pass statistics.
pub fn detect_pm2_stats(
    m: &DissimilarityMatrix,
    cfg: &CommunityConfig,
) -> Result<(Partition, PassStats)> {
    detect_coherence(m, cfg, None)
}

/// Restricted coherence detector: the pass only visits pairs whose matrix
/// weight lies within `margin` of the threshold.
pub fn detect_pm3(m: &DissimilarityMatrix, cfg: &CommunityConfig) -> Result<Partition> {
    Ok(detect_coherence(m, cfg, Some((cfg.w_th, cfg.margin)))?.0)
}

/// [`detect_pm3`] with pass statistics.
pub fn detect_pm3_stats(
    m: &DissimilarityMatrix,
    cfg: &CommunityConfig,
) -> Result<(Partition, PassStats)> {
    detect_coherence(m, cfg, Some((cfg.w_th, cfg.margin)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use approx::assert_relative_eq;

    fn sym(rows: Vec<Vec<f64>>) -> DissimilarityMatrix {
        let n = rows.len();
        DissimilarityMatrix::from_rows(rows, vec![1.0; n]).unwrap()
    }

    fn unit_edges(n: usize, pairs: &[(usize, usize)]) -> Network {
        let edges = pairs
            .iter()
            .map(|&(a, b)| Edge {
                source: a,
                target: b,
                weight: 1.0,
            })
            .collect();
        Network::new(n, false, edges).unwrap()
    }

    #[test]
    fn modularity_single_community_is_zero() {
        let g = unit_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let p = Partition::from_labels(&[0, 0, 0, 0]);
        let q = modularity(&g, &p, WeightScheme::Unit, 1.0).unwrap();
        assert_relative_eq!(q, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn modularity_two_cliques_is_half() {
        // Two disconnected triangles, partition = cliques: Q = 0.5.
        let g = unit_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let p = Partition::from_labels(&[0, 0, 0, 1, 1, 1]);
        let q = modularity(&g, &p, WeightScheme::Unit, 1.0).unwrap();
        assert_relative_eq!(q, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn modularity_zero_weight_graph_errors() {
        let g = unit_edges(3, &[]);
        let p = Partition::singletons(3);
        assert!(modularity(&g, &p, WeightScheme::Unit, 1.0).is_err());
    }

    #[test]
    fn triangle_objective_closure_and_deletion_cases() {
        // 1 common neighbor, no exclusive: keep the edge.
        let g = unit_edges(3, &[(0, 2), (1, 2)]);
        let (with, without) = triangle_objective(&g, 0, 1, 1.0);
        assert_eq!((with, without), (1.0, -1.0));

        // 0 common, 2 exclusive: drop the edge.
        let g = unit_edges(4, &[(0, 1), (0, 2), (1, 3)]);
        let (with, without) = triangle_objective(&g, 0, 1, 1.0);
        assert_eq!((with, without), (-2.0, 0.0));
    }

    #[test]
    fn detect_mo_splits_two_cliques_linked_above_threshold() {
        let mut rows = vec![vec![0.0; 8]; 8];
        for i in 0..8 {
            for j in 0..8 {
                if i == j {
                    continue;
                }
                let same = (i < 4) == (j < 4);
                rows[i][j] = if same { 0.1 } else { 0.9 };
            }
        }
        let m = sym(rows);
        let cfg = CommunityConfig::new(0.3, 3, 1.0, 0.1, 0).unwrap();
        let p = detect_mo(&m, &cfg).unwrap();
        assert_eq!(p.group_count(), 2);
        assert!(p.same_group(0, 3));
        assert!(p.same_group(4, 7));
        assert!(!p.same_group(0, 4));
    }

    #[test]
    fn detect_mo_beats_singleton_modularity() {
        let mut rows = vec![vec![0.0; 10]; 10];
        for i in 0..10 {
            for j in 0..10 {
                if i != j {
                    rows[i][j] = 0.05 + 0.4 * (((i * 13 + j * 13 + i * j) % 7) as f64 / 7.0);
                }
            }
        }
        let m = sym(rows);
        let cfg = CommunityConfig::new(0.3, 3, 1.0, 0.1, 0).unwrap();
        let p = detect_mo(&m, &cfg).unwrap();
        let g = threshold_graph(&m, cfg.w_th, false).unwrap();
        assert!(g.edge_count() > 0, "test instance should have edges");
        let detected = modularity(&g, &p, WeightScheme::Complement, cfg.w_th).unwrap();
        let singles = modularity(
            &g,
            &Partition::singletons(10),
            WeightScheme::Complement,
            cfg.w_th,
        )
        .unwrap();
        assert!(detected >= singles - 1e-12);
    }

    #[test]
    fn detect_mo_empty_graph_gives_singletons() {
        let m = sym(vec![
            vec![0.0, 0.9, 0.9],
            vec![0.9, 0.0, 0.9],
            vec![0.9, 0.9, 0.0],
        ]);
        let cfg = CommunityConfig::new(0.2, 1, 1.0, 0.1, 0).unwrap();
        let p = detect_mo(&m, &cfg).unwrap();
        assert_eq!(p.group_count(), 3);
    }

    #[test]
    fn pm1_all_weights_above_threshold_gives_singletons() {
        let m = sym(vec![
            vec![0.0, 0.8, 0.8, 0.8],
            vec![0.8, 0.0, 0.8, 0.8],
            vec![0.8, 0.8, 0.0, 0.8],
            vec![0.8, 0.8, 0.8, 0.0],
        ]);
        let cfg = CommunityConfig::new(0.3, 2, 1.0, 0.1, 0).unwrap();
        assert_eq!(detect_pm1(&m, &cfg).unwrap().group_count(), 4);
    }

    #[test]
    fn pm1_recovers_two_blobs() {
        let mut rows = vec![vec![0.0; 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                if i == j {
                    continue;
                }
                let same = (i < 3) == (j < 3);
                rows[i][j] = if same { 0.15 } else { 0.7 };
            }
        }
        let m = sym(rows);
        let cfg = CommunityConfig::new(0.3, 2, 1.0, 0.1, 0).unwrap();
        let p = detect_pm1(&m, &cfg).unwrap();
        assert_eq!(p.group_count(), 2);
        assert!(p.same_group(0, 2));
        assert!(!p.same_group(0, 5));
    }

    #[test]
    fn pm2_noop_on_clique_union() {
        // Two triangles below threshold; the pass changes nothing.
        let mut rows = vec![vec![0.0; 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                if i == j {
                    continue;
                }
                let same = (i < 3) == (j < 3);
                rows[i][j] = if same { 0.1 } else { 0.9 };
            }
        }
        let m = sym(rows);
        let cfg = CommunityConfig::new(0.3, 3, 1.0, 0.1, 0).unwrap();
        let (p, stats) = detect_pm2_stats(&m, &cfg).unwrap();
        assert_eq!(stats.edges_added, 0);
        assert_eq!(stats.edges_removed, 0);
        assert_eq!(p.group_count(), 2);
    }

    #[test]
    fn pm2_closes_open_wedge() {
        // Apex node 2 linked to 0 and 1; the (0, 1) pair is visited first
        // and closure (f = 1) beats removal (f = -alpha).
        let m = sym(vec![
            vec![0.0, 0.6, 0.2],
            vec![0.6, 0.0, 0.2],
            vec![0.2, 0.2, 0.0],
        ]);
        let cfg = CommunityConfig::new(0.3, 2, 0.5, 0.1, 0).unwrap();
        let (p, stats) = detect_pm2_stats(&m, &cfg).unwrap();
        assert_eq!(stats.edges_added, 1);
        assert_eq!(p.group_count(), 1);
    }

    #[test]
    fn pm3_margin_extremes_reduce_to_pm1_and_pm2() {
        let mut rows = vec![vec![0.0; 7]; 7];
        for i in 0..7 {
            for j in 0..7 {
                if i != j {
                    rows[i][j] = 0.05 + 0.5 * (((i + j + i * j) % 9) as f64 / 9.0);
                }
            }
        }
        let m = sym(rows);
        let cfg = CommunityConfig::new(0.25, 2, 1.0, 0.0, 0).unwrap();
        let pm1 = detect_pm1(&m, &cfg).unwrap();
        let pm3_zero = detect_pm3(&m, &cfg.with_margin(0.0)).unwrap();
        assert_eq!(pm1, pm3_zero);

        let pm2 = detect_pm2(&m, &cfg).unwrap();
        let pm3_wide = detect_pm3(&m, &cfg.with_margin(f64::INFINITY)).unwrap();
        assert_eq!(pm2, pm3_wide);
    }

    #[test]
    fn pm3_visits_a_subset_of_pm2_pairs() {
        let mut rows = vec![vec![0.0; 12]; 12];
        for i in 0..12 {
            for j in 0..12 {
                if i != j {
                    rows[i][j] = 0.05 + 0.45 * (((i + j + 2 * i * j) % 11) as f64 / 11.0);
                }
            }
        }
        let m = sym(rows);
        let cfg = CommunityConfig::new(0.3, 3, 1.0, 0.05, 0).unwrap();
        let (_, pm2_stats) = detect_pm2_stats(&m, &cfg).unwrap();
        let (_, pm3_stats) = detect_pm3_stats(&m, &cfg).unwrap();
        assert!(pm3_stats.pairs_visited < pm2_stats.pairs_visited);
    }

    #[test]
    fn config_validation() {
        assert!(CommunityConfig::new(0.0, 1, 1.0, 0.1, 0).is_err());
        assert!(CommunityConfig::new(0.3, 0, 1.0, 0.1, 0).is_err());
        assert!(CommunityConfig::new(0.3, 1, -1.0, 0.1, 0).is_err());
        assert!(CommunityConfig::new(0.3, 1, 1.0, -0.1, 0).is_err());
    }
}
