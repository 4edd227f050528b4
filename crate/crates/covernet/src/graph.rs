//! Sparse weighted graphs derived from dissimilarity matrices.
//!
//! Graphs are edge lists with a per-node adjacency index. Undirected edges
//! are stored once with `source < target`; all algorithms break ties by
//! lowest index so results are reproducible.

use crate::error::{Error, Result};
use crate::matrix::DissimilarityMatrix;
use crate::partition::Partition;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

/// Sparse weighted graph, directed or undirected.
#[derive(Debug, Clone)]
pub struct Network {
    n: usize,
    directed: bool,
    edges: Vec<Edge>,
    /// Out-neighbors for directed graphs; both directions for undirected.
    /// Sorted by neighbor index.
    adj: Vec<Vec<(usize, f64)>>,
}

impl Network {
    /// Builds a graph, normalizing undirected edges to `source < target`
    /// and rejecting self-loops, duplicates, and out-of-range endpoints.
    pub fn new(n: usize, directed: bool, mut edges: Vec<Edge>) -> Result<Self> {
        for e in &mut edges {
            if e.source >= n || e.target >= n {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) out of range for n={n}",
                    e.source, e.target
                )));
            }
            if e.source == e.target {
                return Err(Error::invalid(format!("self-loop on node {}", e.source)));
            }
            if !e.weight.is_finite() {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) has non-finite weight",
                    e.source, e.target
                )));
            }
            if !directed && e.source > e.target {
                std::mem::swap(&mut e.source, &mut e.target);
            }
        }
        edges.sort_by(|a, b| (a.source, a.target).cmp(&(b.source, b.target)));
        for w in edges.windows(2) {
            if w[0].source == w[1].source && w[0].target == w[1].target {
                return Err(Error::invalid(format!(
                    "duplicate edge ({}, {})",
                    w[0].source, w[0].target
                )));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for e in &edges {
            adj[e.source].push((e.target, e.weight));
            if !directed {
                adj[e.target].push((e.source, e.weight));
            }
        }
        for list in &mut adj {
            list.sort_by_key(|&(j, _)| j);
        }
        Ok(Self {
            n,
            directed,
            edges,
            adj,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of `node` (out-neighbors if directed), sorted by index.
    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.adj[node]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search_by_key(&b, |&(j, _)| j).is_ok()
    }
}

/// Keeps every pair with `w[i][j] <= t` as an edge.
///
/// Undirected mode requires a symmetric matrix (symmetrize first); the
/// directed mode emits one arc per ordered pair that qualifies.
pub fn threshold_graph(m: &DissimilarityMatrix, t: f64, directed: bool) -> Result<Network> {
    if !(t > 0.0) {
        return Err(Error::invalid(format!("threshold must be positive, got {t}")));
    }
    if !directed && !m.is_symmetric() {
        return Err(Error::invalid(
            "undirected thresholding requires a symmetric matrix",
        ));
    }
    let n = m.n();
    let mut edges = Vec::new();
    if directed {
        for i in 0..n {
            for j in 0..n {
                if i != j && m.get(i, j) <= t {
                    edges.push(Edge {
                        source: i,
                        target: j,
                        weight: m.get(i, j),
                    });
                }
            }
        }
    } else {
        for i in 0..n {
            for j in (i + 1)..n {
                if m.get(i, j) <= t {
                    edges.push(Edge {
                        source: i,
                        target: j,
                        weight: m.get(i, j),
                    });
                }
            }
        }
    }
    Network::new(n, directed, edges)
}

/// How an edge survives k-NN pruning: kept by either endpoint, or only
/// when both endpoints retain it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnnRule {
    Union,
    Intersection,
}

/// Keeps, for each node, only its `r` lowest-weight incident edges
/// (ties by lowest neighbor index), then reassembles an undirected graph
/// under the given survival rule. Nodes with fewer than `r` edges keep all.
pub fn knn_prune_with_rule(
    g: &Network,
    m: &DissimilarityMatrix,
    r: usize,
    rule: KnnRule,
) -> Result<Network> {
    if r == 0 {
        return Err(Error::invalid("nearest-neighbor cap must be at least 1"));
    }
    if m.n() != g.n() {
        return Err(Error::invalid("matrix and graph sizes differ"));
    }
    let n = g.n();
    // keep[i] = set of neighbors node i retains, as sorted Vec for lookup.
    let mut keep: Vec<Vec<usize>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut cands: Vec<usize> = g.neighbors(i).iter().map(|&(j, _)| j).collect();
        cands.sort_by(|&a, &b| {
            m.get(i, a)
                .total_cmp(&m.get(i, b))
                .then(a.cmp(&b))
        });
        cands.truncate(r);
        cands.sort_unstable();
        keep.push(cands);
    }
    let kept_by = |i: usize, j: usize| keep[i].binary_search(&j).is_ok();
    let mut edges = Vec::new();
    for i in 0..n {
        for &(j, w) in g.neighbors(i) {
            if j <= i {
                continue;
            }
            let survives = match rule {
                KnnRule::Union => kept_by(i, j) || kept_by(j, i),
                KnnRule::Intersection => kept_by(i, j) && kept_by(j, i),
            };
            if survives {
                edges.push(Edge {
                    source: i,
                    target: j,
                    weight: w,
                });
            }
        }
    }
    Network::new(n, false, edges)
}

/// [`knn_prune_with_rule`] with the default union rule.
pub fn knn_prune(g: &Network, m: &DissimilarityMatrix, r: usize) -> Result<Network> {
    knn_prune_with_rule(g, m, r, KnnRule::Union)
}

/// Connected components, treating every edge as bidirectional.
/// Group ids are dense, numbered by lowest contained node.
pub fn connected_components(g: &Network) -> Partition {
    let n = g.n();
    let mut dsu = DisjointSets::new(n);
    for e in g.edges() {
        dsu.union(e.source, e.target);
    }
    let labels: Vec<usize> = (0..n).map(|i| dsu.find(i)).collect();
    Partition::from_labels(&labels)
}

/// Strongly connected components via iterative Tarjan.
///
/// On an undirected graph every edge acts as a 2-cycle, so the result
/// coincides with [`connected_components`].
pub fn strong_components(g: &Network) -> Partition {
    let n = g.n();
    let mut out: Vec<Vec<u32>> = vec![Vec::new(); n];
    for e in g.edges() {
        out[e.source].push(e.target as u32);
        if !g.directed() {
            out[e.target].push(e.source as u32);
        }
    }
    let (labels, _) = scc_labels(n, &out);
    Partition::from_labels(&labels)
}

/// Tarjan over a raw out-adjacency list; returns per-node component labels
/// and the component count.
pub(crate) fn scc_labels(n: usize, out: &[Vec<u32>]) -> (Vec<usize>, usize) {
    let mut index = vec![usize::MAX; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut next_index = 0usize;
    let mut comp_count = 0usize;

    // Explicit DFS stack: (node, next child position).
    let mut call: Vec<(usize, usize)> = Vec::new();
    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        call.push((start, 0));
        index[start] = next_index;
        lowlink[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;

        while let Some(&mut (v, ref mut child)) = call.last_mut() {
            if *child < out[v].len() {
                let w = out[v][*child] as usize;
                *child += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    lowlink[parent] = lowlink[parent].min(lowlink[v]);
                }
                if lowlink[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp[w] = comp_count;
                        if w == v {
                            break;
                        }
                    }
                    comp_count += 1;
                }
            }
        }
    }
    (comp, comp_count)
}

/// Kruskal minimum spanning tree with deterministic
/// (weight, source, target) tie-breaking.
///
/// Errors on directed or disconnected input.
pub fn minimum_spanning_tree(g: &Network) -> Result<Network> {
    if g.directed() {
        return Err(Error::invalid("spanning tree requires an undirected graph"));
    }
    let n = g.n();
    let mut order: Vec<&Edge> = g.edges().iter().collect();
    order.sort_by(|a, b| {
        a.weight
            .total_cmp(&b.weight)
            .then(a.source.cmp(&b.source))
            .then(a.target.cmp(&b.target))
    });
    let mut dsu = DisjointSets::new(n);
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for e in order {
        if dsu.union(e.source, e.target) {
            tree.push(*e);
            if tree.len() == n - 1 {
                break;
            }
        }
    }
    if n > 0 && tree.len() != n - 1 {
        return Err(Error::Disconnected);
    }
    Network::new(n, false, tree)
}

/// Union-find with path halving and union by size.
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when the two sets were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}
