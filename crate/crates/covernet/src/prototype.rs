//! Prototype detection inside communities: which member is the likely
//! original of a group of renditions?
//!
//! Both detectors read the community's sub-matrix of the *asymmetric*
//! weights. Closeness centrality picks the member with the smallest summed
//! outgoing dissimilarity; MST centrality symmetrizes the sub-matrix,
//! builds its minimum spanning tree, and picks the member with the smallest
//! summed tree-path distance to the others.

use crate::error::{Error, Result};
use crate::eval::{binomial_pvalue, significance_stars};
use crate::datasets::Collection;
use crate::graph::{minimum_spanning_tree, Edge, Network};
use crate::matrix::DissimilarityMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::{self, Write};

/// A community's members plus the asymmetric weights restricted to them.
#[derive(Debug, Clone)]
pub struct CommunitySubnet {
    members: Vec<usize>,
    /// Row-major cardinality x cardinality weights, member order.
    weights: Vec<f64>,
}

impl CommunitySubnet {
    /// Builds the subnet with members sorted ascending, so positional tie
    /// breaking equals lowest-member-id tie breaking.
    pub fn from_matrix(m: &DissimilarityMatrix, members: &[usize]) -> Result<Self> {
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != members.len() {
            return Err(Error::invalid("duplicate community members"));
        }
        Self::from_matrix_ordered(m, sorted)
    }

    /// Builds the subnet preserving the given member order; ties then
    /// resolve to the earliest listed member. The hit-rate experiment uses
    /// this with shuffled orders so tie resolution carries no bias.
    pub fn from_matrix_ordered(m: &DissimilarityMatrix, members: Vec<usize>) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::invalid("a community needs at least two members"));
        }
        for &i in &members {
            if i >= m.n() {
                return Err(Error::invalid(format!("member {i} out of range")));
            }
        }
        let k = members.len();
        let mut weights = vec![0.0; k * k];
        for (a, &i) in members.iter().enumerate() {
            for (b, &j) in members.iter().enumerate() {
                if a != b {
                    weights[a * k + b] = m.get(i, j);
                }
            }
        }
        Ok(CommunitySubnet { members, weights })
    }

    pub fn cardinality(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    fn weight(&self, a: usize, b: usize) -> f64 {
        self.weights[a * self.members.len() + b]
    }

    /// Outgoing weight sum per member position.
    fn row_sums(&self) -> Vec<f64> {
        let k = self.members.len();
        (0..k)
            .map(|a| (0..k).filter(|&b| b != a).map(|b| self.weight(a, b)).sum())
            .collect()
    }
}

/// Position of the minimum; `tied` reports whether another position attains
/// it (within exact equality).
fn argmin_with_ties(values: &[f64]) -> (usize, bool) {
    let mut best = 0usize;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    let tied = values
        .iter()
        .enumerate()
        .any(|(i, &v)| i != best && v == values[best]);
    (best, tied)
}

/// The member whose summed outgoing dissimilarity to the rest of the
/// community is smallest; ties go to the earliest listed member.
pub fn closeness_prototype(s: &CommunitySubnet) -> usize {
    let (pos, _) = argmin_with_ties(&s.row_sums());
    s.members[pos]
}

fn closeness_with_ties(s: &CommunitySubnet) -> (usize, bool) {
    let (pos, tied) = argmin_with_ties(&s.row_sums());
    (s.members[pos], tied)
}

fn mst_path_sums(s: &CommunitySubnet) -> Vec<f64> {
    let k = s.cardinality();
    // Symmetrized complete graph over member positions.
    let mut edges = Vec::with_capacity(k * (k - 1) / 2);
    for a in 0..k {
        for b in (a + 1)..k {
            edges.push(Edge {
                source: a,
                target: b,
                weight: (s.weight(a, b) + s.weight(b, a)) / 2.0,
            });
        }
    }
    let g = Network::new(k, false, edges).expect("valid complete graph");
    let tree = minimum_spanning_tree(&g).expect("complete graph is connected");
    // Tree-path distance sums via DFS from each member.
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); k];
    for e in tree.edges() {
        adj[e.source].push((e.target, e.weight));
        adj[e.target].push((e.source, e.weight));
    }
    (0..k)
        .map(|root| {
            let mut sum = 0.0;
            let mut stack = vec![(root, usize::MAX, 0.0)];
            while let Some((node, parent, dist)) = stack.pop() {
                sum += dist;
                for &(next, w) in &adj[node] {
                    if next != parent {
                        stack.push((next, node, dist + w));
                    }
                }
            }
            sum
        })
        .collect()
}

/// Closeness over the symmetrized sub-network's minimum spanning tree:
/// distances are path sums along the unique tree paths. Ties go to the
/// earliest listed member; with two members the tree is a single edge and
/// the tie rule always decides.
pub fn mst_prototype(s: &CommunitySubnet) -> usize {
    let (pos, _) = argmin_with_ties(&mst_path_sums(s));
    s.members[pos]
}

fn mst_with_ties(s: &CommunitySubnet) -> (usize, bool) {
    let (pos, tied) = argmin_with_ties(&mst_path_sums(s));
    (s.members[pos], tied)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrototypeMethod {
    Closeness,
    Mst,
}

impl PrototypeMethod {
    pub fn name(&self) -> &'static str {
        match self {
            PrototypeMethod::Closeness => "closeness",
            PrototypeMethod::Mst => "mst",
        }
    }
}

/// One cardinality row of the hit-rate experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeRow {
    pub method: PrototypeMethod,
    pub cardinality: usize,
    pub hits: usize,
    pub trials: usize,
    /// Communities whose minimum was tied (resolved by list order).
    pub ties: usize,
    pub hit_rate: f64,
    pub p_value: f64,
}

/// Hit rates of original detection over the ground-truth communities of
/// each cardinality in 2..=7, skipping groups without a designated
/// original. Member order is shuffled per community (seeded) so the
/// positional tie rule cannot favor originals. The p-value is the exact
/// binomial upper tail against the 1/C null.
pub fn run_prototype_experiment(
    c: &Collection,
    m: &DissimilarityMatrix,
    method: PrototypeMethod,
    seed: u64,
) -> Result<Vec<PrototypeRow>> {
    if c.n() != m.n() {
        return Err(Error::invalid("collection and matrix sizes differ"));
    }
    if !c.is_original().iter().any(|&f| f) {
        return Err(Error::invalid("collection has no designated originals"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = c.groups();
    let mut rows = Vec::new();
    for cardinality in 2..=7usize {
        let mut hits = 0usize;
        let mut trials = 0usize;
        let mut ties = 0usize;
        for (g, members) in groups.iter().enumerate() {
            if members.len() != cardinality {
                continue;
            }
            let Some(original) = c.original_of_group(g) else {
                continue;
            };
            let mut order = members.clone();
            order.shuffle(&mut rng);
            let subnet = CommunitySubnet::from_matrix_ordered(m, order)?;
            let (predicted, tied) = match method {
                PrototypeMethod::Closeness => closeness_with_ties(&subnet),
                PrototypeMethod::Mst => mst_with_ties(&subnet),
            };
            trials += 1;
            if tied {
                ties += 1;
            }
            if predicted == original {
                hits += 1;
            }
        }
        if trials == 0 {
            continue;
        }
        let p_value = binomial_pvalue(hits, trials, 1.0 / cardinality as f64)?;
        rows.push(PrototypeRow {
            method,
            cardinality,
            hits,
            trials,
            ties,
            hit_rate: hits as f64 / trials as f64,
            p_value,
        });
    }
    Ok(rows)
}

/// CSV report: one row per cardinality with hit percentages and
/// significance stars.
pub fn write_prototype_csv<W: Write>(out: &mut W, rows: &[PrototypeRow]) -> io::Result<()> {
    writeln!(
        out,
        "method,cardinality,hits,trials,hit_rate_percent,p_value,significance_stars"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.method.name(),
            r.cardinality,
            r.hits,
            r.trials,
            100.0 * r.hit_rate,
            r.p_value,
            significance_stars(r.p_value)
        )?;
    }
    Ok(())
}
