//! Pairwise dissimilarity matrices and their construction from raw
//! similarity scores.
//!
//! The central type is [`DissimilarityMatrix`]: an `n x n` grid of
//! non-negative weights with a zero diagonal plus one duration per item.
//! Weights are generally asymmetric because the similarity-to-dissimilarity
//! conversion divides by the duration of the *target* item; call
//! [`DissimilarityMatrix::symmetrize`] before handing a matrix to an
//! algorithm that requires symmetry.

use crate::error::{Error, Result};

/// Dense square matrix of pairwise dissimilarities plus per-item durations.
///
/// Invariants enforced at construction: all weights are finite and
/// non-negative, the diagonal is exactly zero, and every duration is
/// strictly positive. Symmetry is *not* required.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    n: usize,
    weights: Vec<f64>,
    durations: Vec<f64>,
}

impl DissimilarityMatrix {
    /// Builds a matrix from row-major weights (`n * n` entries) and `n`
    /// durations.
    pub fn new(n: usize, weights: Vec<f64>, durations: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("matrix must have at least one item"));
        }
        if weights.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {} weights for n={}, got {}",
                n * n,
                n,
                weights.len()
            )));
        }
        if durations.len() != n {
            return Err(Error::invalid(format!(
                "expected {} durations, got {}",
                n,
                durations.len()
            )));
        }
        for (idx, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::invalid(format!(
                    "weight at ({}, {}) is {w}; weights must be finite and non-negative",
                    idx / n,
                    idx % n
                )));
            }
        }
        for i in 0..n {
            if weights[i * n + i] != 0.0 {
                return Err(Error::invalid(format!("diagonal entry {i} is not zero")));
            }
        }
        for (i, &d) in durations.iter().enumerate() {
            if !d.is_finite() || d <= 0.0 {
                return Err(Error::invalid(format!(
                    "duration {i} is {d}; durations must be finite and positive"
                )));
            }
        }
        Ok(Self {
            n,
            weights,
            durations,
        })
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows(rows: Vec<Vec<f64>>, durations: Vec<f64>) -> Result<Self> {
        let n = rows.len();
        let mut weights = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            weights.extend_from_slice(row);
        }
        Self::new(n, weights, durations)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.n..(i + 1) * self.n]
    }

    pub fn durations(&self) -> &[f64] {
        &self.durations
    }

    /// Largest weight in the matrix.
    pub fn max_weight(&self) -> f64 {
        self.weights.iter().cloned().fold(0.0, f64::max)
    }

    /// Exact (bitwise) symmetry check.
    pub fn is_symmetric(&self) -> bool {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.get(i, j) != self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }

    /// Averages opposite entries: `out[i][j] = (w[i][j] + w[j][i]) / 2`.
    ///
    /// Idempotent; durations are carried over unchanged.
    pub fn symmetrize(&self) -> DissimilarityMatrix {
        let n = self.n;
        let mut weights = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = (self.get(i, j) + self.get(j, i)) / 2.0;
                weights[i * n + j] = avg;
                weights[j * n + i] = avg;
            }
        }
        DissimilarityMatrix {
            n,
            weights,
            durations: self.durations.clone(),
        }
    }

    /// Extracts the sub-matrix over `items` (indices into this matrix, in
    /// the given order), together with the matching durations.
    pub fn submatrix(&self, items: &[usize]) -> Result<DissimilarityMatrix> {
        let k = items.len();
        if k == 0 {
            return Err(Error::invalid("submatrix needs at least one item"));
        }
        for &i in items {
            if i >= self.n {
                return Err(Error::invalid(format!("item index {i} out of range")));
            }
        }
        let mut weights = Vec::with_capacity(k * k);
        for &i in items {
            for &j in items {
                weights.push(if i == j { 0.0 } else { self.get(i, j) });
            }
        }
        let durations = items.iter().map(|&i| self.durations[i]).collect();
        DissimilarityMatrix::new(k, weights, durations)
    }
}

/// Raw similarity scores to be converted into a dissimilarity matrix.
///
/// Scores follow the convention higher-is-more-similar with a minimum of 1,
/// so the conversion below can divide by them safely.
#[derive(Debug, Clone)]
pub struct SimilarityInput {
    n: usize,
    qmax: Vec<f64>,
    durations: Vec<f64>,
}

impl SimilarityInput {
    /// Validates that every off-diagonal score is >= 1 and every duration
    /// is strictly positive.
    pub fn new(n: usize, qmax: Vec<f64>, durations: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("similarity input must have at least one item"));
        }
        if qmax.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {} scores for n={}, got {}",
                n * n,
                n,
                qmax.len()
            )));
        }
        if durations.len() != n {
            return Err(Error::invalid(format!(
                "expected {} durations, got {}",
                n,
                durations.len()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let q = qmax[i * n + j];
                if !q.is_finite() || q < 1.0 {
                    return Err(Error::invalid(format!(
                        "similarity score at ({i}, {j}) is {q}; scores must be >= 1"
                    )));
                }
            }
        }
        for (i, &d) in durations.iter().enumerate() {
            if !d.is_finite() || d <= 0.0 {
                return Err(Error::invalid(format!(
                    "duration {i} is {d}; durations must be finite and positive"
                )));
            }
        }
        Ok(Self { n, qmax, durations })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn score(&self, i: usize, j: usize) -> f64 {
        self.qmax[i * self.n + j]
    }

    pub fn durations(&self) -> &[f64] {
        &self.durations
    }
}

/// Converts similarity scores into dissimilarities:
/// `w[i][j] = sqrt(duration[j]) / score[i][j]` off the diagonal, 0 on it.
///
/// The result is asymmetric unless the two items share a duration.
pub fn from_qmax(input: &SimilarityInput) -> DissimilarityMatrix {
    let n = input.n;
    let mut weights = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                weights[i * n + j] = input.durations[j].sqrt() / input.qmax[i * n + j];
            }
        }
    }
    DissimilarityMatrix {
        n,
        weights,
        durations: input.durations.clone(),
    }
}
