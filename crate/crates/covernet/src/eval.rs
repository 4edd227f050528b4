//! Grouping and retrieval evaluation: per-song F-measure, refined
//! dissimilarities, average precision, MAP, relative MAP increase, and an
//! exact binomial test.

use crate::error::{Error, Result};
use crate::matrix::DissimilarityMatrix;
use crate::partition::Partition;
use std::io::{self, Write};

/// Per-song true/false positive and false negative counts against ground
/// truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountsPerSong {
    pub true_pos: usize,
    pub false_pos: usize,
    pub false_neg: usize,
}

/// Evaluation summary. `map` and `delta` are filled by the retrieval side
/// of the pipeline; grouping-only evaluations leave them empty.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub f: f64,
    pub map: Option<f64>,
    pub delta: Option<f64>,
    pub per_query: Vec<(usize, f64)>,
}

/// Counts for one song: covers are the other members of its truth group,
/// claimed mates are the other members of its predicted group.
pub fn per_song_counts(predicted: &Partition, truth: &Partition, song: usize) -> CountsPerSong {
    let n = truth.n();
    let mut true_pos = 0;
    let mut false_pos = 0;
    let mut false_neg = 0;
    for other in 0..n {
        if other == song {
            continue;
        }
        let is_cover = truth.same_group(song, other);
        let claimed = predicted.same_group(song, other);
        match (is_cover, claimed) {
            (true, true) => true_pos += 1,
            (false, true) => false_pos += 1,
            (true, false) => false_neg += 1,
            (false, false) => {}
        }
    }
    CountsPerSong {
        true_pos,
        false_pos,
        false_neg,
    }
}

/// Per-song precision/recall averaged over all songs, combined into the
/// even-weighted F-measure. A song with no possible mistakes (zero
/// denominator) scores 1 on the affected quantity.
pub fn per_song_f(predicted: &Partition, truth: &Partition) -> Result<EvalReport> {
    if predicted.n() != truth.n() {
        return Err(Error::invalid(format!(
            "partition sizes differ: {} vs {}",
            predicted.n(),
            truth.n()
        )));
    }
    let n = truth.n();
    if n == 0 {
        return Err(Error::invalid("empty partitions"));
    }
    let mut precision_sum = 0.0;
    let mut recall_sum = 0.0;
    for song in 0..n {
        let c = per_song_counts(predicted, truth, song);
        let precision = if c.true_pos + c.false_pos == 0 {
            1.0
        } else {
            c.true_pos as f64 / (c.true_pos + c.false_pos) as f64
        };
        let recall = if c.true_pos + c.false_neg == 0 {
            1.0
        } else {
            c.true_pos as f64 / (c.true_pos + c.false_neg) as f64
        };
        precision_sum += precision;
        recall_sum += recall;
    }
    let mean_precision = precision_sum / n as f64;
    let mean_recall = recall_sum / n as f64;
    let f = if mean_precision + mean_recall > 0.0 {
        2.0 * mean_precision * mean_recall / (mean_precision + mean_recall)
    } else {
        0.0
    };
    Ok(EvalReport {
        mean_precision,
        mean_recall,
        f,
        map: None,
        delta: None,
        per_query: Vec::new(),
    })
}

/// Refined dissimilarities: rescale by the matrix maximum and push pairs
/// predicted to be in different groups above 1 by adding `c > 1`. Same-group
/// entries stay at or below 1, so per-query rank orders within and across
/// the two blocks are independent of the exact `c`.
pub fn refine_matrix(
    m: &DissimilarityMatrix,
    p: &Partition,
    c: f64,
) -> Result<DissimilarityMatrix> {
    if p.n() != m.n() {
        return Err(Error::invalid("partition and matrix sizes differ"));
    }
    if !(c > 1.0) {
        return Err(Error::invalid(format!("refinement constant must exceed 1, got {c}")));
    }
    let max = m.max_weight();
    if max <= 0.0 {
        return Err(Error::invalid("matrix maximum is zero; nothing to rescale"));
    }
    let n = m.n();
    let mut weights = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let beta = if p.same_group(i, j) { 0.0 } else { c };
            weights[i * n + j] = m.get(i, j) / max + beta;
        }
    }
    DissimilarityMatrix::new(n, weights, m.durations().to_vec())
}

/// Average precision of a ranked answer list (query excluded) against the
/// relevant set, normalized by `c_cardinality - 1` (the query's ground-truth
/// group size minus the query itself).
pub fn average_precision(
    rank_list: &[usize],
    relevant: &[usize],
    c_cardinality: usize,
) -> Result<f64> {
    if c_cardinality < 2 {
        return Err(Error::invalid(
            "average precision needs a group of at least 2 (exclude singleton queries upstream)",
        ));
    }
    let relevant: std::collections::HashSet<usize> = relevant.iter().copied().collect();
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (idx, item) in rank_list.iter().enumerate() {
        if relevant.contains(item) {
            hits += 1;
            sum += hits as f64 / (idx + 1) as f64;
        }
    }
    Ok(sum / (c_cardinality - 1) as f64)
}

/// Per-query average precisions over all queries whose ground-truth group
/// has at least two members. Answers are the remaining items sorted by the
/// query's matrix row, ascending, ties by index.
pub fn map_per_query(m: &DissimilarityMatrix, truth: &Partition) -> Result<Vec<(usize, f64)>> {
    if truth.n() != m.n() {
        return Err(Error::invalid("partition and matrix sizes differ"));
    }
    let n = m.n();
    let group_sizes: Vec<usize> = {
        let mut sizes = vec![0usize; truth.group_count()];
        for i in 0..n {
            sizes[truth.group(i)] += 1;
        }
        sizes
    };
    let mut out = Vec::new();
    for query in 0..n {
        let cardinality = group_sizes[truth.group(query)];
        if cardinality < 2 {
            continue;
        }
        let mut answers: Vec<usize> = (0..n).filter(|&j| j != query).collect();
        answers.sort_by(|&a, &b| m.get(query, a).total_cmp(&m.get(query, b)).then(a.cmp(&b)));
        let relevant: Vec<usize> = (0..n)
            .filter(|&j| j != query && truth.same_group(query, j))
            .collect();
        let ap = average_precision(&answers, &relevant, cardinality)?;
        out.push((query, ap));
    }
    if out.is_empty() {
        return Err(Error::invalid("no queries with covers; MAP undefined"));
    }
    Ok(out)
}

/// Mean of the per-query average precisions.
pub fn map_score(m: &DissimilarityMatrix, truth: &Partition) -> Result<f64> {
    let per_query = map_per_query(m, truth)?;
    Ok(per_query.iter().map(|&(_, ap)| ap).sum::<f64>() / per_query.len() as f64)
}

/// Relative MAP increase in percent.
pub fn relative_map_increase(map_refined: f64, map_original: f64) -> Result<f64> {
    if !(map_original > 0.0) {
        return Err(Error::invalid("original MAP must be positive"));
    }
    Ok(100.0 * (map_refined / map_original - 1.0))
}

/// Exact one-sided upper-tail binomial probability P[X >= hits] for
/// X ~ Binomial(trials, p_null).
pub fn binomial_pvalue(hits: usize, trials: usize, p_null: f64) -> Result<f64> {
    if hits > trials {
        return Err(Error::invalid("hits cannot exceed trials"));
    }
    if !(p_null > 0.0 && p_null < 1.0) {
        return Err(Error::invalid("null probability must lie strictly in (0, 1)"));
    }
    if hits == 0 {
        return Ok(1.0);
    }
    // ln k! table; exact summation of the tail in log space.
    let mut ln_fact = vec![0.0f64; trials + 1];
    for k in 1..=trials {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let ln_p = p_null.ln();
    let ln_q = (1.0 - p_null).ln();
    let mut sum = 0.0;
    for k in hits..=trials {
        let ln_term = ln_fact[trials] - ln_fact[k] - ln_fact[trials - k]
            + k as f64 * ln_p
            + (trials - k) as f64 * ln_q;
        sum += ln_term.exp();
    }
    Ok(sum.min(1.0))
}

/// Significance markers used in result tables: `**` for p < 0.01, `*` for
/// p < 0.05, empty otherwise.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

/// CSV with a header and one summary row; per-query rows appended when
/// `include_per_query` is set.
pub fn write_eval_csv<W: Write>(
    out: &mut W,
    report: &EvalReport,
    include_per_query: bool,
) -> io::Result<()> {
    writeln!(out, "mean_precision,mean_recall,f,map,delta_percent")?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    writeln!(
        out,
        "{},{},{},{},{}",
        report.mean_precision,
        report.mean_recall,
        report.f,
        opt(report.map),
        opt(report.delta)
    )?;
    if include_per_query {
        writeln!(out, "query,average_precision")?;
        for &(query, ap) in &report.per_query {
            writeln!(out, "{query},{ap}")?;
        }
    }
    Ok(())
}
