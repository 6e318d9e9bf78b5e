//! Term-selection statistics over a pruned word–document matrix.
//!
//! Four scores are offered per term: raw frequency, aggregated tf-idf, the
//! column's contribution to the matrix chi-square, and the column sum of
//! observed/expected ratios. Expected values come from the margins,
//! `E_ik = R_i * C_k / T`, and are strictly positive because zero margins
//! were pruned when the matrix was built.

use std::cmp::Ordering;
use std::str::FromStr;

use ndarray::{Array2, Axis};

use crate::corpus::WordDocMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedMatrix(pub Array2<f64>);

impl ExpectedMatrix {
    pub fn values(&self) -> &Array2<f64> {
        &self.0
    }
}

pub fn expected_matrix(m: &WordDocMatrix) -> ExpectedMatrix {
    let total = m.grand_total() as f64;
    let (rows, cols) = (m.row_margins(), m.col_margins());
    ExpectedMatrix(Array2::from_shape_fn((m.n_docs(), m.n_terms()), |(i, k)| {
        rows[i] as f64 * cols[k] as f64 / total
    }))
}

/// `FREQ_ik * log2(n / DOCFREQ_k)` per cell, `n` being the number of documents.
pub fn tfidf_matrix(m: &WordDocMatrix) -> Array2<f64> {
    let n = m.n_docs() as f64;
    let idf: Vec<f64> = m.doc_freqs().iter().map(|&df| (n / df as f64).log2()).collect();
    Array2::from_shape_fn((m.n_docs(), m.n_terms()), |(i, k)| {
        let freq = m.counts()[[i, k]];
        if freq == 0 {
            0.0
        } else {
            freq as f64 * idf[k]
        }
    })
}

/// Column sums of [`tfidf_matrix`].
pub fn tfidf_per_term(m: &WordDocMatrix) -> Vec<f64> {
    column_sums(&tfidf_matrix(m))
}

fn column_sums(a: &Array2<f64>) -> Vec<f64> {
    a.sum_axis(Axis(0)).to_vec()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum YatesCorrection {
    Off,
    /// Correct every cell whose observed count is below 5.
    #[default]
    ObservedBelowFive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareReport {
    pub total: f64,
    pub degrees_of_freedom: usize,
    pub per_cell: Array2<f64>,
    pub yates_applied: Array2<bool>,
}

/// Per-cell `(O - E)^2 / E`. With the Yates correction, cells with `O < 5`
/// use `max(|O - E| - 0.5, 0)^2 / E` instead.
pub fn chi_square(m: &WordDocMatrix, yates: YatesCorrection) -> ChiSquareReport {
    let expected = expected_matrix(m).0;
    let shape = expected.dim();
    let mut per_cell = Array2::<f64>::zeros(shape);
    let mut yates_applied = Array2::from_elem(shape, false);
    for ((i, k), e) in expected.indexed_iter() {
        let o = m.counts()[[i, k]];
        let diff = (o as f64 - e).abs();
        let correct = yates == YatesCorrection::ObservedBelowFive && o < 5;
        let dev = if correct { (diff - 0.5).max(0.0) } else { diff };
        per_cell[[i, k]] = dev * dev / e;
        yates_applied[[i, k]] = correct;
    }
    // fixed row-major summation order
    let total = per_cell.iter().sum();
    ChiSquareReport {
        total,
        degrees_of_freedom: shape.0.saturating_sub(1) * shape.1.saturating_sub(1),
        per_cell,
        yates_applied,
    }
}

pub fn chi_square_per_term(report: &ChiSquareReport) -> Vec<f64> {
    column_sums(&report.per_cell)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObsExpMatrix(pub Array2<f64>);

impl ObsExpMatrix {
    pub fn values(&self) -> &Array2<f64> {
        &self.0
    }

    /// Per-term sums of the cell ratios. Divide by the number of documents
    /// for the mean.
    pub fn column_sums(&self) -> Vec<f64> {
        column_sums(&self.0)
    }
}

pub fn obs_exp(m: &WordDocMatrix) -> ObsExpMatrix {
    let mut ratios = expected_matrix(m).0;
    for ((i, k), cell) in ratios.indexed_iter_mut() {
        *cell = m.counts()[[i, k]] as f64 / *cell;
    }
    ObsExpMatrix(ratios)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermScore {
    pub term: String,
    pub freq: u64,
    pub doc_freq: u64,
    pub tfidf: f64,
    pub chi2: f64,
    pub obs_exp_sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermScores {
    pub scores: Vec<TermScore>,
}

impl TermScores {
    pub fn compute(m: &WordDocMatrix, yates: YatesCorrection) -> Self {
        let tfidf = tfidf_per_term(m);
        let chi2 = chi_square_per_term(&chi_square(m, yates));
        let obsexp = obs_exp(m).column_sums();
        let doc_freqs = m.doc_freqs();
        let scores = m
            .terms()
            .iter()
            .enumerate()
            .map(|(k, term)| TermScore {
                term: term.clone(),
                freq: m.col_margins()[k],
                doc_freq: doc_freqs[k],
                tfidf: tfidf[k],
                chi2: chi2[k],
                obs_exp_sum: obsexp[k],
            })
            .collect();
        TermScores { scores }
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    Freq,
    TfIdf,
    Chi2,
    ObsExp,
}

impl Criterion {
    pub const NAMES: [&'static str; 4] = ["freq", "tfidf", "chi2", "obsexp"];

    pub fn score(self, s: &TermScore) -> f64 {
        match self {
            Criterion::Freq => s.freq as f64,
            Criterion::TfIdf => s.tfidf,
            Criterion::Chi2 => s.chi2,
            Criterion::ObsExp => s.obs_exp_sum,
        }
    }

    pub fn name(self) -> &'static str {
        Self::NAMES[self as usize]
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "freq" => Ok(Criterion::Freq),
            "tfidf" => Ok(Criterion::TfIdf),
            "chi2" => Ok(Criterion::Chi2),
            "obsexp" => Ok(Criterion::ObsExp),
            other => Err(Error::InvalidArgument(format!(
                "unknown criterion '{other}' (valid: {})",
                Criterion::NAMES.join(", ")
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selection {
    Top(usize),
    MinScore(f64),
}

/// Terms sorted by descending score (ties lexicographic), cut at `top_n`
/// or filtered at `score >= threshold`.
pub fn select_terms(scores: &TermScores, criterion: Criterion, selection: Selection) -> Result<Vec<String>> {
    match selection {
        Selection::Top(0) => return Err(Error::InvalidArgument("top_n must be at least 1".into())),
        Selection::MinScore(t) if !t.is_finite() => {
            return Err(Error::InvalidArgument("score threshold must be finite".into()))
        }
        _ => {}
    }
    let mut ranked: Vec<(&str, f64)> = scores
        .scores
        .iter()
        .map(|s| (s.term.as_str(), criterion.score(s)))
        .collect();
    ranked.sort_by(|a, b| match b.1.total_cmp(&a.1) {
        Ordering::Equal => a.0.cmp(b.0),
        other => other,
    });
    let chosen: Vec<String> = match selection {
        Selection::Top(n) => ranked.iter().take(n).map(|(t, _)| t.to_string()).collect(),
        Selection::MinScore(t) => ranked
            .iter()
            .take_while(|(_, s)| *s >= t)
            .map(|(t, _)| t.to_string())
            .collect(),
    };
    if chosen.is_empty() {
        return Err(Error::EmptySelection);
    }
    Ok(chosen)
}
