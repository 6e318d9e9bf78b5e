//! One-mode structures derived from the two-mode matrix: cosine and Pearson
//! similarity between vectors, integer co-occurrence counts, and graphs
//! obtained by thresholding either.

use ndarray::{Array2, ArrayView2, Axis};
use rayon::prelude::*;

use crate::corpus::WordDocMatrix;
use crate::error::{Error, Result};
use crate::graph::{EdgeStyle, Graph};

/// Which vectors of a matrix are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Columns,
    Rows,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimilarityKind {
    Cosine,
    Pearson,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub values: Array2<f64>,
    pub labels: Vec<String>,
    pub kind: SimilarityKind,
}

fn vectors(m: ArrayView2<f64>, orientation: Orientation) -> Vec<Vec<f64>> {
    let axis = match orientation {
        Orientation::Columns => Axis(1),
        Orientation::Rows => Axis(0),
    };
    m.axis_iter(axis).map(|v| v.to_vec()).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Fills the upper triangle pair by pair, mirrors it, and sets a unit
/// diagonal. Each entry is independent of the others, so the parallel fill
/// is deterministic.
fn symmetric_from_unit_vectors(units: &[Vec<f64>]) -> Array2<f64> {
    let k = units.len();
    let rows: Vec<Vec<f64>> = (0..k)
        .into_par_iter()
        .map(|a| {
            (a + 1..k)
                .map(|b| dot(&units[a], &units[b]).clamp(-1.0, 1.0))
                .collect()
        })
        .collect();
    let mut out = Array2::<f64>::eye(k);
    for (a, row) in rows.into_iter().enumerate() {
        for (offset, v) in row.into_iter().enumerate() {
            let b = a + 1 + offset;
            out[[a, b]] = v;
            out[[b, a]] = v;
        }
    }
    out
}

fn check_labels(count: usize, labels: &[String]) -> Result<()> {
    if count != labels.len() {
        return Err(Error::InvalidArgument(format!(
            "{count} vectors but {} labels",
            labels.len()
        )));
    }
    Ok(())
}

/// Salton's cosine between every pair of vectors. A zero vector is fatal.
pub fn cosine_matrix(m: ArrayView2<f64>, labels: &[String], orientation: Orientation) -> Result<SimilarityMatrix> {
    let vs = vectors(m, orientation);
    check_labels(vs.len(), labels)?;
    let units = vs
        .into_iter()
        .zip(labels)
        .map(|(v, label)| {
            let norm = dot(&v, &v).sqrt();
            if norm == 0.0 {
                return Err(Error::ZeroVector(label.clone()));
            }
            Ok(v.into_iter().map(|x| x / norm).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(SimilarityMatrix {
        values: symmetric_from_unit_vectors(&units),
        labels: labels.to_vec(),
        kind: SimilarityKind::Cosine,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PearsonOutput {
    pub matrix: SimilarityMatrix,
    /// Labels of constant (zero-variance) vectors left out of the matrix.
    pub dropped: Vec<String>,
    /// Indices, in input order, of the vectors that were kept.
    pub kept: Vec<usize>,
}

/// Product-moment correlation between every pair of non-constant vectors.
pub fn pearson_matrix(m: ArrayView2<f64>, labels: &[String], orientation: Orientation) -> Result<PearsonOutput> {
    let vs = vectors(m, orientation);
    check_labels(vs.len(), labels)?;
    let mut units = Vec::new();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (idx, v) in vs.into_iter().enumerate() {
        let mean = v.iter().sum::<f64>() / v.len().max(1) as f64;
        let centered: Vec<f64> = v.iter().map(|x| x - mean).collect();
        let norm = dot(&centered, &centered).sqrt();
        let scale = dot(&v, &v).sqrt();
        // relative test: cell ratios can be constant up to rounding
        if norm <= 1e-12 * scale || norm == 0.0 {
            dropped.push(labels[idx].clone());
            continue;
        }
        units.push(centered.into_iter().map(|x| x / norm).collect());
        kept.push(idx);
    }
    Ok(PearsonOutput {
        matrix: SimilarityMatrix {
            values: symmetric_from_unit_vectors(&units),
            labels: kept.iter().map(|&i| labels[i].clone()).collect(),
            kind: SimilarityKind::Pearson,
        },
        dropped,
        kept,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoocMode {
    /// `AᵀA`: terms × terms.
    Words,
    /// `AAᵀ`: documents × documents.
    Documents,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoocMatrix {
    pub values: Array2<u64>,
    pub labels: Vec<String>,
    pub mode: CoocMode,
}

impl CoocMatrix {
    /// Multiplies a documents × terms count matrix with its transpose.
    pub fn from_counts(a: &Array2<u64>, doc_labels: &[String], term_labels: &[String], mode: CoocMode) -> Result<Self> {
        check_labels(a.nrows(), doc_labels)?;
        check_labels(a.ncols(), term_labels)?;
        let (vs, labels) = match mode {
            CoocMode::Words => (a.columns().into_iter().map(|c| c.to_vec()).collect::<Vec<_>>(), term_labels),
            CoocMode::Documents => (a.rows().into_iter().map(|r| r.to_vec()).collect(), doc_labels),
        };
        let k = vs.len();
        let mut values = Array2::<u64>::zeros((k, k));
        for x in 0..k {
            for y in x..k {
                let s: u64 = vs[x].iter().zip(&vs[y]).map(|(p, q)| p * q).sum();
                values[[x, y]] = s;
                values[[y, x]] = s;
            }
        }
        Ok(CoocMatrix {
            values,
            labels: labels.to_vec(),
            mode,
        })
    }
}

pub fn cooccurrence(m: &WordDocMatrix, mode: CoocMode) -> CoocMatrix {
    CoocMatrix::from_counts(m.counts(), m.doc_ids(), m.terms(), mode).expect("matrix labels are consistent")
}

/// A labelled square matrix that can be turned into a graph.
pub trait SymmetricValues {
    fn labels(&self) -> &[String];
    fn value(&self, a: usize, b: usize) -> f64;
}

impl SymmetricValues for SimilarityMatrix {
    fn labels(&self) -> &[String] {
        &self.labels
    }

    fn value(&self, a: usize, b: usize) -> f64 {
        self.values[[a, b]]
    }
}

impl SymmetricValues for CoocMatrix {
    fn labels(&self) -> &[String] {
        &self.labels
    }

    fn value(&self, a: usize, b: usize) -> f64 {
        self.values[[a, b]] as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdRule {
    /// Keep values `>= threshold`.
    AtLeast,
    /// Keep values `> threshold`.
    Above,
}

impl ThresholdRule {
    pub fn keeps(self, value: f64, threshold: f64) -> bool {
        match self {
            ThresholdRule::AtLeast => value >= threshold,
            ThresholdRule::Above => value > threshold,
        }
    }
}

/// Edge `(a, b)` with `a < b` for every off-diagonal value passing the rule.
/// Every label becomes a node, isolated or not.
pub fn threshold_graph<M: SymmetricValues + ?Sized>(m: &M, threshold: f64, rule: ThresholdRule) -> Result<Graph> {
    let labels = m.labels();
    let mut g = Graph::with_nodes(labels.iter().cloned())?;
    for a in 0..labels.len() {
        for b in a + 1..labels.len() {
            let v = m.value(a, b);
            if rule.keeps(v, threshold) {
                g.add_edge(a, b, v, EdgeStyle::Solid)?;
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("v{i}")).collect()
    }

    #[test]
    fn cosine_examples() {
        let m = array![[1.0, 1.0, 1.0, 0.0], [2.0, 2.0, 0.0, 1.0]];
        let s = cosine_matrix(m.view(), &labels(4), Orientation::Columns).unwrap();
        assert!((s.values[[0, 1]] - 1.0).abs() < 1e-15);
        assert_eq!(s.values[[2, 3]], 0.0);
        assert_eq!(s.values[[1, 1]], 1.0);
        assert_eq!(s.values, s.values.t());
    }

    #[test]
    fn cosine_zero_vector_names_label() {
        let m = array![[1.0, 0.0], [2.0, 0.0]];
        let err = cosine_matrix(m.view(), &labels(2), Orientation::Columns).unwrap_err();
        assert!(err.to_string().contains("v1"));
    }

    #[test]
    fn cosine_rows_orientation() {
        let m = array![[1.0, 0.0], [0.0, 3.0], [2.0, 0.0]];
        let s = cosine_matrix(m.view(), &labels(3), Orientation::Rows).unwrap();
        assert_eq!(s.values.dim(), (3, 3));
        assert!((s.values[[0, 2]] - 1.0).abs() < 1e-15);
        assert_eq!(s.values[[0, 1]], 0.0);
    }

    #[test]
    fn pearson_examples() {
        let m = array![[1.0, 2.0, 3.0], [2.0, 4.0, 2.0], [3.0, 6.0, 1.0]];
        let p = pearson_matrix(m.view(), &labels(3), Orientation::Columns).unwrap();
        assert!((p.matrix.values[[0, 1]] - 1.0).abs() < 1e-12);
        assert!((p.matrix.values[[0, 2]] + 1.0).abs() < 1e-12);
        assert!(p.dropped.is_empty());
    }

    #[test]
    fn pearson_drops_constant_vectors() {
        let m = array![[1.0, 5.0, 3.0], [2.0, 5.0, 1.0], [4.0, 5.0, 2.0]];
        let p = pearson_matrix(m.view(), &labels(3), Orientation::Columns).unwrap();
        assert_eq!(p.dropped, ["v1"]);
        assert_eq!(p.kept, [0, 2]);
        assert_eq!(p.matrix.labels, ["v0", "v2"]);
    }

    #[test]
    fn shift_invariance_differs() {
        let m = array![[1.0, 2.0], [2.0, 1.0], [3.0, 4.0], [0.5, 0.0]];
        let mut shifted = m.clone();
        shifted.column_mut(1).mapv_inplace(|v| v + 10.0);
        let l = labels(2);
        let p0 = pearson_matrix(m.view(), &l, Orientation::Columns).unwrap().matrix.values[[0, 1]];
        let p1 = pearson_matrix(shifted.view(), &l, Orientation::Columns).unwrap().matrix.values[[0, 1]];
        assert!((p0 - p1).abs() < 1e-12);
        let c0 = cosine_matrix(m.view(), &l, Orientation::Columns).unwrap().values[[0, 1]];
        let c1 = cosine_matrix(shifted.view(), &l, Orientation::Columns).unwrap().values[[0, 1]];
        assert!((c0 - c1).abs() > 1e-3);
    }

    #[test]
    fn cooccurrence_examples() {
        let (m, _) = WordDocMatrix::from_counts(labels(2), vec!["a".into(), "b".into()], array![[2, 1], [0, 1]]).unwrap();
        let words = cooccurrence(&m, CoocMode::Words);
        assert_eq!(words.values, array![[4, 2], [2, 2]]);
        let docs = cooccurrence(&m, CoocMode::Documents);
        assert_eq!(docs.values, array![[5, 1], [1, 1]]);
        let binary = cooccurrence(&m.binarized(), CoocMode::Words);
        let diag: Vec<u64> = binary.values.diag().to_vec();
        assert_eq!(diag, m.doc_freqs());
    }

    #[test]
    fn thresholds() {
        let s = SimilarityMatrix {
            values: array![[1.0, 0.1, 0.05], [0.1, 1.0, 0.3], [0.05, 0.3, 1.0]],
            labels: labels(3),
            kind: SimilarityKind::Cosine,
        };
        let g = threshold_graph(&s, 0.1, ThresholdRule::AtLeast).unwrap();
        assert_eq!(g.edge_count(), 2);
        let g = threshold_graph(&s, 0.1, ThresholdRule::Above).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.node_count(), 3);

        let c = CoocMatrix {
            values: array![[3, 1, 2], [1, 2, 0], [2, 0, 5]],
            labels: labels(3),
            mode: CoocMode::Words,
        };
        let g = threshold_graph(&c, 1.0, ThresholdRule::Above).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!((g.edges()[0].source, g.edges()[0].target), (0, 2));

        let zeros = CoocMatrix {
            values: Array2::eye(4),
            labels: labels(4),
            mode: CoocMode::Words,
        };
        assert_eq!(threshold_graph(&zeros, 0.5, ThresholdRule::AtLeast).unwrap().edge_count(), 0);
    }

    #[test]
    fn ubiquitous_term_links_to_everything() {
        let m = array![[1.0, 0.0, 3.0], [2.0, 1.0, 0.0], [1.0, 0.0, 0.0]];
        let s = cosine_matrix(m.view(), &labels(3), Orientation::Columns).unwrap();
        assert!(s.values[[0, 1]] > 0.0 && s.values[[0, 2]] > 0.0);
    }
}
