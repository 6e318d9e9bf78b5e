//! Latent structure of the two-mode matrix.
//!
//! Extraction is principal components of the Pearson correlation matrix
//! between variables (terms in R-mode, documents in Q-mode), followed by an
//! optional varimax rotation. Loadings are then used to color maps and to
//! build variable–factor graphs in which small loadings are suppressed.

use nalgebra::DMatrix;
use ndarray::{Array2, ArrayView2};

use crate::corpus::WordDocMatrix;
use crate::error::{Error, Result};
use crate::graph::{EdgeStyle, Graph};
use crate::termstats::{obs_exp, tfidf_matrix};
use crate::vectorspace::{pearson_matrix, Orientation, SimilarityMatrix};

/// Which cell values of the two-mode matrix are factored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputMode {
    Counts,
    ObsExp,
    TfIdf,
}

impl InputMode {
    /// Cell values for the whole matrix.
    pub fn cells(self, m: &WordDocMatrix) -> Array2<f64> {
        match self {
            InputMode::Counts => m.to_f64(),
            InputMode::ObsExp => obs_exp(m).0,
            InputMode::TfIdf => tfidf_matrix(m),
        }
    }
}

/// R-mode factors the terms (columns); Q-mode factors the documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorMode {
    R,
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorCount {
    Fixed(usize),
    /// Every factor with eigenvalue above 1.
    Kaiser,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorSolution {
    /// variables × factors
    pub loadings: Array2<f64>,
    /// Unrotated eigenvalues of the retained factors.
    pub eigenvalues: Vec<f64>,
    /// `100 * eigenvalue / variables`, before rotation.
    pub explained_variance_pct: Vec<f64>,
    pub rotated: bool,
    pub variable_labels: Vec<String>,
    pub input_mode: InputMode,
    pub mode: FactorMode,
}

impl FactorSolution {
    pub fn n_variables(&self) -> usize {
        self.loadings.nrows()
    }

    pub fn n_factors(&self) -> usize {
        self.loadings.ncols()
    }

    /// Row sums of squared loadings.
    pub fn communalities(&self) -> Vec<f64> {
        self.loadings
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|l| l * l).sum())
            .collect()
    }
}

/// Output of an extraction, with the intermediate pieces needed to audit it.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub solution: FactorSolution,
    pub correlation: SimilarityMatrix,
    /// Full spectrum of the correlation matrix, non-increasing.
    pub all_eigenvalues: Vec<f64>,
    /// Unit eigenvectors of the retained factors (variables × factors).
    pub eigenvectors: Array2<f64>,
    /// Constant variables left out of the correlation matrix.
    pub dropped: Vec<String>,
    pub warnings: Vec<String>,
}

/// Factor-analyses a cell matrix (documents × terms).
pub fn factor_analyze(
    cells: ArrayView2<f64>,
    doc_labels: &[String],
    term_labels: &[String],
    input_mode: InputMode,
    mode: FactorMode,
    count: FactorCount,
) -> Result<Extraction> {
    let (orientation, labels) = match mode {
        FactorMode::R => (Orientation::Columns, term_labels),
        FactorMode::Q => (Orientation::Rows, doc_labels),
    };
    let pearson = pearson_matrix(cells, labels, orientation)?;
    let mut warnings = Vec::new();
    if !pearson.dropped.is_empty() {
        warnings.push(format!(
            "dropped {} constant variable(s) from the correlation matrix: {}",
            pearson.dropped.len(),
            pearson.dropped.join(", ")
        ));
    }
    let mut extraction = principal_components(pearson.matrix, count, input_mode, mode)?;
    extraction.dropped = pearson.dropped;
    warnings.append(&mut extraction.warnings);
    extraction.warnings = warnings;
    Ok(extraction)
}

/// Convenience wrapper computing the cells from a word–document matrix.
pub fn factor_analyze_matrix(
    m: &WordDocMatrix,
    input_mode: InputMode,
    mode: FactorMode,
    count: FactorCount,
) -> Result<Extraction> {
    let cells = input_mode.cells(m);
    factor_analyze(cells.view(), m.doc_ids(), m.terms(), input_mode, mode, count)
}

/// Symmetric eigendecomposition sorted by descending eigenvalue.
fn sorted_eigen(a: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let p = a.nrows();
    let eig = DMatrix::from_fn(p, p, |i, j| a[[i, j]]).symmetric_eigen();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Array2::from_shape_fn((p, p), |(r, c)| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Flips every column whose largest-magnitude entry (first on ties) is
/// negative. Returns the flipped column indices.
fn normalize_signs(a: &mut Array2<f64>) -> Vec<usize> {
    let mut flipped = Vec::new();
    for (c, mut col) in a.columns_mut().into_iter().enumerate() {
        let mut best = 0.0f64;
        for &v in col.iter() {
            if v.abs() > best.abs() {
                best = v;
            }
        }
        if best < 0.0 {
            col.mapv_inplace(|v| -v);
            flipped.push(c);
        }
    }
    flipped
}

/// Principal components of a correlation matrix: loadings `v * sqrt(λ)`.
pub fn principal_components(
    correlation: SimilarityMatrix,
    count: FactorCount,
    input_mode: InputMode,
    mode: FactorMode,
) -> Result<Extraction> {
    let p = correlation.labels.len();
    if p < 2 {
        return Err(Error::TooFewVariables(p));
    }
    let (values, vectors) = sorted_eigen(&correlation.values);
    let mut warnings = Vec::new();
    let k = match count {
        FactorCount::Fixed(0) => return Err(Error::InvalidArgument("factor count must be at least 1".into())),
        FactorCount::Fixed(k) if k > p => {
            warnings.push(format!("requested {k} factors but only {p} variables; using {p}"));
            p
        }
        FactorCount::Fixed(k) => k,
        FactorCount::Kaiser => match values.iter().filter(|&&l| l > 1.0).count() {
            0 => return Err(Error::NoFactorsRetained),
            k => k,
        },
    };
    let mut eigenvectors = vectors.slice(ndarray::s![.., ..k]).to_owned();
    normalize_signs(&mut eigenvectors);
    let mut loadings = eigenvectors.clone();
    for (mut col, &l) in loadings.columns_mut().into_iter().zip(&values) {
        let s = l.max(0.0).sqrt();
        col.mapv_inplace(|v| v * s);
    }
    let eigenvalues: Vec<f64> = values[..k].to_vec();
    let solution = FactorSolution {
        loadings,
        explained_variance_pct: eigenvalues.iter().map(|l| 100.0 * l / p as f64).collect(),
        eigenvalues,
        rotated: false,
        variable_labels: correlation.labels.clone(),
        input_mode,
        mode,
    };
    Ok(Extraction {
        solution,
        correlation,
        all_eigenvalues: values,
        eigenvectors,
        dropped: Vec::new(),
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarimaxOptions {
    /// Rotate rows scaled to unit communality, then scale back.
    pub kaiser_normalize: bool,
    /// Stop once a full sweep gains less than this.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for VarimaxOptions {
    fn default() -> Self {
        VarimaxOptions {
            kaiser_normalize: true,
            tol: 1e-12,
            max_sweeps: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarimaxOutcome {
    pub solution: FactorSolution,
    /// Orthogonal `T` with `rotated = unrotated · T`.
    pub rotation: Array2<f64>,
    /// Criterion before rotation and after every sweep.
    pub criterion_trace: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
    pub notice: Option<String>,
}

/// Sum over factors of the variance of squared loadings.
pub fn varimax_criterion(loadings: &Array2<f64>) -> f64 {
    let p = loadings.nrows() as f64;
    loadings
        .columns()
        .into_iter()
        .map(|col| {
            let sq: f64 = col.iter().map(|l| l * l).sum();
            let quad: f64 = col.iter().map(|l| l.powi(4)).sum();
            quad / p - (sq / p).powi(2)
        })
        .sum()
}

/// Angle maximizing the criterion for one pair of columns, in closed form.
fn pair_angle(x: &[f64], y: &[f64]) -> f64 {
    let p = x.len() as f64;
    let (mut a, mut b, mut c, mut d) = (0.0, 0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        let u = xi * xi - yi * yi;
        let v = 2.0 * xi * yi;
        a += u;
        b += v;
        c += u * u - v * v;
        d += 2.0 * u * v;
    }
    let num = d - 2.0 * a * b / p;
    let den = c - (a * a - b * b) / p;
    num.atan2(den) / 4.0
}

fn rotate_columns(m: &mut Array2<f64>, f: usize, g: usize, phi: f64) {
    let (s, c) = phi.sin_cos();
    for mut row in m.rows_mut() {
        let (x, y) = (row[f], row[g]);
        row[f] = x * c + y * s;
        row[g] = -x * s + y * c;
    }
}

/// Orthogonal varimax rotation by sweeps of planar rotations over factor
/// pairs `(f, g)`, `f < g`, in lexicographic order.
pub fn varimax(sol: &FactorSolution, opts: VarimaxOptions) -> VarimaxOutcome {
    let k = sol.n_factors();
    let mut rotation = Array2::<f64>::eye(k);
    if k < 2 {
        return VarimaxOutcome {
            solution: sol.clone(),
            criterion_trace: vec![varimax_criterion(&sol.loadings)],
            rotation,
            sweeps: 0,
            converged: true,
            notice: Some("single factor: varimax rotation skipped".into()),
        };
    }
    let scale: Vec<f64> = if opts.kaiser_normalize {
        sol.communalities()
            .into_iter()
            .map(|h2| if h2 > 0.0 { h2.sqrt() } else { 1.0 })
            .collect()
    } else {
        vec![1.0; sol.n_variables()]
    };
    let mut work = sol.loadings.clone();
    for (mut row, &s) in work.rows_mut().into_iter().zip(&scale) {
        row.mapv_inplace(|v| v / s);
    }

    let mut trace = vec![varimax_criterion(&work)];
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let before = (work.clone(), rotation.clone());
        for f in 0..k {
            for g in f + 1..k {
                let x = work.column(f).to_vec();
                let y = work.column(g).to_vec();
                let phi = pair_angle(&x, &y);
                rotate_columns(&mut work, f, g, phi);
                rotate_columns(&mut rotation, f, g, phi);
            }
        }
        let current = varimax_criterion(&work);
        let gain = current - trace[trace.len() - 1];
        if gain < 0.0 {
            // Past the fixed point; keep the better pre-sweep state.
            (work, rotation) = before;
            converged = true;
            break;
        }
        trace.push(current);
        if gain < opts.tol {
            converged = true;
            break;
        }
    }

    for (mut row, &s) in work.rows_mut().into_iter().zip(&scale) {
        row.mapv_inplace(|v| v * s);
    }
    for c in normalize_signs(&mut work) {
        rotation.column_mut(c).mapv_inplace(|v| -v);
    }
    VarimaxOutcome {
        solution: FactorSolution {
            loadings: work,
            rotated: true,
            ..sol.clone()
        },
        rotation,
        criterion_trace: trace,
        sweeps,
        converged,
        notice: (!converged).then(|| format!("varimax stopped after {sweeps} sweeps without converging")),
    }
}

/// Loadings whose magnitude falls in the suppression interval are treated
/// as absent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Suppression {
    pub threshold: f64,
    /// Whether `|loading| == threshold` is suppressed too.
    pub inclusive: bool,
}

impl Default for Suppression {
    fn default() -> Self {
        Suppression {
            threshold: 0.1,
            inclusive: true,
        }
    }
}

impl Suppression {
    pub fn suppresses(&self, loading: f64) -> bool {
        let a = loading.abs();
        if self.inclusive {
            a <= self.threshold
        } else {
            a < self.threshold
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Assigned {
    pub factor: usize,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorAssignment {
    pub labels: Vec<String>,
    /// `None` for variables left unassigned (drawn white).
    pub assignments: Vec<Option<Assigned>>,
}

impl FactorAssignment {
    pub fn get(&self, label: &str) -> Option<Option<Assigned>> {
        self.labels.iter().position(|l| l == label).map(|i| self.assignments[i])
    }
}

/// Assigns each variable to the factor of its largest absolute loading
/// (lowest index on ties), unless that loading is suppressed.
pub fn assign_factors(sol: &FactorSolution, suppression: Suppression) -> FactorAssignment {
    let assignments = sol
        .loadings
        .rows()
        .into_iter()
        .map(|row| {
            let mut best: Option<(usize, f64)> = None;
            for (f, &l) in row.iter().enumerate() {
                if best.is_none_or(|(_, b)| l.abs() > b.abs()) {
                    best = Some((f, l));
                }
            }
            best.filter(|&(_, l)| !suppression.suppresses(l))
                .map(|(factor, l)| Assigned {
                    factor,
                    positive: l >= 0.0,
                })
        })
        .collect();
    FactorAssignment {
        labels: sol.variable_labels.clone(),
        assignments,
    }
}

pub fn factor_label(f: usize) -> String {
    format!("Factor {}", f + 1)
}

/// Bipartite variable–factor graph. Variables come first, then one node per
/// factor. Unsuppressed loadings become edges weighted by magnitude, dotted
/// when negative.
pub fn factor_graph(sol: &FactorSolution, suppression: Suppression) -> Result<Graph> {
    let assignment = assign_factors(sol, suppression);
    let mut g = Graph::new();
    for (label, a) in sol.variable_labels.iter().zip(&assignment.assignments) {
        g.add_node_in_group(label.clone(), a.map(|a| a.factor))?;
    }
    let p = sol.n_variables();
    for f in 0..sol.n_factors() {
        let mut label = factor_label(f);
        while g.find(&label).is_some() {
            label.push('*');
        }
        g.add_node_in_group(label, Some(f))?;
    }
    for (j, row) in sol.loadings.rows().into_iter().enumerate() {
        for (f, &l) in row.iter().enumerate() {
            if suppression.suppresses(l) {
                continue;
            }
            let style = if l < 0.0 { EdgeStyle::Dotted } else { EdgeStyle::Solid };
            g.add_edge(j, p + f, l.abs(), style)?;
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult {
    /// rows × rank
    pub left: Array2<f64>,
    /// Non-increasing and non-negative.
    pub singular_values: Vec<f64>,
    /// cols × rank
    pub right: Array2<f64>,
    pub rank: usize,
}

impl SvdResult {
    pub fn reconstruct(&self) -> Array2<f64> {
        let mut us = self.left.clone();
        for (mut col, &s) in us.columns_mut().into_iter().zip(&self.singular_values) {
            col.mapv_inplace(|v| v * s);
        }
        us.dot(&self.right.t())
    }
}

/// Best rank-`k` factorization `U Σ Vᵀ` of `m`.
pub fn truncated_svd(m: ArrayView2<f64>, k: usize) -> Result<SvdResult> {
    let (r, c) = m.dim();
    if k == 0 || k > r.min(c) {
        return Err(Error::InvalidArgument(format!(
            "rank {k} outside 1..={} for a {r}x{c} matrix",
            r.min(c)
        )));
    }
    let svd = DMatrix::from_fn(r, c, |i, j| m[[i, j]]).svd(true, true);
    let u = svd.u.expect("left vectors requested");
    let v_t = svd.v_t.expect("right vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    order.truncate(k);
    let mut left = Array2::from_shape_fn((r, k), |(i, f)| u[(i, order[f])]);
    let mut right = Array2::from_shape_fn((c, k), |(j, f)| v_t[(order[f], j)]);
    for f in normalize_signs(&mut left) {
        right.column_mut(f).mapv_inplace(|v| -v);
    }
    Ok(SvdResult {
        left,
        singular_values: order.iter().map(|&i| svd.singular_values[i]).collect(),
        right,
        rank: k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vectorspace::SimilarityKind;
    use ndarray::array;

    fn corr(values: Array2<f64>) -> SimilarityMatrix {
        let labels = (0..values.nrows()).map(|i| format!("v{i}")).collect();
        SimilarityMatrix {
            values,
            labels,
            kind: SimilarityKind::Pearson,
        }
    }

    fn solution(loadings: Array2<f64>) -> FactorSolution {
        let p = loadings.nrows();
        let k = loadings.ncols();
        FactorSolution {
            loadings,
            eigenvalues: vec![1.0; k],
            explained_variance_pct: vec![100.0 / p as f64; k],
            rotated: false,
            variable_labels: (0..p).map(|i| format!("v{i}")).collect(),
            input_mode: InputMode::Counts,
            mode: FactorMode::R,
        }
    }

    #[test]
    fn rank_one_correlation() {
        let ex = principal_components(corr(array![[1.0, 1.0], [1.0, 1.0]]), FactorCount::Fixed(1), InputMode::Counts, FactorMode::R).unwrap();
        assert!((ex.all_eigenvalues[0] - 2.0).abs() < 1e-12);
        assert!(ex.all_eigenvalues[1].abs() < 1e-12);
        let l = &ex.solution.loadings;
        assert_eq!(l.dim(), (2, 1));
        assert!((l[[0, 0]] - 1.0).abs() < 1e-12 && (l[[1, 0]] - 1.0).abs() < 1e-12);
        assert!((ex.solution.explained_variance_pct[0] - 100.0).abs() < 1e-9);
    }

    #[test]
    fn kaiser_on_identity_retains_nothing() {
        let err = principal_components(corr(Array2::eye(4)), FactorCount::Kaiser, InputMode::Counts, FactorMode::R).unwrap_err();
        assert!(matches!(err, Error::NoFactorsRetained));
        assert!(err.to_string().contains("explicit factor count"));
    }

    #[test]
    fn factor_count_errors_and_clamp() {
        let c = corr(array![[1.0, 0.5], [0.5, 1.0]]);
        assert!(principal_components(c.clone(), FactorCount::Fixed(0), InputMode::Counts, FactorMode::R).is_err());
        let ex = principal_components(c, FactorCount::Fixed(5), InputMode::Counts, FactorMode::R).unwrap();
        assert_eq!(ex.solution.n_factors(), 2);
        assert_eq!(ex.warnings.len(), 1);
        let single = corr(array![[1.0]]);
        assert!(matches!(
            principal_components(single, FactorCount::Fixed(1), InputMode::Counts, FactorMode::R),
            Err(Error::TooFewVariables(1))
        ));
    }

    #[test]
    fn sign_convention_largest_loading_positive() {
        let c = corr(array![[1.0, -0.8, 0.3], [-0.8, 1.0, -0.2], [0.3, -0.2, 1.0]]);
        let ex = principal_components(c, FactorCount::Fixed(3), InputMode::Counts, FactorMode::R).unwrap();
        for col in ex.solution.loadings.columns() {
            let best = col.iter().fold(0.0f64, |b, &v| if v.abs() > b.abs() { v } else { b });
            assert!(best >= 0.0);
        }
    }

    #[test]
    fn q_mode_uses_documents_as_variables() {
        let cells = array![[1.0, 0.0, 2.0, 1.0], [0.0, 3.0, 1.0, 0.0], [2.0, 1.0, 0.0, 1.0]];
        let docs: Vec<String> = ["d1", "d2", "d3"].map(String::from).to_vec();
        let terms: Vec<String> = ["a", "b", "c", "d"].map(String::from).to_vec();
        let ex = factor_analyze(cells.view(), &docs, &terms, InputMode::Counts, FactorMode::Q, FactorCount::Fixed(2)).unwrap();
        assert_eq!(ex.solution.variable_labels, docs);
        assert_eq!(ex.solution.mode, FactorMode::Q);
    }

    #[test]
    fn too_few_non_constant_variables() {
        let cells = array![[1.0, 2.0, 5.0], [1.0, 3.0, 5.0]];
        let labels: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
        let docs: Vec<String> = ["d1", "d2"].map(String::from).to_vec();
        let err = factor_analyze(cells.view(), &docs, &labels, InputMode::Counts, FactorMode::R, FactorCount::Fixed(1)).unwrap_err();
        assert!(matches!(err, Error::TooFewVariables(1)));
    }

    #[test]
    fn simple_structure_is_fixed_point() {
        let sol = solution(array![[1.0, 0.0], [0.0, 1.0]]);
        let out = varimax(&sol, VarimaxOptions::default());
        for (a, b) in out.solution.loadings.iter().zip(sol.loadings.iter()) {
            assert!((a.abs() - b.abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn forty_five_degree_mix_is_unmixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sol = solution(array![[s, s], [s, -s]]);
        let before = varimax_criterion(&sol.loadings);
        let out = varimax(&sol, VarimaxOptions::default());
        assert!(out.criterion_trace.last().unwrap() > &before);
        for row in out.solution.loadings.rows() {
            let (big, small) = (row[0].abs().max(row[1].abs()), row[0].abs().min(row[1].abs()));
            assert!((big - 1.0).abs() < 1e-9 && small < 1e-9);
        }
        let h_before = sol.communalities();
        let h_after = out.solution.communalities();
        for (a, b) in h_before.iter().zip(&h_after) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn single_factor_rotation_is_a_no_op() {
        let sol = solution(array![[0.5], [0.7]]);
        let out = varimax(&sol, VarimaxOptions::default());
        assert_eq!(out.solution.loadings, sol.loadings);
        assert!(out.notice.is_some());
    }

    #[test]
    fn assignment_rules() {
        let sol = solution(array![[0.05, -0.03], [0.9, 0.2], [0.5, -0.5], [-0.1, 0.0], [0.3, -0.7]]);
        let a = assign_factors(&sol, Suppression::default());
        assert_eq!(a.assignments[0], None);
        assert_eq!(a.assignments[1], Some(Assigned { factor: 0, positive: true }));
        assert_eq!(a.assignments[2], Some(Assigned { factor: 0, positive: true }));
        assert_eq!(a.assignments[3], None);
        assert_eq!(a.assignments[4], Some(Assigned { factor: 1, positive: false }));
        let open = Suppression { inclusive: false, ..Suppression::default() };
        assert_eq!(assign_factors(&sol, open).assignments[3], Some(Assigned { factor: 0, positive: false }));
    }

    #[test]
    fn factor_graph_edges() {
        let sol = solution(array![[-0.5, 0.1], [0.05, 0.0]]);
        let g = factor_graph(&sol, Suppression::default()).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 1);
        let e = &g.edges()[0];
        assert_eq!((e.source, e.target, e.weight, e.style), (0, 2, 0.5, EdgeStyle::Dotted));
        assert_eq!(g.nodes()[2].label, "Factor 1");

        let quiet = solution(array![[0.05, 0.1], [0.0, -0.1]]);
        let g = factor_graph(&quiet, Suppression::default()).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (4, 0));
    }

    #[test]
    fn svd_of_diagonal() {
        let m = array![[3.0, 0.0], [0.0, 1.0]];
        let svd = truncated_svd(m.view(), 2).unwrap();
        assert!((svd.singular_values[0] - 3.0).abs() < 1e-12);
        assert!((svd.singular_values[1] - 1.0).abs() < 1e-12);
        assert!(truncated_svd(m.view(), 3).is_err());
        assert!(truncated_svd(m.view(), 0).is_err());
    }

    #[test]
    fn svd_full_rank_reconstructs() {
        let m = array![[1.0, 2.0, 0.0], [0.5, -1.0, 3.0], [2.0, 2.0, 2.0], [0.0, 1.0, 4.0]];
        let svd = truncated_svd(m.view(), 3).unwrap();
        let diff = &svd.reconstruct() - &m;
        let norm = |a: &Array2<f64>| a.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm(&diff) <= 1e-8 * norm(&m));
        let gram = svd.left.t().dot(&svd.left);
        for ((i, j), v) in gram.indexed_iter() {
            assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-8);
        }
    }
}
