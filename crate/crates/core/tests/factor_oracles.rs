use coword_core::factors::{
    assign_factors, factor_analyze, factor_graph, truncated_svd, varimax, varimax_criterion, FactorCount,
    FactorMode, FactorSolution, InputMode, Suppression, VarimaxOptions,
};
use coword_core::graph::EdgeStyle;
use ndarray::{Array2, Axis};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn noisy_data(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let latent: Vec<[f64; 2]> = (0..rows).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    Array2::from_shape_fn((rows, cols), |(i, j)| {
        let w = j as f64 / cols as f64;
        latent[i][0] * w + latent[i][1] * (1.0 - w) + 0.3 * rng.gen::<f64>()
    })
}

fn solution(loadings: Array2<f64>) -> FactorSolution {
    let p = loadings.nrows();
    let k = loadings.ncols();
    FactorSolution {
        eigenvalues: vec![1.0; k],
        explained_variance_pct: vec![100.0 / p as f64; k],
        rotated: false,
        variable_labels: labels("v", p),
        input_mode: InputMode::Counts,
        mode: FactorMode::R,
        loadings,
    }
}

/// Cyclic Jacobi eigenvalues of a small symmetric matrix.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                #[allow(clippy::needless_range_loop)]
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut values: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    values
}

fn rotate2(l: &Array2<f64>, theta: f64) -> Array2<f64> {
    let (s, c) = theta.sin_cos();
    let t = ndarray::array![[c, -s], [s, c]];
    l.dot(&t)
}

fn kaiser_rows(l: &Array2<f64>) -> Array2<f64> {
    let mut out = l.clone();
    for mut row in out.rows_mut() {
        let h = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if h > 0.0 {
            row.mapv_inplace(|v| v / h);
        }
    }
    out
}

/// Simple-structure loadings rotated away from their axes by `angle`.
fn tilted_structure(seed: u64, angle: f64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = 10;
    let base = Array2::from_shape_fn((p, 2), |(i, f)| {
        let primary = (i % 2) == f;
        if primary {
            0.5 + 0.4 * rng.gen::<f64>()
        } else {
            0.1 * rng.gen::<f64>()
        }
    });
    rotate2(&base, angle)
}

fn angle_distance_deg(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(90.0);
    d.min(90.0 - d)
}

#[test]
fn correlation_is_reproduced_and_eigenpairs_hold() {
    let data = noisy_data(30, 7, 3);
    let ex = factor_analyze(data.view(), &labels("d", 30), &labels("t", 7), InputMode::Counts, FactorMode::R, FactorCount::Fixed(7))
        .unwrap();
    let l = &ex.solution.loadings;
    let r = &ex.correlation.values;
    let diff = (l.dot(&l.t()) - r).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(diff < 1e-8, "max |LLᵀ - R| = {diff}");
    for (f, &lambda) in ex.all_eigenvalues.iter().enumerate().take(ex.eigenvectors.ncols()) {
        let v = ex.eigenvectors.column(f);
        let resid = (r.dot(&v) - &v.mapv(|x| x * lambda)).iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(resid < 1e-8, "eigen residual {resid}");
    }
    let oracle = jacobi_eigenvalues(r.rows().into_iter().map(|row| row.to_vec()).collect());
    for (a, b) in ex.all_eigenvalues.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-9);
    }
    let total: f64 = ex.all_eigenvalues.iter().sum();
    assert!((total - 7.0).abs() < 1e-9);
}

#[test]
fn kaiser_keeps_eigenvalues_above_one() {
    let data = noisy_data(40, 8, 11);
    let ex = factor_analyze(data.view(), &labels("d", 40), &labels("t", 8), InputMode::Counts, FactorMode::R, FactorCount::Kaiser)
        .unwrap();
    let expected = ex.all_eigenvalues.iter().filter(|&&l| l > 1.0).count();
    assert_eq!(ex.solution.n_factors(), expected);
    assert!(ex.solution.eigenvalues.iter().all(|&l| l > 1.0));
    for col in ex.solution.loadings.columns() {
        let big = col.iter().copied().fold(0.0f64, |b, v| if v.abs() > b.abs() { v } else { b });
        assert!(big >= 0.0);
    }
}

#[test]
fn q_mode_correlates_documents() {
    let data = noisy_data(6, 20, 5);
    let ex = factor_analyze(data.view(), &labels("d", 6), &labels("t", 20), InputMode::Counts, FactorMode::Q, FactorCount::Fixed(2))
        .unwrap();
    assert_eq!(ex.solution.variable_labels, labels("d", 6));
    assert_eq!(ex.solution.loadings.dim(), (6, 2));
}

#[test]
fn two_factor_angle_matches_grid_search() {
    for (seed, tilt) in [(1u64, 0.3), (2, -0.5), (3, 0.9), (4, 0.05)] {
        for kaiser in [false, true] {
            let l = tilted_structure(seed, tilt);
            let out = varimax(&solution(l.clone()), VarimaxOptions { kaiser_normalize: kaiser, ..VarimaxOptions::default() });
            let work = if kaiser { kaiser_rows(&l) } else { l.clone() };
            let mut best = (f64::NEG_INFINITY, 0.0);
            for step in 0..900 {
                let deg = step as f64 * 0.1;
                let v = varimax_criterion(&rotate2(&work, deg.to_radians()));
                if v > best.0 {
                    best = (v, deg);
                }
            }
            let t = &out.rotation;
            let found = t[[1, 0]].atan2(t[[0, 0]]).to_degrees();
            let gap = angle_distance_deg(found, best.1);
            assert!(gap <= 0.5, "seed {seed} kaiser {kaiser}: {found} vs grid {}", best.1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn varimax_invariants(values in prop::collection::vec(-1.0f64..1.0, 24), k in 2usize..=4, kaiser in any::<bool>()) {
        let p = 24 / k;
        let l = Array2::from_shape_vec((p, k), values[..p * k].to_vec()).unwrap();
        let sol = solution(l.clone());
        let out = varimax(&sol, VarimaxOptions { kaiser_normalize: kaiser, ..VarimaxOptions::default() });
        let t = &out.rotation;
        let gram = t.t().dot(t);
        for ((i, j), v) in gram.indexed_iter() {
            let want = if i == j { 1.0 } else { 0.0 };
            prop_assert!((v - want).abs() <= 1e-10);
        }
        let rotated = &out.solution.loadings;
        prop_assert!((l.dot(t) - rotated).iter().all(|d| d.abs() <= 1e-10));
        for (a, b) in sol.communalities().iter().zip(out.solution.communalities()) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
        for w in out.criterion_trace.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12);
        }
        prop_assert!(out.converged);
        prop_assert!(out.solution.rotated);
    }

    #[test]
    fn assignment_matches_argmax_and_ignores_row_scaling(
        values in prop::collection::vec(-1.0f64..1.0, 18),
        scale in prop::collection::vec(1.0f64..5.0, 6),
    ) {
        let l = Array2::from_shape_vec((6, 3), values).unwrap();
        let open = Suppression { threshold: 0.0, inclusive: false };
        let a = assign_factors(&solution(l.clone()), open);
        for (row, got) in l.rows().into_iter().zip(&a.assignments) {
            let mut best = 0;
            for f in 1..3 {
                if row[f].abs() > row[best].abs() {
                    best = f;
                }
            }
            let got = got.unwrap();
            prop_assert_eq!(got.factor, best);
            prop_assert_eq!(got.positive, row[best] >= 0.0);
        }
        let mut scaled = l.clone();
        for (mut row, s) in scaled.rows_mut().into_iter().zip(&scale) {
            row.mapv_inplace(|v| v * s);
        }
        prop_assert_eq!(assign_factors(&solution(scaled), open).assignments, a.assignments);

        let d = Suppression::default();
        let g = factor_graph(&solution(l.clone()), d).unwrap();
        let kept = l.iter().filter(|v| v.abs() > 0.1).count();
        prop_assert_eq!(g.edge_count(), kept);
        for e in g.edges() {
            let v = l[[e.source, e.target - 6]];
            prop_assert_eq!(e.weight, v.abs());
            prop_assert_eq!(e.style == EdgeStyle::Dotted, v < 0.0);
        }
    }

    #[test]
    fn svd_matches_gram_eigenvalues(values in prop::collection::vec(-3.0f64..3.0, 20), k in 1usize..=4) {
        let a = Array2::from_shape_vec((5, 4), values).unwrap();
        let svd = truncated_svd(a.view(), k).unwrap();
        let gram = a.t().dot(&a);
        let oracle = jacobi_eigenvalues(gram.rows().into_iter().map(|r| r.to_vec()).collect());
        for (s, l) in svd.singular_values.iter().zip(&oracle) {
            prop_assert!((s * s - l.max(0.0)).abs() <= 1e-8 * (1.0 + l.abs()));
        }
        for w in svd.singular_values.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        let err: f64 = (svd.reconstruct() - &a).iter().map(|v| v * v).sum();
        let tail: f64 = oracle[k..].iter().map(|l| l.max(0.0)).sum();
        prop_assert!((err - tail).abs() <= 1e-7 * (1.0 + tail));
        let utu = svd.left.t().dot(&svd.left);
        let identity = Array2::<f64>::eye(k);
        prop_assert!((utu - identity).iter().all(|d| d.abs() <= 1e-9));
        let peaks = svd.left.map_axis(Axis(0), |c| c.iter().copied().fold(0.0f64, |b, v| if v.abs() > b.abs() { v } else { b }));
        prop_assert!(peaks.iter().all(|&v| v >= 0.0));
    }
}
