//! Stage bodies. Each reads only its declared inputs and writes only its
//! declared outputs under the output directory.

use std::collections::BTreeSet;
use std::path::Path;

use coword_core::corpus::{
    build_all, default_stopwords, load_corpus, load_stopwords, load_synonyms, TokenizerConfig, WordDocMatrix,
};
use coword_core::export::pajek::{read_pajek_net, write_pajek_matrix, write_pajek_net};
use coword_core::export::svg::render_svg_map;
use coword_core::export::tables::{read_matrix_csv, write_csv, Table};
use coword_core::factors::{
    assign_factors, factor_analyze, factor_graph, factor_label, varimax, FactorMode, FactorSolution, Suppression,
    VarimaxOptions,
};
use coword_core::graph::Graph;
use coword_core::layout::{
    fruchterman_reingold, kamada_kawai, split_and_pack, FrOptions, KkOptions, Layout, LayoutAlgorithm,
};
use coword_core::termstats::{chi_square, expected_matrix, select_terms, TermScores};
use coword_core::vectorspace::{cooccurrence, cosine_matrix, threshold_graph, CoocMode, Orientation, ThresholdRule};
use ndarray::Axis;

use crate::cache::StageReport;
use crate::config::{LayoutSetting, MapSetting, PipelineConfig};
use crate::error::CliError;

pub const MATRIX: &str = "matrix.csv";
pub const EXPECTED: &str = "expected.csv";
pub const TERMS: &str = "terms.csv";
pub const MAP: &str = "map.net";
pub const LOADINGS: &str = "loadings.csv";
pub const FACTORS: &str = "factors.net";
pub const COOC: &str = "coocc.dat";
pub const SVG: &str = "map.svg";

const LISTED: usize = 10;

/// Comma-separated, cut after the first few items.
fn listing(items: &[String]) -> String {
    let mut s = items.iter().take(LISTED).cloned().collect::<Vec<_>>().join(", ");
    if items.len() > LISTED {
        s.push_str(&format!(", ... ({} more)", items.len() - LISTED));
    }
    s
}

pub fn tokenizer(cfg: &PipelineConfig) -> Result<TokenizerConfig, CliError> {
    let mut stopwords = if cfg.default_stopwords { default_stopwords() } else { BTreeSet::new() };
    if let Some(path) = &cfg.stopwords {
        stopwords.extend(load_stopwords(path)?);
    }
    let synonyms = match &cfg.synonyms {
        Some(path) => load_synonyms(path, cfg.lowercase)?,
        None => Default::default(),
    };
    Ok(TokenizerConfig {
        lowercase: cfg.lowercase,
        min_token_length: cfg.min_token_length,
        stopwords,
        synonyms,
    })
}

pub fn ingest(cfg: &PipelineConfig, out: &Path) -> Result<StageReport, CliError> {
    let corpus = load_corpus(&cfg.input, cfg.input_format())?;
    let (vocab, m, pruned) = build_all(&corpus, &tokenizer(cfg)?)?;
    let m = if cfg.binary { m.binarized() } else { m };
    write_csv(&Table::from_matrix("doc", m.doc_ids(), m.terms(), m.counts()), &out.join(MATRIX))?;
    write_csv(
        &Table::from_matrix("doc", m.doc_ids(), m.terms(), &expected_matrix(&m).0),
        &out.join(EXPECTED),
    )?;
    let mut report = StageReport::default();
    report.count("documents", corpus.len());
    report.count("documents_kept", m.n_docs());
    report.count("vocabulary", vocab.len());
    report.count("terms", m.n_terms());
    report.count("total", m.grand_total());
    if !pruned.documents.is_empty() {
        report.warn(format!(
            "pruned {} document(s) with no counted term: {}",
            pruned.documents.len(),
            listing(&pruned.documents)
        ));
    }
    if !pruned.terms.is_empty() {
        report.warn(format!("pruned {} term(s) with zero frequency: {}", pruned.terms.len(), listing(&pruned.terms)));
    }
    Ok(report)
}

pub fn load_matrix(out: &Path) -> Result<WordDocMatrix, CliError> {
    let table = read_matrix_csv::<u64>(&out.join(MATRIX))?;
    let (m, _) = WordDocMatrix::from_counts(table.row_labels, table.col_labels, table.values)?;
    Ok(m)
}

pub fn terms(cfg: &PipelineConfig, out: &Path) -> Result<StageReport, CliError> {
    let m = load_matrix(out)?;
    let scores = TermScores::compute(&m, cfg.yates_correction());
    let mut table = Table::new(["term", "freq", "docfreq", "tfidf", "chi2", "obsexp"]);
    for s in &scores.scores {
        table.push_row(vec![
            s.term.clone(),
            s.freq.to_string(),
            s.doc_freq.to_string(),
            coword_core::export::format_sig6(s.tfidf),
            coword_core::export::format_sig6(s.chi2),
            coword_core::export::format_sig6(s.obs_exp_sum),
        ]);
    }
    write_csv(&table, &out.join(TERMS))?;
    let chi = chi_square(&m, cfg.yates_correction());
    let mut report = StageReport::default();
    report.count("terms", scores.scores.len());
    report.count("chi2_total", chi.total);
    report.count("degrees_of_freedom", chi.degrees_of_freedom);
    report.count("yates_cells", chi.yates_applied.iter().filter(|&&y| y).count());
    Ok(report)
}

/// The selected-term submatrix, with documents that lost every term pruned.
pub fn selected(cfg: &PipelineConfig, m: &WordDocMatrix, report: &mut StageReport) -> Result<WordDocMatrix, CliError> {
    let scores = TermScores::compute(m, cfg.yates_correction());
    let chosen = select_terms(&scores, cfg.criterion(), cfg.selection())?;
    let counts = m.select_terms(&chosen)?;
    let (sub, pruned) = WordDocMatrix::from_counts(m.doc_ids().to_vec(), chosen, counts)?;
    report.count("selected_terms", sub.n_terms());
    if !pruned.documents.is_empty() {
        report.warn(format!(
            "pruned {} document(s) containing none of the selected terms: {}",
            pruned.documents.len(),
            listing(&pruned.documents)
        ));
    }
    Ok(sub)
}

pub fn layout_graph(g: &Graph, cfg: &PipelineConfig) -> Result<Layout, CliError> {
    let layout = match cfg.layout {
        LayoutSetting::Fr => split_and_pack(g, cfg.seed, |sub, seed| {
            Ok(fruchterman_reingold(sub, FrOptions { seed, ..FrOptions::default() }))
        })?,
        LayoutSetting::Kk => split_and_pack(g, cfg.seed, |sub, seed| {
            kamada_kawai(sub, KkOptions { seed, ..KkOptions::default() })
        })?,
    };
    Ok(layout)
}

pub fn map(cfg: &PipelineConfig, out: &Path) -> Result<StageReport, CliError> {
    let mut report = StageReport::default();
    let sub = selected(cfg, &load_matrix(out)?, &mut report)?;
    let (g, threshold) = match cfg.map {
        MapSetting::Cosine => {
            let cells = cfg.input_mode().cells(&sub);
            let (keep, zero): (Vec<usize>, Vec<usize>) =
                (0..sub.n_terms()).partition(|&k| cells.column(k).iter().any(|&v| v != 0.0));
            if !zero.is_empty() {
                let names: Vec<String> = zero.iter().map(|&k| sub.terms()[k].clone()).collect();
                report.warn(format!(
                    "dropped {} term(s) with an all-zero column from the cosine map: {}",
                    names.len(),
                    listing(&names)
                ));
            }
            let labels: Vec<String> = keep.iter().map(|&k| sub.terms()[k].clone()).collect();
            let cells = cells.select(Axis(1), &keep);
            let sim = cosine_matrix(cells.view(), &labels, Orientation::Columns)?;
            (threshold_graph(&sim, cfg.cos_threshold, ThresholdRule::AtLeast)?, cfg.cos_threshold)
        }
        MapSetting::Cooc => {
            let cooc = cooccurrence(&sub, CoocMode::Words);
            (threshold_graph(&cooc, cfg.cooc_threshold, ThresholdRule::Above)?, cfg.cooc_threshold)
        }
    };
    if g.edge_count() == 0 {
        report.warn(format!("the map has no edges at threshold {threshold}"));
    }
    let layout = layout_graph(&g, cfg)?;
    write_pajek_net(&g, Some(&layout), &out.join(MAP))?;
    report.count("nodes", g.node_count());
    report.count("edges", g.edge_count());
    report.count("components", g.connected_components().len());
    report.count("layout_iterations", layout.iterations);
    Ok(report)
}

fn variable_kind(mode: FactorMode) -> &'static str {
    match mode {
        FactorMode::R => "term",
        FactorMode::Q => "doc",
    }
}

fn suppression(cfg: &PipelineConfig) -> Suppression {
    Suppression {
        threshold: cfg.suppression,
        inclusive: true,
    }
}

pub fn factors(cfg: &PipelineConfig, out: &Path) -> Result<StageReport, CliError> {
    let mut report = StageReport::default();
    let sub = selected(cfg, &load_matrix(out)?, &mut report)?;
    let cells = cfg.input_mode().cells(&sub);
    let ex = factor_analyze(
        cells.view(),
        sub.doc_ids(),
        sub.terms(),
        cfg.input_mode(),
        cfg.factor_mode(),
        cfg.factor_count(),
    )?;
    report.warnings.extend(ex.warnings.iter().cloned());
    let sol = if cfg.rotate {
        let rotated = varimax(&ex.solution, VarimaxOptions::default());
        report.count("varimax_sweeps", rotated.sweeps);
        if let Some(notice) = rotated.notice {
            report.warn(notice);
        }
        rotated.solution
    } else {
        ex.solution
    };
    let names: Vec<String> = (0..sol.n_factors()).map(factor_label).collect();
    write_csv(
        &Table::from_matrix(variable_kind(sol.mode), &sol.variable_labels, &names, &sol.loadings),
        &out.join(LOADINGS),
    )?;
    write_pajek_net(&factor_graph(&sol, suppression(cfg))?, None, &out.join(FACTORS))?;
    let assignment = assign_factors(&sol, suppression(cfg));
    report.count("variables", sol.n_variables());
    report.count("factors", sol.n_factors());
    report.count("eigenvalues", &sol.eigenvalues);
    report.count("explained_variance_pct", &sol.explained_variance_pct);
    report.count("unassigned", assignment.assignments.iter().filter(|a| a.is_none()).count());
    Ok(report)
}

pub fn cooc(cfg: &PipelineConfig, out: &Path) -> Result<StageReport, CliError> {
    let mut report = StageReport::default();
    let sub = selected(cfg, &load_matrix(out)?, &mut report)?;
    let c = cooccurrence(&sub, CoocMode::Words);
    write_pajek_matrix(&c, &out.join(COOC))?;
    let n = c.labels.len();
    let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| c.values[[i, j]] > 0).count();
    report.count("terms", n);
    report.count("cooccurring_pairs", pairs);
    Ok(report)
}

pub fn render(cfg: &PipelineConfig, out: &Path) -> Result<StageReport, CliError> {
    let mut report = StageReport::default();
    let net = read_pajek_net(&out.join(MAP))?;
    let table = read_matrix_csv::<f64>(&out.join(LOADINGS))?;
    let mode = if table.corner == variable_kind(FactorMode::Q) { FactorMode::Q } else { FactorMode::R };
    let p = table.row_labels.len().max(1) as f64;
    let ss: Vec<f64> = table.values.columns().into_iter().map(|c| c.iter().map(|v| v * v).sum()).collect();
    let sol = FactorSolution {
        explained_variance_pct: ss.iter().map(|s| 100.0 * s / p).collect(),
        eigenvalues: ss,
        loadings: table.values,
        rotated: cfg.rotate,
        variable_labels: table.row_labels,
        input_mode: cfg.input_mode(),
        mode,
    };
    let assignment = assign_factors(&sol, suppression(cfg));
    if mode == FactorMode::Q {
        report.warn("factors describe documents (Q mode); map nodes are left uncolored");
    }
    let m = load_matrix(out)?;
    let sizes: Vec<f64> = net
        .graph
        .nodes()
        .iter()
        .map(|n| m.terms().iter().position(|t| *t == n.label).map_or(0.0, |k| m.col_margins()[k] as f64))
        .collect();
    let layout = Layout {
        positions: net.positions,
        algorithm: LayoutAlgorithm::Packed,
        seed: cfg.seed,
        iterations: 0,
    };
    render_svg_map(&net.graph, &layout, Some(&assignment), Some(&sizes), &out.join(SVG))?;
    let colored = net
        .graph
        .nodes()
        .iter()
        .filter(|n| assignment.get(&n.label).flatten().is_some())
        .count();
    report.count("nodes", net.graph.node_count());
    report.count("colored_nodes", colored);
    Ok(report)
}
