//! The stage graph, cache bookkeeping and the run report.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use coword_core::corpus::corpus_files;
use serde_json::json;

use crate::cache::{hash_file, KeyBuilder, Manifest, StageRecord, StageReport};
use crate::config::{MapSetting, PipelineConfig};
use crate::error::CliError;
use crate::stages;

pub const REPORT: &str = "run-report.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Ingest,
    Terms,
    Map,
    Factors,
    Cooc,
    Render,
}

impl Stage {
    /// Topological order.
    pub const ALL: [Stage; 6] = [Stage::Ingest, Stage::Terms, Stage::Map, Stage::Factors, Stage::Cooc, Stage::Render];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Terms => "terms",
            Stage::Map => "map",
            Stage::Factors => "factors",
            Stage::Cooc => "cooc",
            Stage::Render => "render",
        }
    }

    pub fn outputs(self) -> &'static [&'static str] {
        match self {
            Stage::Ingest => &[stages::MATRIX, stages::EXPECTED],
            Stage::Terms => &[stages::TERMS],
            Stage::Map => &[stages::MAP],
            Stage::Factors => &[stages::LOADINGS, stages::FACTORS],
            Stage::Cooc => &[stages::COOC],
            Stage::Render => &[stages::SVG],
        }
    }

    /// Artifacts this stage reads from other stages.
    pub fn inputs(self) -> &'static [&'static str] {
        match self {
            Stage::Ingest => &[],
            Stage::Terms | Stage::Map | Stage::Factors | Stage::Cooc => &[stages::MATRIX],
            Stage::Render => &[stages::MAP, stages::LOADINGS, stages::MATRIX],
        }
    }

    pub fn producer(artifact: &str) -> Option<Stage> {
        Stage::ALL.into_iter().find(|s| s.outputs().contains(&artifact))
    }

    /// The configuration values this stage's outputs depend on.
    pub fn config_slice(self, cfg: &PipelineConfig) -> serde_json::Value {
        let selection = json!({
            "yates": cfg.yates,
            "criterion": cfg.criterion,
            "top": cfg.top,
            "min_score": cfg.min_score,
        });
        match self {
            Stage::Ingest => json!({
                "format": cfg.format,
                "lowercase": cfg.lowercase,
                "min_token_length": cfg.min_token_length,
                "default_stopwords": cfg.default_stopwords,
                "binary": cfg.binary,
            }),
            Stage::Terms => json!({ "yates": cfg.yates }),
            Stage::Map => {
                let threshold = match cfg.map {
                    MapSetting::Cosine => json!({ "cells": cfg.cells, "cos_threshold": cfg.cos_threshold }),
                    MapSetting::Cooc => json!({ "cooc_threshold": cfg.cooc_threshold }),
                };
                json!({
                    "selection": selection,
                    "map": cfg.map,
                    "threshold": threshold,
                    "layout": cfg.layout,
                    "seed": cfg.seed,
                })
            }
            Stage::Factors => json!({
                "selection": selection,
                "cells": cfg.cells,
                "factors": cfg.factors,
                "rotate": cfg.rotate,
                "mode": cfg.mode,
                "suppression": cfg.suppression,
            }),
            Stage::Cooc => json!({ "selection": selection }),
            Stage::Render => json!({ "suppression": cfg.suppression }),
        }
    }

    fn execute(self, cfg: &PipelineConfig, out: &Path) -> Result<StageReport, CliError> {
        match self {
            Stage::Ingest => stages::ingest(cfg, out),
            Stage::Terms => stages::terms(cfg, out),
            Stage::Map => stages::map(cfg, out),
            Stage::Factors => stages::factors(cfg, out),
            Stage::Cooc => stages::cooc(cfg, out),
            Stage::Render => stages::render(cfg, out),
        }
    }
}

impl std::str::FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown stage '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageStatus {
    Computed,
    Cached,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    /// Record per-stage wall-clock times in the run report.
    pub timings: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub statuses: Vec<(Stage, StageStatus)>,
    pub report: serde_json::Value,
}

pub struct Pipeline<'a> {
    cfg: &'a PipelineConfig,
    out: PathBuf,
}

impl<'a> Pipeline<'a> {
    pub fn new(cfg: &'a PipelineConfig) -> Result<Self, CliError> {
        cfg.validate()?;
        Ok(Pipeline {
            cfg,
            out: cfg.out.clone(),
        })
    }

    pub fn out(&self) -> &Path {
        &self.out
    }

    fn hash_source(&self, key: &mut KeyBuilder, label: &str, path: &Path) -> Result<(), CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        key.part(label, &bytes);
        Ok(())
    }

    /// Cache key over the stage's config slice and the bytes of everything
    /// it reads. A missing upstream artifact names the stage producing it.
    pub fn stage_key(&self, stage: Stage) -> Result<String, CliError> {
        let mut key = KeyBuilder::new(stage.name());
        key.part("config", stage.config_slice(self.cfg).to_string().as_bytes());
        if stage == Stage::Ingest {
            let root = &self.cfg.input;
            for file in corpus_files(root, self.cfg.input_format())? {
                let name = file.strip_prefix(root).unwrap_or(&file).to_string_lossy().into_owned();
                self.hash_source(&mut key, &format!("doc:{name}"), &file)?;
            }
            if let Some(p) = &self.cfg.stopwords {
                self.hash_source(&mut key, "stopwords", p)?;
            }
            if let Some(p) = &self.cfg.synonyms {
                self.hash_source(&mut key, "synonyms", p)?;
            }
        }
        for &artifact in stage.inputs() {
            let path = self.out.join(artifact);
            let bytes = fs::read(&path).map_err(|_| CliError::Stale {
                artifact: artifact.to_string(),
                stage: Stage::producer(artifact).expect("inputs have producers").name(),
            })?;
            key.part(artifact, &bytes);
        }
        Ok(key.finish())
    }

    /// Fails with the earliest upstream stage whose outputs are missing or
    /// no longer match the current inputs and configuration.
    pub fn check_upstream(&self, stage: Stage, manifest: &Manifest) -> Result<(), CliError> {
        let mut producers: Vec<(Stage, &str)> = stage
            .inputs()
            .iter()
            .map(|&a| (Stage::producer(a).expect("inputs have producers"), a))
            .collect();
        producers.sort();
        producers.dedup_by_key(|p| p.0);
        for (producer, artifact) in producers {
            self.check_upstream(producer, manifest)?;
            let key = self.stage_key(producer)?;
            if manifest.valid(producer.name(), &key, &self.out).is_none() {
                return Err(CliError::Stale {
                    artifact: artifact.to_string(),
                    stage: producer.name(),
                });
            }
        }
        Ok(())
    }

    fn ensure_out(&self) -> Result<(), CliError> {
        fs::create_dir_all(&self.out).map_err(|e| CliError::io(&self.out, e))
    }

    /// Runs one stage unless its cached outputs are still valid.
    fn step(&self, stage: Stage, manifest: &mut Manifest) -> Result<StageStatus, CliError> {
        let key = self.stage_key(stage)?;
        if manifest.valid(stage.name(), &key, &self.out).is_some() {
            return Ok(StageStatus::Cached);
        }
        manifest.stages.remove(stage.name());
        let report = stage.execute(self.cfg, &self.out)?;
        let mut outputs = BTreeMap::new();
        for &name in stage.outputs() {
            let path = self.out.join(name);
            outputs.insert(name.to_string(), hash_file(&path).map_err(|e| CliError::io(path, e))?);
        }
        manifest.stages.insert(stage.name().to_string(), StageRecord { key, outputs, report });
        manifest.save(&self.out)?;
        Ok(StageStatus::Computed)
    }

    /// Runs a single stage; its upstream artifacts must already be current.
    pub fn run_stage(&self, stage: Stage) -> Result<StageStatus, CliError> {
        self.ensure_out()?;
        let mut manifest = Manifest::load(&self.out);
        self.check_upstream(stage, &manifest)?;
        self.step(stage, &mut manifest)
    }

    /// Runs every stage in order, reusing valid cached outputs, and writes
    /// the run report.
    pub fn run(&self, opts: &RunOptions) -> Result<RunOutcome, CliError> {
        self.ensure_out()?;
        let mut manifest = Manifest::load(&self.out);
        let mut statuses = Vec::new();
        let mut timings = serde_json::Map::new();
        for stage in Stage::ALL {
            let started = Instant::now();
            statuses.push((stage, self.step(stage, &mut manifest)?));
            timings.insert(stage.name().into(), json!(started.elapsed().as_secs_f64() * 1000.0));
        }
        let mut report = self.report(&manifest);
        if opts.timings {
            report["timings_ms"] = serde_json::Value::Object(timings);
        }
        let path = self.out.join(REPORT);
        let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::io(path, e))?;
        Ok(RunOutcome { statuses, report })
    }

    fn report(&self, manifest: &Manifest) -> serde_json::Value {
        let mut config = serde_json::to_value(self.cfg).expect("config serializes");
        if let Some(obj) = config.as_object_mut() {
            obj.remove("out");
        }
        let mut stages = serde_json::Map::new();
        let mut warnings = Vec::new();
        let mut artifacts = serde_json::Map::new();
        for stage in Stage::ALL {
            let Some(rec) = manifest.stages.get(stage.name()) else { continue };
            stages.insert(stage.name().into(), json!(rec.report.counts));
            warnings.extend(rec.report.warnings.iter().map(|w| format!("{}: {w}", stage.name())));
            for (name, hash) in &rec.outputs {
                artifacts.insert(name.clone(), json!(hash));
            }
        }
        json!({
            "config": config,
            "counts": stages,
            "warnings": warnings,
            "artifacts": artifacts,
        })
    }
}

/// Runs `f` on a pool capped at `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start {n} worker threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
