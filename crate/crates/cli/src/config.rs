//! Pipeline configuration: a flat TOML file overlaid by command-line flags.
//!
//! Precedence is built-in defaults, then the file, then flags. Relative
//! paths in the file are resolved against the file's directory; relative
//! paths given as flags against the working directory.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use coword_core::corpus::InputFormat;
use coword_core::factors::{FactorCount, FactorMode, InputMode};
use coword_core::termstats::{Criterion, Selection, YatesCorrection};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CliError;

pub const DEFAULT_TOP: usize = 75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FormatSetting {
    /// One document per file in a directory.
    Files,
    /// One document per non-blank line of a file.
    Lines,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CriterionSetting {
    Freq,
    Tfidf,
    Chi2,
    Obsexp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CellsSetting {
    Counts,
    Tfidf,
    Obsexp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MapSetting {
    Cosine,
    Cooc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum ModeSetting {
    #[serde(rename = "R", alias = "r")]
    #[value(name = "R", alias = "r")]
    R,
    #[serde(rename = "Q", alias = "q")]
    #[value(name = "Q", alias = "q")]
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum LayoutSetting {
    Fr,
    Kk,
}

/// `kaiser` or a fixed positive count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorsSetting {
    Kaiser,
    Fixed(usize),
}

impl std::str::FromStr for FactorsSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("kaiser") {
            return Ok(FactorsSetting::Kaiser);
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("expected a positive factor count or 'kaiser', got '{s}'")),
            Ok(k) => Ok(FactorsSetting::Fixed(k)),
        }
    }
}

impl fmt::Display for FactorsSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorsSetting::Kaiser => f.write_str("kaiser"),
            FactorsSetting::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl Serialize for FactorsSetting {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            FactorsSetting::Kaiser => s.serialize_str("kaiser"),
            FactorsSetting::Fixed(k) => s.serialize_u64(*k as u64),
        }
    }
}

impl<'de> Deserialize<'de> for FactorsSetting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(i64),
            Name(String),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Count(n) => n.to_string(),
            Raw::Name(s) => s,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub format: FormatSetting,
    pub lowercase: bool,
    pub min_token_length: usize,
    /// Start from the bundled English stopword list.
    pub default_stopwords: bool,
    /// Extra stopwords, one per line.
    pub stopwords: Option<PathBuf>,
    /// `variant<TAB>canonical` lines.
    pub synonyms: Option<PathBuf>,
    /// Count presence instead of occurrences.
    pub binary: bool,
    pub yates: bool,
    pub criterion: CriterionSetting,
    pub top: Option<usize>,
    pub min_score: Option<f64>,
    pub cells: CellsSetting,
    pub map: MapSetting,
    pub cos_threshold: f64,
    pub cooc_threshold: f64,
    pub factors: FactorsSetting,
    pub rotate: bool,
    pub mode: ModeSetting,
    pub suppression: f64,
    pub layout: LayoutSetting,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: PathBuf::from("docs"),
            format: FormatSetting::Files,
            lowercase: true,
            min_token_length: 1,
            default_stopwords: true,
            stopwords: None,
            synonyms: None,
            binary: false,
            yates: true,
            criterion: CriterionSetting::Freq,
            top: None,
            min_score: None,
            cells: CellsSetting::Counts,
            map: MapSetting::Cosine,
            cos_threshold: 0.1,
            cooc_threshold: 1.0,
            factors: FactorsSetting::Kaiser,
            rotate: true,
            mode: ModeSetting::R,
            suppression: 0.1,
            layout: LayoutSetting::Fr,
            seed: coword_core::layout::DEFAULT_SEED,
            out: PathBuf::from("out"),
        }
    }
}

/// Flag values that override the configuration when present.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub input: Option<PathBuf>,
    pub format: Option<FormatSetting>,
    pub criterion: Option<CriterionSetting>,
    pub top: Option<usize>,
    pub min_score: Option<f64>,
    pub cells: Option<CellsSetting>,
    pub map: Option<MapSetting>,
    pub cos_threshold: Option<f64>,
    pub cooc_threshold: Option<f64>,
    pub factors: Option<FactorsSetting>,
    pub no_rotate: bool,
    pub mode: Option<ModeSetting>,
    pub layout: Option<LayoutSetting>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub binary: bool,
}

fn resolve(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

impl PipelineConfig {
    pub fn parse(text: &str, origin: &Path) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            let line = e.span().map(|s| text[..s.start].matches('\n').count() + 1);
            CliError::Config(match line {
                Some(l) => format!("{}:{l}: {msg}", origin.display()),
                None => format!("{}: {msg}", origin.display()),
            })
        })
    }

    /// Reads a config file, resolving its relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let mut cfg = Self::parse(&text, path)?;
        let base = path.parent().unwrap_or(Path::new(""));
        resolve(base, &mut cfg.input);
        resolve(base, &mut cfg.out);
        for p in [&mut cfg.stopwords, &mut cfg.synonyms].into_iter().flatten() {
            resolve(base, p);
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = o.$field.clone() {
                    self.$field = v;
                }
            )*};
        }
        take!(input, format, criterion, cells, map, cos_threshold, cooc_threshold, factors, mode, layout, seed, out);
        if o.top.is_some() {
            self.top = o.top;
            self.min_score = None;
        }
        if o.min_score.is_some() {
            self.min_score = o.min_score;
            self.top = None;
        }
        if o.no_rotate {
            self.rotate = false;
        }
        if o.binary {
            self.binary = true;
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.top.is_some() && self.min_score.is_some() {
            return bad("set either `top` or `min_score`, not both".into());
        }
        if self.top == Some(0) {
            return bad("`top` must be at least 1".into());
        }
        if self.min_token_length == 0 {
            return bad("`min_token_length` must be at least 1".into());
        }
        for (name, v) in [
            ("cos_threshold", self.cos_threshold),
            ("cooc_threshold", self.cooc_threshold),
            ("suppression", self.suppression),
        ] {
            if !v.is_finite() {
                return bad(format!("`{name}` must be a finite number"));
            }
        }
        if self.min_score.is_some_and(|x| !x.is_finite()) {
            return bad("`min_score` must be a finite number".into());
        }
        if self.suppression < 0.0 {
            return bad("`suppression` must be non-negative".into());
        }
        Ok(())
    }

    pub fn input_format(&self) -> InputFormat {
        match self.format {
            FormatSetting::Files => InputFormat::OneDocPerFile,
            FormatSetting::Lines => InputFormat::OneDocPerLine,
        }
    }

    pub fn yates_correction(&self) -> YatesCorrection {
        if self.yates {
            YatesCorrection::ObservedBelowFive
        } else {
            YatesCorrection::Off
        }
    }

    pub fn criterion(&self) -> Criterion {
        match self.criterion {
            CriterionSetting::Freq => Criterion::Freq,
            CriterionSetting::Tfidf => Criterion::TfIdf,
            CriterionSetting::Chi2 => Criterion::Chi2,
            CriterionSetting::Obsexp => Criterion::ObsExp,
        }
    }

    pub fn selection(&self) -> Selection {
        match (self.top, self.min_score) {
            (_, Some(x)) => Selection::MinScore(x),
            (Some(n), None) => Selection::Top(n),
            (None, None) => Selection::Top(DEFAULT_TOP),
        }
    }

    pub fn input_mode(&self) -> InputMode {
        match self.cells {
            CellsSetting::Counts => InputMode::Counts,
            CellsSetting::Tfidf => InputMode::TfIdf,
            CellsSetting::Obsexp => InputMode::ObsExp,
        }
    }

    pub fn factor_count(&self) -> FactorCount {
        match self.factors {
            FactorsSetting::Kaiser => FactorCount::Kaiser,
            FactorsSetting::Fixed(k) => FactorCount::Fixed(k),
        }
    }

    pub fn factor_mode(&self) -> FactorMode {
        match self.mode {
            ModeSetting::R => FactorMode::R,
            ModeSetting::Q => FactorMode::Q,
        }
    }
}
