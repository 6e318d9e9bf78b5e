//! Documents, tokenization and the word–document count matrix.
//!
//! Documents are the cases (rows) and surviving tokens the variables
//! (columns). Everything downstream assumes the matrix has been pruned so
//! that no row or column margin is zero.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use ndarray::{Array2, Axis};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Maximum display label length, in characters.
pub const LABEL_MAX_CHARS: usize = 40;

const DEFAULT_STOPWORDS: &str = include_str!("stopwords_en.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub label: String,
    pub text: String,
}

impl Document {
    pub fn new(id: impl Into<String>, label: impl AsRef<str>, text: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            label: truncate_label(label.as_ref()),
            text: text.into(),
        }
    }
}

pub fn truncate_label(s: &str) -> String {
    s.trim().chars().take(LABEL_MAX_CHARS).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    /// Every regular file in a directory is one document.
    OneDocPerFile,
    /// Every non-blank line of a file is one document.
    OneDocPerLine,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
}

impl Corpus {
    /// Fails on an empty document list or a repeated id.
    pub fn new(documents: Vec<Document>) -> Result<Self> {
        if documents.is_empty() {
            return Err(Error::EmptyCorpus("<memory>".into()));
        }
        let mut seen = BTreeSet::new();
        for d in &documents {
            if !seen.insert(d.id.as_str()) {
                return Err(Error::DuplicateLabel(d.id.clone()));
            }
        }
        Ok(Corpus { documents })
    }

    /// Numbered documents ("1", "2", ...) from in-memory texts.
    pub fn from_texts<S: AsRef<str>>(texts: &[S]) -> Result<Self> {
        let docs = texts
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let id = (i + 1).to_string();
                let label = if t.as_ref().trim().is_empty() { id.clone() } else { t.as_ref().to_string() };
                Document::new(id, label, t.as_ref())
            })
            .collect();
        Corpus::new(docs)
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }
}

/// Loads a directory (one document per file, sorted by file name, hidden
/// files skipped) or a file with one document per line.
pub fn load_corpus(source: &Path, format: InputFormat) -> Result<Corpus> {
    let documents = match format {
        InputFormat::OneDocPerFile => load_directory(source)?,
        InputFormat::OneDocPerLine => load_lines(source)?,
    };
    if documents.is_empty() {
        return Err(Error::EmptyCorpus(source.to_path_buf()));
    }
    Ok(Corpus { documents })
}

/// Paths of the files `load_corpus` would read, in load order.
pub fn corpus_files(source: &Path, format: InputFormat) -> Result<Vec<std::path::PathBuf>> {
    match format {
        InputFormat::OneDocPerLine => Ok(vec![source.to_path_buf()]),
        InputFormat::OneDocPerFile => {
            let entries = fs::read_dir(source).map_err(|e| Error::read(source, e))?;
            let mut files = Vec::new();
            for entry in entries {
                let entry = entry.map_err(|e| Error::read(source, e))?;
                let path = entry.path();
                let hidden = entry.file_name().to_string_lossy().starts_with('.');
                if !hidden && path.is_file() {
                    files.push(path);
                }
            }
            files.sort();
            Ok(files)
        }
    }
}

fn load_directory(dir: &Path) -> Result<Vec<Document>> {
    corpus_files(dir, InputFormat::OneDocPerFile)?
        .into_iter()
        .map(|path| {
            let text = fs::read_to_string(&path).map_err(|e| Error::read(&path, e))?;
            let name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok(Document::new(name.clone(), &name, text))
        })
        .collect()
}

fn load_lines(path: &Path) -> Result<Vec<Document>> {
    let content = fs::read_to_string(path).map_err(|e| Error::read(path, e))?;
    Ok(content
        .lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| Document::new((i + 1).to_string(), line, line))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerConfig {
    pub lowercase: bool,
    pub min_token_length: usize,
    pub stopwords: BTreeSet<String>,
    /// variant → canonical term, applied after case folding.
    pub synonyms: BTreeMap<String, String>,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            lowercase: true,
            min_token_length: 1,
            stopwords: default_stopwords(),
            synonyms: BTreeMap::new(),
        }
    }
}

pub fn default_stopwords() -> BTreeSet<String> {
    parse_stopwords(DEFAULT_STOPWORDS)
}

/// One term per line; blank lines and `#` comments are ignored.
pub fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

pub fn load_stopwords(path: &Path) -> Result<BTreeSet<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::read(path, e))?;
    Ok(parse_stopwords(&text))
}

/// `variant<TAB>canonical` per line. Chains are resolved to their final
/// canonical term; cycles and multi-token canonicals are rejected.
pub fn parse_synonyms(text: &str, lowercase: bool, origin: &Path) -> Result<BTreeMap<String, String>> {
    let fold = |s: &str| if lowercase { s.to_lowercase() } else { s.to_string() };
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (variant, canonical) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(origin, i + 1, "expected `variant<TAB>canonical`"))?;
        let (variant, canonical) = (fold(variant.trim()), fold(canonical.trim()));
        for term in [&variant, &canonical] {
            if split_tokens(term).ne(std::iter::once(term.as_str())) {
                return Err(Error::parse(origin, i + 1, format!("'{term}' is not a single token")));
            }
        }
        if variant != canonical {
            map.insert(variant, canonical);
        }
    }
    let mut resolved = BTreeMap::new();
    for variant in map.keys() {
        let mut target = &map[variant];
        let mut hops = 0;
        while let Some(next) = map.get(target) {
            target = next;
            hops += 1;
            if hops > map.len() {
                return Err(Error::parse(origin, 0, format!("synonym cycle through '{variant}'")));
            }
        }
        resolved.insert(variant.clone(), target.clone());
    }
    Ok(resolved)
}

pub fn load_synonyms(path: &Path, lowercase: bool) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::read(path, e))?;
    parse_synonyms(&text, lowercase, path)
}

/// Maximal runs of Unicode letters and digits.
fn split_tokens(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty())
}

pub fn tokenize(doc: &Document, cfg: &TokenizerConfig) -> Vec<String> {
    tokenize_text(&doc.text, cfg)
}

pub fn tokenize_text(text: &str, cfg: &TokenizerConfig) -> Vec<String> {
    split_tokens(text)
        .filter_map(|raw| {
            let mut token = if cfg.lowercase { raw.to_lowercase() } else { raw.to_string() };
            if let Some(canonical) = cfg.synonyms.get(&token) {
                token = canonical.clone();
            }
            let keep = token.chars().count() >= cfg.min_token_length.max(1)
                && !cfg.stopwords.contains(&token.to_lowercase());
            keep.then_some(token)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabEntry {
    pub term: String,
    pub total_freq: u64,
    pub doc_freq: u64,
}

/// Terms ordered by descending total frequency, ties broken
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    entries: Vec<VocabEntry>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn entries(&self) -> &[VocabEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.term.as_str())
    }
}

fn tokenize_corpus(corpus: &Corpus, cfg: &TokenizerConfig) -> Vec<Vec<String>> {
    corpus.documents.par_iter().map(|d| tokenize(d, cfg)).collect()
}

pub fn build_vocabulary(corpus: &Corpus, cfg: &TokenizerConfig) -> Result<Vocabulary> {
    vocabulary_from_tokens(&tokenize_corpus(corpus, cfg))
}

fn vocabulary_from_tokens(tokenized: &[Vec<String>]) -> Result<Vocabulary> {
    let mut counts: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for tokens in tokenized {
        let mut seen = BTreeSet::new();
        for t in tokens {
            let entry = counts.entry(t.as_str()).or_default();
            entry.0 += 1;
            if seen.insert(t.as_str()) {
                entry.1 += 1;
            }
        }
    }
    if counts.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let mut entries: Vec<VocabEntry> = counts
        .into_iter()
        .map(|(term, (total_freq, doc_freq))| VocabEntry {
            term: term.to_string(),
            total_freq,
            doc_freq,
        })
        .collect();
    entries.sort_by(|a, b| b.total_freq.cmp(&a.total_freq).then_with(|| a.term.cmp(&b.term)));
    let index = entries.iter().enumerate().map(|(i, e)| (e.term.clone(), i)).collect();
    Ok(Vocabulary { entries, index })
}

/// Rows and columns removed because their margin was zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PruneReport {
    pub documents: Vec<String>,
    pub terms: Vec<String>,
}

impl PruneReport {
    pub fn is_empty(&self) -> bool {
        self.documents.is_empty() && self.terms.is_empty()
    }
}

/// Documents × terms occurrence counts with cached margins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordDocMatrix {
    counts: Array2<u64>,
    doc_ids: Vec<String>,
    terms: Vec<String>,
    row_margins: Vec<u64>,
    col_margins: Vec<u64>,
    total: u64,
}

impl WordDocMatrix {
    /// Builds a matrix from raw counts, pruning zero rows and columns.
    pub fn from_counts(
        doc_ids: Vec<String>,
        terms: Vec<String>,
        counts: Array2<u64>,
    ) -> Result<(Self, PruneReport)> {
        if counts.nrows() != doc_ids.len() || counts.ncols() != terms.len() {
            return Err(Error::InvalidArgument(format!(
                "count matrix is {}x{} but {} row and {} column labels were given",
                counts.nrows(),
                counts.ncols(),
                doc_ids.len(),
                terms.len()
            )));
        }
        for labels in [&doc_ids, &terms] {
            let mut seen = BTreeSet::new();
            for l in labels.iter() {
                if !seen.insert(l) {
                    return Err(Error::DuplicateLabel(l.clone()));
                }
            }
        }
        let keep_rows: Vec<usize> = (0..counts.nrows()).filter(|&i| counts.row(i).sum() > 0).collect();
        let keep_cols: Vec<usize> = (0..counts.ncols()).filter(|&k| counts.column(k).sum() > 0).collect();
        let dropped = |kept: &[usize], labels: &[String]| {
            let mut mask = vec![true; labels.len()];
            kept.iter().for_each(|&i| mask[i] = false);
            labels.iter().zip(mask).filter(|(_, d)| *d).map(|(l, _)| l.clone()).collect()
        };
        let report = PruneReport {
            documents: dropped(&keep_rows, &doc_ids),
            terms: dropped(&keep_cols, &terms),
        };
        if keep_rows.is_empty() || keep_cols.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let pruned = counts.select(Axis(0), &keep_rows).select(Axis(1), &keep_cols);
        let doc_ids = keep_rows.iter().map(|&i| doc_ids[i].clone()).collect();
        let terms = keep_cols.iter().map(|&k| terms[k].clone()).collect();
        Ok((Self::with_margins(doc_ids, terms, pruned), report))
    }

    fn with_margins(doc_ids: Vec<String>, terms: Vec<String>, counts: Array2<u64>) -> Self {
        let row_margins: Vec<u64> = counts.rows().into_iter().map(|r| r.sum()).collect();
        let col_margins: Vec<u64> = counts.columns().into_iter().map(|c| c.sum()).collect();
        let total = row_margins.iter().sum();
        WordDocMatrix {
            counts,
            doc_ids,
            terms,
            row_margins,
            col_margins,
            total,
        }
    }

    pub fn counts(&self) -> &Array2<u64> {
        &self.counts
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn n_docs(&self) -> usize {
        self.counts.nrows()
    }

    pub fn n_terms(&self) -> usize {
        self.counts.ncols()
    }

    pub fn row_margins(&self) -> &[u64] {
        &self.row_margins
    }

    pub fn col_margins(&self) -> &[u64] {
        &self.col_margins
    }

    pub fn grand_total(&self) -> u64 {
        self.total
    }

    /// Number of documents in which each term occurs.
    pub fn doc_freqs(&self) -> Vec<u64> {
        self.counts
            .columns()
            .into_iter()
            .map(|c| c.iter().filter(|&&v| v > 0).count() as u64)
            .collect()
    }

    pub fn to_f64(&self) -> Array2<f64> {
        self.counts.mapv(|v| v as f64)
    }

    /// Presence/absence version of the matrix.
    pub fn binarized(&self) -> Self {
        let counts = self.counts.mapv(|v| u64::from(v > 0));
        Self::with_margins(self.doc_ids.clone(), self.terms.clone(), counts)
    }

    /// Restricts the matrix to the named terms, in the given order. Rows left
    /// empty by the restriction are kept so that documents stay aligned.
    pub fn select_terms(&self, terms: &[String]) -> Result<Array2<u64>> {
        let positions: HashMap<&str, usize> =
            self.terms.iter().enumerate().map(|(k, t)| (t.as_str(), k)).collect();
        let cols = terms
            .iter()
            .map(|t| {
                positions
                    .get(t.as_str())
                    .copied()
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown term '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.counts.select(Axis(1), &cols))
    }
}

/// Counts every vocabulary term in every document, then prunes rows and
/// columns with zero margins.
pub fn build_word_doc_matrix(
    corpus: &Corpus,
    vocab: &Vocabulary,
    cfg: &TokenizerConfig,
) -> Result<(WordDocMatrix, PruneReport)> {
    let tokenized = tokenize_corpus(corpus, cfg);
    matrix_from_tokens(corpus, vocab, &tokenized)
}

fn matrix_from_tokens(
    corpus: &Corpus,
    vocab: &Vocabulary,
    tokenized: &[Vec<String>],
) -> Result<(WordDocMatrix, PruneReport)> {
    let mut counts = Array2::<u64>::zeros((corpus.len(), vocab.len()));
    for (i, tokens) in tokenized.iter().enumerate() {
        for t in tokens {
            if let Some(k) = vocab.position(t) {
                counts[[i, k]] += 1;
            }
        }
    }
    let doc_ids = corpus.documents.iter().map(|d| d.id.clone()).collect();
    let terms = vocab.entries.iter().map(|e| e.term.clone()).collect();
    WordDocMatrix::from_counts(doc_ids, terms, counts)
}

/// Vocabulary and matrix from a single tokenization pass.
pub fn build_all(corpus: &Corpus, cfg: &TokenizerConfig) -> Result<(Vocabulary, WordDocMatrix, PruneReport)> {
    let tokenized = tokenize_corpus(corpus, cfg);
    let vocab = vocabulary_from_tokens(&tokenized)?;
    let (matrix, pruned) = matrix_from_tokens(corpus, &vocab, &tokenized)?;
    Ok((vocab, matrix, pruned))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn cfg_with(stop: &[&str]) -> TokenizerConfig {
        TokenizerConfig {
            stopwords: stop.iter().map(|s| s.to_string()).collect(),
            ..TokenizerConfig::default()
        }
    }

    #[test]
    fn tokenize_examples() {
        let cfg = cfg_with(&["the"]);
        let doc = Document::new("1", "x", "The Impact Factor.");
        assert_eq!(tokenize(&doc, &cfg), ["impact", "factor"]);
        assert!(tokenize_text("", &cfg).is_empty());
        let cfg = TokenizerConfig {
            min_token_length: 2,
            ..cfg_with(&[])
        };
        assert_eq!(tokenize_text("A1 B2 c", &cfg), ["a1", "b2"]);
    }

    #[test]
    fn tokenize_keeps_case_when_asked() {
        let cfg = TokenizerConfig {
            lowercase: false,
            ..cfg_with(&["the"])
        };
        assert_eq!(tokenize_text("The Impact of impact", &cfg), ["Impact", "of", "impact"]);
    }

    #[test]
    fn unicode_letters_form_tokens() {
        let cfg = cfg_with(&[]);
        assert_eq!(tokenize_text("naïve—café, Zürich's", &cfg), ["naïve", "café", "zürich", "s"]);
    }

    #[test]
    fn synonyms_map_before_filtering() {
        let syn = parse_synonyms("factors\tfactor\nimpacts\timpact\n", true, Path::new("syn")).unwrap();
        let cfg = TokenizerConfig {
            synonyms: syn,
            ..cfg_with(&[])
        };
        assert_eq!(tokenize_text("Factors impacts factor", &cfg), ["factor", "impact", "factor"]);
    }

    #[test]
    fn synonym_chains_and_errors() {
        let syn = parse_synonyms("a\tb\nb\tc\n", true, Path::new("s")).unwrap();
        assert_eq!(syn["a"], "c");
        assert_eq!(syn["b"], "c");
        assert!(parse_synonyms("a\tb\nb\ta\n", true, Path::new("s")).is_err());
        assert!(parse_synonyms("a b\n", true, Path::new("s")).is_err());
        assert!(parse_synonyms("a\tb c\n", true, Path::new("s")).is_err());
    }

    #[test]
    fn vocabulary_counts_and_order() {
        let corpus = Corpus::from_texts(&["a a b", "b"]).unwrap();
        let vocab = build_vocabulary(&corpus, &cfg_with(&[])).unwrap();
        let got: Vec<_> = vocab.entries().iter().map(|e| (e.term.as_str(), e.total_freq, e.doc_freq)).collect();
        assert_eq!(got, [("a", 2, 1), ("b", 2, 2)]);
    }

    #[test]
    fn all_stopwords_is_an_error() {
        let corpus = Corpus::from_texts(&["the of", "and"]).unwrap();
        assert!(matches!(
            build_vocabulary(&corpus, &TokenizerConfig::default()),
            Err(Error::EmptyVocabulary)
        ));
    }

    #[test]
    fn matrix_example() {
        let corpus = Corpus::from_texts(&["a a b", "b"]).unwrap();
        let cfg = cfg_with(&[]);
        let vocab = build_vocabulary(&corpus, &cfg).unwrap();
        let (m, pruned) = build_word_doc_matrix(&corpus, &vocab, &cfg).unwrap();
        assert_eq!(m.counts(), &array![[2, 1], [0, 1]]);
        assert_eq!(m.row_margins(), [3, 1]);
        assert_eq!(m.col_margins(), [2, 2]);
        assert_eq!(m.grand_total(), 4);
        assert!(pruned.is_empty());
    }

    #[test]
    fn single_document_matrix() {
        let corpus = Corpus::from_texts(&["x y y z"]).unwrap();
        let (_, m, _) = build_all(&corpus, &cfg_with(&[])).unwrap();
        assert_eq!(m.n_docs(), 1);
        assert_eq!(m.n_terms(), 3);
        assert_eq!(m.row_margins()[0], m.grand_total());
    }

    #[test]
    fn empty_documents_are_pruned_and_reported() {
        let corpus = Corpus::from_texts(&["alpha beta", "the of", "beta"]).unwrap();
        let (_, m, pruned) = build_all(&corpus, &TokenizerConfig::default()).unwrap();
        assert_eq!(m.doc_ids(), ["1", "3"]);
        assert_eq!(pruned.documents, ["2"]);
        assert!(pruned.terms.is_empty());
    }

    #[test]
    fn from_counts_prunes_zero_columns() {
        let (m, report) = WordDocMatrix::from_counts(
            vec!["d1".into(), "d2".into()],
            vec!["a".into(), "b".into(), "c".into()],
            array![[1, 0, 2], [0, 0, 1]],
        )
        .unwrap();
        assert_eq!(m.terms(), ["a", "c"]);
        assert_eq!(report.terms, ["b"]);
        assert_eq!(m.doc_freqs(), [1, 2]);
    }

    #[test]
    fn binarized_margins() {
        let corpus = Corpus::from_texts(&["a a b", "b"]).unwrap();
        let (_, m, _) = build_all(&corpus, &cfg_with(&[])).unwrap();
        let b = m.binarized();
        assert_eq!(b.counts(), &array![[1, 1], [0, 1]]);
        assert_eq!(b.col_margins(), [1, 2]);
    }

    #[test]
    fn load_directory_and_lines() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("b.txt"), "beta").unwrap();
        fs::write(dir.path().join("a.txt"), "alpha").unwrap();
        fs::write(dir.path().join(".hidden"), "x").unwrap();
        let corpus = load_corpus(dir.path(), InputFormat::OneDocPerFile).unwrap();
        let ids: Vec<_> = corpus.documents().iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, ["a.txt", "b.txt"]);

        let lines = dir.path().join("docs.lines");
        fs::write(&lines, "first doc\n\nsecond\nthird one\n").unwrap();
        let corpus = load_corpus(&lines, InputFormat::OneDocPerLine).unwrap();
        assert_eq!(corpus.len(), 3);
        assert_eq!(corpus.documents()[1].id, "3");
    }

    #[test]
    fn empty_sources_fail() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_corpus(dir.path(), InputFormat::OneDocPerFile).unwrap_err();
        assert!(err.to_string().contains("empty corpus"));
        let missing = dir.path().join("nope");
        let err = load_corpus(&missing, InputFormat::OneDocPerLine).unwrap_err();
        assert!(err.is_io());
        assert!(err.to_string().contains("nope"));
    }

    #[test]
    fn labels_truncate_to_forty_chars() {
        let long = "x".repeat(100);
        let d = Document::new("1", &long, "");
        assert_eq!(d.label.chars().count(), LABEL_MAX_CHARS);
    }
}
