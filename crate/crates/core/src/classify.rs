//! From-scratch TF-IDF vectorizer and multinomial naive Bayes classifier.
//!
//! The same code path serves both label sets used by the pipeline (the
//! five article domains and the sixteen writer types); only the training
//! data differs. Training is deterministic: the vocabulary is sorted
//! lexicographically, labels are sorted, and identical inputs produce
//! byte-identical model files.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::Token;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Tokens shorter than this many characters never enter the vocabulary.
const MIN_TOKEN_LEN: usize = 2;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("no documents to fit")]
    NoDocuments,
    #[error("no usable vocabulary after stopword and length filtering")]
    EmptyVocabulary,
    #[error("{vectors} vectors but {labels} labels")]
    LengthMismatch { vectors: usize, labels: usize },
    #[error("training needs at least two distinct labels, got only {0:?}")]
    SingleClass(String),
    #[error("smoothing alpha must be positive, got {0}")]
    NonPositiveAlpha(f64),
    #[error("evaluation set is empty")]
    EmptyEvalSet,
    #[error("evaluation label {0:?} is unknown to the model")]
    UnknownLabel(String),
    #[error("unsupported model format version {found}, expected {expected}")]
    ModelVersion { found: u32, expected: u32 },
    #[error("malformed model payload: {0}")]
    ModelFormat(String),
}

/// Sparse non-negative weight vector over vectorizer columns, entries
/// sorted by column index.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVec {
    entries: Vec<(usize, f64)>,
}

impl SparseVec {
    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    fn l2_normalized(mut self) -> Self {
        let norm = self
            .entries
            .iter()
            .map(|(_, w)| w * w)
            .sum::<f64>()
            .sqrt();
        if norm > 0.0 {
            for (_, w) in &mut self.entries {
                *w /= norm;
            }
        }
        self
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|&(c, w)| (c, w * factor)).collect(),
        }
    }
}

/// TF-IDF vocabulary and per-column smoothed inverse document frequency.
///
/// `idf[j] = ln((1 + doc_count) / (1 + df_j)) + 1`, which keeps every
/// weight strictly positive so the naive Bayes sums stay well-defined on
/// fractional counts.
#[derive(Debug, Clone, PartialEq)]
pub struct TfidfVectorizer {
    vocabulary: BTreeMap<String, usize>,
    idf: Vec<f64>,
    doc_count: usize,
    stopwords: BTreeSet<String>,
}

impl TfidfVectorizer {
    pub fn vocabulary(&self) -> &BTreeMap<String, usize> {
        &self.vocabulary
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn vocab_size(&self) -> usize {
        self.vocabulary.len()
    }
}

fn usable(token: &str, stopwords: &BTreeSet<String>) -> bool {
    token.chars().count() >= MIN_TOKEN_LEN && !stopwords.contains(token)
}

/// Build the vocabulary (all non-stopword tokens of length >= 2, sorted)
/// and smoothed idf weights from the training documents.
pub fn fit_tfidf(
    docs: &[Vec<Token>],
    stopwords: &BTreeSet<String>,
) -> Result<TfidfVectorizer, ClassifyError> {
    if docs.is_empty() {
        return Err(ClassifyError::NoDocuments);
    }

    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for token in doc {
            if usable(&token.surface, stopwords) {
                seen.insert(&token.surface);
            }
        }
        for token in seen {
            *df.entry(token).or_insert(0) += 1;
        }
    }
    if df.is_empty() {
        return Err(ClassifyError::EmptyVocabulary);
    }

    let doc_count = docs.len();
    let mut vocabulary = BTreeMap::new();
    let mut idf = Vec::with_capacity(df.len());
    for (column, (token, df_count)) in df.into_iter().enumerate() {
        vocabulary.insert(token.to_string(), column);
        idf.push(((1 + doc_count) as f64 / (1 + df_count) as f64).ln() + 1.0);
    }

    Ok(TfidfVectorizer {
        vocabulary,
        idf,
        doc_count,
        stopwords: stopwords.clone(),
    })
}

/// Weight a document: term count times idf per column, then L2-normalize.
/// Out-of-vocabulary tokens are ignored; an all-OOV document stays the
/// zero vector.
pub fn transform(vectorizer: &TfidfVectorizer, doc: &[Token]) -> SparseVec {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for token in doc {
        if let Some(&column) = vectorizer.vocabulary.get(&token.surface) {
            *counts.entry(column).or_insert(0) += 1;
        }
    }
    let entries = counts
        .into_iter()
        .map(|(column, count)| (column, count as f64 * vectorizer.idf[column]))
        .collect();
    SparseVec { entries }.l2_normalized()
}

/// Multinomial naive Bayes over TF-IDF weights, with lexicographically
/// sorted labels and additive smoothing.
#[derive(Debug, Clone, PartialEq)]
pub struct NbClassifier {
    labels: Vec<String>,
    log_prior: Vec<f64>,
    log_likelihood: Vec<Vec<f64>>,
    alpha: f64,
    vectorizer: TfidfVectorizer,
}

impl NbClassifier {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn log_prior(&self) -> &[f64] {
        &self.log_prior
    }

    pub fn log_likelihood(&self) -> &[Vec<f64>] {
        &self.log_likelihood
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn vectorizer(&self) -> &TfidfVectorizer {
        &self.vectorizer
    }
}

/// Train on pre-transformed vectors. `log_likelihood[c][j]` is
/// `ln((sum of column j over class c + alpha) / (total class-c mass + alpha * V))`,
/// so the per-class likelihoods exponentiate back to a distribution.
pub fn train_nb(
    vectorizer: TfidfVectorizer,
    vectors: &[SparseVec],
    labels: &[String],
    alpha: f64,
) -> Result<NbClassifier, ClassifyError> {
    if vectors.len() != labels.len() {
        return Err(ClassifyError::LengthMismatch {
            vectors: vectors.len(),
            labels: labels.len(),
        });
    }
    if vectors.is_empty() {
        return Err(ClassifyError::NoDocuments);
    }
    if alpha <= 0.0 || !alpha.is_finite() {
        return Err(ClassifyError::NonPositiveAlpha(alpha));
    }

    let class_names: Vec<String> = labels
        .iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .cloned()
        .collect();
    if class_names.len() < 2 {
        return Err(ClassifyError::SingleClass(class_names[0].clone()));
    }

    let vocab_size = vectorizer.vocab_size();
    let class_index: HashMap<&str, usize> = class_names
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();

    let mut class_counts = vec![0usize; class_names.len()];
    let mut feature_sums = vec![vec![0.0f64; vocab_size]; class_names.len()];
    for (vector, label) in vectors.iter().zip(labels) {
        let c = class_index[label.as_str()];
        class_counts[c] += 1;
        for &(column, weight) in &vector.entries {
            feature_sums[c][column] += weight;
        }
    }

    let total = vectors.len() as f64;
    let log_prior = class_counts
        .iter()
        .map(|&n| (n as f64 / total).ln())
        .collect();
    let log_likelihood = feature_sums
        .iter()
        .map(|sums| {
            let class_mass: f64 = sums.iter().sum();
            let denom = class_mass + alpha * vocab_size as f64;
            sums.iter().map(|&s| ((s + alpha) / denom).ln()).collect()
        })
        .collect();

    Ok(NbClassifier {
        labels: class_names,
        log_prior,
        log_likelihood,
        alpha,
        vectorizer,
    })
}

/// Predict the label of a tokenized document, returning the winning label
/// and the unnormalized per-label log-posteriors. Ties go to the
/// lexicographically smallest label; an all-OOV document falls back to
/// the priors.
pub fn predict(model: &NbClassifier, doc: &[Token]) -> (String, Vec<(String, f64)>) {
    let vector = transform(&model.vectorizer, doc);
    let posteriors: Vec<(String, f64)> = model
        .labels
        .iter()
        .enumerate()
        .map(|(c, label)| {
            let mut score = model.log_prior[c];
            for &(column, weight) in &vector.entries {
                score += weight * model.log_likelihood[c][column];
            }
            (label.clone(), score)
        })
        .collect();

    // labels are sorted, so strict > keeps the smallest label on ties
    let mut best = 0usize;
    for c in 1..posteriors.len() {
        if posteriors[c].1 > posteriors[best].1 {
            best = c;
        }
    }
    (posteriors[best].0.clone(), posteriors)
}

/// Per-class precision, recall and F1 (0 when the denominator is 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Accuracy, per-class metrics, macro-F1 and the confusion matrix
/// (rows: true label, columns: predicted label, both in model label
/// order). Confusion entries always sum to the evaluation-set size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub labels: Vec<String>,
    pub accuracy: f64,
    pub per_class: Vec<ClassMetrics>,
    pub macro_f1: f64,
    pub confusion: Vec<Vec<usize>>,
}

pub fn evaluate(
    model: &NbClassifier,
    labeled_docs: &[(Vec<Token>, String)],
) -> Result<EvalReport, ClassifyError> {
    if labeled_docs.is_empty() {
        return Err(ClassifyError::EmptyEvalSet);
    }
    let label_index: HashMap<&str, usize> = model
        .labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();

    let n = model.labels.len();
    let mut confusion = vec![vec![0usize; n]; n];
    for (doc, label) in labeled_docs {
        let truth = *label_index
            .get(label.as_str())
            .ok_or_else(|| ClassifyError::UnknownLabel(label.clone()))?;
        let (predicted, _) = predict(model, doc);
        confusion[truth][label_index[predicted.as_str()]] += 1;
    }

    let total: usize = labeled_docs.len();
    let trace: usize = (0..n).map(|i| confusion[i][i]).sum();
    let accuracy = trace as f64 / total as f64;

    let mut per_class = Vec::with_capacity(n);
    for c in 0..n {
        let tp = confusion[c][c];
        let predicted: usize = (0..n).map(|r| confusion[r][c]).sum();
        let actual: usize = confusion[c].iter().sum();
        let precision = if predicted == 0 { 0.0 } else { tp as f64 / predicted as f64 };
        let recall = if actual == 0 { 0.0 } else { tp as f64 / actual as f64 };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        per_class.push(ClassMetrics {
            label: model.labels[c].clone(),
            precision,
            recall,
            f1,
        });
    }
    let macro_f1 = per_class.iter().map(|m| m.f1).sum::<f64>() / n as f64;

    Ok(EvalReport {
        labels: model.labels.clone(),
        accuracy,
        per_class,
        macro_f1,
        confusion,
    })
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    labels: Vec<String>,
    log_prior: Vec<f64>,
    vocabulary: BTreeMap<String, usize>,
    idf: Vec<f64>,
    log_likelihood: Vec<Vec<f64>>,
    alpha: f64,
    doc_count: usize,
}

/// Serialize to canonical JSON: fixed key order, sorted vocabulary,
/// shortest round-trip float formatting. Identical models produce
/// identical bytes.
pub fn save_model(model: &NbClassifier) -> String {
    let file = ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        labels: model.labels.clone(),
        log_prior: model.log_prior.clone(),
        vocabulary: model.vectorizer.vocabulary.clone(),
        idf: model.vectorizer.idf.clone(),
        log_likelihood: model.log_likelihood.clone(),
        alpha: model.alpha,
        doc_count: model.vectorizer.doc_count,
    };
    let mut out = serde_json::to_string(&file).expect("model serializes");
    out.push('\n');
    out
}

/// Load a saved model. The stopword set is a fit-time input and is not
/// persisted; a loaded model predicts but cannot be refitted.
pub fn load_model(payload: &str) -> Result<NbClassifier, ClassifyError> {
    let file: ModelFile =
        serde_json::from_str(payload).map_err(|e| ClassifyError::ModelFormat(e.to_string()))?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(ClassifyError::ModelVersion {
            found: file.format_version,
            expected: MODEL_FORMAT_VERSION,
        });
    }
    let vocab_size = file.vocabulary.len();
    if file.idf.len() != vocab_size {
        return Err(ClassifyError::ModelFormat(format!(
            "idf length {} does not match vocabulary size {vocab_size}",
            file.idf.len()
        )));
    }
    if file.labels.len() != file.log_prior.len() || file.labels.len() != file.log_likelihood.len()
    {
        return Err(ClassifyError::ModelFormat(
            "label, prior and likelihood lengths disagree".into(),
        ));
    }
    if file.log_likelihood.iter().any(|row| row.len() != vocab_size) {
        return Err(ClassifyError::ModelFormat(
            "likelihood row width does not match vocabulary size".into(),
        ));
    }

    Ok(NbClassifier {
        labels: file.labels,
        log_prior: file.log_prior,
        log_likelihood: file.log_likelihood,
        alpha: file.alpha,
        vectorizer: TfidfVectorizer {
            vocabulary: file.vocabulary,
            idf: file.idf,
            doc_count: file.doc_count,
            stopwords: BTreeSet::new(),
        },
    })
}

/// Parse a stopword list: one token per line, `#` comments and blank
/// lines ignored, everything lowercased.
pub fn parse_stopwords(content: &str) -> BTreeSet<String> {
    content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// Deterministic train/eval split shared by every classifier the pipeline
/// trains: records whose id is divisible by 5 are held out, the rest
/// train the model, and the held-out fifth produces the report.
pub fn train_eval_split(
    ids: &[u64],
    docs: &[Vec<Token>],
    labels: &[String],
    stopwords: &BTreeSet<String>,
    alpha: f64,
) -> Result<(NbClassifier, EvalReport), ClassifyError> {
    if ids.len() != docs.len() || docs.len() != labels.len() {
        return Err(ClassifyError::LengthMismatch {
            vectors: docs.len(),
            labels: labels.len(),
        });
    }

    let mut train_docs = Vec::new();
    let mut train_labels = Vec::new();
    let mut eval_docs = Vec::new();
    for ((id, doc), label) in ids.iter().zip(docs).zip(labels) {
        if id % 5 == 0 {
            eval_docs.push((doc.clone(), label.clone()));
        } else {
            train_docs.push(doc.clone());
            train_labels.push(label.clone());
        }
    }

    let vectorizer = fit_tfidf(&train_docs, stopwords)?;
    let vectors: Vec<SparseVec> = train_docs.iter().map(|d| transform(&vectorizer, d)).collect();
    let model = train_nb(vectorizer, &vectors, &train_labels, alpha)?;
    let report = evaluate(&model, &eval_docs)?;
    Ok((model, report))
}
