//! Article profiling and author recommendation.
//!
//! The pipeline runs in five stages, each usable on its own:
//!
//! 1. [`corpus`] — parse scraped article files, clean the text, drop
//!    duplicates and junk rows, persist a canonical corpus.
//! 2. [`text`] — tokenization, sentence counting, syllable heuristic and
//!    lexicon polarity used by every downstream feature.
//! 3. [`features`] — per-article readability, difficulty, size and
//!    sentiment buckets plus model-predicted domain and writer type.
//! 4. [`classify`] — a from-scratch TF-IDF vectorizer and multinomial
//!    naive Bayes classifier, instantiated for both the domain and the
//!    writer-type label sets.
//! 5. [`recommend`] — one-hot encoding of the selected feature classes
//!    and brute-force cosine ranking of authors against a query sample.

pub mod classify;
pub mod corpus;
pub mod features;
pub mod recommend;
pub mod text;

pub use classify::{EvalReport, NbClassifier, TfidfVectorizer};
pub use corpus::{CleanArticle, FilterReport, RawArticle};
pub use features::ArticleFeatures;
pub use recommend::{OheIndex, OheSchema, Recommendation};
pub use text::{PolarityLexicon, Token};
