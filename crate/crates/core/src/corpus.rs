//! Parsing, cleaning and filtering of pre-scraped article files, plus the
//! canonical JSONL corpus format every later stage reads.
//!
//! Scrapes arrive as CSV or JSONL with the columns `url`, `headline`,
//! `body`, `sub_domain`, `domain`, `author`. Cleaning normalizes
//! punctuation and whitespace; filtering drops bodies under 50 words,
//! records without an author, and exact duplicate bodies (first
//! occurrence wins). Survivors get consecutive ids in source order, so
//! the persisted corpus is byte-reproducible.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Minimum cleaned-body word count for an article to be kept.
pub const MIN_WORD_COUNT: usize = 50;

/// The five article domains the pipeline knows about.
pub const DOMAINS: [&str; 5] = ["Finance", "Leadership", "Marketing", "Strategy", "Technology"];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("input is not valid UTF-8 (first bad byte at offset {offset})")]
    Decode { offset: usize },
    #[error("missing required column {name:?} in header")]
    MissingColumn { name: &'static str },
    #[error("cannot read csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: invalid corpus record: {message}")]
    Record { line: usize, message: String },
}

/// One record exactly as scraped. Only `headline` and `body` are required;
/// everything else may be absent in ragged scrapes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawArticle {
    pub url: String,
    pub headline: String,
    pub body: String,
    pub sub_domain: Option<String>,
    pub domain: Option<String>,
    pub author: Option<String>,
}

/// A cleaned, filtered article. `word_count` counts whitespace-separated
/// tokens of the cleaned body and is always >= [`MIN_WORD_COUNT`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanArticle {
    pub id: u64,
    pub author: String,
    pub headline: String,
    pub body: String,
    pub domain: Option<String>,
    pub word_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    Duplicate,
    Short,
    NoAuthor,
}

/// Audit of one filtering pass: `kept + dropped_* == input record count`,
/// with the dropped input positions listed individually.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    pub kept: usize,
    pub dropped_duplicate: usize,
    pub dropped_short: usize,
    pub dropped_no_author: usize,
    /// (1-based input record number, reason) per dropped record.
    pub dropped_ids: Vec<(usize, DropReason)>,
}

impl FilterReport {
    pub fn total_dropped(&self) -> usize {
        self.dropped_duplicate + self.dropped_short + self.dropped_no_author
    }
}

/// A skipped input row: the record could not be used but parsing went on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    /// 1-based data record number (CSV) or line number (JSONL).
    pub row: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParseOutcome {
    pub articles: Vec<RawArticle>,
    pub row_errors: Vec<RowError>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Csv,
    Jsonl,
}

/// Parse a scraped corpus file. Rows missing a non-empty `headline` or
/// `body` are skipped and reported; record order is preserved.
pub fn parse_corpus_file(bytes: &[u8], format: CorpusFormat) -> Result<ParseOutcome, CorpusError> {
    let content = std::str::from_utf8(bytes).map_err(|e| CorpusError::Decode {
        offset: e.valid_up_to(),
    })?;
    let content = content.strip_prefix('\u{feff}').unwrap_or(content);
    match format {
        CorpusFormat::Csv => parse_csv(content),
        CorpusFormat::Jsonl => parse_jsonl(content),
    }
}

fn opt_field(value: Option<&str>) -> Option<String> {
    value
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(str::to_string)
}

fn parse_csv(content: &str) -> Result<ParseOutcome, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(content.as_bytes());
    let headers = reader.headers()?.clone();
    let col = |name: &'static str| headers.iter().position(|h| h.trim() == name);

    let url_col = col("url");
    let headline_col = col("headline").ok_or(CorpusError::MissingColumn { name: "headline" })?;
    let body_col = col("body").ok_or(CorpusError::MissingColumn { name: "body" })?;
    let sub_domain_col = col("sub_domain");
    let domain_col = col("domain");
    let author_col = col("author");

    let mut outcome = ParseOutcome::default();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                outcome.row_errors.push(RowError {
                    row,
                    message: format!("unreadable csv record: {e}"),
                });
                continue;
            }
        };
        let field = |c: Option<usize>| c.and_then(|c| record.get(c));
        let headline = field(Some(headline_col)).map(str::trim).unwrap_or("");
        let body = field(Some(body_col)).map(str::trim).unwrap_or("");
        if headline.is_empty() || body.is_empty() {
            let name = if headline.is_empty() { "headline" } else { "body" };
            outcome.row_errors.push(RowError {
                row,
                message: format!("missing required column {name:?}"),
            });
            continue;
        }
        outcome.articles.push(RawArticle {
            url: field(url_col).unwrap_or("").trim().to_string(),
            headline: headline.to_string(),
            body: body.to_string(),
            sub_domain: opt_field(field(sub_domain_col)),
            domain: opt_field(field(domain_col)),
            author: opt_field(field(author_col)),
        });
    }
    Ok(outcome)
}

#[derive(Deserialize)]
struct RawArticleLine {
    #[serde(default)]
    url: String,
    #[serde(default)]
    headline: Option<String>,
    #[serde(default)]
    body: Option<String>,
    #[serde(default)]
    sub_domain: Option<String>,
    #[serde(default)]
    domain: Option<String>,
    #[serde(default)]
    author: Option<String>,
}

fn parse_jsonl(content: &str) -> Result<ParseOutcome, CorpusError> {
    let mut outcome = ParseOutcome::default();
    for (idx, line) in content.lines().enumerate() {
        let row = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: RawArticleLine = match serde_json::from_str(line) {
            Ok(p) => p,
            Err(e) => {
                outcome.row_errors.push(RowError {
                    row,
                    message: format!("invalid json: {e}"),
                });
                continue;
            }
        };
        let headline = parsed.headline.as_deref().map(str::trim).unwrap_or("");
        let body = parsed.body.as_deref().map(str::trim).unwrap_or("");
        if headline.is_empty() || body.is_empty() {
            let name = if headline.is_empty() { "headline" } else { "body" };
            outcome.row_errors.push(RowError {
                row,
                message: format!("missing required column {name:?}"),
            });
            continue;
        }
        outcome.articles.push(RawArticle {
            url: parsed.url.trim().to_string(),
            headline: headline.to_string(),
            body: body.to_string(),
            sub_domain: opt_field(parsed.sub_domain.as_deref()),
            domain: opt_field(parsed.domain.as_deref()),
            author: opt_field(parsed.author.as_deref()),
        });
    }
    Ok(outcome)
}

/// Clean scraped text. In order: normalize curly quotes, dashes, ellipses
/// and non-breaking spaces to their ASCII forms; drop non-whitespace
/// control characters and U+FFFD; delete apostrophes between letters;
/// collapse every whitespace run to one space; trim. Idempotent.
pub fn clean_text(raw: &str) -> String {
    // 1. punctuation normalization
    let mut normalized = String::with_capacity(raw.len());
    for ch in raw.chars() {
        match ch {
            '\u{2018}' | '\u{2019}' => normalized.push('\''),
            '\u{201C}' | '\u{201D}' => normalized.push('"'),
            '\u{2013}' | '\u{2014}' => normalized.push('-'),
            '\u{2026}' => normalized.push_str("..."),
            '\u{00A0}' => normalized.push(' '),
            _ => normalized.push(ch),
        }
    }

    // 2. strip control and replacement characters; whitespace controls
    //    (\t, \n, ...) survive until the collapse step turns them into
    //    single spaces, so line breaks still separate words
    let stripped: String = normalized
        .chars()
        .filter(|c| !(c.is_control() && !c.is_whitespace()) && *c != '\u{FFFD}')
        .collect();

    // 3. delete apostrophes flanked by letters
    let chars: Vec<char> = stripped.chars().collect();
    let mut deapostrophed = String::with_capacity(stripped.len());
    for (i, &ch) in chars.iter().enumerate() {
        if ch == '\'' {
            let prev_letter = i.checked_sub(1).map_or(false, |p| chars[p].is_alphabetic());
            let next_letter = chars.get(i + 1).map_or(false, |c| c.is_alphabetic());
            if prev_letter && next_letter {
                continue;
            }
        }
        deapostrophed.push(ch);
    }

    // 4 + 5. collapse whitespace runs and trim
    let mut out = String::with_capacity(deapostrophed.len());
    let mut pending_space = false;
    for ch in deapostrophed.chars() {
        if ch.is_whitespace() {
            pending_space = !out.is_empty();
        } else {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.push(ch);
        }
    }
    out
}

fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

fn canonical_domain(raw: Option<&str>) -> Option<String> {
    let raw = raw?.trim();
    DOMAINS
        .iter()
        .find(|d| d.eq_ignore_ascii_case(raw))
        .map(|d| d.to_string())
}

/// Clean every record, then drop short bodies, missing authors, and
/// duplicate bodies (byte-identical to an earlier kept record). Survivors
/// get consecutive ids starting at 0; nothing here raises.
pub fn filter_and_dedup(articles: &[RawArticle]) -> (Vec<CleanArticle>, FilterReport) {
    let mut kept = Vec::new();
    let mut report = FilterReport::default();
    let mut seen_bodies: HashSet<String> = HashSet::new();

    for (idx, raw) in articles.iter().enumerate() {
        let row = idx + 1;
        let body = clean_text(&raw.body);
        let words = word_count(&body);
        if words < MIN_WORD_COUNT {
            report.dropped_short += 1;
            report.dropped_ids.push((row, DropReason::Short));
            continue;
        }
        let author = clean_text(raw.author.as_deref().unwrap_or(""));
        if author.is_empty() {
            report.dropped_no_author += 1;
            report.dropped_ids.push((row, DropReason::NoAuthor));
            continue;
        }
        if seen_bodies.contains(&body) {
            report.dropped_duplicate += 1;
            report.dropped_ids.push((row, DropReason::Duplicate));
            continue;
        }
        seen_bodies.insert(body.clone());
        kept.push(CleanArticle {
            id: kept.len() as u64,
            author,
            headline: clean_text(&raw.headline),
            body,
            domain: canonical_domain(raw.domain.as_deref()),
            word_count: words,
        });
    }
    report.kept = kept.len();
    (kept, report)
}

/// Serialize the corpus as canonical JSONL, one article per line with keys
/// in fixed order. Identical corpora serialize to identical bytes.
pub fn write_corpus_jsonl(articles: &[CleanArticle]) -> String {
    let mut out = String::new();
    for article in articles {
        out.push_str(&serde_json::to_string(article).expect("corpus record serializes"));
        out.push('\n');
    }
    out
}

pub fn read_corpus_jsonl(content: &str) -> Result<Vec<CleanArticle>, CorpusError> {
    let mut articles = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let article: CleanArticle =
            serde_json::from_str(line).map_err(|e| CorpusError::Record {
                line: idx + 1,
                message: e.to_string(),
            })?;
        articles.push(article);
    }
    Ok(articles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_csv_scraped_row() {
        let csv = "url,headline,body,sub_domain,domain,author\n\
            https://www.entrepreneur.com/article/370874,Is Launching a New Brand the Right Move for You?,Some body text,Branding,Marketing,Melissa Packham\n";
        let outcome = parse_corpus_file(csv.as_bytes(), CorpusFormat::Csv).unwrap();
        assert!(outcome.row_errors.is_empty());
        assert_eq!(
            outcome.articles,
            vec![RawArticle {
                url: "https://www.entrepreneur.com/article/370874".into(),
                headline: "Is Launching a New Brand the Right Move for You?".into(),
                body: "Some body text".into(),
                sub_domain: Some("Branding".into()),
                domain: Some("Marketing".into()),
                author: Some("Melissa Packham".into()),
            }]
        );
    }

    #[test]
    fn parse_empty_file() {
        let outcome = parse_corpus_file(b"", CorpusFormat::Jsonl).unwrap();
        assert!(outcome.articles.is_empty());
        assert!(outcome.row_errors.is_empty());
    }

    #[test]
    fn parse_jsonl_missing_body_is_row_error() {
        let jsonl = "{\"url\":\"u1\",\"headline\":\"h1\",\"body\":\"b1\"}\n\
            {\"url\":\"u2\",\"headline\":\"h2\"}\n\
            {\"url\":\"u3\",\"headline\":\"h3\",\"body\":\"b3\"}\n";
        let outcome = parse_corpus_file(jsonl.as_bytes(), CorpusFormat::Jsonl).unwrap();
        assert_eq!(outcome.articles.len(), 2);
        assert_eq!(outcome.row_errors.len(), 1);
        assert_eq!(outcome.row_errors[0].row, 2);
        assert!(outcome.row_errors[0].message.contains("body"));
    }

    #[test]
    fn parse_rejects_invalid_utf8() {
        let err = parse_corpus_file(&[b'a', 0xFF, b'b'], CorpusFormat::Csv).unwrap_err();
        assert!(matches!(err, CorpusError::Decode { offset: 1 }));
    }

    #[test]
    fn parse_csv_missing_header_column_is_fatal() {
        let err = parse_corpus_file(b"url,headline\nx,y\n", CorpusFormat::Csv).unwrap_err();
        assert!(matches!(err, CorpusError::MissingColumn { name: "body" }));
    }

    #[test]
    fn clean_deletes_in_word_apostrophes() {
        assert_eq!(
            clean_text("Let\u{2019}s say that, like me, you've been"),
            "Lets say that, like me, youve been"
        );
    }

    #[test]
    fn clean_empty() {
        assert_eq!(clean_text(""), "");
    }

    #[test]
    fn clean_normalizes_punctuation_and_whitespace() {
        assert_eq!(clean_text("a\u{00A0} b\u{2014}c"), "a b-c");
    }

    #[test]
    fn clean_keeps_non_word_apostrophes() {
        assert_eq!(clean_text("the writers' room"), "the writers' room");
    }

    #[test]
    fn clean_strips_controls_and_replacement() {
        assert_eq!(clean_text("a\u{0007}b\u{FFFD}c"), "abc");
        assert_eq!(clean_text("line one\nline two"), "line one line two");
    }

    #[test]
    fn clean_expands_ellipsis_char() {
        assert_eq!(clean_text("wait\u{2026} what"), "wait... what");
    }

    fn raw(body: &str, author: &str) -> RawArticle {
        RawArticle {
            url: "u".into(),
            headline: "h".into(),
            body: body.into(),
            sub_domain: None,
            domain: None,
            author: if author.is_empty() { None } else { Some(author.into()) },
        }
    }

    fn long_body(seed: &str) -> String {
        let mut body = String::new();
        for i in 0..60 {
            body.push_str(seed);
            body.push_str(&format!("word{i} "));
        }
        body
    }

    #[test]
    fn filter_drops_duplicate_bodies() {
        let body = long_body("alpha ");
        let input = vec![raw(&body, "Ann"), raw(&body, "Bob")];
        let (kept, report) = filter_and_dedup(&input);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].author, "Ann");
        assert_eq!(report.dropped_duplicate, 1);
        assert_eq!(report.dropped_ids, vec![(2, DropReason::Duplicate)]);
    }

    #[test]
    fn filter_drops_short_bodies() {
        let body = (0..49).map(|i| format!("w{i}")).collect::<Vec<_>>().join(" ");
        assert_eq!(body.split_whitespace().count(), 49);
        let (kept, report) = filter_and_dedup(&[raw(&body, "Ann")]);
        assert!(kept.is_empty());
        assert_eq!(report.dropped_short, 1);
        assert_eq!(report.dropped_ids, vec![(1, DropReason::Short)]);
    }

    #[test]
    fn filter_drops_whitespace_author() {
        let (kept, report) = filter_and_dedup(&[raw(&long_body("x "), "  ")]);
        assert!(kept.is_empty());
        assert_eq!(report.dropped_no_author, 1);
        assert_eq!(report.dropped_ids, vec![(1, DropReason::NoAuthor)]);
    }

    #[test]
    fn filter_counts_reconcile_and_ids_are_consecutive() {
        let input = vec![
            raw(&long_body("a "), "Ann"),
            raw("too short", "Bob"),
            raw(&long_body("b "), "Cid"),
            raw(&long_body("a "), "Dup"),
            raw(&long_body("c "), ""),
        ];
        let (kept, report) = filter_and_dedup(&input);
        assert_eq!(report.kept + report.total_dropped(), input.len());
        assert_eq!(report.kept, 2);
        let ids: Vec<u64> = kept.iter().map(|a| a.id).collect();
        assert_eq!(ids, vec![0, 1]);
    }

    #[test]
    fn filter_canonicalizes_domain_labels() {
        let mut a = raw(&long_body("a "), "Ann");
        a.domain = Some("marketing".into());
        let mut b = raw(&long_body("b "), "Bob");
        b.domain = Some("Gardening".into());
        let (kept, _) = filter_and_dedup(&[a, b]);
        assert_eq!(kept[0].domain.as_deref(), Some("Marketing"));
        assert_eq!(kept[1].domain, None);
    }

    #[test]
    fn corpus_jsonl_round_trip_and_key_order() {
        let (kept, _) = filter_and_dedup(&[raw(&long_body("a "), "Ann")]);
        let jsonl = write_corpus_jsonl(&kept);
        let line = jsonl.lines().next().unwrap();
        assert!(line.starts_with("{\"id\":0,\"author\":\"Ann\",\"headline\":"));
        let back = read_corpus_jsonl(&jsonl).unwrap();
        assert_eq!(back, kept);
    }

    #[test]
    fn corpus_serialization_is_deterministic() {
        let input = vec![raw(&long_body("a "), "Ann"), raw(&long_body("b "), "Bob")];
        let (kept1, _) = filter_and_dedup(&input);
        let (kept2, _) = filter_and_dedup(&input);
        assert_eq!(write_corpus_jsonl(&kept1), write_corpus_jsonl(&kept2));
    }
}
