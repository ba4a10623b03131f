use std::io::{self, Read, Write};
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub const DEFAULT_YEAR_RANGE: RangeInclusive<i32> = 1400..=2100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorName {
    pub surname: String,
    #[serde(default)]
    pub given: String,
}

impl AuthorName {
    pub fn new(surname: impl Into<String>, given: impl Into<String>) -> Self {
        Self {
            surname: surname.into(),
            given: given.into(),
        }
    }
}

/// One citing article.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub id: String,
    pub journal: String,
    pub specialism: String,
    pub year: i32,
    pub title: String,
    #[serde(rename = "abstract", default, skip_serializing_if = "Option::is_none")]
    pub abstract_text: Option<String>,
    pub authors: Vec<AuthorName>,
    pub refs: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Jsonl,
    Tabular,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("unreadable input: {0}")]
    Io(#[from] io::Error),
    #[error("duplicate record id {id:?} on line {line} (first seen on line {first_line})")]
    DuplicateId {
        id: String,
        line: usize,
        first_line: usize,
    },
}

/// Records parsed from one input stream, plus the rows that were rejected.
#[derive(Debug, Clone, Default)]
pub struct ParsedCorpus {
    pub records: Vec<PublicationRecord>,
    pub row_errors: Vec<RowError>,
}

/// Parses a record stream. Malformed rows are collected in `row_errors`; a
/// duplicate record id aborts the whole parse.
pub fn parse_records<R: Read>(
    mut input: R,
    format: InputFormat,
    years: RangeInclusive<i32>,
) -> Result<ParsedCorpus, IngestError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;

    let mut corpus = ParsedCorpus::default();
    let mut seen: std::collections::HashMap<String, usize> = Default::default();
    for (idx, raw_line) in bytes.split(|&b| b == b'\n').enumerate() {
        let line_no = idx + 1;
        let raw_line = raw_line.strip_suffix(b"\r").unwrap_or(raw_line);
        let line = match std::str::from_utf8(raw_line) {
            Ok(l) => l,
            Err(e) => {
                corpus.row_errors.push(RowError {
                    line: line_no,
                    message: format!("invalid UTF-8: {e}"),
                });
                continue;
            }
        };
        if line.trim().is_empty() {
            continue;
        }
        let parsed = match format {
            InputFormat::Jsonl => parse_json_row(line),
            InputFormat::Tabular => {
                if idx == 0 && line.split('\t').next() == Some("id") {
                    continue;
                }
                parse_tabular_row(line)
            }
        };
        let record = match parsed.and_then(|r| validate(r, &years)) {
            Ok(r) => r,
            Err(message) => {
                corpus.row_errors.push(RowError {
                    line: line_no,
                    message,
                });
                continue;
            }
        };
        if let Some(&first_line) = seen.get(&record.id) {
            return Err(IngestError::DuplicateId {
                id: record.id,
                line: line_no,
                first_line,
            });
        }
        seen.insert(record.id.clone(), line_no);
        corpus.records.push(record);
    }
    Ok(corpus)
}

fn parse_json_row(line: &str) -> Result<PublicationRecord, String> {
    let value: Value = serde_json::from_str(line).map_err(|e| format!("invalid JSON: {e}"))?;
    let obj = value.as_object().ok_or("row is not a JSON object")?;
    for required in ["id", "year", "authors"] {
        if obj.get(required).is_none_or(Value::is_null) {
            return Err(format!("missing required field `{required}`"));
        }
    }
    serde_json::from_value(value).map_err(|e| format!("invalid record: {e}"))
}

const TABULAR_COLUMNS: usize = 8;

fn parse_tabular_row(line: &str) -> Result<PublicationRecord, String> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != TABULAR_COLUMNS {
        return Err(format!(
            "expected {TABULAR_COLUMNS} tab-separated columns, found {}",
            cols.len()
        ));
    }
    if cols[0].trim().is_empty() {
        return Err("missing required field `id`".into());
    }
    if cols[3].trim().is_empty() {
        return Err("missing required field `year`".into());
    }
    let year = cols[3]
        .trim()
        .parse::<i32>()
        .map_err(|_| format!("year {:?} is not an integer", cols[3]))?;
    let authors = cols[6]
        .split(';')
        .filter(|a| !a.trim().is_empty())
        .map(|a| match a.split_once(',') {
            Some((surname, given)) => AuthorName::new(surname.trim(), given.trim()),
            None => AuthorName::new(a.trim(), ""),
        })
        .collect();
    let refs = cols[7]
        .split('|')
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .map(str::to_string)
        .collect();
    Ok(PublicationRecord {
        id: cols[0].to_string(),
        journal: cols[1].to_string(),
        specialism: cols[2].to_string(),
        year,
        title: cols[4].to_string(),
        abstract_text: Some(cols[5])
            .filter(|a| !a.trim().is_empty())
            .map(str::to_string),
        authors,
        refs,
    })
}

fn validate(
    mut record: PublicationRecord,
    years: &RangeInclusive<i32>,
) -> Result<PublicationRecord, String> {
    record.id = record.id.trim().to_string();
    if record.id.is_empty() {
        return Err("empty record id".into());
    }
    if !years.contains(&record.year) {
        return Err(format!(
            "year {} outside accepted range {}..={}",
            record.year,
            years.start(),
            years.end()
        ));
    }
    if record.authors.is_empty() {
        return Err("record has no authors".into());
    }
    for author in &mut record.authors {
        author.surname = author.surname.trim().to_string();
        author.given = author.given.trim().to_string();
        if author.surname.is_empty() {
            return Err("author with empty surname".into());
        }
    }
    Ok(record)
}

/// Writes records in the normalized JSONL form accepted by [`parse_records`].
pub fn write_jsonl<W: Write>(mut out: W, records: &[PublicationRecord]) -> io::Result<()> {
    for record in records {
        serde_json::to_writer(&mut out, record)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Writes records as tab-separated rows with a header line.
///
/// Fields containing tabs, newlines or the list separators cannot be
/// represented and are rejected.
pub fn write_tabular<W: Write>(mut out: W, records: &[PublicationRecord]) -> io::Result<()> {
    writeln!(
        out,
        "id\tjournal\tspecialism\tyear\ttitle\tabstract\tauthors\trefs"
    )?;
    let bad = |s: &str, extra: &[char]| s.contains(['\t', '\n', '\r']) || s.contains(extra);
    for r in records {
        let authors_bad = r
            .authors
            .iter()
            .any(|a| bad(&a.surname, &[';', ',']) || bad(&a.given, &[';']));
        if bad(&r.id, &[])
            || bad(&r.journal, &[])
            || bad(&r.specialism, &[])
            || bad(&r.title, &[])
            || r.abstract_text.as_deref().is_some_and(|a| bad(a, &[]))
            || authors_bad
            || r.refs.iter().any(|x| bad(x, &['|']))
        {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                format!(
                    "record {:?} contains characters not representable in tabular form",
                    r.id
                ),
            ));
        }
        let authors: Vec<String> = r
            .authors
            .iter()
            .map(|a| format!("{}, {}", a.surname, a.given))
            .collect();
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.id,
            r.journal,
            r.specialism,
            r.year,
            r.title,
            r.abstract_text.as_deref().unwrap_or(""),
            authors.join("; "),
            r.refs.join("|")
        )?;
    }
    Ok(())
}
