use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::record::PublicationRecord;

/// An inclusive span of publication years.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodSpec {
    pub label: String,
    pub start: i32,
    pub end: i32,
}

impl PeriodSpec {
    pub fn new(label: impl Into<String>, start: i32, end: i32) -> Self {
        Self {
            label: label.into(),
            start,
            end,
        }
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.start..=self.end).contains(&year)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PeriodError {
    #[error("period {label:?} starts after it ends ({start} > {end})")]
    Inverted { label: String, start: i32, end: i32 },
    #[error("periods {0:?} and {1:?} overlap")]
    Overlap(String, String),
    #[error("duplicate period label {0:?}")]
    DuplicateLabel(String),
    #[error("period file: {0}")]
    File(String),
}

/// Six reference-coverage periods used for the citation networks.
pub fn citation_periods() -> Vec<PeriodSpec> {
    vec![
        PeriodSpec::new("until-1969", 1400, 1969),
        PeriodSpec::new("1970-1979", 1970, 1979),
        PeriodSpec::new("1980-1989", 1980, 1989),
        PeriodSpec::new("1990-1999", 1990, 1999),
        PeriodSpec::new("2000-2009", 2000, 2009),
        PeriodSpec::new("2010-2016", 2010, 2016),
    ]
}

/// Three abstract-coverage periods used for the text networks.
pub fn text_periods() -> Vec<PeriodSpec> {
    vec![
        PeriodSpec::new("1999-2004", 1999, 2004),
        PeriodSpec::new("2005-2010", 2005, 2010),
        PeriodSpec::new("2011-2016", 2011, 2016),
    ]
}

/// Period sets for citation-based and text-based networks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodSets {
    pub citation: Vec<PeriodSpec>,
    pub text: Vec<PeriodSpec>,
}

impl Default for PeriodSets {
    fn default() -> Self {
        Self {
            citation: citation_periods(),
            text: text_periods(),
        }
    }
}

impl PeriodSets {
    pub fn validate(&self) -> Result<(), PeriodError> {
        validate_periods(&self.citation)?;
        validate_periods(&self.text)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PeriodFile {
    Single(Vec<PeriodSpec>),
    Split(PeriodSets),
}

/// Reads a period configuration: either a JSON list of `{label, start, end}`
/// applied to every network kind, or `{"citation": [...], "text": [...]}`.
pub fn load_period_sets(path: &Path) -> Result<PeriodSets, PeriodError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| PeriodError::File(format!("{}: {e}", path.display())))?;
    let parsed: PeriodFile = serde_json::from_str(&text)
        .map_err(|e| PeriodError::File(format!("{}: {e}", path.display())))?;
    let sets = match parsed {
        PeriodFile::Single(list) => PeriodSets {
            citation: list.clone(),
            text: list,
        },
        PeriodFile::Split(sets) => sets,
    };
    sets.validate()?;
    Ok(sets)
}

pub(crate) fn validate_periods(periods: &[PeriodSpec]) -> Result<(), PeriodError> {
    for p in periods {
        if p.start > p.end {
            return Err(PeriodError::Inverted {
                label: p.label.clone(),
                start: p.start,
                end: p.end,
            });
        }
    }
    for (i, a) in periods.iter().enumerate() {
        for b in &periods[i + 1..] {
            if a.label == b.label {
                return Err(PeriodError::DuplicateLabel(a.label.clone()));
            }
            if a.start <= b.end && b.start <= a.end {
                return Err(PeriodError::Overlap(a.label.clone(), b.label.clone()));
            }
        }
    }
    Ok(())
}

/// Records partitioned by period, in period order.
#[derive(Debug, Clone)]
pub struct PeriodSlices<'a> {
    pub slices: Vec<(PeriodSpec, Vec<&'a PublicationRecord>)>,
    /// Records whose year falls in no period.
    pub outside: usize,
}

impl<'a> PeriodSlices<'a> {
    pub fn get(&self, label: &str) -> Option<&[&'a PublicationRecord]> {
        self.slices
            .iter()
            .find(|(p, _)| p.label == label)
            .map(|(_, r)| r.as_slice())
    }
}

/// Assigns each record to the single period containing its year.
pub fn slice_periods<'a>(
    records: &'a [PublicationRecord],
    periods: &[PeriodSpec],
) -> Result<PeriodSlices<'a>, PeriodError> {
    validate_periods(periods)?;
    let mut slices: Vec<(PeriodSpec, Vec<&PublicationRecord>)> =
        periods.iter().map(|p| (p.clone(), Vec::new())).collect();
    let mut outside = 0;
    for record in records {
        match slices.iter_mut().find(|(p, _)| p.contains(record.year)) {
            Some((_, bucket)) => bucket.push(record),
            None => outside += 1,
        }
    }
    Ok(PeriodSlices { slices, outside })
}
