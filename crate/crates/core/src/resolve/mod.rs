//! Record linkage for cited references and article authors.

mod authors;
mod corpus;
mod dictionary;
pub mod jaro;
mod references;

use thiserror::Error;

pub use authors::{
    authors_match, normalize_name, resolve_authors, AuthorIdentity, AuthorResolution, AuthorScope,
    NormalizedName,
};
pub use corpus::{CitedWork, ResolvedArticle, ResolvedCorpus};
pub use dictionary::{AuthorDictionary, ReferenceDictionary};
pub use jaro::{jaro, jaro_winkler};
pub use references::{
    block_key, references_match, resolve_references, ReferenceResolution, ResolutionStats,
    ResolvedReference,
};

/// Thresholds for reference and author matching.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct MatchRuleConfig {
    /// Minimum author-field similarity (inclusive).
    pub author_jw_min: f64,
    /// Minimum title similarity when publication years agree (inclusive).
    pub title_jw_min_with_year: f64,
    /// Minimum title similarity regardless of year (inclusive).
    pub title_jw_min_alone: f64,
    /// Leading characters of author and title that must agree exactly.
    pub prefix_chars: usize,
    /// Surname similarity must exceed this (strict).
    pub author_surname_min: f64,
    /// Given-name similarity must exceed this (strict).
    pub author_given_min: f64,
}

impl Default for MatchRuleConfig {
    fn default() -> Self {
        Self {
            author_jw_min: 0.9,
            title_jw_min_with_year: 0.85,
            title_jw_min_alone: 0.95,
            prefix_chars: 3,
            author_surname_min: 0.95,
            author_given_min: 0.9,
        }
    }
}

impl MatchRuleConfig {
    pub fn validate(&self) -> Result<(), ResolveError> {
        let thresholds = [
            ("author_jw_min", self.author_jw_min),
            ("title_jw_min_with_year", self.title_jw_min_with_year),
            ("title_jw_min_alone", self.title_jw_min_alone),
            ("author_surname_min", self.author_surname_min),
            ("author_given_min", self.author_given_min),
        ];
        for (name, value) in thresholds {
            if !(0.0..=1.0).contains(&value) {
                return Err(ResolveError::Config(format!(
                    "{name} = {value} is outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ResolveError {
    #[error("invalid match rules: {0}")]
    Config(String),
    #[error("reference {raw:?} in record {record:?} is missing from the reference dictionary")]
    UnknownReference { record: String, raw: String },
    #[error(
        "author {surname:?}, {given:?} in record {record:?} is missing from the author dictionary"
    )]
    UnknownAuthor {
        record: String,
        surname: String,
        given: String,
    },
    #[error("dictionary {path}: {message}")]
    Dictionary { path: String, message: String },
}
