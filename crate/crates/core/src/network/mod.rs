//! Weighted coupling networks over articles and authors.

mod cosine;
mod graph;
mod text;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cosine::{
    build_article_coupling, build_author_coupling, cosine_coupling_weight, cosine_from_counts,
    reference_set_coupling,
};
pub use graph::{CoupledGraph, Edge, GraphContext, GraphSummary, NodeKind, WeightKind};
pub use text::{
    bm25_directed, bm25_pair, build_idf, build_text_coupling, tokenize, Bm25Params, IdfTable,
    TokenProfile,
};

/// The three network families built per specialism and period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetworkKind {
    ArticleCosine,
    AuthorCosine,
    TextBm25,
}

impl NetworkKind {
    pub const ALL: [NetworkKind; 3] = [
        NetworkKind::ArticleCosine,
        NetworkKind::AuthorCosine,
        NetworkKind::TextBm25,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NetworkKind::ArticleCosine => "article-cosine",
            NetworkKind::AuthorCosine => "author-cosine",
            NetworkKind::TextBm25 => "text-bm25",
        }
    }

    pub fn weight_kind(self) -> WeightKind {
        match self {
            NetworkKind::TextBm25 => WeightKind::Bm25Text,
            _ => WeightKind::CosineOverlap,
        }
    }
}

impl std::fmt::Display for NetworkKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for NetworkKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NetworkKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown network kind {s:?}"))
    }
}

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("no documents to compute IDF over")]
    EmptyIdfCorpus,
    #[error("graph file {path}: {message}")]
    File { path: String, message: String },
}
