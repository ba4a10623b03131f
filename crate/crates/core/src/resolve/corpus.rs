use std::collections::BTreeSet;

use serde::Serialize;

use super::dictionary::{AuthorDictionary, ReferenceDictionary};
use super::ResolveError;
use crate::ingest::{parse_reference_string, PublicationRecord, ReferenceTally};

/// A cited work in one article: the cluster and the year given in the citation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CitedWork {
    pub cluster: u32,
    pub year: i32,
}

/// An article with its references and authors replaced by resolved identities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolvedArticle {
    pub id: String,
    pub specialism: String,
    pub year: i32,
    /// Author slots on the record, before identity merging.
    pub author_count: usize,
    /// Sorted, distinct author identity indices.
    pub authors: Vec<u32>,
    /// Sorted by cluster, one entry per distinct cluster. When an article cites
    /// a cluster more than once, the first citation's year is kept.
    pub cited: Vec<CitedWork>,
}

impl ResolvedArticle {
    /// Distinct cluster indices, ascending.
    pub fn clusters(&self) -> impl Iterator<Item = u32> + '_ {
        self.cited.iter().map(|c| c.cluster)
    }
}

/// All records of a corpus in resolved form, with the index spaces for
/// clusters and authors.
#[derive(Debug, Clone, Default)]
pub struct ResolvedCorpus {
    pub articles: Vec<ResolvedArticle>,
    /// Cluster ids, sorted; `CitedWork::cluster` indexes this.
    pub cluster_ids: Vec<String>,
    /// Author ids, sorted; `ResolvedArticle::authors` indexes this.
    pub author_ids: Vec<String>,
    pub tally: ReferenceTally,
}

impl ResolvedCorpus {
    pub fn build(
        records: &[PublicationRecord],
        references: &ReferenceDictionary,
        authors: &AuthorDictionary,
    ) -> Result<Self, ResolveError> {
        let cluster_ids: Vec<String> = references
            .entries
            .values()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let author_ids: Vec<String> = authors
            .entries
            .values()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let cluster_pos = |id: &str| cluster_ids.binary_search_by(|c| c.as_str().cmp(id)).ok();
        let author_pos = |id: &str| author_ids.binary_search_by(|c| c.as_str().cmp(id)).ok();

        let mut tally = ReferenceTally::default();
        let mut articles = Vec::with_capacity(records.len());
        for record in records {
            let mut cited: Vec<CitedWork> = Vec::new();
            for raw in &record.refs {
                let parsed = parse_reference_string(&record.id, raw);
                tally.record(&parsed);
                let Ok(parsed) = parsed else { continue };
                let cluster = references.get(raw).and_then(cluster_pos).ok_or_else(|| {
                    ResolveError::UnknownReference {
                        record: record.id.clone(),
                        raw: raw.clone(),
                    }
                })?;
                if !cited.iter().any(|c| c.cluster == cluster as u32) {
                    cited.push(CitedWork {
                        cluster: cluster as u32,
                        year: parsed.year,
                    });
                }
            }
            cited.sort_by_key(|c| c.cluster);

            let mut author_idx = Vec::with_capacity(record.authors.len());
            for a in &record.authors {
                let idx = authors
                    .get(&record.specialism, &a.surname, &a.given)
                    .and_then(author_pos)
                    .ok_or_else(|| ResolveError::UnknownAuthor {
                        record: record.id.clone(),
                        surname: a.surname.clone(),
                        given: a.given.clone(),
                    })?;
                author_idx.push(idx as u32);
            }
            author_idx.sort_unstable();
            author_idx.dedup();

            articles.push(ResolvedArticle {
                id: record.id.clone(),
                specialism: record.specialism.clone(),
                year: record.year,
                author_count: record.authors.len(),
                authors: author_idx,
                cited,
            });
        }
        Ok(Self {
            articles,
            cluster_ids,
            author_ids,
            tally,
        })
    }
}
