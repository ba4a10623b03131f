//! Persisted raw-string → identity dictionaries, so later stages can reuse a
//! resolution without recomputing it.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::authors::{AuthorResolution, AuthorScope};
use super::references::ReferenceResolution;
use super::ResolveError;
use crate::ingest::{parse_reference_string, PublicationRecord};

/// Raw reference string → cluster id. Discarded strings are absent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReferenceDictionary {
    pub entries: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct RefEntry<'a> {
    raw: std::borrow::Cow<'a, str>,
    cluster: std::borrow::Cow<'a, str>,
}

impl ReferenceDictionary {
    pub fn from_resolution(
        records: &[PublicationRecord],
        resolution: &ReferenceResolution,
    ) -> Self {
        let mut entries = BTreeMap::new();
        for record in records {
            for raw in &record.refs {
                if entries.contains_key(raw) {
                    continue;
                }
                if let Ok(parsed) = parse_reference_string(&record.id, raw) {
                    if let Some(cluster) = resolution.cluster_of(&parsed) {
                        entries.insert(raw.clone(), cluster.cluster_id.clone());
                    }
                }
            }
        }
        Self { entries }
    }

    pub fn get(&self, raw: &str) -> Option<&str> {
        self.entries.get(raw).map(String::as_str)
    }

    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (raw, cluster) in &self.entries {
            let entry = RefEntry {
                raw: raw.into(),
                cluster: cluster.into(),
            };
            serde_json::to_writer(&mut out, &entry)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ResolveError> {
        let mut entries = BTreeMap::new();
        for (line_no, line) in read_lines(path)? {
            let entry: RefEntry =
                serde_json::from_str(&line).map_err(|e| dict_error(path, line_no, e))?;
            entries.insert(entry.raw.into_owned(), entry.cluster.into_owned());
        }
        Ok(Self { entries })
    }
}

/// (scope, surname, given) as written in the records → author id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuthorDictionary {
    pub entries: BTreeMap<(String, String, String), String>,
}

#[derive(Serialize, Deserialize)]
struct AuthorEntry {
    scope: String,
    surname: String,
    given: String,
    author: String,
}

impl AuthorDictionary {
    /// `names` must be the occurrence list that was passed to `resolve_authors`.
    pub fn from_resolution(
        names: &[(crate::ingest::AuthorName, String)],
        scope: AuthorScope,
        resolution: &AuthorResolution,
    ) -> Self {
        let entries = names
            .iter()
            .enumerate()
            .map(|(i, (name, specialism))| {
                (
                    (
                        scope.label(specialism).to_string(),
                        name.surname.clone(),
                        name.given.clone(),
                    ),
                    resolution.identity_of(i).author_id.clone(),
                )
            })
            .collect();
        Self { entries }
    }

    /// Looks up a name within its specialism, then in the global scope.
    pub fn get(&self, specialism: &str, surname: &str, given: &str) -> Option<&str> {
        let key = |scope: &str| (scope.to_string(), surname.to_string(), given.to_string());
        self.entries
            .get(&key(specialism))
            .or_else(|| self.entries.get(&key(super::authors::GLOBAL_SCOPE)))
            .map(String::as_str)
    }

    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for ((scope, surname, given), author) in &self.entries {
            let entry = AuthorEntry {
                scope: scope.clone(),
                surname: surname.clone(),
                given: given.clone(),
                author: author.clone(),
            };
            serde_json::to_writer(&mut out, &entry)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ResolveError> {
        let mut entries = BTreeMap::new();
        for (line_no, line) in read_lines(path)? {
            let e: AuthorEntry =
                serde_json::from_str(&line).map_err(|err| dict_error(path, line_no, err))?;
            entries.insert((e.scope, e.surname, e.given), e.author);
        }
        Ok(Self { entries })
    }
}

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>, ResolveError> {
    let file = std::fs::File::open(path).map_err(|e| ResolveError::Dictionary {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut lines = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| dict_error(path, i + 1, e))?;
        if !line.trim().is_empty() {
            lines.push((i + 1, line));
        }
    }
    Ok(lines)
}

fn dict_error(path: &Path, line: usize, e: impl std::fmt::Display) -> ResolveError {
    ResolveError::Dictionary {
        path: path.display().to_string(),
        message: format!("line {line}: {e}"),
    }
}
