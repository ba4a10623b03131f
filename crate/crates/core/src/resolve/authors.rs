use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::jaro::jaro_winkler_chars;
use super::MatchRuleConfig;
use crate::ingest::AuthorName;
use crate::union_find::UnionFind;

/// Grouping within which author names are compared.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuthorScope {
    /// Names are only merged within the same specialism.
    #[default]
    Specialism,
    /// All names are compared with each other.
    Global,
}

pub const GLOBAL_SCOPE: &str = "*";

impl AuthorScope {
    pub fn label<'a>(&self, specialism: &'a str) -> &'a str {
        match self {
            AuthorScope::Specialism => specialism,
            AuthorScope::Global => GLOBAL_SCOPE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuthorIdentity {
    pub author_id: String,
    pub canonical_surname: String,
    pub canonical_given: String,
    pub scope: String,
}

/// Lower-cased, punctuation-free surname and given name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalizedName {
    pub surname: String,
    pub given: String,
}

impl NormalizedName {
    pub fn of(name: &AuthorName) -> Self {
        Self {
            surname: normalize_name(&name.surname),
            given: normalize_name(&name.given),
        }
    }

    fn key(&self) -> String {
        format!("{}|{}", self.surname, self.given)
    }
}

/// Lower-cases, deletes punctuation and collapses whitespace.
pub fn normalize_name(s: &str) -> String {
    let cleaned: String = s
        .chars()
        .flat_map(char::to_lowercase)
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .collect();
    cleaned.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Surname similarity strictly above `author_surname_min` and given-name
/// similarity strictly above `author_given_min`.
pub fn authors_match(a: &NormalizedName, b: &NormalizedName, cfg: &MatchRuleConfig) -> bool {
    let chars = |s: &str| s.chars().collect::<Vec<_>>();
    names_match(
        &chars(&a.surname),
        &chars(&a.given),
        &chars(&b.surname),
        &chars(&b.given),
        cfg,
    )
}

fn names_match(s1: &[char], g1: &[char], s2: &[char], g2: &[char], cfg: &MatchRuleConfig) -> bool {
    jaro_winkler_chars::<f64>(s1, s2) > cfg.author_surname_min
        && jaro_winkler_chars::<f64>(g1, g2) > cfg.author_given_min
}

/// Author identities and the identity of every input occurrence.
#[derive(Debug, Clone, Default)]
pub struct AuthorResolution {
    /// Sorted by `author_id`.
    pub identities: Vec<AuthorIdentity>,
    /// Index into `identities` for each input name, in input order.
    pub assignment: Vec<usize>,
}

impl AuthorResolution {
    pub fn identity_of(&self, occurrence: usize) -> &AuthorIdentity {
        &self.identities[self.assignment[occurrence]]
    }
}

/// Clusters author names per scope: transitive closure of [`authors_match`].
pub fn resolve_authors(
    names: &[(AuthorName, String)],
    scope: AuthorScope,
    cfg: &MatchRuleConfig,
) -> AuthorResolution {
    // scope label -> distinct normalized names (sorted)
    let mut scoped: BTreeMap<&str, BTreeMap<NormalizedName, ()>> = BTreeMap::new();
    let normalized: Vec<NormalizedName> =
        names.iter().map(|(n, _)| NormalizedName::of(n)).collect();
    for ((_, specialism), norm) in names.iter().zip(&normalized) {
        scoped
            .entry(scope.label(specialism))
            .or_default()
            .insert(norm.clone(), ());
    }

    let mut identities: Vec<AuthorIdentity> = Vec::new();
    let mut lookup: HashMap<(&str, &NormalizedName), usize> = HashMap::new();
    for (scope_label, distinct) in &scoped {
        let distinct: Vec<&NormalizedName> = distinct.keys().collect();
        let chars: Vec<(Vec<char>, Vec<char>)> = distinct
            .iter()
            .map(|n| (n.surname.chars().collect(), n.given.chars().collect()))
            .collect();
        let pairs: Vec<(usize, usize)> = (0..distinct.len())
            .into_par_iter()
            .flat_map_iter(|i| {
                let chars = &chars;
                (i + 1..chars.len()).filter_map(move |j| {
                    names_match(&chars[i].0, &chars[i].1, &chars[j].0, &chars[j].1, cfg)
                        .then_some((i, j))
                })
            })
            .collect();
        let mut uf = UnionFind::new(distinct.len());
        for (i, j) in pairs {
            uf.union(i, j);
        }
        // Names are sorted by (surname, given); the first one reached per root
        // has the smallest key and becomes the representative.
        let mut root_identity: HashMap<usize, usize> = HashMap::new();
        for (i, name) in distinct.iter().enumerate() {
            let root = uf.find(i);
            let id = *root_identity.entry(root).or_insert_with(|| {
                identities.push(AuthorIdentity {
                    author_id: format!("{scope_label}:{}", name.key()),
                    canonical_surname: name.surname.clone(),
                    canonical_given: name.given.clone(),
                    scope: scope_label.to_string(),
                });
                identities.len() - 1
            });
            lookup.insert((scope_label, name), id);
        }
    }

    // Sort identities by id and remap.
    let mut order: Vec<usize> = (0..identities.len()).collect();
    order.sort_by(|&a, &b| identities[a].author_id.cmp(&identities[b].author_id));
    let mut new_pos = vec![0; identities.len()];
    for (pos, &old) in order.iter().enumerate() {
        new_pos[old] = pos;
    }
    let assignment = names
        .iter()
        .zip(&normalized)
        .map(|((_, specialism), norm)| new_pos[lookup[&(scope.label(specialism), norm)]])
        .collect();
    let identities = order.into_iter().map(|i| identities[i].clone()).collect();

    AuthorResolution {
        identities,
        assignment,
    }
}
