use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::jaro::jaro_winkler_chars;
use super::MatchRuleConfig;
use crate::ingest::RawReference;
use crate::union_find::UnionFind;

/// A disambiguated cited work.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolvedReference {
    /// Smallest member key of the cluster.
    pub cluster_id: String,
    pub canonical_author: String,
    pub canonical_year: i32,
    pub canonical_title: String,
    /// Raw reference occurrences mapped to this cluster.
    pub member_count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ResolutionStats {
    pub raw: usize,
    pub distinct_variants: usize,
    pub resolved: usize,
    pub blocks: usize,
    pub largest_block: usize,
    /// Block size (distinct variants) → number of blocks.
    pub block_size_histogram: BTreeMap<usize, usize>,
    /// Cluster size (occurrences) → number of clusters.
    pub cluster_size_histogram: BTreeMap<usize, usize>,
}

/// The reference dictionary: every variant mapped to its cluster.
#[derive(Debug, Clone, Default)]
pub struct ReferenceResolution {
    /// Sorted by `cluster_id`.
    pub clusters: Vec<ResolvedReference>,
    by_member: HashMap<String, usize>,
    pub stats: ResolutionStats,
}

impl ReferenceResolution {
    pub fn cluster_of(&self, reference: &RawReference) -> Option<&ResolvedReference> {
        self.by_member
            .get(&reference.member_key())
            .map(|&i| &self.clusters[i])
    }

    /// Cluster position for a member key (see [`RawReference::member_key`]).
    pub fn cluster_index(&self, member_key: &str) -> Option<usize> {
        self.by_member.get(member_key).copied()
    }
}

fn prefix(s: &str, n: usize) -> &str {
    match s.char_indices().nth(n) {
        Some((idx, _)) => &s[..idx],
        None => s,
    }
}

/// Blocking key: the author and title prefixes that must match exactly.
pub fn block_key<'a>(r: &'a RawReference, cfg: &MatchRuleConfig) -> (&'a str, &'a str) {
    (
        prefix(&r.author_key, cfg.prefix_chars),
        prefix(&r.title_key, cfg.prefix_chars),
    )
}

/// Pairwise reference match rule.
///
/// Requires equal author and title prefixes, author similarity at least
/// `author_jw_min`, and either (title similarity ≥ `title_jw_min_with_year`
/// with equal years) or title similarity ≥ `title_jw_min_alone`.
pub fn references_match(r1: &RawReference, r2: &RawReference, cfg: &MatchRuleConfig) -> bool {
    if block_key(r1, cfg) != block_key(r2, cfg) {
        return false;
    }
    let a1: Vec<char> = r1.author_key.chars().collect();
    let a2: Vec<char> = r2.author_key.chars().collect();
    let t1: Vec<char> = r1.title_key.chars().collect();
    let t2: Vec<char> = r2.title_key.chars().collect();
    match_chars(&a1, &t1, r1.year, &a2, &t2, r2.year, cfg)
}

fn match_chars(
    a1: &[char],
    t1: &[char],
    y1: i32,
    a2: &[char],
    t2: &[char],
    y2: i32,
    cfg: &MatchRuleConfig,
) -> bool {
    if jaro_winkler_chars::<f64>(a1, a2) < cfg.author_jw_min {
        return false;
    }
    let title = jaro_winkler_chars::<f64>(t1, t2);
    (title >= cfg.title_jw_min_with_year && y1 == y2) || title >= cfg.title_jw_min_alone
}

struct Variant<'a> {
    key: String,
    reference: &'a RawReference,
    occurrences: usize,
    author: Vec<char>,
    title: Vec<char>,
}

/// Clusters references into cited works: connected components of the
/// pairwise match relation, compared only within exact-prefix blocks.
pub fn resolve_references(refs: &[RawReference], cfg: &MatchRuleConfig) -> ReferenceResolution {
    // Identical normalized variants always match; collapse them first.
    let mut variant_index: HashMap<String, usize> = HashMap::new();
    let mut variants: Vec<Variant> = Vec::new();
    for r in refs {
        let key = r.member_key();
        match variant_index.get(&key) {
            Some(&i) => variants[i].occurrences += 1,
            None => {
                variant_index.insert(key.clone(), variants.len());
                variants.push(Variant {
                    key,
                    reference: r,
                    occurrences: 1,
                    author: r.author_key.chars().collect(),
                    title: r.title_key.chars().collect(),
                });
            }
        }
    }
    // Order variants by key so that everything below is input-order independent.
    variants.sort_by(|a, b| a.key.cmp(&b.key));

    let mut blocks: BTreeMap<(&str, &str), Vec<usize>> = BTreeMap::new();
    for (i, v) in variants.iter().enumerate() {
        blocks
            .entry(block_key(v.reference, cfg))
            .or_default()
            .push(i);
    }
    let block_list: Vec<&Vec<usize>> = blocks.values().collect();

    let matched_pairs: Vec<Vec<(usize, usize)>> = block_list
        .par_iter()
        .map(|members| {
            let mut pairs = Vec::new();
            for (x, &i) in members.iter().enumerate() {
                for &j in &members[x + 1..] {
                    let (vi, vj) = (&variants[i], &variants[j]);
                    if match_chars(
                        &vi.author,
                        &vi.title,
                        vi.reference.year,
                        &vj.author,
                        &vj.title,
                        vj.reference.year,
                        cfg,
                    ) {
                        pairs.push((i, j));
                    }
                }
            }
            pairs
        })
        .collect();

    let mut uf = UnionFind::new(variants.len());
    for (i, j) in matched_pairs.into_iter().flatten() {
        uf.union(i, j);
    }

    // Variants are sorted, so the first member seen for a root is the
    // lexicographically smallest and becomes the representative.
    let mut root_to_cluster: HashMap<usize, usize> = HashMap::new();
    let mut clusters: Vec<ResolvedReference> = Vec::new();
    let mut variant_cluster = vec![0usize; variants.len()];
    for (i, v) in variants.iter().enumerate() {
        let root = uf.find(i);
        let c = *root_to_cluster.entry(root).or_insert_with(|| {
            clusters.push(ResolvedReference {
                cluster_id: v.key.clone(),
                canonical_author: v.reference.author_key.clone(),
                canonical_year: v.reference.year,
                canonical_title: v.reference.title_key.clone(),
                member_count: 0,
            });
            clusters.len() - 1
        });
        clusters[c].member_count += v.occurrences;
        variant_cluster[i] = c;
    }
    // Clusters were created in order of their smallest key, i.e. already sorted by id.
    debug_assert!(clusters
        .windows(2)
        .all(|w| w[0].cluster_id < w[1].cluster_id));

    let by_member = variants
        .iter()
        .zip(&variant_cluster)
        .map(|(v, &c)| (v.key.clone(), c))
        .collect();

    let mut stats = ResolutionStats {
        raw: refs.len(),
        distinct_variants: variants.len(),
        resolved: clusters.len(),
        blocks: block_list.len(),
        largest_block: block_list.iter().map(|b| b.len()).max().unwrap_or(0),
        ..Default::default()
    };
    for b in &block_list {
        *stats.block_size_histogram.entry(b.len()).or_default() += 1;
    }
    for c in &clusters {
        *stats
            .cluster_size_histogram
            .entry(c.member_count)
            .or_default() += 1;
    }

    ReferenceResolution {
        clusters,
        by_member,
        stats,
    }
}
