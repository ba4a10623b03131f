//! BM25 textual similarity between publications.
//!
//! Documents are title + abstract, lower-cased and split on every
//! non-alphanumeric character; one-character tokens are dropped. IDF and the
//! mean document length are computed once over all documents and shared by
//! every network. Tokens whose IDF is not positive are dropped from the table.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::graph::{CoupledGraph, Edge, GraphContext, NodeKind, WeightKind};
use super::NetworkError;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenProfile {
    pub doc_id: String,
    pub counts: BTreeMap<String, u32>,
    /// Total number of tokens.
    pub length: u32,
}

/// Tokenizes title and abstract; `None` when no token survives.
pub fn tokenize(doc_id: &str, title: &str, abstract_text: &str) -> Option<TokenProfile> {
    let mut counts: BTreeMap<String, u32> = BTreeMap::new();
    let text = format!("{title} {abstract_text}").to_lowercase();
    for token in text.split(|c: char| !c.is_alphanumeric()) {
        if token.chars().nth(1).is_none() {
            continue;
        }
        *counts.entry(token.to_string()).or_default() += 1;
    }
    let length: u32 = counts.values().sum();
    (length > 0).then(|| TokenProfile {
        doc_id: doc_id.to_string(),
        counts,
        length,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdfTable<T> {
    pub doc_count: usize,
    pub doc_freq: BTreeMap<String, u32>,
    /// Positive IDF values only.
    pub idf: BTreeMap<String, T>,
    pub mean_length: T,
}

/// `ln((N - p + 0.5) / (p + 0.5))` for every token; non-positive values are dropped.
pub fn build_idf<T: Scalar>(profiles: &[TokenProfile]) -> Result<IdfTable<T>, NetworkError> {
    if profiles.is_empty() {
        return Err(NetworkError::EmptyIdfCorpus);
    }
    let mut doc_freq: BTreeMap<String, u32> = BTreeMap::new();
    let mut total_length: u64 = 0;
    for p in profiles {
        total_length += p.length as u64;
        for token in p.counts.keys() {
            *doc_freq.entry(token.clone()).or_default() += 1;
        }
    }
    let n = T::from_count(profiles.len());
    let half = T::lit(0.5);
    let idf = doc_freq
        .iter()
        .filter_map(|(token, &df)| {
            let df = T::from_count(df as usize);
            let value = ((n - df + half) / (df + half)).ln();
            (value > T::zero()).then(|| (token.clone(), value))
        })
        .collect();
    Ok(IdfTable {
        doc_count: profiles.len(),
        doc_freq,
        idf,
        mean_length: T::lit(total_length as f64) / n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm25Params<T> {
    pub k1: T,
    pub b: T,
}

impl<T: Scalar> Default for Bm25Params<T> {
    fn default() -> Self {
        Self {
            k1: T::lit(2.0),
            b: T::lit(0.75),
        }
    }
}

/// `k1 * (1 - b + b * |D| / mean)` for a document of the given length.
fn length_norm<T: Scalar>(length: u32, mean: T, p: &Bm25Params<T>) -> T {
    p.k1 * (T::one() - p.b + p.b * T::lit(length as f64) / mean)
}

fn term<T: Scalar>(idf: T, count: u32, norm: T, p: &Bm25Params<T>) -> T {
    let n = T::lit(count as f64);
    idf * (n * (p.k1 + T::one())) / (n + norm)
}

/// One-directional score s(i, j): sums over the tokens of `i`, with term
/// frequencies and length taken from `j`.
pub fn bm25_directed<T: Scalar>(
    i: &TokenProfile,
    j: &TokenProfile,
    idf: &IdfTable<T>,
    params: &Bm25Params<T>,
) -> T {
    let norm = length_norm(j.length, idf.mean_length, params);
    let mut score = T::zero();
    for token in i.counts.keys() {
        let (Some(&w), Some(&n)) = (idf.idf.get(token), j.counts.get(token)) else {
            continue;
        };
        score = score + term(w, n, norm, params);
    }
    score
}

/// Symmetric edge weight `(s(i,j) + s(j,i)) / 2`.
pub fn bm25_pair<T: Scalar>(
    i: &TokenProfile,
    j: &TokenProfile,
    idf: &IdfTable<T>,
    params: &Bm25Params<T>,
) -> T {
    (bm25_directed(i, j, idf, params) + bm25_directed(j, i, idf, params)) / T::lit(2.0)
}

/// Evaluates every document pair and keeps the positive ones.
///
/// Pairs sharing no positively weighted token score exactly zero, so an
/// inverted index over those tokens visits every pair that matters. Per pair,
/// terms are accumulated in token order, which makes the result bit-identical
/// to [`bm25_pair`].
pub fn build_text_coupling<T: Scalar>(
    profiles: &[&TokenProfile],
    idf: &IdfTable<T>,
    params: &Bm25Params<T>,
    context: GraphContext,
) -> CoupledGraph<T> {
    let n = profiles.len();
    // Token ids follow the idf table's sorted order.
    let token_ids: HashMap<&str, u32> = idf
        .idf
        .keys()
        .enumerate()
        .map(|(id, t)| (t.as_str(), id as u32))
        .collect();
    let idf_values: Vec<T> = idf.idf.values().copied().collect();

    let docs: Vec<Vec<(u32, u32)>> = profiles
        .iter()
        .map(|p| {
            p.counts
                .iter()
                .filter_map(|(t, &c)| token_ids.get(t.as_str()).map(|&id| (id, c)))
                .collect()
        })
        .collect();
    let norms: Vec<T> = profiles
        .iter()
        .map(|p| length_norm(p.length, idf.mean_length, params))
        .collect();
    let mut postings: Vec<Vec<(u32, u32)>> = vec![Vec::new(); idf_values.len()];
    for (d, tokens) in docs.iter().enumerate() {
        for &(t, c) in tokens {
            postings[t as usize].push((d as u32, c));
        }
    }

    let two = T::lit(2.0);
    let rows: Vec<Vec<Edge<T>>> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![T::zero(); n], vec![T::zero(); n], Vec::<u32>::new()),
            |(forward, backward, touched), i| {
                for &(t, count_i) in &docs[i] {
                    let w = idf_values[t as usize];
                    let own = term(w, count_i, norms[i], params);
                    let post = &postings[t as usize];
                    let start = post.partition_point(|&(d, _)| d as usize <= i);
                    for &(j, count_j) in &post[start..] {
                        let j = j as usize;
                        if forward[j] == T::zero() && backward[j] == T::zero() {
                            touched.push(j as u32);
                        }
                        forward[j] = forward[j] + term(w, count_j, norms[j], params);
                        backward[j] = backward[j] + own;
                    }
                }
                touched.sort_unstable();
                let row = touched
                    .iter()
                    .map(|&j| Edge {
                        i: i as u32,
                        j,
                        weight: (forward[j as usize] + backward[j as usize]) / two,
                    })
                    .collect();
                for &j in touched.iter() {
                    forward[j as usize] = T::zero();
                    backward[j as usize] = T::zero();
                }
                touched.clear();
                row
            },
        )
        .collect();

    CoupledGraph {
        node_kind: NodeKind::Article,
        weight_kind: WeightKind::Bm25Text,
        nodes: profiles.iter().map(|p| p.doc_id.clone()).collect(),
        edges: rows.into_iter().flatten().collect(),
        context,
    }
}
