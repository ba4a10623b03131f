//! Reference-overlap (bibliographic coupling) weights.

use std::collections::BTreeSet;

use rayon::prelude::*;

use super::graph::{CoupledGraph, Edge, GraphContext, NodeKind, WeightKind};
use crate::resolve::ResolvedArticle;
use crate::Scalar;

/// `shared / sqrt(len_a * len_b)`; zero when either set is empty.
pub fn cosine_from_counts<T: Scalar>(shared: usize, len_a: usize, len_b: usize) -> T {
    if shared == 0 || len_a == 0 || len_b == 0 {
        return T::zero();
    }
    // sqrt of the product rather than product of sqrts keeps exact cases exact
    // (2 / sqrt(9) == 2/3).
    let denom = (len_a as u64 * len_b as u64) as f64;
    T::from_count(shared) / T::lit(denom).sqrt()
}

/// Cosine overlap of two sorted, duplicate-free reference sets.
pub fn cosine_coupling_weight<T: Scalar, K: Ord>(a: &[K], b: &[K]) -> T {
    debug_assert!(a.windows(2).all(|w| w[0] < w[1]) && b.windows(2).all(|w| w[0] < w[1]));
    let (mut x, mut y, mut shared) = (0, 0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                x += 1;
                y += 1;
            }
        }
    }
    cosine_from_counts(shared, a.len(), b.len())
}

/// All positive-weight pairs among sorted reference sets, using an inverted
/// index so only pairs sharing a reference are visited. Edges come out sorted
/// by `(i, j)`.
pub fn reference_set_coupling<T: Scalar>(sets: &[Vec<u32>]) -> Vec<Edge<T>> {
    let n = sets.len();
    let universe = sets
        .iter()
        .flat_map(|s| s.last())
        .max()
        .map_or(0, |&m| m as usize + 1);
    let mut postings: Vec<Vec<u32>> = vec![Vec::new(); universe];
    for (node, set) in sets.iter().enumerate() {
        for &r in set {
            postings[r as usize].push(node as u32);
        }
    }

    let rows: Vec<Vec<Edge<T>>> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0u32; n], Vec::<u32>::new()),
            |(shared, touched), i| {
                for &r in &sets[i] {
                    let post = &postings[r as usize];
                    let start = post.partition_point(|&j| j as usize <= i);
                    for &j in &post[start..] {
                        if shared[j as usize] == 0 {
                            touched.push(j);
                        }
                        shared[j as usize] += 1;
                    }
                }
                touched.sort_unstable();
                let row = touched
                    .iter()
                    .map(|&j| Edge {
                        i: i as u32,
                        j,
                        weight: cosine_from_counts(
                            shared[j as usize] as usize,
                            sets[i].len(),
                            sets[j as usize].len(),
                        ),
                    })
                    .collect();
                for &j in touched.iter() {
                    shared[j as usize] = 0;
                }
                touched.clear();
                row
            },
        )
        .collect();
    rows.into_iter().flatten().collect()
}

/// Article coupling: one node per article in slice order, edges weighted by
/// the cosine overlap of their resolved reference sets.
pub fn build_article_coupling<T: Scalar>(
    articles: &[&ResolvedArticle],
    context: GraphContext,
) -> CoupledGraph<T> {
    let sets: Vec<Vec<u32>> = articles.iter().map(|a| a.clusters().collect()).collect();
    CoupledGraph {
        node_kind: NodeKind::Article,
        weight_kind: WeightKind::CosineOverlap,
        nodes: articles.iter().map(|a| a.id.clone()).collect(),
        edges: reference_set_coupling(&sets),
        context,
    }
}

/// Author coupling: one node per author identity appearing in the slice
/// (ordered by identity), each carrying the union of the references of
/// their articles in the slice.
pub fn build_author_coupling<T: Scalar>(
    articles: &[&ResolvedArticle],
    author_ids: &[String],
    context: GraphContext,
) -> CoupledGraph<T> {
    let mut per_author: std::collections::BTreeMap<u32, BTreeSet<u32>> = Default::default();
    for article in articles {
        for &author in &article.authors {
            per_author
                .entry(author)
                .or_default()
                .extend(article.clusters());
        }
    }
    let nodes = per_author
        .keys()
        .map(|&a| author_ids[a as usize].clone())
        .collect();
    let sets: Vec<Vec<u32>> = per_author
        .into_values()
        .map(|s| s.into_iter().collect())
        .collect();
    CoupledGraph {
        node_kind: NodeKind::Author,
        weight_kind: WeightKind::CosineOverlap,
        nodes,
        edges: reference_set_coupling(&sets),
        context,
    }
}
