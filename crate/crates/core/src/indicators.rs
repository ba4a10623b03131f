//! Descriptive series per specialism and period: article counts, authors per
//! article, cited-source counts and the Price index.

use std::collections::BTreeSet;
use std::io::{self, Write};

use serde::Serialize;

use crate::resolve::ResolvedArticle;
use crate::scalar::fmt_sig9;
use crate::Scalar;

pub const DEFAULT_PRICE_WINDOW: i32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriceIndex<T> {
    /// Absent when no reference has a non-negative age.
    pub value: Option<T>,
    /// References with age `>= 0`.
    pub eligible: usize,
    /// References with `0 <= age <= window`.
    pub within_window: usize,
    /// References dated after the citing article; excluded from both counts.
    pub negative_age: usize,
}

/// Share of cited works whose age (citing year minus cited year) is at most
/// `window` years. Each distinct cited work counts once per citing article.
pub fn price_index<T: Scalar>(articles: &[&ResolvedArticle], window: i32) -> PriceIndex<T> {
    let (mut eligible, mut within, mut negative) = (0, 0, 0);
    for article in articles {
        for cited in &article.cited {
            let age = article.year - cited.year;
            if age < 0 {
                negative += 1;
            } else {
                eligible += 1;
                if age <= window {
                    within += 1;
                }
            }
        }
    }
    PriceIndex {
        value: (eligible > 0).then(|| T::from_count(within) / T::from_count(eligible)),
        eligible,
        within_window: within,
        negative_age: negative,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorRow<T> {
    pub specialism: String,
    pub period: String,
    pub article_count: usize,
    pub mean_authors_per_article: T,
    /// Distinct reference clusters cited in the slice.
    pub unique_cited_sources: usize,
    pub mean_unique_refs_per_article: T,
    pub price_index: Option<T>,
    pub price_eligible_refs: usize,
    pub negative_age_refs: usize,
}

pub fn descriptive_stats<T: Scalar>(
    specialism: &str,
    period: &str,
    articles: &[&ResolvedArticle],
    price_window: i32,
) -> IndicatorRow<T> {
    let n = articles.len();
    let per_article = |f: fn(&ResolvedArticle) -> usize| -> T {
        if n == 0 {
            T::zero()
        } else {
            T::from_count(articles.iter().map(|a| f(a)).sum()) / T::from_count(n)
        }
    };
    let unique: BTreeSet<u32> = articles.iter().flat_map(|a| a.clusters()).collect();
    let price = price_index::<T>(articles, price_window);
    IndicatorRow {
        specialism: specialism.to_string(),
        period: period.to_string(),
        article_count: n,
        mean_authors_per_article: per_article(|a| a.author_count),
        unique_cited_sources: unique.len(),
        mean_unique_refs_per_article: per_article(|a| a.cited.len()),
        price_index: price.value,
        price_eligible_refs: price.eligible,
        negative_age_refs: price.negative_age,
    }
}

pub fn write_indicators_csv<T: Scalar, W: Write>(
    mut out: W,
    rows: &[IndicatorRow<T>],
) -> io::Result<()> {
    writeln!(
        out,
        "specialism,period,article_count,mean_authors_per_article,unique_cited_sources,\
         mean_unique_refs_per_article,price_index,price_eligible_refs,negative_age_refs"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            csv_field(&r.specialism),
            csv_field(&r.period),
            r.article_count,
            fmt_sig9(r.mean_authors_per_article.as_f64()),
            r.unique_cited_sources,
            fmt_sig9(r.mean_unique_refs_per_article.as_f64()),
            r.price_index
                .map(|p| fmt_sig9(p.as_f64()))
                .unwrap_or_default(),
            r.price_eligible_refs,
            r.negative_age_refs
        )?;
    }
    Ok(())
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
