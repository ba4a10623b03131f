//! Synthetic corpora with controllable reference sharing across periods.
//!
//! Each article draws a fraction of its references from a per-period shared
//! pool and the rest from works cited nowhere else. Lowering the shared
//! fraction, or lengthening reference lists while shared draws stay fixed,
//! weakens coupling between articles.

use std::io::Write;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{write_jsonl, AuthorName, PeriodSpec, PublicationRecord};

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid synthetic corpus configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub periods: Vec<PeriodSpec>,
    #[serde(default = "default_specialisms")]
    pub specialisms: Vec<String>,
    pub articles_per_period: usize,
    /// Reference-list length, one entry per period.
    pub refs_per_article: Vec<usize>,
    /// Size of the shared reference pool, one entry per period.
    pub shared_pool_size: Vec<usize>,
    /// Fraction of each reference list drawn from the shared pool, per period.
    pub shared_draw_fraction: Vec<f64>,
    pub coauthor_probability: f64,
    pub vocabulary_size: usize,
    /// Abstract length in words.
    pub abstract_length: usize,
}

fn default_specialisms() -> Vec<String> {
    vec!["synthetic".to_string()]
}

impl SynthConfig {
    /// Four periods where shared citing declines (0.8 → 0.2) while reference
    /// lists lengthen (20 → 50 references).
    pub fn fragmentation(seed: u64) -> Self {
        Self {
            seed,
            periods: vec![
                PeriodSpec::new("1980-1989", 1980, 1989),
                PeriodSpec::new("1990-1999", 1990, 1999),
                PeriodSpec::new("2000-2009", 2000, 2009),
                PeriodSpec::new("2010-2016", 2010, 2016),
            ],
            specialisms: default_specialisms(),
            articles_per_period: 300,
            refs_per_article: vec![20, 30, 40, 50],
            shared_pool_size: vec![1600, 900, 400, 120],
            shared_draw_fraction: vec![0.8, 0.6, 0.4, 0.2],
            coauthor_probability: 0.2,
            vocabulary_size: 3000,
            abstract_length: 60,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let err = |m: String| Err(SynthError::Config(m));
        let n = self.periods.len();
        for (name, len) in [
            ("refs_per_article", self.refs_per_article.len()),
            ("shared_pool_size", self.shared_pool_size.len()),
            ("shared_draw_fraction", self.shared_draw_fraction.len()),
        ] {
            if len != n {
                return err(format!("{name} has {len} entries for {n} periods"));
            }
        }
        crate::ingest::PeriodSets {
            citation: self.periods.clone(),
            text: vec![],
        }
        .validate()
        .map_err(|e| SynthError::Config(e.to_string()))?;
        if self.specialisms.is_empty() {
            return err("no specialisms".into());
        }
        if !(0.0..=1.0).contains(&self.coauthor_probability) {
            return err(format!(
                "coauthor_probability {} outside [0, 1]",
                self.coauthor_probability
            ));
        }
        if self.vocabulary_size < 2 {
            return err("vocabulary_size must be at least 2".into());
        }
        for (k, p) in self.periods.iter().enumerate() {
            let f = self.shared_draw_fraction[k];
            if !(0.0..=1.0).contains(&f) {
                return err(format!(
                    "shared_draw_fraction {f} outside [0, 1] for {}",
                    p.label
                ));
            }
            let draws = self.shared_draws(k);
            if draws > self.shared_pool_size[k] {
                return err(format!(
                    "period {} draws {draws} shared references from a pool of {}",
                    p.label, self.shared_pool_size[k]
                ));
            }
        }
        Ok(())
    }

    /// Shared references per article in period `k`.
    pub fn shared_draws(&self, k: usize) -> usize {
        (self.shared_draw_fraction[k] * self.refs_per_article[k] as f64).round() as usize
    }
}

const LETTERS: &[u8] = b"abcdefghijklmnopqrstuvwxyz";
const NAME_SPACE: u64 = 26u64.pow(6);

/// Six letters from a bijective scramble of `id`, so consecutive ids share
/// no prefix.
fn scrambled_word(id: u64, salt: u64) -> String {
    let mut x = (id.wrapping_mul(0x9E37_79B1) + salt) % NAME_SPACE;
    let mut out = [0u8; 6];
    for slot in out.iter_mut().rev() {
        *slot = LETTERS[(x % 26) as usize];
        x /= 26;
    }
    String::from_utf8(out.to_vec()).expect("ascii")
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next()
        .map(|f| f.to_uppercase().chain(c).collect())
        .unwrap_or_default()
}

struct Generator {
    rng: ChaCha8Rng,
    words: Vec<String>,
    zipf: WeightedIndex<f64>,
    next_work: u64,
}

impl Generator {
    fn text(&mut self, len: usize) -> String {
        (0..len)
            .map(|_| self.words[self.zipf.sample(&mut self.rng)].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// A reference string for a new, distinct cited work.
    fn new_work(&mut self, year: i32) -> String {
        let id = self.next_work;
        self.next_work += 1;
        let surname = capitalize(&scrambled_word(id, 17));
        let initial = (b'A' + self.rng.gen_range(0..26u8)) as char;
        let title_len = self.rng.gen_range(3..=6);
        let title: Vec<String> = (0..title_len)
            .map(|_| capitalize(&scrambled_word(self.rng.gen_range(0..NAME_SPACE), 3)))
            .collect();
        format!(
            "{surname} {initial}, {year}, {}, V{}, P{}",
            title.join(" "),
            self.rng.gen_range(1..80),
            self.rng.gen_range(1..600)
        )
    }
}

/// Generates the corpus; identical configurations give identical output.
pub fn generate(config: &SynthConfig) -> Result<Vec<PublicationRecord>, SynthError> {
    config.validate()?;
    let words: Vec<String> = (0..config.vocabulary_size as u64)
        .map(|r| scrambled_word(r, 101))
        .collect();
    let weights: Vec<f64> = (1..=config.vocabulary_size)
        .map(|r| 1.0 / r as f64)
        .collect();
    let mut gen = Generator {
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        words,
        zipf: WeightedIndex::new(weights).expect("positive weights"),
        next_work: 0,
    };

    let author_pool_size = (config.articles_per_period * config.periods.len())
        .div_ceil(2)
        .max(1);
    let mut records = Vec::new();
    for (s_idx, specialism) in config.specialisms.iter().enumerate() {
        let authors: Vec<AuthorName> = (0..author_pool_size as u64)
            .map(|a| {
                let id = s_idx as u64 * author_pool_size as u64 + a;
                AuthorName::new(
                    capitalize(&scrambled_word(id, 911)),
                    capitalize(&scrambled_word(id, 57)),
                )
            })
            .collect();

        for (k, period) in config.periods.iter().enumerate() {
            let pool: Vec<String> = (0..config.shared_pool_size[k])
                .map(|_| {
                    let year = gen.rng.gen_range(period.start - 30..period.start);
                    gen.new_work(year)
                })
                .collect();
            let shared = config.shared_draws(k);
            let total = config.refs_per_article[k];

            for a in 0..config.articles_per_period {
                let year = gen.rng.gen_range(period.start..=period.end);
                let mut refs: Vec<String> =
                    rand::seq::index::sample(&mut gen.rng, pool.len(), shared)
                        .into_iter()
                        .map(|i| pool[i].clone())
                        .collect();
                for _ in shared..total {
                    let cited_year = gen.rng.gen_range(year - 40..=year);
                    refs.push(gen.new_work(cited_year));
                }
                refs.shuffle(&mut gen.rng);

                let mut article_authors =
                    vec![authors[gen.rng.gen_range(0..authors.len())].clone()];
                while article_authors.len() < 4 && gen.rng.gen_bool(config.coauthor_probability) {
                    let extra = &authors[gen.rng.gen_range(0..authors.len())];
                    if !article_authors.contains(extra) {
                        article_authors.push(extra.clone());
                    }
                }

                let title = capitalize(&gen.text(6));
                let abstract_text = gen.text(config.abstract_length);
                records.push(PublicationRecord {
                    id: format!("{specialism}-{}-{a:05}", period.label),
                    journal: format!("Journal of {}", capitalize(specialism)),
                    specialism: specialism.clone(),
                    year,
                    title,
                    abstract_text: (!abstract_text.is_empty()).then_some(abstract_text),
                    authors: article_authors,
                    refs,
                });
            }
        }
    }
    Ok(records)
}

/// Generates the corpus straight into the JSONL ingest format.
pub fn generate_jsonl<W: Write>(config: &SynthConfig, out: W) -> Result<(), SynthError> {
    let records = generate(config)?;
    write_jsonl(out, &records).map_err(|e| SynthError::Config(format!("write failed: {e}")))
}
