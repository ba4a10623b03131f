//! End-to-end orchestration: ingest, resolve, slice, networks, percolation,
//! indicators, and the on-disk report bundle.
//!
//! Every stage can run on its own from the artifacts the previous stage
//! persisted; [`run_pipeline`] chains them and writes a manifest.

mod bundle;
mod run;
mod stages;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{load_period_sets, InputFormat, PeriodSets};
use crate::network::NetworkKind;
use crate::resolve::{AuthorScope, MatchRuleConfig};

pub use bundle::{path_component, sha256_hex, BundleWriter};
pub use run::{
    run_pipeline, run_pipeline_with_threads, Manifest, ManifestInput, RunSummary, SeriesEntry,
    MANIFEST_FILE,
};
pub use stages::{
    aggregate_file, build_networks, compute_indicators, ingest_inputs, load_dictionaries,
    load_graphs, load_records, percolate_graphs, resolve_corpus, resolve_records, write_indicators,
    write_ingest, write_networks, write_percolation, write_resolution, AggregateSeries, BuiltGraph,
    GridSource, IngestOutput, InputRowError, NetworkOutput, PercolationOutput, ProfileSeries,
    ResolveOutput, SkippedGraph, AUTHOR_DICTIONARY_FILE, RECORDS_FILE, REFERENCE_DICTIONARY_FILE,
};

/// The stage a failure happened in; determines the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Config,
    Ingest,
    Resolve,
    Network,
    Percolate,
    Indicators,
    Output,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Resolve => "resolve",
            Stage::Network => "network",
            Stage::Percolate => "percolate",
            Stage::Indicators => "indicators",
            Stage::Output => "output",
        }
    }

    /// Machine-readable error code.
    pub fn code(self) -> &'static str {
        match self {
            Stage::Config => "E_CONFIG",
            Stage::Ingest => "E_INGEST",
            Stage::Resolve => "E_RESOLVE",
            Stage::Network => "E_NETWORK",
            Stage::Percolate => "E_PERCOLATE",
            Stage::Indicators => "E_INDICATORS",
            Stage::Output => "E_OUTPUT",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Stage::Config => 2,
            Stage::Ingest => 3,
            Stage::Resolve => 4,
            Stage::Network => 5,
            Stage::Percolate => 6,
            Stage::Indicators | Stage::Output => 1,
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
#[error("{stage} stage failed [{}]: {message}", stage.code())]
pub struct PipelineError {
    pub stage: Stage,
    pub message: String,
}

impl PipelineError {
    pub fn new(stage: Stage, message: impl fmt::Display) -> Self {
        Self {
            stage,
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.stage.exit_code()
    }

    pub(crate) fn at<E: fmt::Display>(stage: Stage) -> impl Fn(E) -> Self {
        move |e| Self::new(stage, e)
    }
}

pub(crate) fn io_error(stage: Stage, path: &Path, e: impl fmt::Display) -> PipelineError {
    PipelineError::new(stage, format!("{}: {e}", path.display()))
}

/// Settings for a full run, as read from `--config` and overridden by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: Vec<PathBuf>,
    pub format: InputFormat,
    /// Period file; the built-in citation and text period sets when absent.
    pub periods: Option<PathBuf>,
    pub networks: Vec<NetworkKind>,
    /// Threshold file overriding the default grids.
    pub grid: Option<PathBuf>,
    pub out: PathBuf,
    pub match_rules: MatchRuleConfig,
    pub author_scope: AuthorScope,
    /// Keep articles without a usable abstract as isolated text-network nodes.
    pub text_isolates: bool,
    pub price_window: i32,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            input: Vec::new(),
            format: InputFormat::Jsonl,
            periods: None,
            networks: NetworkKind::ALL.to_vec(),
            grid: None,
            out: PathBuf::from("bundle"),
            match_rules: MatchRuleConfig::default(),
            author_scope: AuthorScope::default(),
            text_isolates: false,
            price_window: crate::indicators::DEFAULT_PRICE_WINDOW,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(Stage::Config, path, e))?;
        serde_json::from_str(&text).map_err(|e| io_error(Stage::Config, path, e))
    }

    /// Checks the configuration and reads the period and grid files.
    pub fn settings(&self) -> Result<Settings, PipelineError> {
        if self.input.is_empty() {
            return Err(PipelineError::new(Stage::Config, "no input file given"));
        }
        for path in &self.input {
            if !path.is_file() {
                return Err(io_error(Stage::Config, path, "input file not found"));
            }
        }
        if self.networks.is_empty() {
            return Err(PipelineError::new(
                Stage::Config,
                "no network kind selected",
            ));
        }
        if self.price_window < 0 {
            return Err(PipelineError::new(
                Stage::Config,
                "price window must be non-negative",
            ));
        }
        self.match_rules
            .validate()
            .map_err(PipelineError::at(Stage::Config))?;
        let periods = match &self.periods {
            Some(path) => load_period_sets(path).map_err(PipelineError::at(Stage::Config))?,
            None => PeriodSets::default(),
        };
        let grid = self.grid.as_deref().map(load_grid).transpose()?;
        let mut networks = self.networks.clone();
        networks.sort();
        networks.dedup();
        Ok(Settings {
            format: self.format,
            periods,
            networks,
            grid,
            match_rules: self.match_rules.clone(),
            author_scope: self.author_scope,
            text_isolates: self.text_isolates,
            price_window: self.price_window,
        })
    }
}

/// The resolved analysis settings. Paths and thread counts are left out so
/// the hash depends only on what shapes the results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub format: InputFormat,
    pub periods: PeriodSets,
    pub networks: Vec<NetworkKind>,
    pub grid: Option<Vec<f64>>,
    pub match_rules: MatchRuleConfig,
    pub author_scope: AuthorScope,
    pub text_isolates: bool,
    pub price_window: i32,
}

impl Settings {
    pub fn hash(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("settings serialize"))
    }
}

/// Reads a threshold grid: one number per line, blank lines and `#` comments
/// ignored, strictly ascending.
pub fn load_grid(path: &Path) -> Result<Vec<f64>, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(Stage::Config, path, e))?;
    let mut grid = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let t: f64 = line
            .parse()
            .ok()
            .filter(|t: &f64| t.is_finite())
            .ok_or_else(|| {
                io_error(
                    Stage::Config,
                    path,
                    format!("line {}: not a number: {line:?}", n + 1),
                )
            })?;
        if grid.last().is_some_and(|&prev| t <= prev) {
            return Err(io_error(
                Stage::Config,
                path,
                format!("line {}: thresholds must be strictly ascending", n + 1),
            ));
        }
        grid.push(t);
    }
    if grid.is_empty() {
        return Err(io_error(Stage::Config, path, "grid file has no thresholds"));
    }
    Ok(grid)
}
