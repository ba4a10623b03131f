use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use log::info;
use serde::Serialize;

use super::bundle::{sha256_hex, BundleWriter};
use super::stages::{
    aggregate_file, build_networks, compute_indicators, ingest_inputs, percolate_graphs,
    resolve_corpus, resolve_records, write_indicators, write_ingest, write_networks,
    write_percolation, write_resolution,
};
use super::{io_error, PipelineConfig, PipelineError, Settings, Stage};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct ManifestInput {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Provenance of one plot-ready series.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesEntry {
    pub file: String,
    pub network: String,
    /// `None` for series aggregated over specialisms.
    pub specialism: Option<String>,
    /// `None` when the file holds every period.
    pub period: Option<String>,
    pub grid: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub settings: Settings,
    pub inputs: Vec<ManifestInput>,
    pub series: Vec<SeriesEntry>,
    /// Bundle-relative path → sha256, for every other file in the bundle.
    pub files: BTreeMap<String, String>,
}

/// Result of a successful run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out: PathBuf,
    pub manifest: Manifest,
    pub manifest_sha256: String,
}

/// Runs the full pipeline and writes the bundle to `config.out`.
///
/// The bundle is assembled in a sibling staging directory and moved into
/// place only when every stage succeeded; on failure nothing is left behind.
/// An existing output directory is replaced only if it is empty or holds a
/// previous bundle.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunSummary, PipelineError> {
    let settings = config.settings()?;
    let out = &config.out;
    check_output_dir(out)?;
    let staging = staging_dir(out)?;
    if staging.exists() {
        std::fs::remove_dir_all(&staging).map_err(|e| io_error(Stage::Output, &staging, e))?;
    }
    let result = build_bundle(config, &settings, &staging);
    let (manifest, manifest_sha256) = match result {
        Ok(done) => done,
        Err(e) => {
            let _ = std::fs::remove_dir_all(&staging);
            return Err(e);
        }
    };
    if out.exists() {
        std::fs::remove_dir_all(out).map_err(|e| io_error(Stage::Output, out, e))?;
    }
    std::fs::rename(&staging, out).map_err(|e| io_error(Stage::Output, out, e))?;
    info!("bundle written to {}", out.display());
    Ok(RunSummary {
        out: out.clone(),
        manifest,
        manifest_sha256,
    })
}

/// [`run_pipeline`] on a dedicated pool of `threads` workers (all cores when `None`).
pub fn run_pipeline_with_threads(
    config: &PipelineConfig,
    threads: Option<usize>,
) -> Result<RunSummary, PipelineError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(PipelineError::new(
                Stage::Config,
                "thread count must be positive",
            ));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(PipelineError::at(Stage::Config))?;
    pool.install(|| run_pipeline(config))
}

fn check_output_dir(out: &Path) -> Result<(), PipelineError> {
    if !out.exists() {
        return Ok(());
    }
    if !out.is_dir() {
        return Err(io_error(
            Stage::Config,
            out,
            "output path exists and is not a directory",
        ));
    }
    let empty = std::fs::read_dir(out)
        .map_err(|e| io_error(Stage::Config, out, e))?
        .next()
        .is_none();
    if empty || out.join(MANIFEST_FILE).is_file() {
        Ok(())
    } else {
        Err(io_error(
            Stage::Config,
            out,
            "refusing to overwrite a non-empty directory that is not a previous bundle",
        ))
    }
}

fn staging_dir(out: &Path) -> Result<PathBuf, PipelineError> {
    let name = out
        .file_name()
        .ok_or_else(|| io_error(Stage::Config, out, "output path has no directory name"))?;
    Ok(out.with_file_name(format!(".{}.partial", name.to_string_lossy())))
}

fn build_bundle(
    config: &PipelineConfig,
    settings: &Settings,
    root: &Path,
) -> Result<(Manifest, String), PipelineError> {
    let output = |e: std::io::Error| io_error(Stage::Output, root, e);
    let mut inputs = Vec::new();
    for path in &config.input {
        let bytes = std::fs::read(path).map_err(|e| io_error(Stage::Ingest, path, e))?;
        inputs.push(ManifestInput {
            name: path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(&bytes),
        });
    }

    let mut w = BundleWriter::new(root).map_err(output)?;
    let ingest = ingest_inputs(&config.input, settings.format)?;
    write_ingest(&mut w, &ingest).map_err(output)?;

    let resolved = resolve_records(
        &ingest.records,
        &settings.match_rules,
        settings.author_scope,
    )?;
    write_resolution(&mut w, &resolved).map_err(output)?;
    let corpus = resolve_corpus(&ingest.records, &resolved.references, &resolved.authors)?;

    let networks = build_networks(
        &ingest.records,
        &corpus,
        &settings.periods,
        &settings.networks,
        settings.text_isolates,
    )?;
    write_networks(&mut w, &networks).map_err(output)?;

    let percolation = percolate_graphs(&networks.graphs, settings.grid.as_deref())?;
    write_percolation(&mut w, &percolation).map_err(output)?;

    let rows = compute_indicators(&corpus, &settings.periods.citation, settings.price_window);
    write_indicators(&mut w, &rows).map_err(output)?;

    let mut series: Vec<SeriesEntry> = percolation
        .series
        .iter()
        .map(|s| SeriesEntry {
            file: s.file(),
            network: s.kind.name().to_string(),
            specialism: Some(s.specialism.clone()),
            period: Some(s.period.label.clone()),
            grid: s.grid.to_string(),
        })
        .collect();
    let mut seen_kinds = Vec::new();
    for agg in &percolation.aggregates {
        if !seen_kinds.contains(&agg.kind) {
            seen_kinds.push(agg.kind);
            series.push(SeriesEntry {
                file: aggregate_file(agg.kind),
                network: agg.kind.name().to_string(),
                specialism: None,
                period: None,
                grid: agg.grid.to_string(),
            });
        }
    }
    series.push(SeriesEntry {
        file: "indicators.csv".to_string(),
        network: "none".to_string(),
        specialism: None,
        period: None,
        grid: "none".to_string(),
    });

    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: settings.hash(),
        settings: settings.clone(),
        inputs,
        series,
        files: w.files().clone(),
    };
    let mut bytes =
        serde_json::to_vec_pretty(&manifest).map_err(|e| io_error(Stage::Output, root, e))?;
    bytes.push(b'\n');
    std::fs::write(root.join(MANIFEST_FILE), &bytes).map_err(output)?;
    Ok((manifest, sha256_hex(&bytes)))
}
