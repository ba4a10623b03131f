//! Command-line front end: one subcommand per pipeline stage plus `run`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use bibcoupling::ingest::InputFormat;
use bibcoupling::network::NetworkKind;
use bibcoupling::pipeline::{self, BundleWriter, PipelineConfig, PipelineError, Stage};
use bibcoupling::synth::{generate_jsonl, SynthConfig};

/// Like `println!`, but a closed stdout (e.g. piped into `head`) is not an error.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(
    name = "bibcoupling",
    version,
    about = "Coupling networks and connectivity decay for publication corpora"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse publication records and tally their references.
    Ingest {
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cluster reference strings and author names; writes the dictionaries.
    Resolve {
        /// Ingest output directory or a records JSONL file.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Build coupling networks from a resolve output directory.
    Network {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        select: Selection,
    },
    /// Threshold sweeps over saved networks.
    Percolate {
        /// Directory containing saved networks.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Descriptive indicators from a resolve output directory.
    Indicators {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        periods: Option<PathBuf>,
    },
    /// Generate a synthetic corpus in the JSONL record format.
    Synth {
        /// Generator settings (JSON); the fragmentation preset when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output JSONL file.
        #[arg(long)]
        out: PathBuf,
    },
    /// The whole pipeline, writing a report bundle with a manifest.
    Run {
        #[arg(long, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        grid: Option<PathBuf>,
        #[command(flatten)]
        select: Selection,
    },
}

#[derive(Args)]
struct Common {
    /// Pipeline settings (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Selection {
    #[arg(long)]
    periods: Option<PathBuf>,
    /// Network kind to build; repeatable (default: all).
    #[arg(long = "network", value_enum)]
    networks: Vec<Kind>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Jsonl,
    Tabular,
}

impl From<Format> for InputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Jsonl => InputFormat::Jsonl,
            Format::Tabular => InputFormat::Tabular,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    ArticleCosine,
    AuthorCosine,
    TextBm25,
}

impl From<Kind> for NetworkKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::ArticleCosine => NetworkKind::ArticleCosine,
            Kind::AuthorCosine => NetworkKind::AuthorCosine,
            Kind::TextBm25 => NetworkKind::TextBm25,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let mut pool = rayon_pool(cli.threads);
    let result = match pool.as_mut() {
        Ok(pool) => pool.install(|| dispatch(cli.command)),
        Err(e) => Err(PipelineError::new(Stage::Config, e)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn rayon_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err("--threads must be positive".into());
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| e.to_string())
}

fn output(dir: &Path) -> Result<BundleWriter, PipelineError> {
    BundleWriter::new(dir)
        .map_err(|e| PipelineError::new(Stage::Output, format!("{}: {e}", dir.display())))
}

fn written(dir: &Path) -> impl Fn(std::io::Error) -> PipelineError + '_ {
    move |e| PipelineError::new(Stage::Output, format!("{}: {e}", dir.display()))
}

fn load_config(path: Option<&Path>) -> Result<PipelineConfig, PipelineError> {
    match path {
        Some(p) => PipelineConfig::load(p),
        None => Ok(PipelineConfig::default()),
    }
}

/// Period sets from `--periods`, else from the config, else the defaults.
fn period_sets(
    flag: Option<&Path>,
    config: &PipelineConfig,
) -> Result<bibcoupling::ingest::PeriodSets, PipelineError> {
    match flag.or(config.periods.as_deref()) {
        Some(p) => bibcoupling::ingest::load_period_sets(p)
            .map_err(|e| PipelineError::new(Stage::Config, e)),
        None => Ok(Default::default()),
    }
}

fn kinds(select: &Selection, config: &PipelineConfig) -> Vec<NetworkKind> {
    if select.networks.is_empty() {
        config.networks.clone()
    } else {
        select.networks.iter().map(|&k| k.into()).collect()
    }
}

fn dispatch(command: Command) -> Result<(), PipelineError> {
    match command {
        Command::Ingest { input, format, out } => {
            let ingest = pipeline::ingest_inputs(&input, format.into())?;
            let mut w = output(&out)?;
            pipeline::write_ingest(&mut w, &ingest).map_err(written(&out))?;
            say!(
                "{} records, {} rejected rows",
                ingest.records.len(),
                ingest.row_errors.len()
            );
        }
        Command::Resolve { input, common } => {
            let config = load_config(common.config.as_deref())?;
            let records = pipeline::load_records(&input, Stage::Resolve)?;
            let resolved =
                pipeline::resolve_records(&records, &config.match_rules, config.author_scope)?;
            let mut w = output(&common.out)?;
            w.write_with(pipeline::RECORDS_FILE, |buf| {
                bibcoupling::ingest::write_jsonl(buf, &records)
            })
            .map_err(written(&common.out))?;
            pipeline::write_resolution(&mut w, &resolved).map_err(written(&common.out))?;
            say!(
                "{} references in {} clusters, {} author identities",
                resolved.tally.parsed,
                resolved.resolution.clusters.len(),
                resolved.author_identities
            );
        }
        Command::Network {
            input,
            common,
            select,
        } => {
            let config = load_config(common.config.as_deref())?;
            let periods = period_sets(select.periods.as_deref(), &config)?;
            let records = pipeline::load_records(&input, Stage::Network)?;
            let (refs, authors) = pipeline::load_dictionaries(&input)?;
            let corpus = pipeline::resolve_corpus(&records, &refs, &authors)?;
            let networks = pipeline::build_networks(
                &records,
                &corpus,
                &periods,
                &kinds(&select, &config),
                config.text_isolates,
            )?;
            let mut w = output(&common.out)?;
            pipeline::write_networks(&mut w, &networks).map_err(written(&common.out))?;
            say!(
                "{} graphs written, {} slices skipped",
                networks.graphs.len(),
                networks.skipped.len()
            );
        }
        Command::Percolate { input, grid, out } => {
            let grid = grid.as_deref().map(pipeline::load_grid).transpose()?;
            let graphs = pipeline::load_graphs(&input)?;
            let percolation = pipeline::percolate_graphs(&graphs, grid.as_deref())?;
            let mut w = output(&out)?;
            pipeline::write_percolation(&mut w, &percolation).map_err(written(&out))?;
            say!("{} profiles written", percolation.series.len());
        }
        Command::Indicators {
            input,
            common,
            periods,
        } => {
            let config = load_config(common.config.as_deref())?;
            let periods = period_sets(periods.as_deref(), &config)?;
            let records = pipeline::load_records(&input, Stage::Indicators)?;
            let (refs, authors) = pipeline::load_dictionaries(&input)?;
            let corpus = pipeline::resolve_corpus(&records, &refs, &authors)?;
            let rows =
                pipeline::compute_indicators(&corpus, &periods.citation, config.price_window);
            let mut w = output(&common.out)?;
            pipeline::write_indicators(&mut w, &rows).map_err(written(&common.out))?;
            say!("{} indicator rows written", rows.len());
        }
        Command::Synth { config, seed, out } => {
            let mut cfg = match &config {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| {
                        PipelineError::new(Stage::Config, format!("{}: {e}", path.display()))
                    })?;
                    serde_json::from_str::<SynthConfig>(&text).map_err(|e| {
                        PipelineError::new(Stage::Config, format!("{}: {e}", path.display()))
                    })?
                }
                None => SynthConfig::fragmentation(0),
            };
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(written(parent))?;
            }
            let file = std::fs::File::create(&out).map_err(written(&out))?;
            let mut writer = std::io::BufWriter::new(file);
            generate_jsonl(&cfg, &mut writer).map_err(|e| PipelineError::new(Stage::Config, e))?;
            std::io::Write::flush(&mut writer).map_err(written(&out))?;
            say!("seed {}", cfg.seed);
        }
        Command::Run {
            input,
            format,
            config,
            out,
            grid,
            select,
        } => {
            let mut cfg = load_config(config.as_deref())?;
            if !input.is_empty() {
                cfg.input = input;
            }
            if let Some(f) = format {
                cfg.format = f.into();
            }
            if let Some(out) = out {
                cfg.out = out;
            }
            if grid.is_some() {
                cfg.grid = grid;
            }
            if select.periods.is_some() {
                cfg.periods = select.periods.clone();
            }
            cfg.networks = kinds(&select, &cfg);
            let summary = pipeline::run_pipeline(&cfg)?;
            info!("config hash {}", summary.manifest.config_hash);
            say!("bundle {}", summary.out.display());
            say!("manifest sha256 {}", summary.manifest_sha256);
        }
    }
    Ok(())
}
