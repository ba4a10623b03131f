use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use super::bundle::{path_component, BundleWriter};
use super::{io_error, PipelineError, Stage};
use crate::indicators::{descriptive_stats, write_indicators_csv, IndicatorRow};
use crate::ingest::{
    parse_records, parse_reference_string, write_jsonl, InputFormat, PeriodSets, PeriodSpec,
    PublicationRecord, RawReference, ReferenceTally, DEFAULT_YEAR_RANGE,
};
use crate::network::{
    build_article_coupling, build_author_coupling, build_idf, build_text_coupling, tokenize,
    Bm25Params, CoupledGraph, GraphContext, NetworkKind, NodeKind, TokenProfile, WeightKind,
};
use crate::percolation::{
    aggregate_profiles, connectivity_profile, cosine_grid, quantile_grid, AggregateCurve,
    ConnectivityProfile,
};
use crate::resolve::{
    resolve_authors, resolve_references, AuthorDictionary, AuthorScope, MatchRuleConfig,
    ReferenceDictionary, ReferenceResolution, ResolutionStats, ResolvedArticle, ResolvedCorpus,
};
use crate::scalar::fmt_sig9;

pub const RECORDS_FILE: &str = "records.jsonl";
pub const REFERENCE_DICTIONARY_FILE: &str = "reference_dictionary.jsonl";
pub const AUTHOR_DICTIONARY_FILE: &str = "author_dictionary.jsonl";

#[derive(Debug, Clone, Serialize)]
pub struct InputRowError {
    pub input: String,
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct IngestOutput {
    pub records: Vec<PublicationRecord>,
    pub row_errors: Vec<InputRowError>,
    pub tally: ReferenceTally,
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Parses every input file. Rejected rows are kept for the report; an input
/// without a single valid record is an error.
pub fn ingest_inputs(
    inputs: &[PathBuf],
    format: InputFormat,
) -> Result<IngestOutput, PipelineError> {
    let mut records = Vec::new();
    let mut row_errors = Vec::new();
    let mut seen: HashMap<String, String> = HashMap::new();
    for path in inputs {
        let file = std::fs::File::open(path).map_err(|e| io_error(Stage::Ingest, path, e))?;
        let parsed = parse_records(io::BufReader::new(file), format, DEFAULT_YEAR_RANGE)
            .map_err(|e| io_error(Stage::Ingest, path, e))?;
        let label = file_label(path);
        for record in parsed.records {
            if let Some(first) = seen.insert(record.id.clone(), label.clone()) {
                return Err(io_error(
                    Stage::Ingest,
                    path,
                    format!("record id {:?} already read from {first}", record.id),
                ));
            }
            records.push(record);
        }
        for e in parsed.row_errors {
            warn!("{label}:{}: {}", e.line, e.message);
            row_errors.push(InputRowError {
                input: label.clone(),
                line: e.line,
                message: e.message,
            });
        }
    }
    if records.is_empty() {
        return Err(PipelineError::new(
            Stage::Ingest,
            "input contains no valid records",
        ));
    }
    let mut tally = ReferenceTally::default();
    for record in &records {
        for raw in &record.refs {
            tally.record(&parse_reference_string(&record.id, raw));
        }
    }
    info!(
        "ingested {} records ({} rejected rows)",
        records.len(),
        row_errors.len()
    );
    Ok(IngestOutput {
        records,
        row_errors,
        tally,
    })
}

#[derive(Serialize)]
struct IngestReport<'a> {
    records: usize,
    rejected_rows: usize,
    row_errors: &'a [InputRowError],
    references: ReferenceCounts,
}

#[derive(Serialize)]
struct ReferenceCounts {
    raw: usize,
    parsed: usize,
    discarded: usize,
    anonymous: usize,
    yearless: usize,
    malformed: usize,
    multi_year: usize,
}

impl From<&ReferenceTally> for ReferenceCounts {
    fn from(t: &ReferenceTally) -> Self {
        Self {
            raw: t.total(),
            parsed: t.parsed,
            discarded: t.discarded(),
            anonymous: t.anonymous,
            yearless: t.yearless,
            malformed: t.malformed,
            multi_year: t.multi_year,
        }
    }
}

pub fn write_ingest(out: &mut BundleWriter, ingest: &IngestOutput) -> io::Result<()> {
    out.write_with(RECORDS_FILE, |buf| write_jsonl(buf, &ingest.records))?;
    out.write_json(
        "ingest_report.json",
        &IngestReport {
            records: ingest.records.len(),
            rejected_rows: ingest.row_errors.len(),
            row_errors: &ingest.row_errors,
            references: (&ingest.tally).into(),
        },
    )
}

/// Reads persisted records: a `records.jsonl` file or a directory holding one.
pub fn load_records(path: &Path, stage: Stage) -> Result<Vec<PublicationRecord>, PipelineError> {
    let file = if path.is_dir() {
        path.join(RECORDS_FILE)
    } else {
        path.to_path_buf()
    };
    let reader = std::fs::File::open(&file).map_err(|e| io_error(stage, &file, e))?;
    let parsed = parse_records(
        io::BufReader::new(reader),
        InputFormat::Jsonl,
        DEFAULT_YEAR_RANGE,
    )
    .map_err(|e| io_error(stage, &file, e))?;
    if let Some(e) = parsed.row_errors.first() {
        return Err(io_error(
            stage,
            &file,
            format!("line {}: {}", e.line, e.message),
        ));
    }
    if parsed.records.is_empty() {
        return Err(io_error(stage, &file, "no records"));
    }
    Ok(parsed.records)
}

#[derive(Debug, Clone)]
pub struct ResolveOutput {
    pub resolution: ReferenceResolution,
    pub references: ReferenceDictionary,
    pub authors: AuthorDictionary,
    pub author_scope: AuthorScope,
    pub author_occurrences: usize,
    pub author_identities: usize,
    pub tally: ReferenceTally,
}

/// Clusters every parsed reference and every author name of the corpus.
pub fn resolve_records(
    records: &[PublicationRecord],
    rules: &MatchRuleConfig,
    scope: AuthorScope,
) -> Result<ResolveOutput, PipelineError> {
    rules.validate().map_err(PipelineError::at(Stage::Config))?;
    let mut tally = ReferenceTally::default();
    let mut refs: Vec<RawReference> = Vec::new();
    for record in records {
        for raw in &record.refs {
            let parsed = parse_reference_string(&record.id, raw);
            tally.record(&parsed);
            refs.extend(parsed.ok());
        }
    }
    let resolution = resolve_references(&refs, rules);
    let references = ReferenceDictionary::from_resolution(records, &resolution);

    let names: Vec<_> = records
        .iter()
        .flat_map(|r| r.authors.iter().map(|a| (a.clone(), r.specialism.clone())))
        .collect();
    let author_resolution = resolve_authors(&names, scope, rules);
    let authors = AuthorDictionary::from_resolution(&names, scope, &author_resolution);
    info!(
        "resolved {} references into {} clusters, {} author names into {} identities",
        refs.len(),
        resolution.clusters.len(),
        names.len(),
        author_resolution.identities.len()
    );
    Ok(ResolveOutput {
        author_identities: author_resolution.identities.len(),
        author_occurrences: names.len(),
        resolution,
        references,
        authors,
        author_scope: scope,
        tally,
    })
}

#[derive(Serialize)]
struct ResolutionReport<'a> {
    totals: ResolutionTotals,
    references: ReferenceCounts,
    blocking: &'a ResolutionStats,
    authors: AuthorTotals,
}

#[derive(Serialize)]
struct ResolutionTotals {
    raw: usize,
    resolved: usize,
    discarded: usize,
}

#[derive(Serialize)]
struct AuthorTotals {
    scope: AuthorScope,
    occurrences: usize,
    identities: usize,
}

pub fn write_resolution(out: &mut BundleWriter, resolve: &ResolveOutput) -> io::Result<()> {
    out.write_with(REFERENCE_DICTIONARY_FILE, |buf| {
        resolve.references.write(buf)
    })?;
    out.write_with(AUTHOR_DICTIONARY_FILE, |buf| resolve.authors.write(buf))?;
    out.write_json(
        "resolution_report.json",
        &ResolutionReport {
            totals: ResolutionTotals {
                raw: resolve.tally.total(),
                resolved: resolve.resolution.clusters.len(),
                discarded: resolve.tally.discarded(),
            },
            references: (&resolve.tally).into(),
            blocking: &resolve.resolution.stats,
            authors: AuthorTotals {
                scope: resolve.author_scope,
                occurrences: resolve.author_occurrences,
                identities: resolve.author_identities,
            },
        },
    )
}

/// Loads the dictionaries persisted by the resolve stage from `dir`.
pub fn load_dictionaries(
    dir: &Path,
) -> Result<(ReferenceDictionary, AuthorDictionary), PipelineError> {
    let refs = ReferenceDictionary::load(&dir.join(REFERENCE_DICTIONARY_FILE))
        .map_err(PipelineError::at(Stage::Resolve))?;
    let authors = AuthorDictionary::load(&dir.join(AUTHOR_DICTIONARY_FILE))
        .map_err(PipelineError::at(Stage::Resolve))?;
    Ok((refs, authors))
}

pub fn resolve_corpus(
    records: &[PublicationRecord],
    references: &ReferenceDictionary,
    authors: &AuthorDictionary,
) -> Result<ResolvedCorpus, PipelineError> {
    ResolvedCorpus::build(records, references, authors).map_err(PipelineError::at(Stage::Resolve))
}

/// A graph together with the network kind it was built as.
#[derive(Debug, Clone)]
pub struct BuiltGraph {
    pub kind: NetworkKind,
    pub graph: CoupledGraph<f64>,
}

impl BuiltGraph {
    /// Bundle-relative path without extension.
    pub fn stem(&self) -> String {
        series_stem("networks", self.kind, &self.graph.context)
    }
}

fn series_stem(root: &str, kind: NetworkKind, ctx: &GraphContext) -> String {
    format!(
        "{root}/{}/{}/{}",
        kind.name(),
        path_component(&ctx.specialism),
        path_component(&ctx.period.label)
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedGraph {
    pub network: NetworkKind,
    pub specialism: String,
    pub period: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct NetworkOutput {
    pub graphs: Vec<BuiltGraph>,
    pub skipped: Vec<SkippedGraph>,
    /// Documents the shared IDF table was computed over.
    pub idf_documents: Option<usize>,
}

fn sorted_periods(periods: &[PeriodSpec]) -> Vec<PeriodSpec> {
    let mut sorted = periods.to_vec();
    sorted.sort_by_key(|p| (p.start, p.end));
    sorted
}

fn specialisms(corpus: &ResolvedCorpus) -> Vec<String> {
    let set: BTreeSet<&str> = corpus
        .articles
        .iter()
        .map(|a| a.specialism.as_str())
        .collect();
    set.into_iter().map(str::to_string).collect()
}

fn slice_indices(corpus: &ResolvedCorpus, specialism: &str, period: &PeriodSpec) -> Vec<usize> {
    corpus
        .articles
        .iter()
        .enumerate()
        .filter(|(_, a)| a.specialism == specialism && period.contains(a.year))
        .map(|(i, _)| i)
        .collect()
}

/// Builds every requested network for every (specialism, period) slice.
/// `records` and `corpus.articles` must be index-aligned.
pub fn build_networks(
    records: &[PublicationRecord],
    corpus: &ResolvedCorpus,
    periods: &PeriodSets,
    kinds: &[NetworkKind],
    text_isolates: bool,
) -> Result<NetworkOutput, PipelineError> {
    if records.len() != corpus.articles.len() {
        return Err(PipelineError::new(
            Stage::Network,
            "records and resolved corpus differ in length",
        ));
    }
    let specialisms = specialisms(corpus);
    check_label_collisions(&specialisms, periods)?;
    let mut kinds = kinds.to_vec();
    kinds.sort();
    kinds.dedup();

    let mut out = NetworkOutput::default();
    for kind in kinds {
        let (period_list, text) = match kind {
            NetworkKind::TextBm25 => (sorted_periods(&periods.text), true),
            _ => (sorted_periods(&periods.citation), false),
        };
        let text_index = if text {
            Some(TextIndex::new(records, &period_list))
        } else {
            None
        };
        if let Some(TextIndex { idf: None, .. }) = &text_index {
            warn!("no usable abstracts in the text periods; text networks skipped");
        }
        for specialism in &specialisms {
            for period in &period_list {
                let skip = |reason: &str| SkippedGraph {
                    network: kind,
                    specialism: specialism.clone(),
                    period: period.label.clone(),
                    reason: reason.to_string(),
                };
                let indices = slice_indices(corpus, specialism, period);
                if indices.is_empty() {
                    out.skipped.push(skip("no articles in slice"));
                    continue;
                }
                let ctx = GraphContext::new(specialism.clone(), period.clone());
                let articles: Vec<&ResolvedArticle> =
                    indices.iter().map(|&i| &corpus.articles[i]).collect();
                let graph = match (&text_index, kind) {
                    (None, NetworkKind::ArticleCosine) => build_article_coupling(&articles, ctx),
                    (None, _) => build_author_coupling(&articles, &corpus.author_ids, ctx),
                    (Some(index), _) => match index.graph(records, &indices, ctx, text_isolates) {
                        Ok(g) => g,
                        Err(reason) => {
                            out.skipped.push(skip(reason));
                            continue;
                        }
                    },
                };
                if graph.node_count() == 0 {
                    out.skipped.push(skip("no nodes in slice"));
                    continue;
                }
                let graph = graph.quantized();
                graph
                    .validate()
                    .map_err(PipelineError::at(Stage::Network))?;
                info!(
                    "{kind} {specialism} {}: {} nodes, {} edges",
                    period.label,
                    graph.node_count(),
                    graph.edge_count()
                );
                out.graphs.push(BuiltGraph { kind, graph });
            }
        }
        if let Some(index) = text_index {
            out.idf_documents = Some(index.documents);
        }
    }
    Ok(out)
}

fn check_label_collisions(
    specialisms: &[String],
    periods: &PeriodSets,
) -> Result<(), PipelineError> {
    let check = |labels: Vec<&str>, what: &str| {
        let mut seen: HashMap<String, &str> = HashMap::new();
        for label in labels {
            if let Some(other) = seen.insert(path_component(label), label) {
                if other != label {
                    return Err(PipelineError::new(
                        Stage::Config,
                        format!("{what} labels {other:?} and {label:?} map to the same file name"),
                    ));
                }
            }
        }
        Ok(())
    };
    check(
        specialisms.iter().map(String::as_str).collect(),
        "specialism",
    )?;
    check(
        periods.citation.iter().map(|p| p.label.as_str()).collect(),
        "period",
    )?;
    check(
        periods.text.iter().map(|p| p.label.as_str()).collect(),
        "period",
    )
}

/// Token profiles of every record inside the text periods, and the IDF table
/// shared by all text networks.
struct TextIndex {
    profiles: Vec<Option<TokenProfile>>,
    idf: Option<crate::network::IdfTable<f64>>,
    documents: usize,
}

impl TextIndex {
    fn new(records: &[PublicationRecord], periods: &[PeriodSpec]) -> Self {
        let profiles: Vec<Option<TokenProfile>> = records
            .par_iter()
            .map(|r| {
                let abstract_text = r.abstract_text.as_deref()?;
                if !periods.iter().any(|p| p.contains(r.year)) {
                    return None;
                }
                let profile = tokenize(&r.id, &r.title, abstract_text);
                if profile.is_none() {
                    warn!(
                        "record {}: no usable tokens, excluded from text networks",
                        r.id
                    );
                }
                profile
            })
            .collect();
        let all: Vec<TokenProfile> = profiles.iter().flatten().cloned().collect();
        Self {
            documents: all.len(),
            idf: build_idf(&all).ok(),
            profiles,
        }
    }

    fn graph(
        &self,
        records: &[PublicationRecord],
        indices: &[usize],
        ctx: GraphContext,
        isolates: bool,
    ) -> Result<CoupledGraph<f64>, &'static str> {
        let idf = self
            .idf
            .as_ref()
            .ok_or("no usable abstracts in the text periods")?;
        let with_text: Vec<&TokenProfile> = indices
            .iter()
            .filter_map(|&i| self.profiles[i].as_ref())
            .collect();
        let mut graph = build_text_coupling(&with_text, idf, &Bm25Params::default(), ctx);
        if isolates {
            graph.add_isolates(
                indices
                    .iter()
                    .filter(|&&i| self.profiles[i].is_none())
                    .map(|&i| records[i].id.clone()),
            );
        }
        if graph.node_count() == 0 {
            return Err("no articles with usable abstracts in slice");
        }
        Ok(graph)
    }
}

#[derive(Serialize)]
struct NetworkReport<'a> {
    idf_documents: Option<usize>,
    graphs: Vec<GraphEntry>,
    skipped: &'a [SkippedGraph],
}

#[derive(Serialize)]
struct GraphEntry {
    network: NetworkKind,
    specialism: String,
    period: String,
    nodes: usize,
    edges: usize,
    files: String,
}

pub fn write_networks(out: &mut BundleWriter, networks: &NetworkOutput) -> io::Result<()> {
    let mut entries = Vec::new();
    for built in &networks.graphs {
        let stem = built.stem();
        let g = &built.graph;
        out.write_with(&format!("{stem}.edges.tsv"), |buf| g.write_edges(buf))?;
        out.write_with(&format!("{stem}.nodes.tsv"), |buf| g.write_nodes(buf))?;
        out.write_json(&format!("{stem}.summary.json"), &g.summary())?;
        entries.push(GraphEntry {
            network: built.kind,
            specialism: g.context.specialism.clone(),
            period: g.context.period.label.clone(),
            nodes: g.node_count(),
            edges: g.edge_count(),
            files: stem,
        });
    }
    out.write_json(
        "networks/network_report.json",
        &NetworkReport {
            idf_documents: networks.idf_documents,
            graphs: entries,
            skipped: &networks.skipped,
        },
    )
}

fn kind_of(graph: &CoupledGraph<f64>) -> NetworkKind {
    match (graph.node_kind, graph.weight_kind) {
        (_, WeightKind::Bm25Text) => NetworkKind::TextBm25,
        (NodeKind::Author, _) => NetworkKind::AuthorCosine,
        (NodeKind::Article, _) => NetworkKind::ArticleCosine,
    }
}

/// Loads every graph saved below `dir` (a bundle, its `networks/` directory
/// or any subdirectory of it).
pub fn load_graphs(dir: &Path) -> Result<Vec<BuiltGraph>, PipelineError> {
    const SUFFIX: &str = ".summary.json";
    let mut graphs = Vec::new();
    for entry in walkdir::WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| io_error(Stage::Percolate, dir, e))?;
        let name = entry.file_name().to_string_lossy();
        let Some(stem) = name.strip_suffix(SUFFIX) else {
            continue;
        };
        let parent = entry.path().parent().unwrap_or(dir);
        let graph =
            CoupledGraph::<f64>::load(parent, stem).map_err(PipelineError::at(Stage::Percolate))?;
        graphs.push(BuiltGraph {
            kind: kind_of(&graph),
            graph,
        });
    }
    if graphs.is_empty() {
        return Err(io_error(Stage::Percolate, dir, "no saved graphs found"));
    }
    graphs.sort_by(|a, b| {
        let key = |g: &BuiltGraph| {
            let ctx = &g.graph.context;
            (
                g.kind,
                ctx.specialism.clone(),
                ctx.period.start,
                ctx.period.end,
            )
        };
        key(a).cmp(&key(b))
    });
    Ok(graphs)
}

/// Where a threshold grid came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridSource {
    /// 0.00, 0.01, ..., 1.00.
    CosineFixed,
    /// Percentiles of the edge weights pooled over all graphs of the kind.
    PooledQuantiles,
    /// Supplied by the user.
    File,
}

impl fmt::Display for GridSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridSource::CosineFixed => "cosine-fixed",
            GridSource::PooledQuantiles => "pooled-quantiles",
            GridSource::File => "file",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ProfileSeries {
    pub kind: NetworkKind,
    pub specialism: String,
    pub period: PeriodSpec,
    pub grid: GridSource,
    pub profile: ConnectivityProfile<f64>,
}

impl ProfileSeries {
    pub fn file(&self) -> String {
        let ctx = GraphContext::new(self.specialism.clone(), self.period.clone());
        format!("{}.csv", series_stem("percolation", self.kind, &ctx))
    }
}

#[derive(Debug, Clone)]
pub struct AggregateSeries {
    pub kind: NetworkKind,
    pub period: PeriodSpec,
    pub grid: GridSource,
    pub specialisms: Vec<String>,
    pub curve: AggregateCurve<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct PercolationOutput {
    pub series: Vec<ProfileSeries>,
    pub aggregates: Vec<AggregateSeries>,
}

impl PercolationOutput {
    pub fn find(
        &self,
        kind: NetworkKind,
        specialism: &str,
        period: &str,
    ) -> Option<&ProfileSeries> {
        self.series
            .iter()
            .find(|s| s.kind == kind && s.specialism == specialism && s.period.label == period)
    }
}

pub fn aggregate_file(kind: NetworkKind) -> String {
    format!("percolation/{}.aggregate.csv", kind.name())
}

/// Sweeps every graph. Graphs of one kind share a grid (the override, the
/// fixed cosine grid, or pooled weight quantiles for BM25) so their curves
/// can be averaged per period across specialisms.
pub fn percolate_graphs(
    graphs: &[BuiltGraph],
    grid: Option<&[f64]>,
) -> Result<PercolationOutput, PipelineError> {
    let mut grids: BTreeMap<NetworkKind, (GridSource, Vec<f64>)> = BTreeMap::new();
    for built in graphs {
        if grids.contains_key(&built.kind) {
            continue;
        }
        let entry = match (grid, built.kind.weight_kind()) {
            (Some(g), _) => (GridSource::File, g.to_vec()),
            (None, WeightKind::CosineOverlap) => (GridSource::CosineFixed, cosine_grid()),
            (None, WeightKind::Bm25Text) => {
                let pooled: Vec<f64> = graphs
                    .iter()
                    .filter(|g| g.kind == built.kind)
                    .flat_map(|g| g.graph.edges.iter().map(|e| e.weight))
                    .collect();
                (GridSource::PooledQuantiles, quantile_grid(&pooled))
            }
        };
        grids.insert(built.kind, entry);
    }

    let series: Vec<ProfileSeries> = graphs
        .par_iter()
        .map(|built| {
            let (source, thresholds) = &grids[&built.kind];
            let profile = connectivity_profile(&built.graph, thresholds)
                .map_err(PipelineError::at(Stage::Percolate))?;
            let ctx = &built.graph.context;
            profile.check_monotone().map_err(|e| {
                PipelineError::new(
                    Stage::Percolate,
                    format!(
                        "{} {} {}: {e}",
                        built.kind, ctx.specialism, ctx.period.label
                    ),
                )
            })?;
            Ok(ProfileSeries {
                kind: built.kind,
                specialism: ctx.specialism.clone(),
                period: ctx.period.clone(),
                grid: *source,
                profile,
            })
        })
        .collect::<Result<_, PipelineError>>()?;

    let mut groups: BTreeMap<(NetworkKind, i32, i32, String), Vec<&ProfileSeries>> =
        BTreeMap::new();
    for s in &series {
        groups
            .entry((s.kind, s.period.start, s.period.end, s.period.label.clone()))
            .or_default()
            .push(s);
    }
    let mut aggregates = Vec::new();
    for ((kind, ..), members) in groups {
        let profiles: Vec<&ConnectivityProfile<f64>> = members.iter().map(|s| &s.profile).collect();
        if let Some(curve) =
            aggregate_profiles(&profiles).map_err(PipelineError::at(Stage::Percolate))?
        {
            aggregates.push(AggregateSeries {
                kind,
                period: members[0].period.clone(),
                grid: members[0].grid,
                specialisms: members.iter().map(|s| s.specialism.clone()).collect(),
                curve,
            });
        }
    }
    Ok(PercolationOutput { series, aggregates })
}

pub fn write_percolation(
    out: &mut BundleWriter,
    percolation: &PercolationOutput,
) -> io::Result<()> {
    for s in &percolation.series {
        out.write_with(&s.file(), |buf| s.profile.write_csv(buf))?;
    }
    let kinds: BTreeSet<NetworkKind> = percolation.aggregates.iter().map(|a| a.kind).collect();
    for kind in kinds {
        out.write_with(&aggregate_file(kind), |buf| {
            use std::io::Write;
            writeln!(
                buf,
                "period,threshold,specialisms,c_mean,c_median,giant_mean,giant_median"
            )?;
            for agg in percolation.aggregates.iter().filter(|a| a.kind == kind) {
                let c = &agg.curve;
                for k in 0..c.thresholds.len() {
                    writeln!(
                        buf,
                        "{},{},{},{},{},{},{}",
                        crate::indicators::csv_field(&agg.period.label),
                        fmt_sig9(c.thresholds[k]),
                        c.members,
                        fmt_sig9(c.c_mean[k]),
                        fmt_sig9(c.c_median[k]),
                        fmt_sig9(c.giant_mean[k]),
                        fmt_sig9(c.giant_median[k]),
                    )?;
                }
            }
            Ok(())
        })?;
    }
    Ok(())
}

/// One indicator row per (specialism, period), empty slices included.
pub fn compute_indicators(
    corpus: &ResolvedCorpus,
    periods: &[PeriodSpec],
    price_window: i32,
) -> Vec<IndicatorRow<f64>> {
    let periods = sorted_periods(periods);
    let cells: Vec<(String, PeriodSpec)> = specialisms(corpus)
        .into_iter()
        .flat_map(|s| periods.iter().map(move |p| (s.clone(), p.clone())))
        .collect();
    cells
        .par_iter()
        .map(|(specialism, period)| {
            let articles: Vec<&ResolvedArticle> = slice_indices(corpus, specialism, period)
                .into_iter()
                .map(|i| &corpus.articles[i])
                .collect();
            descriptive_stats(specialism, &period.label, &articles, price_window)
        })
        .collect()
}

pub fn write_indicators(out: &mut BundleWriter, rows: &[IndicatorRow<f64>]) -> io::Result<()> {
    out.write_with("indicators.csv", |buf| write_indicators_csv(buf, rows))
}
