use std::io::{self, BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::NetworkError;
use crate::ingest::PeriodSpec;
use crate::scalar::{fmt_sig9, quantize9};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Article,
    Author,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightKind {
    /// Reference-overlap cosine, in (0, 1].
    CosineOverlap,
    /// Symmetrized BM25, positive and unbounded.
    Bm25Text,
}

/// Undirected weighted edge with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<T> {
    pub i: u32,
    pub j: u32,
    pub weight: T,
}

/// Which slice of the corpus a graph describes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphContext {
    pub specialism: String,
    pub period: PeriodSpec,
}

impl GraphContext {
    pub fn new(specialism: impl Into<String>, period: PeriodSpec) -> Self {
        Self {
            specialism: specialism.into(),
            period,
        }
    }
}

/// Weighted undirected coupling network. Edges are sorted by `(i, j)`; pairs
/// with zero weight are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledGraph<T> {
    pub node_kind: NodeKind,
    pub weight_kind: WeightKind,
    pub nodes: Vec<String>,
    pub edges: Vec<Edge<T>>,
    pub context: GraphContext,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub node_kind: NodeKind,
    pub weight_kind: WeightKind,
    pub specialism: String,
    pub period: PeriodSpec,
    pub nodes: usize,
    pub edges: usize,
    pub weight_min: Option<f64>,
    pub weight_max: Option<f64>,
    pub weight_mean: Option<f64>,
}

impl<T: Scalar> CoupledGraph<T> {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn max_weight(&self) -> Option<T> {
        self.edges.iter().map(|e| e.weight).reduce(T::max)
    }

    /// Checks the structural invariants: sorted unique `i < j` pairs within
    /// range, and finite positive weights (at most 1 for cosine graphs).
    pub fn validate(&self) -> Result<(), NetworkError> {
        let n = self.nodes.len();
        for (k, e) in self.edges.iter().enumerate() {
            if e.i >= e.j || e.j as usize >= n {
                return Err(NetworkError::Invalid(format!(
                    "edge ({}, {}) is a self-loop, reversed or out of range for {n} nodes",
                    e.i, e.j
                )));
            }
            if k > 0 {
                let prev = &self.edges[k - 1];
                if (prev.i, prev.j) >= (e.i, e.j) {
                    return Err(NetworkError::Invalid(format!(
                        "edges not strictly sorted at ({}, {})",
                        e.i, e.j
                    )));
                }
            }
            let bounded = match self.weight_kind {
                WeightKind::CosineOverlap => e.weight <= T::one(),
                WeightKind::Bm25Text => true,
            };
            if !(e.weight.is_finite() && e.weight > T::zero() && bounded) {
                return Err(NetworkError::Invalid(format!(
                    "edge ({}, {}) has invalid weight {}",
                    e.i, e.j, e.weight
                )));
            }
        }
        Ok(())
    }

    /// Rounds every weight to nine significant digits, as stored on disk.
    pub fn quantized(mut self) -> Self {
        for e in &mut self.edges {
            e.weight = quantize9(e.weight);
        }
        self
    }

    /// Appends nodes without edges.
    pub fn add_isolates<I: IntoIterator<Item = String>>(&mut self, ids: I) {
        self.nodes.extend(ids);
    }

    pub fn summary(&self) -> GraphSummary {
        let weights = self.edges.iter().map(|e| e.weight.as_f64());
        let (min, max, sum) = weights.fold((None, None, 0.0), |(mn, mx, s), w| {
            (
                Some(mn.map_or(w, |m: f64| m.min(w))),
                Some(mx.map_or(w, |m: f64| m.max(w))),
                s + w,
            )
        });
        GraphSummary {
            node_kind: self.node_kind,
            weight_kind: self.weight_kind,
            specialism: self.context.specialism.clone(),
            period: self.context.period.clone(),
            nodes: self.nodes.len(),
            edges: self.edges.len(),
            weight_min: min,
            weight_max: max,
            weight_mean: (!self.edges.is_empty()).then(|| sum / self.edges.len() as f64),
        }
    }

    /// One `i<TAB>j<TAB>weight` row per edge, weights with nine significant digits.
    pub fn write_edges<W: Write>(&self, mut out: W) -> io::Result<()> {
        for e in &self.edges {
            writeln!(out, "{}\t{}\t{}", e.i, e.j, fmt_sig9(e.weight.as_f64()))?;
        }
        Ok(())
    }

    /// One `index<TAB>node-id` row per node.
    pub fn write_nodes<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (i, id) in self.nodes.iter().enumerate() {
            writeln!(out, "{i}\t{id}")?;
        }
        Ok(())
    }

    /// Writes `<stem>.edges.tsv`, `<stem>.nodes.tsv` and `<stem>.summary.json` into `dir`.
    pub fn save(&self, dir: &Path, stem: &str) -> io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut edges = io::BufWriter::new(std::fs::File::create(
            dir.join(format!("{stem}.edges.tsv")),
        )?);
        self.write_edges(&mut edges)?;
        edges.flush()?;
        let mut nodes = io::BufWriter::new(std::fs::File::create(
            dir.join(format!("{stem}.nodes.tsv")),
        )?);
        self.write_nodes(&mut nodes)?;
        nodes.flush()?;
        let mut summary = serde_json::to_vec_pretty(&self.summary())?;
        summary.push(b'\n');
        std::fs::write(dir.join(format!("{stem}.summary.json")), summary)
    }

    /// Reads a graph written by [`CoupledGraph::save`].
    pub fn load(dir: &Path, stem: &str) -> Result<Self, NetworkError> {
        let summary_path = dir.join(format!("{stem}.summary.json"));
        let summary: GraphSummary = serde_json::from_slice(
            &std::fs::read(&summary_path).map_err(|e| file_error(&summary_path, e))?,
        )
        .map_err(|e| file_error(&summary_path, e))?;

        let nodes_path = dir.join(format!("{stem}.nodes.tsv"));
        let mut nodes = Vec::new();
        for (line_no, line) in lines(&nodes_path)? {
            let (idx, id) = line.split_once('\t').ok_or_else(|| {
                file_error(
                    &nodes_path,
                    format!("line {line_no}: expected index and id"),
                )
            })?;
            if idx.parse::<usize>().ok() != Some(nodes.len()) {
                return Err(file_error(
                    &nodes_path,
                    format!("line {line_no}: unexpected index {idx}"),
                ));
            }
            nodes.push(id.to_string());
        }

        let edges_path = dir.join(format!("{stem}.edges.tsv"));
        let mut edges = Vec::new();
        for (line_no, line) in lines(&edges_path)? {
            let cols: Vec<&str> = line.split('\t').collect();
            let parsed = match cols.as_slice() {
                [i, j, w] => i
                    .parse::<u32>()
                    .ok()
                    .zip(j.parse::<u32>().ok())
                    .zip(w.parse::<T>().ok()),
                _ => None,
            };
            let ((i, j), weight) = parsed.ok_or_else(|| {
                file_error(&edges_path, format!("line {line_no}: malformed edge row"))
            })?;
            edges.push(Edge { i, j, weight });
        }

        let graph = CoupledGraph {
            node_kind: summary.node_kind,
            weight_kind: summary.weight_kind,
            nodes,
            edges,
            context: GraphContext::new(summary.specialism, summary.period),
        };
        if graph.nodes.len() != summary.nodes || graph.edges.len() != summary.edges {
            return Err(file_error(
                &summary_path,
                "node or edge count disagrees with the summary",
            ));
        }
        graph.validate()?;
        Ok(graph)
    }
}

fn lines(path: &Path) -> Result<Vec<(usize, String)>, NetworkError> {
    let file = std::fs::File::open(path).map_err(|e| file_error(path, e))?;
    let mut out = Vec::new();
    for (i, line) in io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| file_error(path, e))?;
        if !line.is_empty() {
            out.push((i + 1, line));
        }
    }
    Ok(out)
}

fn file_error(path: &Path, e: impl std::fmt::Display) -> NetworkError {
    NetworkError::File {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}
