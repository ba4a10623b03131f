//! Connectivity of a weighted graph as edges below a threshold are removed.
//!
//! For a threshold `t`, only edges with weight `>= t` are kept and
//! `c(t) = C(t) / N`, where `C(t)` is the number of connected components
//! (isolated nodes included) and `N` the node count.

use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::network::{CoupledGraph, WeightKind};
use crate::scalar::fmt_sig9;
use crate::union_find::UnionFind;
use crate::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum PercolationError {
    #[error("thresholds must be finite and strictly ascending (problem at position {0})")]
    UnsortedThresholds(usize),
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("cannot aggregate profiles computed on different threshold grids")]
    GridMismatch,
}

/// The threshold sweep of one graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectivityProfile<T> {
    pub thresholds: Vec<T>,
    pub components: Vec<usize>,
    pub c_values: Vec<T>,
    pub giant_fractions: Vec<T>,
    pub edges_retained: Vec<usize>,
    pub node_count: usize,
}

/// Components at a single threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentSummary<T> {
    pub threshold: T,
    /// Largest first; the first entry is the giant component.
    pub component_sizes: Vec<usize>,
    pub isolate_count: usize,
}

impl<T: Scalar> ComponentSummary<T> {
    pub fn component_count(&self) -> usize {
        self.component_sizes.len()
    }

    pub fn giant(&self) -> usize {
        self.component_sizes.first().copied().unwrap_or(0)
    }
}

fn check_thresholds<T: Scalar>(thresholds: &[T]) -> Result<(), PercolationError> {
    for (k, t) in thresholds.iter().enumerate() {
        if !t.is_finite() || (k > 0 && *t <= thresholds[k - 1]) {
            return Err(PercolationError::UnsortedThresholds(k));
        }
    }
    Ok(())
}

/// Sweeps all thresholds in one pass: edges are sorted by descending weight
/// and merged into a union-find while walking the thresholds from the
/// largest down.
pub fn connectivity_profile<T: Scalar>(
    graph: &CoupledGraph<T>,
    thresholds: &[T],
) -> Result<ConnectivityProfile<T>, PercolationError> {
    check_thresholds(thresholds)?;
    let n = graph.node_count();
    if n == 0 {
        return Err(PercolationError::EmptyGraph);
    }
    let mut edges: Vec<(T, u32, u32)> = graph.edges.iter().map(|e| (e.weight, e.i, e.j)).collect();
    edges.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite weights"));

    let len = thresholds.len();
    let mut components = vec![0; len];
    let mut largest = vec![0; len];
    let mut retained = vec![0; len];
    let mut uf = UnionFind::new(n);
    let mut next = 0;
    for k in (0..len).rev() {
        let t = thresholds[k];
        while next < edges.len() && edges[next].0 >= t {
            uf.union(edges[next].1 as usize, edges[next].2 as usize);
            next += 1;
        }
        components[k] = uf.components();
        largest[k] = uf.largest();
        retained[k] = next;
    }

    let n_f = T::from_count(n);
    Ok(ConnectivityProfile {
        thresholds: thresholds.to_vec(),
        c_values: components.iter().map(|&c| T::from_count(c) / n_f).collect(),
        giant_fractions: largest.iter().map(|&g| T::from_count(g) / n_f).collect(),
        components,
        edges_retained: retained,
        node_count: n,
    })
}

/// Component sizes keeping only edges with weight `>= t`.
pub fn components_at<T: Scalar>(graph: &CoupledGraph<T>, t: T) -> ComponentSummary<T> {
    let mut uf = UnionFind::new(graph.node_count());
    for e in graph.edges.iter().filter(|e| e.weight >= t) {
        uf.union(e.i as usize, e.j as usize);
    }
    let component_sizes = uf.component_sizes();
    let isolate_count = component_sizes.iter().filter(|&&s| s == 1).count();
    ComponentSummary {
        threshold: t,
        component_sizes,
        isolate_count,
    }
}

impl<T: Scalar> ConnectivityProfile<T> {
    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    /// `c(t)` at a grid threshold.
    pub fn c_at(&self, t: T) -> Option<T> {
        self.thresholds
            .iter()
            .position(|&x| x == t)
            .map(|k| self.c_values[k])
    }

    /// Component counts never decrease and the giant fraction never increases
    /// along the grid; `c` stays within `[1/N, 1]`.
    pub fn check_monotone(&self) -> Result<(), String> {
        let n = T::from_count(self.node_count);
        for k in 0..self.len() {
            let c = self.c_values[k];
            if c < T::one() / n || c > T::one() {
                return Err(format!(
                    "c = {c} out of range at threshold {}",
                    self.thresholds[k]
                ));
            }
            if k > 0 {
                if self.components[k] < self.components[k - 1] {
                    return Err(format!(
                        "component count decreased at threshold {}",
                        self.thresholds[k]
                    ));
                }
                if self.giant_fractions[k] > self.giant_fractions[k - 1] {
                    return Err(format!(
                        "giant fraction increased at threshold {}",
                        self.thresholds[k]
                    ));
                }
            }
        }
        Ok(())
    }

    /// CSV with columns `threshold,components,c,giant_fraction,nodes,edges_retained`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "threshold,components,c,giant_fraction,nodes,edges_retained"
        )?;
        for k in 0..self.len() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt_sig9(self.thresholds[k].as_f64()),
                self.components[k],
                fmt_sig9(self.c_values[k].as_f64()),
                fmt_sig9(self.giant_fractions[k].as_f64()),
                self.node_count,
                self.edges_retained[k]
            )?;
        }
        Ok(())
    }
}

/// 0.00, 0.01, ..., 1.00.
pub fn cosine_grid<T: Scalar>() -> Vec<T> {
    (0..=100)
        .map(|k| T::from_count(k) / T::lit(100.0))
        .collect()
}

/// Percentiles 0, 1, ..., 100 of `weights` with linear interpolation between
/// order statistics, deduplicated. Empty input gives `[0]`.
pub fn quantile_grid<T: Scalar>(weights: &[T]) -> Vec<T> {
    if weights.is_empty() {
        return vec![T::zero()];
    }
    let mut sorted = weights.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite weights"));
    let last = sorted.len() - 1;
    let mut grid: Vec<T> = Vec::with_capacity(101);
    for k in 0..=100usize {
        let h = T::from_count(last * k) / T::lit(100.0);
        let lo = h.floor();
        let idx = lo.to_usize().expect("index").min(last);
        let value = if idx == last {
            sorted[last]
        } else {
            sorted[idx] + (h - lo) * (sorted[idx + 1] - sorted[idx])
        };
        if grid.last().is_none_or(|&prev| value > prev) {
            grid.push(value);
        }
    }
    grid
}

/// The fixed cosine grid for cosine graphs, the weight-quantile grid for
/// BM25 graphs, `[0]` for graphs without edges.
pub fn default_threshold_grid<T: Scalar>(graph: &CoupledGraph<T>) -> Vec<T> {
    if graph.edges.is_empty() {
        return vec![T::zero()];
    }
    match graph.weight_kind {
        WeightKind::CosineOverlap => cosine_grid(),
        WeightKind::Bm25Text => {
            let weights: Vec<T> = graph.edges.iter().map(|e| e.weight).collect();
            quantile_grid(&weights)
        }
    }
}

/// Pointwise mean and median of several profiles on a common grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateCurve<T> {
    pub thresholds: Vec<T>,
    pub members: usize,
    pub c_mean: Vec<T>,
    pub c_median: Vec<T>,
    pub giant_mean: Vec<T>,
    pub giant_median: Vec<T>,
}

pub fn aggregate_profiles<T: Scalar>(
    profiles: &[&ConnectivityProfile<T>],
) -> Result<Option<AggregateCurve<T>>, PercolationError> {
    let Some(first) = profiles.first() else {
        return Ok(None);
    };
    if profiles.iter().any(|p| p.thresholds != first.thresholds) {
        return Err(PercolationError::GridMismatch);
    }
    let column = |k: usize, pick: fn(&ConnectivityProfile<T>, usize) -> T| -> Vec<T> {
        profiles.iter().map(|p| pick(p, k)).collect()
    };
    let mut curve = AggregateCurve {
        thresholds: first.thresholds.clone(),
        members: profiles.len(),
        c_mean: Vec::new(),
        c_median: Vec::new(),
        giant_mean: Vec::new(),
        giant_median: Vec::new(),
    };
    for k in 0..first.len() {
        let c = column(k, |p, k| p.c_values[k]);
        let g = column(k, |p, k| p.giant_fractions[k]);
        curve.c_mean.push(mean(&c));
        curve.c_median.push(median(c));
        curve.giant_mean.push(mean(&g));
        curve.giant_median.push(median(g));
    }
    Ok(Some(curve))
}

fn mean<T: Scalar>(xs: &[T]) -> T {
    xs.iter().copied().sum::<T>() / T::from_count(xs.len())
}

fn median<T: Scalar>(mut xs: Vec<T>) -> T {
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / T::lit(2.0)
    }
}
