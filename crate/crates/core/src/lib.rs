//! Bibliographic coupling and textual similarity networks for publication corpora.
//!
//! The pipeline ingests publication records, disambiguates cited references and
//! authors with Jaro-Winkler rules, builds reference-overlap (cosine) and
//! BM25 text coupling networks per specialism and period, and measures how
//! their connectivity decays as low-weight edges are removed.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix the scalar to `f64`, which is what the pipeline uses.

pub mod indicators;
pub mod ingest;
pub mod network;
pub mod percolation;
pub mod pipeline;
pub mod resolve;
pub mod scalar;
pub mod synth;
pub mod union_find;

pub use scalar::Scalar;

pub type CoupledGraph = network::CoupledGraph<f64>;
pub type IdfTable = network::IdfTable<f64>;
pub type ConnectivityProfile = percolation::ConnectivityProfile<f64>;
pub type IndicatorRow = indicators::IndicatorRow<f64>;
