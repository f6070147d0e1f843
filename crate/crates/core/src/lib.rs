//! Evidence flow analysis for network meta-analysis.
//!
//! The crate takes a network of pairwise treatment comparisons (either raw
//! per-study contrasts or pre-pooled aggregate data), builds the weighted
//! aggregate network, and derives from it:
//!
//! * the hat matrix mapping direct to network estimates ([`hat`]),
//! * per-comparison directed acyclic evidence flow networks ([`flow`]),
//! * the random-walk picture of those flows, both as an analytic
//!   Dirichlet-problem solve and as a seeded Monte Carlo simulation
//!   ([`randomwalk`]),
//! * evidence streams (source-to-sink paths with flows) and per-edge
//!   proportion contributions, together with the legacy iterative
//!   stream-extraction algorithm kept for comparison ([`streams`]).
//!
//! All numeric code is generic over the scalar type through [`Scalar`]
//! (`f32` or `f64`); the aliases below fix `f64`, which is what the CLI and
//! the shipped fixtures use.

#![allow(clippy::needless_range_loop)]

pub mod fixtures;
pub mod flow;
pub mod hat;
pub mod model;
pub mod numerics;
pub mod randomwalk;
pub mod scalar;
pub mod streams;

pub use scalar::Scalar;

/// `f64` dense matrix.
pub type Matrix64 = numerics::Matrix<f64>;
/// `f64` aggregate network.
pub type AggregateNetwork64 = model::AggregateNetwork<f64>;
/// `f64` hat matrix.
pub type HatMatrix64 = hat::HatMatrix<f64>;
/// `f64` evidence flow network.
pub type EvidenceFlowNetwork64 = flow::EvidenceFlowNetwork<f64>;
/// `f64` walk transition matrix.
pub type TransitionMatrix64 = randomwalk::TransitionMatrix<f64>;
/// `f64` stream transition matrix.
pub type StreamTransitionMatrix64 = streams::StreamTransitionMatrix<f64>;
/// `f64` evidence stream.
pub type EvidenceStream64 = streams::EvidenceStream<f64>;
/// `f64` contribution row.
pub type ContributionRow64 = streams::ContributionRow<f64>;
