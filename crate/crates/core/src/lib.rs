//! A desk-scale workbench for coding over the binary erasure channel.
//!
//! The crate covers two code families and the analysis machinery connecting
//! them:
//!
//! - [`polar`]: code construction from the erasure-probability recursion,
//!   butterfly encoding, successive-cancellation decoding, union-bound error
//!   estimates, and finite-length scaling measurements.
//! - [`ensemble`] / [`graphgen`] / [`decoders`]: LDPC degree distributions,
//!   sampled factor graphs (configuration model, protograph lifts, spatially
//!   coupled chains), and the three erasure decoders (belief propagation,
//!   peeling, exact MAP via GF(2) elimination).
//! - [`de`] / [`coupled`]: density evolution for uncoupled and spatially
//!   coupled ensembles, BP thresholds, EXIT curves and charts, decoding-wave
//!   measurement, and the coupled decoding threshold.
//! - [`potential`]: scalar and vector potential functions, stationary points,
//!   the area threshold (two independent routes), and the shift-based
//!   decrease argument for coupled chains.
//! - [`harness`]: reproducible Monte Carlo experiment runner with CSV/JSON
//!   emission.
//!
//! Everything is deterministic given a seed; see [`rng`] for the seeding
//! scheme. With the default `parallel` feature, independent trials and sweep
//! points run on a rayon pool; disable default features for a fully
//! sequential build with identical outputs.

pub mod channel;
pub mod coupled;
pub mod de;
pub mod decoders;
pub mod ensemble;
pub mod exec;
pub mod gf2;
pub mod graphgen;
pub mod harness;
pub mod polar;
pub mod potential;
pub mod rng;

pub use channel::{capacity, transmit, Symbol, Word};
pub use ensemble::DegreeDistribution;
pub use graphgen::FactorGraph;
