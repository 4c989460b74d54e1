//! Quantitative objects behind the trace-distance security criterion for
//! key distribution: distance metrics, optimal discrimination
//! probabilities, maximal couplings, extremal adversary distributions,
//! known-prefix counterexamples, and a multi-round leakage simulator.

pub mod bounds;
pub mod classical;
pub mod error;
pub mod quantum;
pub mod sim;

pub use error::{Error, Result};
