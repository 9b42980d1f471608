//! Numerical laboratory for the entropy-difference view of LWE.
//!
//! The pipeline runs from toy LWE claw-free function pairs, through the exact
//! entropies of their function-superposition states, to the AdS₃ geodesic
//! bookkeeping that turns an entropy gap into a length gap, the shot-noise
//! cost of resolving that gap with a heavy probe, Gaussian bulk entropies from
//! symplectic spectra, and closed-form attack-cost models.
//!
//! Every module is pure: randomness enters only through explicit seeds or
//! caller-owned RNGs, so identical inputs give identical outputs.

// Negated comparisons are used on purpose so that NaN inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ads_geometry;
pub mod cost_models;
pub mod error;
pub mod fit;
pub mod gaussian_bulk;
pub mod lwe_etcf;
pub mod probe_measurement;
pub mod seed;
pub mod state_entropy;

pub use error::{Error, Result};

/// Logarithm base used when reporting entropies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    Bits,
    Nats,
}

impl LogBase {
    /// Converts a value measured in nats into this base.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Nats => nats,
            LogBase::Bits => nats / std::f64::consts::LN_2,
        }
    }
}
