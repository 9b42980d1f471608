//! AdS₃/CFT₂ bookkeeping: central charge, RT geodesic length, RT entropy and
//! the conversion of an entropy gap into a geodesic-length gap.
//!
//! Lengths are in the same units as the AdS radius; entropies are natural-log
//! internally and converted to bits only on request.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::LogBase;

/// Default UV cutoff, in units of the AdS radius.
pub const DEFAULT_CUTOFF: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdsGeometry {
    pub radius: f64,
    pub newton_g: f64,
    pub cutoff: f64,
    pub n_qubits: u64,
}

impl AdsGeometry {
    pub fn new(radius: f64, newton_g: f64, cutoff: f64, n_qubits: u64) -> Result<Self> {
        let g = AdsGeometry { radius, newton_g, cutoff, n_qubits };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("R", self.radius), ("G_N", self.newton_g), ("epsilon", self.cutoff)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} = {v} must be positive")));
            }
        }
        if self.n_qubits == 0 {
            return Err(Error::InvalidParams("N must be at least 1".into()));
        }
        Ok(())
    }

    pub fn central_charge(&self) -> f64 {
        brown_henneaux_central_charge(self)
    }
}

/// `c = 3R / 2G_N`.
pub fn brown_henneaux_central_charge(geom: &AdsGeometry) -> f64 {
    3.0 * geom.radius / (2.0 * geom.newton_g)
}

/// Unit-radius geometry with `G_N = κ/N` and the default cutoff, so that
/// `c = 3N/2κ`. `κ` is the unfixed O(1) constant tying `G_N` to `1/N`.
pub fn geometry_from_qubits(n: u64, kappa: f64) -> Result<AdsGeometry> {
    if n == 0 {
        return Err(Error::InvalidParams("N must be at least 1".into()));
    }
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidParams(format!("kappa = {kappa} must be positive")));
    }
    AdsGeometry::new(1.0, kappa / n as f64, DEFAULT_CUTOFF, n)
}

/// `L_RT = 2R ln(ℓ/ε)` for a boundary interval of length `ℓ ≥ ε`.
pub fn rt_geodesic_length(geom: &AdsGeometry, ell: f64) -> Result<f64> {
    if !(ell >= geom.cutoff) {
        return Err(Error::Domain(format!("interval {ell} is shorter than the cutoff {}", geom.cutoff)));
    }
    Ok(2.0 * geom.radius * (ell / geom.cutoff).ln())
}

/// `S = L / 4G_N`.
pub fn rt_entropy(geom: &AdsGeometry, length: f64, base: LogBase) -> Result<f64> {
    if !(length >= 0.0) {
        return Err(Error::Domain(format!("length {length} must be non-negative")));
    }
    Ok(base.from_nats(length / (4.0 * geom.newton_g)))
}

/// Inverse RT map for a gap: `δL = 4 G_N · ΔS_bits · ln 2`.
pub fn entropy_gap_to_length_gap(geom: &AdsGeometry, ds_bits: f64) -> Result<f64> {
    if !(ds_bits >= 0.0) {
        return Err(Error::Domain(format!("entropy gap {ds_bits} must be non-negative")));
    }
    Ok(4.0 * geom.newton_g * ds_bits * LN_2)
}
