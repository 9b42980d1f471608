//! Run configuration: a TOML document whose keys all have defaults.
//!
//! Unknown keys anywhere in the document are rejected. Grids are sorted and
//! deduplicated on load so output rows follow grid order, never file order.

use std::path::Path;

use holo_lwe_core::cost_models::{HoloParams, TableOptions};
use holo_lwe_core::lwe_etcf::LweParams;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridPoint {
    pub q: u64,
    pub n: usize,
    pub k: u32,
}

impl GridPoint {
    /// Noiseless parameters with room for an injective `[A | U]`.
    pub fn params(&self) -> LweParams {
        LweParams::noiseless(self.n, self.n + self.k as usize + 1, self.q, self.k)
    }
}

fn default_grid() -> Vec<GridPoint> {
    vec![GridPoint { q: 3, n: 2, k: 1 }, GridPoint { q: 2, n: 2, k: 2 }, GridPoint { q: 5, n: 2, k: 1 }]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EtcfConfig {
    pub grid: Vec<GridPoint>,
    /// Noise width for the extra noisy instances; zero disables them.
    pub sigma: f64,
}

impl Default for EtcfConfig {
    fn default() -> Self {
        EtcfConfig { grid: default_grid(), sigma: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EntropyConfig {
    pub grid: Vec<GridPoint>,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        EntropyConfig { grid: default_grid() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeodesicConfig {
    pub n_qubits: Vec<u64>,
    pub kappa: f64,
    pub intervals: Vec<f64>,
    pub ds_bits: Vec<f64>,
}

impl Default for GeodesicConfig {
    fn default() -> Self {
        GeodesicConfig {
            n_qubits: vec![8, 16, 32, 64],
            kappa: 1.0,
            intervals: vec![0.01, 0.1, 1.0],
            ds_bits: vec![1.0, 2.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BulkConfig {
    pub sites: usize,
    pub mass0: f64,
    pub coupling: f64,
    pub intervals: Vec<usize>,
    pub truncation_tolerance: f64,
    pub squeezing: Vec<f64>,
    /// Scalar FLM inputs; the RT term comes from the half-chain geometry.
    pub delta_area_term: f64,
    pub wald_like: f64,
    pub counterterms: f64,
}

impl Default for BulkConfig {
    fn default() -> Self {
        BulkConfig {
            sites: 64,
            mass0: 1e-3,
            coupling: 1.0,
            intervals: vec![4, 8, 16, 32],
            truncation_tolerance: 0.01,
            squeezing: vec![0.25, 0.5, 1.0],
            delta_area_term: 0.0,
            wald_like: 0.0,
            counterterms: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostsConfig {
    pub n_list: Vec<u64>,
    pub table: TableOptions,
    /// Sparsity exponent and precision for the phase-estimation estimate.
    pub qpe_sparsity: f64,
    pub qpe_eps: f64,
}

impl Default for CostsConfig {
    fn default() -> Self {
        CostsConfig {
            n_list: (1..=8).map(|i| 32 * i).collect(),
            table: TableOptions { holo: HoloParams::default(), ..TableOptions::default() },
            qpe_sparsity: 2.0,
            qpe_eps: 0.01,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolConfig {
    pub point: GridPoint,
    pub n_qubits: u64,
    pub kappa: f64,
    /// Boundary interval whose RT geodesic is probed.
    pub interval: f64,
    pub mass: f64,
    pub sigma_shot: f64,
    pub z: f64,
    pub alpha_exp: f64,
    pub repetitions: usize,
    /// Budgets as multiples of the predicted shot count.
    pub budget_factors: Vec<f64>,
    /// Shot-scaling sweep at fixed `L`, `δL`.
    pub scaling_masses: Vec<f64>,
    pub scaling_length: f64,
    pub scaling_gap: f64,
    pub target_error: f64,
    pub trials: usize,
    pub regime_n: Vec<u64>,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            point: GridPoint { q: 3, n: 2, k: 1 },
            n_qubits: 16,
            kappa: 1.0,
            interval: 0.01,
            mass: 1.0,
            sigma_shot: 1.0,
            z: 2.0,
            alpha_exp: 2.0,
            repetitions: 500,
            budget_factors: vec![0.01, 1.0, 4.0],
            scaling_masses: vec![1.0, 2.0, 3.0, 4.0],
            scaling_length: 1.0,
            scaling_gap: 0.5,
            target_error: 1.0 / 3.0,
            trials: 2000,
            regime_n: vec![16, 64, 256],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    #[default]
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub format: Format,
    pub etcf: EtcfConfig,
    pub entropy: EntropyConfig,
    pub geodesic: GeodesicConfig,
    pub bulk: BulkConfig,
    pub costs: CostsConfig,
    pub protocol: ProtocolConfig,
}

fn sort_dedup<T: PartialOrd + Copy>(v: &mut Vec<T>) {
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite grid values"));
    v.dedup_by(|a, b| a == b);
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn check_finite(name: &str, values: &[f64]) -> Result<(), CliError> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(invalid(format!("{name} contains non-finite value {v}"))),
        None => Ok(()),
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| invalid(e.to_string()))?;
        cfg.normalized()
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => RunConfig::default().normalized(),
            Some(p) => {
                let text =
                    std::fs::read_to_string(p).map_err(|e| invalid(format!("cannot read {}: {e}", p.display())))?;
                Self::from_toml(&text)
            }
        }
    }

    /// Validates and puts every grid in canonical order.
    pub fn normalized(mut self) -> Result<Self, CliError> {
        check_finite("geodesic.intervals", &self.geodesic.intervals)?;
        check_finite("geodesic.ds_bits", &self.geodesic.ds_bits)?;
        check_finite("bulk.squeezing", &self.bulk.squeezing)?;
        check_finite("protocol.budget_factors", &self.protocol.budget_factors)?;
        check_finite("protocol.scaling_masses", &self.protocol.scaling_masses)?;

        for grid in [&mut self.etcf.grid, &mut self.entropy.grid] {
            grid.sort();
            grid.dedup();
            for p in grid.iter() {
                p.params().validate().map_err(|e| invalid(format!("grid point {p:?}: {e}")))?;
            }
        }
        self.protocol.point.params().validate().map_err(|e| invalid(format!("protocol point: {e}")))?;
        sort_dedup(&mut self.geodesic.n_qubits);
        sort_dedup(&mut self.geodesic.intervals);
        sort_dedup(&mut self.geodesic.ds_bits);
        sort_dedup(&mut self.bulk.intervals);
        sort_dedup(&mut self.bulk.squeezing);
        sort_dedup(&mut self.costs.n_list);
        sort_dedup(&mut self.protocol.budget_factors);
        sort_dedup(&mut self.protocol.scaling_masses);
        sort_dedup(&mut self.protocol.regime_n);

        if self.bulk.sites < 2 {
            return Err(invalid("bulk.sites must be at least 2"));
        }
        if let Some(&ell) = self.bulk.intervals.iter().find(|&&l| l == 0 || l >= self.bulk.sites) {
            return Err(invalid(format!("bulk interval {ell} must lie in 1..{}", self.bulk.sites)));
        }
        if self.costs.n_list.is_empty() {
            return Err(invalid("costs.n_list is empty"));
        }
        if self.protocol.repetitions < 100 {
            return Err(invalid("protocol.repetitions must be at least 100"));
        }
        if self.protocol.budget_factors.iter().any(|&f| f <= 0.0) {
            return Err(invalid("protocol.budget_factors must be positive"));
        }
        Ok(self)
    }

    /// Canonical JSON form, the input to the manifest hash.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
