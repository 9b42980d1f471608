//! Closed-form cost estimators: lattice (BKZ) attacks on LWE, shadow
//! tomography, phase-estimation diagonalization, covariance building and the
//! total holographic reconstruction cost.
//!
//! Nothing here draws random numbers. The BKZ constants are external
//! literature values and can be overridden through [`CostConstants`].

use std::collections::BTreeMap;
use std::f64::consts::{E, LN_2, PI};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fit::{linear_fit, LinearFit};
use crate::lwe_etcf::{is_prime, LweParams};

/// Root-Hermite factors below blocksize 50, where the asymptotic formula is
/// unreliable. Values between entries, and from 40 up to 50, are linear.
pub const SMALL_BLOCK_TABLE: [(usize, f64); 8] = [
    (2, 1.02190),
    (5, 1.01862),
    (10, 1.01616),
    (15, 1.01485),
    (20, 1.01420),
    (25, 1.01342),
    (28, 1.01331),
    (40, 1.01295),
];
pub const ASYMPTOTIC_FROM: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sieve {
    ClassicalSieve,
    QuantumSieve,
    Enumeration,
}

impl Sieve {
    pub const ALL: [Sieve; 3] = [Sieve::ClassicalSieve, Sieve::QuantumSieve, Sieve::Enumeration];

    pub fn slug(self) -> &'static str {
        match self {
            Sieve::ClassicalSieve => "classical_sieve",
            Sieve::QuantumSieve => "quantum_sieve",
            Sieve::Enumeration => "enumeration",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostConstants {
    pub classical_sieve: f64,
    pub quantum_sieve: f64,
    /// Enumeration fit `a β log₂β + b β + c`.
    pub enum_a: f64,
    pub enum_b: f64,
    pub enum_c: f64,
}

impl Default for CostConstants {
    fn default() -> Self {
        CostConstants { classical_sieve: 0.292, quantum_sieve: 0.265, enum_a: 0.187, enum_b: -1.019, enum_c: 16.1 }
    }
}

impl CostConstants {
    /// `log₂` cost of one BKZ tour at blocksize `beta` in dimension `d`.
    pub fn log2_cost(&self, sieve: Sieve, beta: usize, d: usize) -> f64 {
        let b = beta as f64;
        match sieve {
            Sieve::ClassicalSieve => self.classical_sieve * b + (d as f64).log2(),
            Sieve::QuantumSieve => self.quantum_sieve * b + (d as f64).log2(),
            Sieve::Enumeration => self.enum_a * b * b.log2() + self.enum_b * b + self.enum_c,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackCostRecord {
    pub label: String,
    #[serde(rename = "N")]
    pub n: u64,
    pub log2_cost: f64,
    pub model_params: BTreeMap<String, Value>,
}

fn asymptotic_root_hermite(beta: f64) -> f64 {
    (beta / (2.0 * PI * E) * (PI * beta).powf(1.0 / beta)).powf(1.0 / (2.0 * (beta - 1.0)))
}

/// Root-Hermite factor `δ_β` reached by BKZ with blocksize `beta`.
pub fn bkz_root_hermite(beta: usize) -> Result<f64> {
    if beta < 2 {
        return Err(Error::InvalidParams(format!("blocksize {beta} must be at least 2")));
    }
    if beta >= ASYMPTOTIC_FROM {
        return Ok(asymptotic_root_hermite(beta as f64));
    }
    let mut knots: Vec<(f64, f64)> = SMALL_BLOCK_TABLE.iter().map(|&(b, d)| (b as f64, d)).collect();
    knots.push((ASYMPTOTIC_FROM as f64, asymptotic_root_hermite(ASYMPTOTIC_FROM as f64)));
    let b = beta as f64;
    let seg = knots.windows(2).find(|w| b <= w[1].0).expect("beta lies inside the table");
    let ((b0, d0), (b1, d1)) = (seg[0], seg[1]);
    Ok(d0 + (d1 - d0) * (b - b0) / (b1 - b0))
}

fn check_attack_params(p: &LweParams) -> Result<()> {
    if p.n == 0 || p.m_rows == 0 {
        return Err(Error::InvalidParams("n and m_rows must be positive".into()));
    }
    if !is_prime(p.q) {
        return Err(Error::InvalidParams(format!("q = {} is not prime", p.q)));
    }
    if !(p.sigma.is_finite() && p.sigma > 0.0) {
        return Err(Error::InvalidParams(format!("sigma = {} must be positive", p.sigma)));
    }
    Ok(())
}

/// Smallest blocksize `β ∈ [2, d]` with `σ√β ≤ δ_β^{2β−d} · q^{m/d}`, where
/// `d = n + m + 1` is the embedding dimension.
pub fn required_blocksize(p: &LweParams) -> Result<usize> {
    check_attack_params(p)?;
    let d = p.n + p.m_rows + 1;
    let lhs_base = p.sigma.ln();
    let rhs_base = p.m_rows as f64 / d as f64 * (p.q as f64).ln();
    for beta in 2..=d {
        let delta = bkz_root_hermite(beta)?;
        let lhs = lhs_base + 0.5 * (beta as f64).ln();
        let rhs = (2.0 * beta as f64 - d as f64) * delta.ln() + rhs_base;
        if lhs <= rhs {
            return Ok(beta);
        }
    }
    Err(Error::Infeasible { dimension: d })
}

pub fn bkz_attack_estimate(p: &LweParams, sieve: Sieve) -> Result<AttackCostRecord> {
    bkz_attack_estimate_with(p, sieve, &CostConstants::default())
}

pub fn bkz_attack_estimate_with(p: &LweParams, sieve: Sieve, consts: &CostConstants) -> Result<AttackCostRecord> {
    let beta = required_blocksize(p)?;
    let d = p.n + p.m_rows + 1;
    let mut model_params = BTreeMap::new();
    model_params.insert("n".into(), json!(p.n));
    model_params.insert("m_rows".into(), json!(p.m_rows));
    model_params.insert("q".into(), json!(p.q));
    model_params.insert("sigma".into(), json!(p.sigma));
    model_params.insert("dimension".into(), json!(d));
    model_params.insert("beta".into(), json!(beta));
    model_params.insert("delta_beta".into(), json!(bkz_root_hermite(beta)?));
    model_params.insert("sieve".into(), json!(sieve.slug()));
    match sieve {
        Sieve::ClassicalSieve => {
            model_params.insert("cost_exponent".into(), json!(consts.classical_sieve));
        }
        Sieve::QuantumSieve => {
            model_params.insert("cost_exponent".into(), json!(consts.quantum_sieve));
        }
        Sieve::Enumeration => {
            model_params.insert("enum_a".into(), json!(consts.enum_a));
            model_params.insert("enum_b".into(), json!(consts.enum_b));
            model_params.insert("enum_c".into(), json!(consts.enum_c));
        }
    }
    Ok(AttackCostRecord {
        label: format!("bkz-{}", sieve.slug().replace('_', "-")),
        n: p.n as u64,
        log2_cost: consts.log2_cost(sieve, beta, d),
        model_params,
    })
}

/// `max(ln K, 1) / ε² · variance_bound`.
pub fn shadow_cost(k: u64, eps: f64, variance_bound: f64) -> Result<f64> {
    if k == 0 || !(eps > 0.0) || !(variance_bound >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "need K >= 1, eps > 0 and variance >= 0, got {k}, {eps}, {variance_bound}"
        )));
    }
    Ok((k as f64).ln().max(1.0) / (eps * eps) * variance_bound)
}

/// Natural log of [`shadow_cost`] with `ε` supplied as `ln ε`, for gaps too
/// small to represent directly.
pub fn ln_shadow_cost(k: u64, ln_eps: f64, variance_bound: f64) -> f64 {
    (k.max(1) as f64).ln().max(1.0).ln() - 2.0 * ln_eps + variance_bound.ln()
}

pub const DEFAULT_POLYLOG_DEGREE: f64 = 2.0;

/// `(N^s / ε) · (2N ln 2)²`.
pub fn qpe_cost(sparsity_exponent: f64, eps: f64, n: u64) -> Result<f64> {
    qpe_cost_with_degree(sparsity_exponent, eps, n, DEFAULT_POLYLOG_DEGREE)
}

/// `(N^s / ε) · (2N ln 2)^degree`, the polylog of the Hilbert dimension.
pub fn qpe_cost_with_degree(sparsity_exponent: f64, eps: f64, n: u64, degree: f64) -> Result<f64> {
    if n == 0 || !(eps > 0.0) {
        return Err(Error::InvalidParams(format!("need N >= 1 and eps > 0, got {n}, {eps}")));
    }
    let nf = n as f64;
    Ok(nf.powf(sparsity_exponent) / eps * (2.0 * nf * LN_2).powf(degree))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceBuildCost {
    #[serde(rename = "N")]
    pub n: u64,
    pub bandwidth: u64,
    /// `log₂((2D)(2D+1)/2)` with `D = 2^N`.
    pub log2_full: f64,
    /// `log₂` of the entries within `bandwidth` of the diagonal, diagonal included.
    pub log2_sparse: f64,
}

/// Correlator counts for a `2^N`-mode covariance matrix.
pub fn covariance_build_cost(n: u64, bandwidth: u64) -> Result<CovarianceBuildCost> {
    if n == 0 {
        return Err(Error::InvalidParams("N must be at least 1".into()));
    }
    let nf = n as f64;
    // 2D = 2^(N+1); all counts are scaled by it to stay finite for large N.
    let inv_two_d = (-(nf + 1.0)).exp2();
    let log2_full = 2.0 * nf + 1.0 + (1.0 + inv_two_d).log2();
    let w = if n + 1 < 64 { bandwidth.min((1u64 << (n + 1)) - 1) } else { bandwidth } as f64;
    let banded_over_two_d = (w + 1.0) * (1.0 - 0.5 * w * inv_two_d);
    let log2_sparse = nf + 1.0 + banded_over_two_d.log2();
    Ok(CovarianceBuildCost { n, bandwidth: w as u64, log2_full, log2_sparse })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HoloParams {
    pub alpha: f64,
    pub poly_degree: f64,
    pub bulk_exponent: f64,
}

impl Default for HoloParams {
    fn default() -> Self {
        HoloParams { alpha: 2.0, poly_degree: 1.0, bulk_exponent: 1.0 }
    }
}

fn holographic_record(n: u64, h: &HoloParams, with_bulk: bool) -> Result<AttackCostRecord> {
    if !(h.alpha >= 1.0) {
        return Err(Error::InvalidParams(format!("alpha = {} must be >= 1", h.alpha)));
    }
    if n == 0 {
        return Err(Error::InvalidParams("N must be at least 1".into()));
    }
    let nf = n as f64;
    let mut log2_cost = h.poly_degree * nf.log2() + nf.powf(1.0 / h.alpha) * E.log2();
    if with_bulk {
        log2_cost += h.bulk_exponent * nf;
    }
    let mut model_params = BTreeMap::new();
    model_params.insert("alpha".into(), json!(h.alpha));
    model_params.insert("poly_degree".into(), json!(h.poly_degree));
    model_params.insert("bulk_exponent".into(), json!(if with_bulk { h.bulk_exponent } else { 0.0 }));
    let label = if with_bulk { "holographic" } else { "holographic-leading-order" };
    Ok(AttackCostRecord { label: label.into(), n, log2_cost, model_params })
}

/// `log₂T = p log₂N + N^{1/α} log₂e + b N`.
pub fn holographic_cost(n: u64, alpha: f64, poly_degree: f64, bulk_exponent: f64) -> Result<AttackCostRecord> {
    holographic_record(n, &HoloParams { alpha, poly_degree, bulk_exponent }, true)
}

/// Geodesic-reconstruction cost alone, without the `2^{bN}` bulk term.
pub fn holographic_leading_order_cost(n: u64, alpha: f64, poly_degree: f64) -> Result<AttackCostRecord> {
    holographic_record(n, &HoloParams { alpha, poly_degree, bulk_exponent: 0.0 }, false)
}

/// LWE parameters indexed by a single size `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LweFamily {
    /// `n = m = N`, `q` the first prime `≥ N²`, `α = 1/(√N log₂²N)`,
    /// `σ = αq/√(2π)`.
    #[default]
    Regev,
}

impl LweFamily {
    pub fn params(self, n: u64) -> Result<LweParams> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("family needs N >= 2, got {n}")));
        }
        match self {
            LweFamily::Regev => {
                let nf = n as f64;
                let mut q = n * n;
                while !is_prime(q) {
                    q += 1;
                }
                let alpha = 1.0 / (nf.sqrt() * nf.log2().powi(2));
                let sigma = alpha * q as f64 / (2.0 * PI).sqrt();
                Ok(LweParams::noisy(n as usize, n as usize, q, 1, sigma))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TableOptions {
    pub family: LweFamily,
    pub holo: HoloParams,
    pub bandwidth: u64,
    pub constants: CostConstants,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions {
            family: LweFamily::Regev,
            holo: HoloParams::default(),
            bandwidth: 4,
            constants: CostConstants::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    /// Sorted by `(N, label)`.
    pub records: Vec<AttackCostRecord>,
    /// `log₂cost` against `N`, per label.
    pub fits: BTreeMap<String, LinearFit>,
}

/// BKZ, holographic and covariance-build costs side by side for each `N`.
pub fn comparison_table(n_list: &[u64], opts: &TableOptions) -> Result<ComparisonTable> {
    if n_list.is_empty() {
        return Err(Error::InvalidParams("N list is empty".into()));
    }
    let mut records = Vec::new();
    for &n in n_list {
        let params = opts.family.params(n)?;
        for sieve in Sieve::ALL {
            let mut rec = bkz_attack_estimate_with(&params, sieve, &opts.constants)?;
            rec.n = n;
            rec.model_params.insert("family".into(), json!(opts.family));
            records.push(rec);
        }
        records.push(holographic_record(n, &opts.holo, true)?);
        records.push(holographic_record(n, &opts.holo, false)?);
        let cov = covariance_build_cost(n, opts.bandwidth)?;
        for (label, value) in [("covariance-build-full", cov.log2_full), ("covariance-build-sparse", cov.log2_sparse)] {
            let mut model_params = BTreeMap::new();
            model_params.insert("modes".into(), json!(format!("2^{n}")));
            model_params.insert("bandwidth".into(), json!(if label.ends_with("sparse") { cov.bandwidth } else { 0 }));
            records.push(AttackCostRecord { label: label.into(), n, log2_cost: value, model_params });
        }
    }
    records.sort_by(|a, b| a.n.cmp(&b.n).then_with(|| a.label.cmp(&b.label)));

    let mut series: BTreeMap<String, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in &records {
        let e = series.entry(r.label.clone()).or_default();
        e.0.push(r.n as f64);
        e.1.push(r.log2_cost);
    }
    let fits = series.into_iter().filter_map(|(label, (xs, ys))| linear_fit(&xs, &ys).map(|f| (label, f))).collect();
    Ok(ComparisonTable { records, fits })
}
