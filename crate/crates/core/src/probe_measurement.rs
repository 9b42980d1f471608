//! Heavy-probe measurement of a geodesic length under shot noise.
//!
//! The probe observable is the WKB two-point function `G(L) = e^{-mL}`. Each
//! of `M` independent shots has standard deviation `σ_O`, so the sample mean
//! carries Gaussian noise of width `σ_O/√M` (the standard quantum limit).
//! Two hypotheses `L` and `L + δL` are separated by the midpoint test on the
//! sample mean; everything here quantifies how many shots that test needs.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::ads_geometry::{entropy_gap_to_length_gap, geometry_from_qubits, AdsGeometry};
use crate::cost_models::ln_shadow_cost;
use crate::error::{Error, Result};
use crate::lwe_etcf::Mode;
use crate::seed::derived_rng;

pub const DEFAULT_WKB_THRESHOLD: f64 = 3.0;
pub const DEFAULT_BACKREACTION_THRESHOLD: f64 = 0.1;
/// Largest shot count the empirical search will try.
pub const SHOT_CAP: u64 = 1_000_000_000;
/// Bisection stops once `hi / lo` is at most this factor.
pub const SEARCH_RESOLUTION: f64 = 1.1;
pub const MIN_TRIALS: usize = 200;
pub const MIN_REPETITIONS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    /// Probe mass `m`, in inverse AdS lengths.
    pub mass: f64,
    /// Per-shot standard deviation `σ_O`; zero models a noiseless channel.
    pub sigma_shot: f64,
    pub n_qubits: u64,
    /// Proportionality constant in `G_N = κ/N`.
    pub kappa: f64,
    /// Detection threshold in standard deviations used by the predictor.
    pub z: f64,
    /// Exponent `α ≥ 1` in the `e^{N^{1/α}}` cost scaling.
    pub alpha_exp: f64,
    /// Geodesic length of the reference (longer) hypothesis.
    pub base_length: f64,
    pub wkb_threshold: f64,
    pub backreaction_threshold: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            mass: 2.0,
            sigma_shot: 1.0,
            n_qubits: 64,
            kappa: 1.0,
            z: 2.0,
            alpha_exp: 2.0,
            base_length: 1.0,
            wkb_threshold: DEFAULT_WKB_THRESHOLD,
            backreaction_threshold: DEFAULT_BACKREACTION_THRESHOLD,
        }
    }
}

impl ProbeConfig {
    pub fn with_mass(mass: f64) -> Self {
        ProbeConfig { mass, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("kappa", self.kappa),
            ("z", self.z),
            ("wkb_threshold", self.wkb_threshold),
            ("backreaction_threshold", self.backreaction_threshold),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.sigma_shot.is_finite() && self.sigma_shot >= 0.0) {
            return Err(Error::InvalidParams(format!("sigma_shot = {} must be >= 0", self.sigma_shot)));
        }
        if !(self.alpha_exp >= 1.0) {
            return Err(Error::InvalidParams(format!("alpha = {} must be >= 1", self.alpha_exp)));
        }
        if !(self.base_length.is_finite() && self.base_length >= 0.0) {
            return Err(Error::InvalidParams(format!("base_length = {} must be >= 0", self.base_length)));
        }
        if self.n_qubits == 0 {
            return Err(Error::InvalidParams("n_qubits must be at least 1".into()));
        }
        Ok(())
    }

    /// `m · G_N = m κ / N`.
    pub fn backreaction_ratio(&self) -> f64 {
        self.mass * self.kappa / self.n_qubits as f64
    }

    pub fn regime_valid(&self) -> bool {
        self.backreaction_ratio() < self.backreaction_threshold
    }
}

/// The `z` for which the predictor's shot count matches the midpoint test at
/// per-hypothesis error `error_rate`: `z = √2 · Φ⁻¹(1 − error_rate)`.
pub fn z_for_error_rate(error_rate: f64) -> Result<f64> {
    if !(error_rate > 0.0 && error_rate < 0.5) {
        return Err(Error::InvalidParams(format!("error rate {error_rate} must lie in (0, 1/2)")));
    }
    let normal = Normal::standard();
    Ok(std::f64::consts::SQRT_2 * normal.inverse_cdf(1.0 - error_rate))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoPoint {
    pub value: f64,
    /// `m L` is at least the WKB threshold.
    pub wkb_valid: bool,
}

/// `⟨φφ⟩ ≈ e^{-mL}`, flagged when `mL` is below the WKB threshold.
pub fn two_point_expectation(mass: f64, length: f64) -> Result<TwoPoint> {
    two_point_with_threshold(mass, length, DEFAULT_WKB_THRESHOLD)
}

pub fn two_point_with_threshold(mass: f64, length: f64, wkb_threshold: f64) -> Result<TwoPoint> {
    if !(mass > 0.0) || !(length >= 0.0) {
        return Err(Error::Domain(format!("need m > 0 and L >= 0, got m = {mass}, L = {length}")));
    }
    Ok(TwoPoint { value: (-mass * length).exp(), wkb_valid: mass * length >= wkb_threshold })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub g_hat: f64,
    /// `-ln(Ĝ)/m`, absent when the noisy mean is not positive.
    pub l_hat: Option<f64>,
}

/// One `M`-shot measurement of the two-point function at length `l_true`.
pub fn simulate_estimate<R: Rng + ?Sized>(cfg: &ProbeConfig, l_true: f64, shots: u64, rng: &mut R) -> Result<Estimate> {
    cfg.validate()?;
    if shots == 0 {
        return Err(Error::InvalidParams("M must be at least 1".into()));
    }
    let mean = two_point_expectation(cfg.mass, l_true)?.value;
    let xi: f64 = StandardNormal.sample(rng);
    let g_hat = mean + cfg.sigma_shot / (shots as f64).sqrt() * xi;
    let l_hat = (g_hat > 0.0).then(|| -g_hat.ln() / cfg.mass);
    Ok(Estimate { g_hat, l_hat })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleComplexity {
    /// `ΔG = e^{-mL}(1 − e^{-m δL})`.
    pub delta_g: f64,
    pub ln_delta_g: f64,
    /// `⌈2 z² σ² / ΔG²⌉` (at least 1); may exceed `u64` for large `mL`.
    pub m_exact: f64,
    pub ln_m_exact: f64,
    /// The simplified bound `e^{2 m δL}`.
    pub m_bound: f64,
    pub ln_m_bound: f64,
}

impl SampleComplexity {
    pub fn m_exact_u64(&self) -> Option<u64> {
        (self.m_exact <= u64::MAX as f64).then_some(self.m_exact as u64)
    }
}

/// `ln ΔG`, evaluated without underflow for large `mL`.
pub fn ln_signal_gap(mass: f64, length: f64, dl: f64) -> f64 {
    -mass * length + (-(-mass * dl).exp_m1()).ln()
}

pub fn predicted_sample_complexity(cfg: &ProbeConfig, length: f64, dl: f64) -> Result<SampleComplexity> {
    cfg.validate()?;
    if !(dl > 0.0) || !(length >= 0.0) {
        return Err(Error::Domain(format!("need dL > 0 and L >= 0, got dL = {dl}, L = {length}")));
    }
    let ln_delta_g = ln_signal_gap(cfg.mass, length, dl);
    let delta_g = ln_delta_g.exp();
    let scale = 2.0 * cfg.z * cfg.z * cfg.sigma_shot * cfg.sigma_shot;
    let ln_raw = scale.ln() - 2.0 * ln_delta_g;
    let (m_exact, ln_m_exact) = if ln_raw < 36.0 {
        let m = (scale / (delta_g * delta_g)).ceil().max(1.0);
        (m, m.ln())
    } else {
        // Beyond 2^52 the ceiling is below float resolution.
        (ln_raw.exp(), ln_raw)
    };
    let ln_m_bound = 2.0 * cfg.mass * dl;
    Ok(SampleComplexity { delta_g, ln_delta_g, m_exact, ln_m_exact, m_bound: ln_m_bound.exp(), ln_m_bound })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ShotSearch {
    Found { shots: u64, error_rate: f64 },
    CapExceeded { cap: u64, error_rate_at_cap: f64 },
}

impl ShotSearch {
    pub fn shots(&self) -> Option<u64> {
        match *self {
            ShotSearch::Found { shots, .. } => Some(shots),
            ShotSearch::CapExceeded { .. } => None,
        }
    }
}

/// Monte-Carlo error rates of the midpoint test for a fixed set of draws.
///
/// One standard-normal draw per trial and hypothesis is reused for every `M`
/// (common random numbers), so the error frequency is non-increasing in `M`.
struct MidpointTrials {
    short: Vec<f64>,
    long: Vec<f64>,
    /// `ΔG / (2σ)`; the test errs when a draw lies beyond `half_gap · √M`.
    half_gap: f64,
}

impl MidpointTrials {
    fn draw<R: Rng + ?Sized>(cfg: &ProbeConfig, length: f64, dl: f64, trials: usize, rng: &mut R) -> Self {
        let short = (0..trials).map(|_| StandardNormal.sample(rng)).collect();
        let long = (0..trials).map(|_| StandardNormal.sample(rng)).collect();
        let half_gap = if cfg.sigma_shot == 0.0 {
            f64::INFINITY
        } else {
            ln_signal_gap(cfg.mass, length, dl).exp() / (2.0 * cfg.sigma_shot)
        };
        MidpointTrials { short, long, half_gap }
    }

    /// Worst per-hypothesis error frequency at `shots`.
    ///
    /// The short geodesic (larger `G`) is misread when `Ḡ` falls below the
    /// midpoint, the long one when `Ḡ` reaches it; both are evaluated in
    /// standardized units `ξ = (Ḡ − G)√M/σ`.
    fn error_rate(&self, shots: u64) -> f64 {
        let t = self.half_gap * (shots as f64).sqrt();
        let n = self.short.len() as f64;
        let short_err = self.short.iter().filter(|&&xi| xi < -t).count() as f64 / n;
        let long_err = self.long.iter().filter(|&&xi| xi >= t).count() as f64 / n;
        short_err.max(long_err)
    }
}

/// Smallest `M` whose midpoint test errs at most `target_error` on each
/// hypothesis, found by doubling and then bisecting to within
/// [`SEARCH_RESOLUTION`].
pub fn empirical_min_shots<R: Rng + ?Sized>(
    cfg: &ProbeConfig,
    length: f64,
    dl: f64,
    target_error: f64,
    trials: usize,
    rng: &mut R,
) -> Result<ShotSearch> {
    cfg.validate()?;
    if !(target_error > 0.0 && target_error < 0.5) {
        return Err(Error::InvalidParams(format!("target error {target_error} must lie in (0, 1/2)")));
    }
    if trials < MIN_TRIALS {
        return Err(Error::InvalidParams(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    if !(dl > 0.0) || !(length >= 0.0) {
        return Err(Error::Domain(format!("need dL > 0 and L >= 0, got dL = {dl}, L = {length}")));
    }
    let mc = MidpointTrials::draw(cfg, length, dl, trials, rng);

    let mut hi = 1u64;
    let mut err = mc.error_rate(hi);
    while err > target_error {
        if hi >= SHOT_CAP {
            return Ok(ShotSearch::CapExceeded { cap: SHOT_CAP, error_rate_at_cap: mc.error_rate(SHOT_CAP) });
        }
        hi = (hi * 2).min(SHOT_CAP);
        err = mc.error_rate(hi);
    }
    if hi == 1 {
        return Ok(ShotSearch::Found { shots: 1, error_rate: err });
    }
    let mut lo = hi / 2;
    while hi as f64 > lo as f64 * SEARCH_RESOLUTION && hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let e = mc.error_rate(mid);
        if e <= target_error {
            hi = mid;
            err = e;
        } else {
            lo = mid;
        }
    }
    Ok(ShotSearch::Found { shots: hi, error_rate: err })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguisherOutcome {
    /// Decision of the first protocol run.
    pub decision: Mode,
    /// Fraction of repetitions that identified the true function.
    pub success_estimate: f64,
    pub shots_used: u64,
    pub regime_valid: bool,
    pub repetitions: usize,
    pub length_gap: f64,
}

/// Alice's protocol as a statistical test.
///
/// The injective function gives the longer geodesic `L₀ = cfg.base_length`,
/// the degenerate one `L₀ − δL` with `δL` from the entropy gap. Each run
/// measures `budget` shots and declares "injective" when the mean falls below
/// the midpoint of the two predicted correlators. Repetition `r` draws from
/// the stream `derive_seed(seed, "distinguisher", r)`.
#[allow(clippy::too_many_arguments)]
pub fn holographic_distinguisher(
    geom: &AdsGeometry,
    cfg: &ProbeConfig,
    truth: Mode,
    ds_bits: f64,
    budget: u64,
    repetitions: usize,
    seed: u64,
) -> Result<DistinguisherOutcome> {
    cfg.validate()?;
    geom.validate()?;
    if budget == 0 {
        return Err(Error::InvalidParams("budget must be at least 1 shot".into()));
    }
    if repetitions < MIN_REPETITIONS {
        return Err(Error::InvalidParams(format!("need at least {MIN_REPETITIONS} repetitions, got {repetitions}")));
    }
    let dl = entropy_gap_to_length_gap(geom, ds_bits)?;
    let l_long = cfg.base_length;
    let l_short = l_long - dl;
    if l_short < 0.0 {
        return Err(Error::Domain(format!("length gap {dl} exceeds the base length {l_long}")));
    }
    let l_true = match truth {
        Mode::Injective => l_long,
        Mode::Degenerate => l_short,
    };
    let threshold = 0.5 * ((-cfg.mass * l_long).exp() + (-cfg.mass * l_short).exp());

    let mut correct = 0usize;
    let mut first = None;
    for r in 0..repetitions {
        let mut rng = derived_rng(seed, "distinguisher", r as u64);
        let est = simulate_estimate(cfg, l_true, budget, &mut rng)?;
        let decision = if est.g_hat < threshold { Mode::Injective } else { Mode::Degenerate };
        first.get_or_insert(decision);
        if decision == truth {
            correct += 1;
        }
    }
    Ok(DistinguisherOutcome {
        decision: first.unwrap_or(Mode::Degenerate),
        success_estimate: correct as f64 / repetitions as f64,
        shots_used: budget,
        regime_valid: cfg.mass * geom.newton_g < cfg.backreaction_threshold,
        repetitions,
        length_gap: dl,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeEntry {
    pub regime: String,
    pub mass: f64,
    /// Boundary size the probe acts on: `N` (heavy) or `N' = e^{√N}` (light).
    pub boundary_size: f64,
    /// `N'/N`; 1 for the heavy regime.
    pub blowup_factor: f64,
    pub length_gap: f64,
    pub ln_m_exact: f64,
    pub ln_m_bound: f64,
    /// Heisenberg-limited count, `√M_SQL`.
    pub ln_m_heisenberg: f64,
    pub ln_m_shadow: f64,
    pub backreaction_ratio: f64,
    pub regime_valid: bool,
    pub wkb_valid: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub n: u64,
    pub kappa: f64,
    pub ds_bits: f64,
    pub alpha_exp: f64,
    /// `N^{1/α}`, the exponent of the leading-order cost scaling.
    pub scaling_exponent: f64,
    pub heavy: RegimeEntry,
    pub light: RegimeEntry,
}

/// Heavy (`m = √N`) versus light (`m = ln N'`, `N' = e^{√N}`) probes for an
/// `N`-qubit boundary and entropy gap `ds_bits`.
pub fn regime_report(n: u64, kappa: f64, cfg: &ProbeConfig, ds_bits: f64) -> Result<RegimeReport> {
    cfg.validate()?;
    if n < 4 {
        return Err(Error::InvalidParams(format!("regime report needs N >= 4, got {n}")));
    }
    let geom = geometry_from_qubits(n, kappa)?;
    let dl = entropy_gap_to_length_gap(&geom, ds_bits)?;
    let nf = n as f64;
    let root_n = nf.sqrt();

    let entry = |regime: &str, mass: f64, boundary_size: f64, ln_blowup: f64| -> Result<RegimeEntry> {
        let probe = ProbeConfig { mass, n_qubits: n, kappa, ..*cfg };
        let sc = predicted_sample_complexity(&probe, cfg.base_length, dl)?;
        let ratio = mass * kappa / boundary_size;
        Ok(RegimeEntry {
            regime: regime.to_string(),
            mass,
            boundary_size,
            blowup_factor: ln_blowup.exp(),
            length_gap: dl,
            ln_m_exact: sc.ln_m_exact,
            ln_m_bound: sc.ln_m_bound,
            ln_m_heisenberg: 0.5 * sc.ln_m_exact,
            ln_m_shadow: ln_shadow_cost(n, sc.ln_delta_g, cfg.sigma_shot * cfg.sigma_shot),
            backreaction_ratio: ratio,
            regime_valid: ratio < cfg.backreaction_threshold,
            wkb_valid: mass * cfg.base_length >= cfg.wkb_threshold,
        })
    };

    let heavy = entry("heavy", root_n, nf, 0.0)?;
    // ln N' = √N, so the light mass equals the heavy one; the cost moves into
    // the enlarged boundary.
    let light = entry("light", root_n, root_n.exp(), root_n - nf.ln())?;
    Ok(RegimeReport {
        n,
        kappa,
        ds_bits,
        alpha_exp: cfg.alpha_exp,
        scaling_exponent: nf.powf(1.0 / cfg.alpha_exp),
        heavy,
        light,
    })
}
