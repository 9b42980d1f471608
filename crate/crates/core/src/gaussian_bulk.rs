//! Gaussian bulk-field entropies from covariance matrices.
//!
//! Quadratures are ordered `(φ₁..φ_D, π₁..π_D)`. `Γ` holds twice the
//! symmetrized second moments, so the vacuum of a unit-frequency mode is
//! `Γ = diag(1, 1)`. Symplectic eigenvalues `ν` are taken of `Γ/2`, which puts
//! the vacuum at `ν = 1/2` and makes every physical state satisfy `ν ≥ 1/2`.
//!
//! Region indices are zero-based.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use nalgebra::{Complex, DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{linear_fit, LinearFit};
use crate::LogBase;

pub const SYMMETRY_TOL: f64 = 1e-10;
pub const PHYSICALITY_TOL: f64 = 1e-8;
pub const PAIRING_TOL: f64 = 1e-8;

/// Real symmetric `2D × 2D` covariance matrix of a Gaussian state.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    gamma: DMatrix<f64>,
    modes: usize,
}

impl CovarianceMatrix {
    /// Validates symmetry and physicality (`ν ≥ 1/2` up to tolerance).
    pub fn new(gamma: DMatrix<f64>) -> Result<Self> {
        let cov = Self::unchecked(gamma)?;
        let spec = symplectic_spectrum(&cov)?;
        if let Some(&nu) = spec.nus.last() {
            if nu < 0.5 - PHYSICALITY_TOL {
                return Err(Error::UnphysicalMode { nu });
            }
        }
        Ok(cov)
    }

    /// Shape and symmetry checks only.
    fn unchecked(gamma: DMatrix<f64>) -> Result<Self> {
        let (r, c) = gamma.shape();
        if r != c || r == 0 || r % 2 != 0 {
            return Err(Error::InvalidState(format!("covariance must be 2D x 2D, got {r} x {c}")));
        }
        let asym = (&gamma - gamma.transpose()).amax();
        if !(asym < SYMMETRY_TOL) {
            return Err(Error::InvalidState(format!("covariance asymmetry {asym:e}")));
        }
        Ok(CovarianceMatrix { modes: r / 2, gamma })
    }

    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// The `φφ` block.
    pub fn position_block(&self) -> DMatrix<f64> {
        self.gamma.view((0, 0), (self.modes, self.modes)).into_owned()
    }

    /// Row-major CSV with a comment header naming `D` and the ordering.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# D={} ordering=phi_1..phi_D,pi_1..pi_D\n", self.modes);
        for i in 0..self.gamma.nrows() {
            let row: Vec<String> = (0..self.gamma.ncols()).map(|j| self.gamma[(i, j)].to_string()).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymplecticSpectrum {
    /// Sorted descending.
    pub nus: Vec<f64>,
    pub pairing_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlmBreakdown {
    pub s_cl: f64,
    pub s_bulk_ent: f64,
    pub delta_area_term: f64,
    pub wald_like: f64,
    pub counterterms: f64,
    pub total: f64,
}

/// Standard symplectic form `[[0, I], [−I, 0]]` for `modes` modes.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for i in 0..modes {
        omega[(i, modes + i)] = 1.0;
        omega[(modes + i, i)] = -1.0;
    }
    omega
}

fn chain_potential(d: usize, mass0: f64, coupling: f64) -> DMatrix<f64> {
    let mut k = DMatrix::zeros(d, d);
    for i in 0..d {
        k[(i, i)] = mass0 * mass0 + 2.0 * coupling;
        if i + 1 < d {
            k[(i, i + 1)] = -coupling;
            k[(i + 1, i)] = -coupling;
        }
    }
    k
}

/// `V f(Λ) Vᵀ` for a symmetric matrix with eigen-decomposition `V Λ Vᵀ`.
fn spectral_map(eig: &SymmetricEigen<f64, nalgebra::Dyn>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let v = &eig.eigenvectors;
    let mapped = DMatrix::from_diagonal(&eig.eigenvalues.map(f));
    v * mapped * v.transpose()
}

/// Ground state of the Dirichlet harmonic chain with `K_ii = mass0² + 2c`,
/// `K_{i,i±1} = −c`: `Γ_φφ = K^{−1/2}`, `Γ_ππ = K^{1/2}`, `Γ_φπ = 0`.
pub fn build_chain_ground_covariance(d: usize, mass0: f64, coupling: f64) -> Result<CovarianceMatrix> {
    if d == 0 {
        return Err(Error::InvalidParams("chain needs at least one site".into()));
    }
    if !(mass0 > 0.0) || !(coupling > 0.0) {
        return Err(Error::InvalidParams(format!("need mass0 > 0 and coupling > 0, got {mass0}, {coupling}")));
    }
    let eig = SymmetricEigen::new(chain_potential(d, mass0, coupling));
    let min = eig.eigenvalues.min();
    if !(min > 0.0) {
        return Err(Error::Domain(format!("potential matrix is not positive definite (min eigenvalue {min:e})")));
    }
    let phi = spectral_map(&eig, |l| 1.0 / l.sqrt());
    let pi = spectral_map(&eig, f64::sqrt);
    let mut gamma = DMatrix::zeros(2 * d, 2 * d);
    gamma.view_mut((0, 0), (d, d)).copy_from(&symmetrize(phi));
    gamma.view_mut((d, d), (d, d)).copy_from(&symmetrize(pi));
    CovarianceMatrix::unchecked(gamma)
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// Two-mode squeezed vacuum with squeezing `r`, ordered `(φ₁, φ₂, π₁, π₂)`.
pub fn two_mode_squeezed_covariance(r: f64) -> Result<CovarianceMatrix> {
    if !r.is_finite() {
        return Err(Error::InvalidParams(format!("squeezing {r} must be finite")));
    }
    let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    #[rustfmt::skip]
    let gamma = DMatrix::from_row_slice(4, 4, &[
        c, s, 0.0, 0.0,
        s, c, 0.0, 0.0,
        0.0, 0.0, c, -s,
        0.0, 0.0, -s, c,
    ]);
    CovarianceMatrix::unchecked(gamma)
}

/// Keeps `(φᵢ, πᵢ)` for the sites in `region`, in the given order.
pub fn restrict_covariance(cov: &CovarianceMatrix, region: &[usize]) -> Result<CovarianceMatrix> {
    let d = cov.modes;
    if region.is_empty() {
        return Err(Error::InvalidParams("region is empty".into()));
    }
    if let Some(&bad) = region.iter().find(|&&i| i >= d) {
        return Err(Error::InvalidParams(format!("site {bad} is outside a {d}-site system")));
    }
    if region.iter().collect::<BTreeSet<_>>().len() != region.len() {
        return Err(Error::InvalidParams("region repeats a site".into()));
    }
    let idx: Vec<usize> = region.iter().copied().chain(region.iter().map(|&i| i + d)).collect();
    let gamma = DMatrix::from_fn(idx.len(), idx.len(), |a, b| cov.gamma[(idx[a], idx[b])]);
    CovarianceMatrix::unchecked(gamma)
}

/// Symplectic eigenvalues of `Γ/2`.
///
/// `iΩ(Γ/2)` is similar to the Hermitian matrix `i V^{1/2} Ω V^{1/2}` with
/// `V = Γ/2`, whose eigenvalues come in `±ν` pairs. The residual of that
/// pairing is reported and must stay below [`PAIRING_TOL`].
pub fn symplectic_spectrum(cov: &CovarianceMatrix) -> Result<SymplecticSpectrum> {
    let d = cov.modes;
    let v = &cov.gamma * 0.5;
    let eig = SymmetricEigen::new(v);
    let min = eig.eigenvalues.min();
    if !(min > 0.0) {
        // A physical covariance is positive definite; this one has no valid spectrum.
        return Err(Error::UnphysicalMode { nu: min.max(0.0).sqrt() });
    }
    let root = symmetrize(spectral_map(&eig, f64::sqrt));
    let a = &root * symplectic_form(d) * &root;
    let h = DMatrix::from_fn(2 * d, 2 * d, |i, j| Complex::new(0.0, a[(i, j)]));
    let mut evals: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    evals.sort_by(|x, y| y.total_cmp(x));

    let (pos, neg) = evals.split_at(d);
    let pairing_residual = pos.iter().zip(neg.iter().rev()).map(|(p, n)| (p + n).abs()).fold(0.0, f64::max);
    if !(pairing_residual < PAIRING_TOL) {
        return Err(Error::NumericalDegeneracy { residual: pairing_residual, tolerance: PAIRING_TOL });
    }
    let nus = pos.iter().zip(neg.iter().rev()).map(|(p, n)| 0.5 * (p - n)).collect();
    Ok(SymplecticSpectrum { nus, pairing_residual })
}

/// `S(ν) = (ν + ½) ln(ν + ½) − (ν − ½) ln(ν − ½)`; values within tolerance
/// below `1/2` are clamped.
pub fn mode_entropy(nu: f64, base: LogBase) -> Result<f64> {
    if !(nu >= 0.5 - PHYSICALITY_TOL) || !nu.is_finite() {
        return Err(Error::UnphysicalMode { nu });
    }
    let nu = nu.max(0.5);
    let plus = nu + 0.5;
    let minus = nu - 0.5;
    let tail = if minus > 0.0 { minus * minus.ln() } else { 0.0 };
    Ok(base.from_nats(plus * plus.ln() - tail))
}

fn mode_entropies(cov: &CovarianceMatrix, base: LogBase) -> Result<Vec<f64>> {
    symplectic_spectrum(cov)?.nus.into_iter().map(|nu| mode_entropy(nu, base)).collect()
}

/// `Σᵢ S(νᵢ)`.
pub fn bulk_entanglement_entropy(cov: &CovarianceMatrix, base: LogBase) -> Result<f64> {
    Ok(mode_entropies(cov, base)?.iter().sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub value: f64,
    /// Exact entropy of the discarded modes.
    pub dropped_bound: f64,
}

/// Entropy of the `j` modes with the largest `S(ν)`, and what the rest carry.
pub fn truncated_entropy(cov: &CovarianceMatrix, j: usize, base: LogBase) -> Result<Truncation> {
    let mut s = mode_entropies(cov, base)?;
    if j == 0 || j > s.len() {
        return Err(Error::InvalidParams(format!("J = {j} must lie in 1..={}", s.len())));
    }
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(Truncation { value: s[..j].iter().sum(), dropped_bound: s[j..].iter().sum() })
}

/// Smallest `J` whose dropped entropy falls below `tolerance`.
pub fn modes_needed(cov: &CovarianceMatrix, tolerance: f64, base: LogBase) -> Result<usize> {
    let d = cov.modes;
    for j in 1..=d {
        if truncated_entropy(cov, j, base)?.dropped_bound < tolerance {
            return Ok(j);
        }
    }
    Ok(d)
}

pub fn flm_assemble(
    s_cl: f64,
    s_bulk_ent: f64,
    delta_area_term: f64,
    wald_like: f64,
    counterterms: f64,
) -> FlmBreakdown {
    FlmBreakdown {
        s_cl,
        s_bulk_ent,
        delta_area_term,
        wald_like,
        counterterms,
        total: s_cl + s_bulk_ent + delta_area_term + wald_like + counterterms,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// `Δ` in `|Γ_φφ(i, i+r)| ∝ r^{−Δ}`.
    pub exponent: f64,
    pub fit: LinearFit,
}

/// Power-law fit of the `φφ` correlator from `site` out to `max_distance`.
pub fn correlator_decay_exponent(cov: &CovarianceMatrix, site: usize, max_distance: usize) -> Result<DecayFit> {
    let d = cov.modes;
    if max_distance < 2 || site + max_distance >= d {
        return Err(Error::InvalidParams(format!(
            "need 2 <= max_distance and site + max_distance < {d}, got site {site}, max {max_distance}"
        )));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        (1..=max_distance).map(|r| ((r as f64).ln(), cov.gamma[(site, site + r)].abs().ln())).unzip();
    let fit = linear_fit(&xs, &ys).ok_or_else(|| Error::Domain("degenerate correlator fit".into()))?;
    Ok(DecayFit { exponent: -fit.slope, fit })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BulkEntropyRecord {
    #[serde(rename = "D")]
    pub d: usize,
    pub mass0: f64,
    pub coupling: f64,
    pub region: Vec<usize>,
    pub nus: Vec<f64>,
    #[serde(rename = "S")]
    pub entropy: f64,
}

impl BulkEntropyRecord {
    pub fn for_region(d: usize, mass0: f64, coupling: f64, region: &[usize], base: LogBase) -> Result<Self> {
        let chain = build_chain_ground_covariance(d, mass0, coupling)?;
        let sub = restrict_covariance(&chain, region)?;
        let spec = symplectic_spectrum(&sub)?;
        let entropy = spec.nus.iter().map(|&nu| mode_entropy(nu, base)).sum::<Result<f64>>()?;
        Ok(BulkEntropyRecord { d, mass0, coupling, region: region.to_vec(), nus: spec.nus, entropy })
    }
}
