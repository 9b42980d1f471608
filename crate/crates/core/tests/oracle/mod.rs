//! Independent reference computations used by the integration tests.
//!
//! Each oracle reaches its answer by a different route than the library:
//! Fock-space brute force instead of symplectic spectra, analytic normal modes
//! instead of numerical matrix functions, and values frozen from a separate
//! scripted evaluation of the cost formulas.

#![allow(dead_code)]

use holo_lwe_core::state_entropy::{reduce_density_matrix, von_neumann_entropy, PureState, Register};
use holo_lwe_core::LogBase;
use nalgebra::{Complex, DMatrix, SymmetricEigen};

pub const FOCK_CUTOFF: usize = 60;

pub struct FockReduction {
    pub entropy_nats: f64,
    /// `⟨a†a⟩ + 1/2` of one mode.
    pub nu: f64,
}

/// Two-mode squeezed vacuum `exp(r(a†b† − ab))|0,0⟩` built in the diagonal
/// photon-number sector `|n,n⟩`, n ≤ cutoff, then reduced to mode a with an
/// explicit partial trace.
pub fn fock_two_mode_squeezed(r: f64, cutoff: usize) -> FockReduction {
    let dim = cutoff + 1;
    let mut gen = DMatrix::<f64>::zeros(dim, dim);
    for n in 0..dim {
        if n + 1 < dim {
            gen[(n + 1, n)] = (n + 1) as f64;
        }
        if n > 0 {
            gen[(n - 1, n)] = -(n as f64);
        }
    }
    let u = (gen * r).exp();
    let amps: Vec<f64> = (0..dim).map(|n| u[(n, 0)]).collect();
    let entries = amps.iter().enumerate().map(|(n, &a)| (n, n, Complex::new(a, 0.0))).collect();
    let state = PureState::normalized(dim, dim, entries).expect("truncated state");
    let rho = reduce_density_matrix(&state, Register::InputRegister).expect("partial trace");
    let entropy_nats = von_neumann_entropy(&rho, LogBase::Nats).expect("entropy");
    let norm: f64 = amps.iter().map(|a| a * a).sum();
    let mean_n: f64 = amps.iter().enumerate().map(|(n, a)| n as f64 * a * a).sum::<f64>() / norm;
    FockReduction { entropy_nats, nu: mean_n + 0.5 }
}

/// Entanglement entropy (nats) of the sites `region` of the Dirichlet chain,
/// from the `X = ⟨φφ⟩`, `P = ⟨ππ⟩` correlators assembled out of analytic sine
/// modes: `ν² = eig(X_A P_A)`.
pub fn correlator_chain_entropy(d: usize, mass0: f64, coupling: f64, region: &[usize]) -> f64 {
    let norm = (2.0 / (d as f64 + 1.0)).sqrt();
    let mode = |k: usize, i: usize| norm * (std::f64::consts::PI * (k * (i + 1)) as f64 / (d as f64 + 1.0)).sin();
    let omega: Vec<f64> = (1..=d)
        .map(|k| {
            let s = (std::f64::consts::PI * k as f64 / (2.0 * (d as f64 + 1.0))).sin();
            (mass0 * mass0 + 4.0 * coupling * s * s).sqrt()
        })
        .collect();
    let a = region.len();
    let mut x = DMatrix::<f64>::zeros(a, a);
    let mut p = DMatrix::<f64>::zeros(a, a);
    for (ia, &i) in region.iter().enumerate() {
        for (ja, &j) in region.iter().enumerate() {
            let (mut xs, mut ps) = (0.0, 0.0);
            for k in 1..=d {
                let w = mode(k, i) * mode(k, j);
                xs += w / (2.0 * omega[k - 1]);
                ps += w * omega[k - 1] / 2.0;
            }
            x[(ia, ja)] = xs;
            p[(ia, ja)] = ps;
        }
    }
    // X^{1/2} P X^{1/2} is symmetric and shares its spectrum with X P.
    let ex = SymmetricEigen::new(x);
    let root = &ex.eigenvectors * DMatrix::from_diagonal(&ex.eigenvalues.map(f64::sqrt)) * ex.eigenvectors.transpose();
    let m = &root * p * &root;
    let m = (&m + m.transpose()) * 0.5;
    SymmetricEigen::new(m)
        .eigenvalues
        .iter()
        .map(|&l| {
            let nu = l.max(0.25).sqrt();
            let (hi, lo) = (nu + 0.5, nu - 0.5);
            hi * hi.ln() - if lo > 0.0 { lo * lo.ln() } else { 0.0 }
        })
        .sum()
}

/// Frozen outputs of a standalone script evaluating the BKZ formulas.
pub mod bkz {
    pub const ROOT_HERMITE_100: f64 = 1.009258721036;
    pub const ROOT_HERMITE_50: f64 = 1.012064863555;
    /// n = 72, m = 87, q = 97, σ = 1.
    pub const ANCHOR_BETA: usize = 61;
    pub const ANCHOR_CLASSICAL: f64 = 25.133928094887;
    pub const ANCHOR_QUANTUM: f64 = 23.486928094887;
    pub const ANCHOR_ENUMERATION: f64 = 21.592920809580;
    /// Required β for n = m = 40, 48, ..., 120 with q = 97, σ = 1.
    pub const BETA_SWEEP: [usize; 11] = [2, 23, 41, 53, 64, 76, 87, 98, 109, 120, 131];
    /// Required β for the Regev family at N = 32, 64, ..., 256.
    pub const REGEV_BETAS: [usize; 8] = [2, 45, 90, 134, 179, 226, 273, 321];
}

/// Half-chain and end-interval entropies of the D = 64, mass0 = 1e-3 chain
/// for ℓ = 4, 8, 16, 32, from a separate script.
pub const END_INTERVAL_ENTROPIES: [f64; 4] = [0.33580, 0.43788, 0.53491, 0.59063];
