//! Function-superposition states, partial traces and von Neumann entropies.
//!
//! A function state `|ψ⟩ = D^{-1/2} Σ_i |i⟩|h(i)⟩` is stored sparsely as
//! `(input, output, amplitude)` triples; the output register is indexed by the
//! image values actually reached, never by the full `q^{m_rows}` codomain.

use std::collections::BTreeMap;

use nalgebra::{Complex, DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lwe_etcf::{EtcfInstance, Mode};
use crate::LogBase;

pub type C64 = Complex<f64>;

/// Largest dimension a reduced state may have before it is materialized densely.
pub const MAX_DENSE_DIM: usize = 4096;

pub const NORM_TOLERANCE: f64 = 1e-12;
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-12;
/// Eigenvalues in `[-EIGEN_CLAMP, 0)` are treated as zero.
pub const EIGEN_CLAMP: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Register {
    InputRegister,
    OutputRegister,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    input_dim: usize,
    output_dim: usize,
    entries: Vec<(usize, usize, C64)>,
    /// Image value behind each output index, when built from a function.
    output_labels: Vec<Vec<u64>>,
}

impl PureState {
    /// Wraps explicit amplitudes; the squared norm must be 1 within
    /// [`NORM_TOLERANCE`].
    pub fn from_entries(input_dim: usize, output_dim: usize, entries: Vec<(usize, usize, C64)>) -> Result<Self> {
        if let Some(&(i, o, _)) = entries.iter().find(|(i, o, _)| *i >= input_dim || *o >= output_dim) {
            return Err(Error::InvalidState(format!("entry ({i}, {o}) outside {input_dim} x {output_dim}")));
        }
        let state = PureState { input_dim, output_dim, entries, output_labels: Vec::new() };
        let norm = state.norm();
        if (norm * norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("squared norm {} is not 1", norm * norm)));
        }
        Ok(state)
    }

    /// Like [`PureState::from_entries`] but rescales to unit norm first.
    pub fn normalized(input_dim: usize, output_dim: usize, mut entries: Vec<(usize, usize, C64)>) -> Result<Self> {
        let norm = entries.iter().map(|(_, _, a)| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        for (_, _, a) in entries.iter_mut() {
            *a /= norm;
        }
        Self::from_entries(input_dim, output_dim, entries)
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    pub fn output_labels(&self) -> &[Vec<u64>] {
        &self.output_labels
    }

    pub fn norm(&self) -> f64 {
        // Duplicate (input, output) pairs add coherently.
        let mut merged: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        for &(i, o, a) in &self.entries {
            *merged.entry((i, o)).or_insert(C64::new(0.0, 0.0)) += a;
        }
        merged.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Number of distinct output indices carrying amplitude.
    pub fn output_support(&self) -> usize {
        let mut outs: Vec<usize> = self.entries.iter().map(|e| e.1).collect();
        outs.sort_unstable();
        outs.dedup();
        outs.len()
    }
}

/// Uniform superposition over all inputs of the instance, entangled with
/// their images.
pub fn build_function_state(inst: &EtcfInstance) -> Result<PureState> {
    let outputs = inst.outputs()?;
    let mut labels: BTreeMap<&Vec<u64>, usize> = BTreeMap::new();
    for out in &outputs {
        labels.entry(out).or_insert(0);
    }
    for (idx, v) in labels.values_mut().enumerate() {
        *v = idx;
    }
    let amp = C64::new(1.0 / (outputs.len() as f64).sqrt(), 0.0);
    let entries = outputs.iter().enumerate().map(|(i, out)| (i, labels[out], amp)).collect();
    let output_labels = labels.keys().map(|v| (*v).clone()).collect();
    Ok(PureState { input_dim: outputs.len(), output_dim: labels.len(), entries, output_labels })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace. Positivity is checked when the
    /// spectrum is taken.
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::InvalidState(format!(
                "density matrix must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let d = entries.nrows();
        for i in 0..d {
            for j in i..d {
                if (entries[(i, j)] - entries[(j, i)].conj()).norm() > HERMITIAN_TOLERANCE {
                    return Err(Error::InvalidState(format!("not Hermitian at ({i}, {j})")));
                }
            }
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > TRACE_TOLERANCE || trace.im.abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace {trace} is not 1")));
        }
        Ok(DensityMatrix { entries })
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidState("dimension 0".into()));
        }
        Self::new(DMatrix::from_diagonal_element(d, d, C64::new(1.0 / d as f64, 0.0)))
    }

    /// `|ψ⟩⟨ψ|` for a vector that is normalized here.
    pub fn from_pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let d = psi.len();
        Self::new(DMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / (norm * norm)))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = SymmetricEigen::new(self.entries.clone());
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        vals
    }

    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }

    /// Relabels basis states: new index `perm[i]` carries old index `i`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let d = self.dim();
        let mut seen = vec![false; d];
        if perm.len() != d || perm.iter().any(|&p| p >= d || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidState("not a permutation".into()));
        }
        let mut out = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                out[(perm[i], perm[j])] = self.entries[(i, j)];
            }
        }
        Ok(DensityMatrix { entries: out })
    }

    /// One eigenvalue per line under an `eigenvalue` header.
    pub fn spectrum_csv(&self) -> String {
        let mut s = String::from("eigenvalue\n");
        for v in self.eigenvalues() {
            s.push_str(&format!("{v:e}\n"));
        }
        s
    }
}

/// Partial trace over the register that is not kept.
pub fn reduce_density_matrix(state: &PureState, keep: Register) -> Result<DensityMatrix> {
    type Pick = fn(&(usize, usize, C64)) -> usize;
    let (dim, kept, traced): (usize, Pick, Pick) = match keep {
        Register::InputRegister => (state.input_dim, |e| e.0, |e| e.1),
        Register::OutputRegister => (state.output_dim, |e| e.1, |e| e.0),
    };
    if dim > MAX_DENSE_DIM {
        return Err(Error::InvalidState(format!("reduced dimension {dim} exceeds the dense limit {MAX_DENSE_DIM}")));
    }
    // Group amplitudes by the traced index: ρ = Σ_t |v_t⟩⟨v_t|.
    let mut groups: BTreeMap<usize, BTreeMap<usize, C64>> = BTreeMap::new();
    for e in &state.entries {
        *groups.entry(traced(e)).or_default().entry(kept(e)).or_insert(C64::new(0.0, 0.0)) += e.2;
    }
    let mut rho = DMatrix::<C64>::zeros(dim, dim);
    for vec in groups.values() {
        for (&i, &ai) in vec {
            for (&j, &aj) in vec {
                rho[(i, j)] += ai * aj.conj();
            }
        }
    }
    DensityMatrix::new(rho)
}

/// `-Σ λ log λ` over the spectrum, with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix, base: LogBase) -> Result<f64> {
    let mut nats = 0.0;
    for lambda in rho.eigenvalues() {
        if lambda < -EIGEN_CLAMP {
            return Err(Error::InvalidState(format!("negative eigenvalue {lambda:e}")));
        }
        if lambda > 0.0 {
            nats -= lambda * lambda.ln();
        }
    }
    // A pure state can carry an eigenvalue a few ulps above 1.
    Ok(base.from_nats(nats.max(0.0)))
}

/// Input-register entropy of an instance's function state, in bits.
pub fn input_entropy_bits(inst: &EtcfInstance) -> Result<f64> {
    let rho = reduce_density_matrix(&build_function_state(inst)?, Register::InputRegister)?;
    von_neumann_entropy(&rho, LogBase::Bits)
}

/// `S(ρ_f) − S(ρ_g)` in bits for two noiseless instances with identical
/// parameters.
pub fn entropy_gap(inst_f: &EtcfInstance, inst_g: &EtcfInstance) -> Result<f64> {
    if !(inst_f.params().noiseless && inst_g.params().noiseless) {
        return Err(Error::UnsupportedMode("entropy_gap requires noiseless instances".into()));
    }
    if inst_f.params() != inst_g.params() {
        return Err(Error::InvalidParams("instances must share LweParams".into()));
    }
    Ok(input_entropy_bits(inst_f)? - input_entropy_bits(inst_g)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QedAnswer {
    FirstLarger,
    SecondLarger,
}

/// Slack on the promise so floating-point gaps of exactly `delta` pass.
pub const PROMISE_SLACK: f64 = 1e-9;

/// Decides which state has the larger entropy, checking the promised gap.
pub fn qed_decide(rho1: &DensityMatrix, rho2: &DensityMatrix, delta: f64) -> Result<QedAnswer> {
    let gap = von_neumann_entropy(rho1, LogBase::Bits)? - von_neumann_entropy(rho2, LogBase::Bits)?;
    if gap.abs() < delta - PROMISE_SLACK {
        return Err(Error::PromiseViolation { gap: gap.abs(), delta });
    }
    Ok(if gap > 0.0 { QedAnswer::FirstLarger } else { QedAnswer::SecondLarger })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyRecord {
    pub mode: Mode,
    pub q: u64,
    pub n: usize,
    pub k: u32,
    pub entropy_bits: f64,
}

impl EntropyRecord {
    pub fn for_instance(inst: &EtcfInstance) -> Result<Self> {
        let p = inst.params();
        Ok(EntropyRecord { mode: inst.mode(), q: p.q, n: p.n, k: p.k, entropy_bits: input_entropy_bits(inst)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lwe_etcf::{sample_instance, LweParams};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn small_injective_state() {
        let inst = sample_instance(&LweParams::noiseless(1, 2, 2, 1), Mode::Injective, 3).unwrap();
        let st = build_function_state(&inst).unwrap();
        assert_eq!(st.entries().len(), 4);
        assert!(st.entries().iter().all(|e| (e.2 - c(0.5)).norm() < 1e-15));
        assert!((st.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_output_support() {
        let inst = sample_instance(&LweParams::noiseless(2, 3, 3, 1), Mode::Degenerate, 3).unwrap();
        let st = build_function_state(&inst).unwrap();
        assert_eq!(st.output_support(), 9);
        assert_eq!(st.output_labels().len(), 9);
    }

    #[test]
    fn injective_reduction_is_maximally_mixed() {
        let inst = sample_instance(&LweParams::noiseless(2, 3, 3, 1), Mode::Injective, 3).unwrap();
        let rho = reduce_density_matrix(&build_function_state(&inst).unwrap(), Register::InputRegister).unwrap();
        assert_eq!(rho.dim(), 18);
        let mm = DensityMatrix::maximally_mixed(18).unwrap();
        assert!((rho.matrix() - mm.matrix()).norm() < 1e-14);
        assert!((rho.purity() - 1.0 / 18.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_reduction_blocks() {
        let inst = sample_instance(&LweParams::noiseless(2, 3, 3, 1), Mode::Degenerate, 3).unwrap();
        let rho = reduce_density_matrix(&build_function_state(&inst).unwrap(), Register::InputRegister).unwrap();
        let evs = rho.eigenvalues();
        let nonzero: Vec<f64> = evs.iter().copied().filter(|v| v.abs() > 1e-12).collect();
        assert_eq!(nonzero.len(), 9);
        assert!(nonzero.iter().all(|v| (v - 1.0 / 9.0).abs() < 1e-12));
        // Each pair (i, partner) carries 1/18 on its off-diagonal.
        for b in 0..2u64 {
            for x0 in 0..3u64 {
                for x1 in 0..3u64 {
                    let (bp, xp) = inst.collision_partner(b, &[x0, x1]).unwrap().unwrap();
                    let i = inst.input_index(b, &[x0, x1]);
                    let j = inst.input_index(bp, &xp);
                    assert!((rho.matrix()[(i, j)] - c(1.0 / 18.0)).norm() < 1e-15);
                }
            }
        }
        let s = von_neumann_entropy(&rho, LogBase::Bits).unwrap();
        assert!((s - 9f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn entropy_reference_values() {
        let mm = DensityMatrix::maximally_mixed(18).unwrap();
        assert!((von_neumann_entropy(&mm, LogBase::Bits).unwrap() - 4.169925001442312).abs() < 1e-9);
        let pure = DensityMatrix::from_pure(&[c(1.0), c(1.0), C64::new(0.0, 1.0)]).unwrap();
        assert!(von_neumann_entropy(&pure, LogBase::Nats).unwrap().abs() < 1e-12);
    }

    #[test]
    fn negative_eigenvalue_is_rejected() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.1), c(-0.1)]));
        let rho = DensityMatrix::new(m).unwrap();
        assert!(matches!(von_neumann_entropy(&rho, LogBase::Bits), Err(Error::InvalidState(_))));
    }

    #[test]
    fn density_validation() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.1), c(0.2), c(0.5)]);
        assert!(DensityMatrix::new(m).is_err());
        let m = DMatrix::from_diagonal_element(2, 2, c(0.4));
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn gap_values() {
        for (q, n, k) in [(3u64, 2usize, 1u32), (2, 2, 2)] {
            let p = LweParams::noiseless(n, n + k as usize + 1, q, k);
            let f = sample_instance(&p, Mode::Injective, 17).unwrap();
            let g = sample_instance(&p, Mode::Degenerate, 17).unwrap();
            assert!((entropy_gap(&f, &g).unwrap() - k as f64).abs() < 1e-9);
            assert!(entropy_gap(&f, &f).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn gap_rejects_noisy() {
        let p = LweParams::noisy(2, 3, 3, 1, 0.5);
        let f = sample_instance(&p, Mode::Injective, 1).unwrap();
        let g = sample_instance(&p, Mode::Degenerate, 1).unwrap();
        assert!(matches!(entropy_gap(&f, &g), Err(Error::UnsupportedMode(_))));
    }

    #[test]
    fn qed_decisions() {
        let mm = DensityMatrix::maximally_mixed(4).unwrap();
        let pure = DensityMatrix::from_pure(&[c(1.0), c(0.0), c(0.0), c(0.0)]).unwrap();
        assert_eq!(qed_decide(&mm, &pure, 1.0).unwrap(), QedAnswer::FirstLarger);
        assert_eq!(qed_decide(&pure, &mm, 1.0).unwrap(), QedAnswer::SecondLarger);
        assert!(matches!(qed_decide(&mm, &mm, 1.0), Err(Error::PromiseViolation { .. })));

        let p = LweParams::noiseless(2, 4, 3, 1);
        let rf = reduce_density_matrix(
            &build_function_state(&sample_instance(&p, Mode::Injective, 2).unwrap()).unwrap(),
            Register::InputRegister,
        )
        .unwrap();
        let rg = reduce_density_matrix(
            &build_function_state(&sample_instance(&p, Mode::Degenerate, 2).unwrap()).unwrap(),
            Register::InputRegister,
        )
        .unwrap();
        assert_eq!(qed_decide(&rf, &rg, 1.0).unwrap(), QedAnswer::FirstLarger);
    }

    #[test]
    fn spectrum_csv_has_one_row_per_eigenvalue() {
        let csv = DensityMatrix::maximally_mixed(3).unwrap().spectrum_csv();
        assert_eq!(csv.lines().count(), 4);
        assert_eq!(csv.lines().next(), Some("eigenvalue"));
    }

    #[test]
    fn entropy_record_serializes() {
        let inst = sample_instance(&LweParams::noiseless(2, 3, 3, 1), Mode::Degenerate, 3).unwrap();
        let rec = EntropyRecord::for_instance(&inst).unwrap();
        let v: serde_json::Value = serde_json::to_value(&rec).unwrap();
        assert_eq!(v["mode"], "degenerate");
        assert_eq!(v["q"], 3);
    }
}
