//! Toy LWE extended trapdoor claw-free (ETCF) function pairs over `Z_q`.
//!
//! An instance fixes a public matrix `A` (m_rows × n, full column rank over
//! the prime field `Z_q`), `k` secrets `s_j`, `k` uniform offsets `u_j` and a
//! noise table. Inputs are pairs `(b, x)` with `b` a `k`-bit branch mask and
//! `x ∈ Z_q^n`:
//!
//! * injective:  `f(b, x) = A x + Σ_j b_j u_j + e(b, x)`
//! * degenerate: `g(b, x) = A x + Σ_j b_j (A s_j + e'_j) + e(b, x)`
//!
//! Noise is a fixed table indexed by the input, so `g` stays a function. In
//! noiseless mode `g(b, x) = A (x + Σ_j b_j s_j)`, which is exactly
//! `2^k`-to-1.
//!
//! Inputs are enumerated as `index = branch · q^n + Σ_i x_i q^i`.

use std::collections::{BTreeMap, HashSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{rng_from_seed, LabRng};

pub const DEFAULT_DOMAIN_CAP: u64 = 1 << 20;

/// Attempts allowed for rank and injectivity resampling.
pub const MAX_RESAMPLES: usize = 100;

fn default_domain_cap() -> u64 {
    DEFAULT_DOMAIN_CAP
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LweParams {
    /// Secret dimension.
    pub n: usize,
    /// Output dimension.
    pub m_rows: usize,
    /// Prime modulus.
    pub q: u64,
    /// Width of the discrete Gaussian, ignored when `noiseless`.
    pub sigma: f64,
    /// Collision exponent: the degenerate function is `2^k`-to-1.
    pub k: u32,
    pub noiseless: bool,
    #[serde(default = "default_domain_cap")]
    pub domain_cap: u64,
}

impl LweParams {
    pub fn noiseless(n: usize, m_rows: usize, q: u64, k: u32) -> Self {
        LweParams { n, m_rows, q, sigma: 0.0, k, noiseless: true, domain_cap: DEFAULT_DOMAIN_CAP }
    }

    pub fn noisy(n: usize, m_rows: usize, q: u64, k: u32, sigma: f64) -> Self {
        LweParams { n, m_rows, q, sigma, k, noiseless: false, domain_cap: DEFAULT_DOMAIN_CAP }
    }

    /// Number of branch masks, `2^k`.
    pub fn branch_count(&self) -> u64 {
        1u64 << self.k
    }

    /// `q^n`, saturating.
    pub fn x_count(&self) -> u128 {
        let mut acc: u128 = 1;
        for _ in 0..self.n {
            acc = acc.saturating_mul(self.q as u128);
        }
        acc
    }

    /// `2^k · q^n`, saturating.
    pub fn domain_size(&self) -> u128 {
        self.x_count().saturating_mul(self.branch_count() as u128)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if self.m_rows < self.n {
            return Err(Error::InvalidParams(format!("m_rows = {} must be at least n = {}", self.m_rows, self.n)));
        }
        if self.q < 2 || !is_prime(self.q) {
            return Err(Error::InvalidParams(format!("q = {} must be a prime", self.q)));
        }
        if self.k >= 32 {
            return Err(Error::InvalidParams(format!("k = {} is too large", self.k)));
        }
        if !self.noiseless && !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::InvalidParams(format!("sigma = {} must be >= 0", self.sigma)));
        }
        let size = self.domain_size();
        if size > self.domain_cap as u128 {
            return Err(Error::DomainTooLarge { size, cap: self.domain_cap });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Injective,
    Degenerate,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Injective => f.write_str("injective"),
            Mode::Degenerate => f.write_str("degenerate"),
        }
    }
}

/// A concrete `f`/`g` function over `Z_q`. Matrices are stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtcfInstance {
    params: LweParams,
    mode: Mode,
    seed: Option<u64>,
    a: Vec<Vec<u64>>,
    secrets: Vec<Vec<u64>>,
    offsets: Vec<Vec<u64>>,
    /// One noise vector per input index; empty in noiseless mode.
    e_table: Vec<Vec<u64>>,
    /// One noise vector per secret; empty in noiseless mode.
    e_prime: Vec<Vec<u64>>,
}

/// Discrete Gaussian on `Z`, `ρ(x) ∝ exp(-x² / 2σ²)`, truncated to
/// `|x| ≤ ⌈6σ⌉`.
#[derive(Clone, Debug)]
pub struct DiscreteGaussian {
    radius: i64,
    cdf: Vec<f64>,
}

impl DiscreteGaussian {
    pub fn new(sigma: f64) -> Self {
        let radius = if sigma > 0.0 { (6.0 * sigma).ceil() as i64 } else { 0 };
        let weights: Vec<f64> = (-radius..=radius)
            .map(|x| if sigma > 0.0 { (-(x * x) as f64 / (2.0 * sigma * sigma)).exp() } else { 1.0 })
            .collect();
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let cdf = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        DiscreteGaussian { radius, cdf }
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    /// Draws a centered integer in `[-radius, radius]`.
    pub fn sample_centered<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        if self.radius == 0 {
            return 0;
        }
        let u: f64 = rng.random();
        let pos = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        pos as i64 - self.radius
    }

    pub fn sample_mod<R: Rng + ?Sized>(&self, q: u64, rng: &mut R) -> u64 {
        reduce_signed(self.sample_centered(rng), q)
    }
}

/// One draw from the truncated discrete Gaussian, reduced mod `q`.
pub fn discrete_gaussian_sample<R: Rng + ?Sized>(sigma: f64, q: u64, rng: &mut R) -> u64 {
    DiscreteGaussian::new(sigma).sample_mod(q, rng)
}

/// Lifts `v ∈ Z_q` to the centered representative in `(-q/2, q/2]`.
pub fn centered_lift(v: u64, q: u64) -> i64 {
    let v = (v % q) as i64;
    let q = q as i64;
    if v > q / 2 {
        v - q
    } else {
        v
    }
}

fn reduce_signed(v: i64, q: u64) -> u64 {
    v.rem_euclid(q as i64) as u64
}

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

/// Rank of a row-major matrix over the prime field `Z_p`.
pub fn rank_mod_prime(rows: &[Vec<u64>], p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|v| v % p).collect()).collect();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = pow_mod(m[rank][col], p - 2, p);
        for v in m[rank].iter_mut() {
            *v = mul_mod(*v, inv, p);
        }
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let factor = row[col];
                for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                    *v = (*v + p - mul_mod(factor, pv, p)) % p;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

fn random_vec(rng: &mut LabRng, len: usize, q: u64) -> Vec<u64> {
    (0..len).map(|_| rng.random_range(0..q)).collect()
}

fn mat_vec(a: &[Vec<u64>], x: &[u64], q: u64) -> Vec<u64> {
    a.iter().map(|row| row.iter().zip(x).fold(0u64, |acc, (&r, &v)| (acc + mul_mod(r, v, q)) % q)).collect()
}

fn add_assign_mod(acc: &mut [u64], v: &[u64], q: u64) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a = (*a + b) % q;
    }
}

/// Preimage counts of every output, in canonical (lexicographic) order.
#[derive(Clone, Debug, PartialEq)]
pub struct PreimageCensus {
    pub counts: BTreeMap<Vec<u64>, u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusSummary {
    pub total_inputs: u64,
    pub distinct_outputs: u64,
    /// Preimage count → number of outputs having that count.
    pub histogram: BTreeMap<u64, u64>,
    /// Fraction of distinct outputs with exactly two preimages.
    pub fraction_of_two: f64,
    /// Fraction of inputs whose output has another preimage.
    pub colliding_input_fraction: f64,
}

impl PreimageCensus {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn summary(&self) -> CensusSummary {
        let mut histogram = BTreeMap::new();
        for &c in self.counts.values() {
            *histogram.entry(c).or_insert(0) += 1;
        }
        let total = self.total();
        let distinct = self.counts.len() as u64;
        let twos = histogram.get(&2).copied().unwrap_or(0);
        let colliding: u64 = self.counts.values().filter(|&&c| c > 1).sum();
        CensusSummary {
            total_inputs: total,
            distinct_outputs: distinct,
            histogram,
            fraction_of_two: if distinct == 0 { 0.0 } else { twos as f64 / distinct as f64 },
            colliding_input_fraction: if total == 0 { 0.0 } else { colliding as f64 / total as f64 },
        }
    }
}

impl EtcfInstance {
    /// Samples an instance deterministically from `seed`.
    ///
    /// The draw order is fixed (A, secrets, e', noise table, offsets) and does
    /// not depend on `mode`, so both modes sampled with one seed share `A`,
    /// the secrets and the noise.
    pub fn sample(params: &LweParams, mode: Mode, seed: u64) -> Result<Self> {
        params.validate()?;
        let q = params.q;
        let k = params.k as usize;
        let mut rng = rng_from_seed(seed);

        let a = (0..MAX_RESAMPLES)
            .map(|_| (0..params.m_rows).map(|_| random_vec(&mut rng, params.n, q)).collect::<Vec<_>>())
            .find(|a| rank_mod_prime(a, q) == params.n)
            .ok_or_else(|| Error::Generation(format!("A not full column rank after {MAX_RESAMPLES} draws")))?;

        let secrets: Vec<Vec<u64>> = (0..k).map(|_| random_vec(&mut rng, params.n, q)).collect();

        let (e_prime, e_table) = if params.noiseless {
            (Vec::new(), Vec::new())
        } else {
            let dg = DiscreteGaussian::new(params.sigma);
            let noise_vec = |rng: &mut LabRng| (0..params.m_rows).map(|_| dg.sample_mod(q, rng)).collect::<Vec<_>>();
            let e_prime: Vec<Vec<u64>> = (0..k).map(|_| noise_vec(&mut rng)).collect();
            let domain = params.domain_size() as usize;
            let e_table: Vec<Vec<u64>> = (0..domain).map(|_| noise_vec(&mut rng)).collect();
            (e_prime, e_table)
        };

        let mut candidate = EtcfInstance {
            params: params.clone(),
            mode,
            seed: Some(seed),
            a,
            secrets,
            offsets: Vec::new(),
            e_table,
            e_prime,
        };

        for _ in 0..MAX_RESAMPLES {
            candidate.offsets = (0..k).map(|_| random_vec(&mut rng, params.m_rows, q)).collect();
            if candidate.offsets_acceptable() {
                return Ok(candidate);
            }
        }
        Err(Error::Generation(format!("no offsets making f injective after {MAX_RESAMPLES} draws")))
    }

    /// Builds an instance from explicit components and validates it.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        params: LweParams,
        mode: Mode,
        a: Vec<Vec<u64>>,
        secrets: Vec<Vec<u64>>,
        offsets: Vec<Vec<u64>>,
        e_table: Vec<Vec<u64>>,
        e_prime: Vec<Vec<u64>>,
    ) -> Result<Self> {
        let inst = EtcfInstance { params, mode, seed: None, a, secrets, offsets, e_table, e_prime };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        p.validate()?;
        let k = p.k as usize;
        let check = |what: &str, rows: &[Vec<u64>], count: usize, len: usize| -> Result<()> {
            if rows.len() != count {
                return Err(Error::InvalidParams(format!("{what}: expected {count} rows, got {}", rows.len())));
            }
            for r in rows {
                if r.len() != len {
                    return Err(Error::DimensionMismatch { expected: len, got: r.len() });
                }
                if r.iter().any(|&v| v >= p.q) {
                    return Err(Error::InvalidParams(format!("{what}: entry outside Z_{}", p.q)));
                }
            }
            Ok(())
        };
        check("A", &self.a, p.m_rows, p.n)?;
        check("secrets", &self.secrets, k, p.n)?;
        check("offsets", &self.offsets, k, p.m_rows)?;
        if p.noiseless {
            check("e_table", &self.e_table, 0, p.m_rows)?;
            check("e_prime", &self.e_prime, 0, p.m_rows)?;
        } else {
            check("e_table", &self.e_table, p.domain_size() as usize, p.m_rows)?;
            check("e_prime", &self.e_prime, k, p.m_rows)?;
        }
        if rank_mod_prime(&self.a, p.q) != p.n {
            return Err(Error::Generation("A is not full column rank over Z_q".into()));
        }
        if !self.offsets_acceptable() {
            return Err(Error::Generation("offsets u make f non-injective (u in the column span of A)".into()));
        }
        Ok(())
    }

    /// Injective mode needs the offsets to keep `f` one-to-one: verified by
    /// enumeration when noiseless, by linear independence of `[A | U]` when
    /// noisy (exact injectivity is not attainable under a noise table).
    fn offsets_acceptable(&self) -> bool {
        if self.mode != Mode::Injective || self.params.k == 0 {
            return true;
        }
        if self.params.noiseless {
            let mut seen = HashSet::new();
            (0..self.domain_len()).all(|i| seen.insert(self.eval_index(i)))
        } else {
            let p = &self.params;
            let target = (p.n + p.k as usize).min(p.m_rows);
            let augmented: Vec<Vec<u64>> = (0..p.m_rows)
                .map(|r| {
                    let mut row = self.a[r].clone();
                    row.extend(self.offsets.iter().map(|u| u[r]));
                    row
                })
                .collect();
            rank_mod_prime(&augmented, p.q) == target
        }
    }

    pub fn params(&self) -> &LweParams {
        &self.params
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.a
    }

    pub fn secrets(&self) -> &[Vec<u64>] {
        &self.secrets
    }

    pub fn offsets(&self) -> &[Vec<u64>] {
        &self.offsets
    }

    pub fn noise_table(&self) -> &[Vec<u64>] {
        &self.e_table
    }

    pub fn noise_prime(&self) -> &[Vec<u64>] {
        &self.e_prime
    }

    pub fn domain_len(&self) -> usize {
        self.params.domain_size() as usize
    }

    fn x_len(&self) -> u64 {
        self.params.x_count() as u64
    }

    pub fn input_index(&self, branch: u64, x: &[u64]) -> usize {
        let q = self.params.q;
        let xi = x.iter().rev().fold(0u64, |acc, &v| acc * q + v % q);
        (branch * self.x_len() + xi) as usize
    }

    pub fn split_index(&self, index: usize) -> (u64, Vec<u64>) {
        let q = self.params.q;
        let xl = self.x_len();
        let branch = index as u64 / xl;
        let mut rest = index as u64 % xl;
        let x = (0..self.params.n)
            .map(|_| {
                let v = rest % q;
                rest /= q;
                v
            })
            .collect();
        (branch, x)
    }

    /// Evaluates the instance's function on input `(branch, x)`. For `k = 1`
    /// the branch is the single bit `b`.
    pub fn eval(&self, branch: u64, x: &[u64]) -> Result<Vec<u64>> {
        if x.len() != self.params.n {
            return Err(Error::DimensionMismatch { expected: self.params.n, got: x.len() });
        }
        if branch >= self.params.branch_count() {
            return Err(Error::InvalidParams(format!(
                "branch mask {branch} needs more than k = {} bits",
                self.params.k
            )));
        }
        let x: Vec<u64> = x.iter().map(|v| v % self.params.q).collect();
        Ok(self.eval_parts(branch, &x, self.input_index(branch, &x)))
    }

    pub(crate) fn eval_index(&self, index: usize) -> Vec<u64> {
        let (branch, x) = self.split_index(index);
        self.eval_parts(branch, &x, index)
    }

    fn eval_parts(&self, branch: u64, x: &[u64], index: usize) -> Vec<u64> {
        let q = self.params.q;
        let mut out = mat_vec(&self.a, x, q);
        for j in 0..self.params.k as usize {
            if branch >> j & 1 == 0 {
                continue;
            }
            match self.mode {
                Mode::Injective => add_assign_mod(&mut out, &self.offsets[j], q),
                Mode::Degenerate => {
                    add_assign_mod(&mut out, &mat_vec(&self.a, &self.secrets[j], q), q);
                    if let Some(ep) = self.e_prime.get(j) {
                        add_assign_mod(&mut out, ep, q);
                    }
                }
            }
        }
        if let Some(e) = self.e_table.get(index) {
            add_assign_mod(&mut out, e, q);
        }
        out
    }

    /// All outputs in input-index order.
    pub fn outputs(&self) -> Result<Vec<Vec<u64>>> {
        self.params.validate()?;
        Ok((0..self.domain_len()).map(|i| self.eval_index(i)).collect())
    }

    /// Exhaustive preimage counts over all `2^k · q^n` inputs.
    pub fn preimage_census(&self) -> Result<PreimageCensus> {
        let mut counts = BTreeMap::new();
        for out in self.outputs()? {
            *counts.entry(out).or_insert(0u64) += 1;
        }
        Ok(PreimageCensus { counts })
    }

    /// The trapdoor partner of `(branch, x)` obtained by flipping branch bit 0:
    /// `(0, x) ↦ (1, x − s₁)` and `(1, x) ↦ (0, x + s₁)`. For `k = 1` this is
    /// the unique other preimage. Returns `None` in injective mode.
    pub fn collision_partner(&self, branch: u64, x: &[u64]) -> Result<Option<(u64, Vec<u64>)>> {
        let class = self.collision_class(branch, x)?;
        Ok(class.into_iter().find(|(b, _)| *b == branch ^ 1))
    }

    /// Every preimage of `eval(branch, x)` reachable through the secrets,
    /// including the input itself; `2^k` entries in degenerate mode.
    pub fn collision_class(&self, branch: u64, x: &[u64]) -> Result<Vec<(u64, Vec<u64>)>> {
        if !self.params.noiseless {
            return Err(Error::UnsupportedMode("collision partners are only exact for noiseless instances".into()));
        }
        self.eval(branch, x)?;
        if self.mode == Mode::Injective {
            return Ok(Vec::new());
        }
        if self.params.k == 0 {
            return Ok(vec![(branch, x.to_vec())]);
        }
        let q = self.params.q;
        // z = x + Σ b_j s_j is the shared pre-image of A; every branch b'
        // pairs with x' = z − Σ b'_j s_j.
        let mut z: Vec<u64> = x.iter().map(|v| v % q).collect();
        for (j, s) in self.secrets.iter().enumerate() {
            if branch >> j & 1 == 1 {
                add_assign_mod(&mut z, s, q);
            }
        }
        let class = (0..self.params.branch_count())
            .map(|b| {
                let mut xp = z.clone();
                for (j, s) in self.secrets.iter().enumerate() {
                    if b >> j & 1 == 1 {
                        for (v, sv) in xp.iter_mut().zip(s) {
                            *v = (*v + q - sv) % q;
                        }
                    }
                }
                (b, xp)
            })
            .collect();
        Ok(class)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidParams(e.to_string()))
    }

    /// Parses and validates an instance document.
    pub fn from_json(text: &str) -> Result<Self> {
        let inst: EtcfInstance = serde_json::from_str(text).map_err(|e| Error::InvalidParams(e.to_string()))?;
        inst.validate()?;
        Ok(inst)
    }
}

/// Free-function form of [`EtcfInstance::sample`].
pub fn sample_instance(params: &LweParams, mode: Mode, seed: u64) -> Result<EtcfInstance> {
    EtcfInstance::sample(params, mode, seed)
}
