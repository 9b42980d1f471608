//! Seed derivation shared by every stochastic experiment.
//!
//! A child seed is the first eight bytes (little endian) of
//! `SHA-256(master_seed_le || label || index_le)`. Children therefore depend
//! only on `(master, label, index)` and never on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

pub type LabRng = ChaCha20Rng;

pub fn derive_seed(master: u64, label: &str, index: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update(label.as_bytes());
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn rng_from_seed(seed: u64) -> LabRng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn derived_rng(master: u64, label: &str, index: u64) -> LabRng {
    rng_from_seed(derive_seed(master, label, index))
}
