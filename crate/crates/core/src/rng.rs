//! Seeded random streams.
//!
//! Every random quantity in the simulator comes from a [`SimRng`], which is
//! xoshiro256++ seeded through SplitMix64 (`seed_from_u64`). Gaussian deviates
//! use the basic Box–Muller transform, taking only the cosine branch, with
//! uniforms built from the top 53 bits of a 64-bit output. Each deviate
//! consumes exactly two `u64` draws, so another implementation can reproduce
//! a deviate stream from the same generator without sharing float code.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use sha2::{Digest, Sha256};

/// Deterministic 64-bit seeded generator.
pub type SimRng = Xoshiro256PlusPlus;

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Uniform in `[0, 1)` with 53 bits of resolution.
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal deviate (Box–Muller, cosine branch).
pub fn standard_normal<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    // 1 - u lies in (0, 1], keeping ln finite.
    let u1 = 1.0 - uniform(rng);
    let u2 = uniform(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Gaussian deviate with mean 0 and standard deviation `sd`.
///
/// A zero `sd` still consumes two draws so the stream position does not
/// depend on parameter values.
pub fn gaussian<R: RngCore + ?Sized>(rng: &mut R, sd: f64) -> f64 {
    let z = standard_normal(rng);
    if sd == 0.0 {
        0.0
    } else {
        sd * z
    }
}

/// Bernoulli trial with success probability `p`.
pub fn bernoulli<R: RngCore + ?Sized>(rng: &mut R, p: f64) -> bool {
    uniform(rng) < p
}

/// Derives an independent seed from a base seed and a labelled index path.
///
/// The derivation is SHA-256 over `seed_le || label || 0x00 || idx_le...`,
/// truncated to the first 8 bytes (little endian). Results do not depend on
/// the order in which streams are requested.
pub fn derive_seed(seed: u64, label: &str, indices: &[u64]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(label.as_bytes());
    hasher.update([0u8]);
    for idx in indices {
        hasher.update(idx.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut out = [0u8; 8];
    out.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(out)
}

pub fn derived(seed: u64, label: &str, indices: &[u64]) -> SimRng {
    seeded(derive_seed(seed, label, indices))
}
