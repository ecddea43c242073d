//! Seed derivation for independent sub-streams (trees, folds, cases).
//!
//! Sub-seeds are produced by walking SplitMix64 from a state mixed out of
//! (master seed, stream id, index). This keeps per-tree and per-fold
//! randomness independent of execution order, so parallel runs reproduce
//! sequential ones exactly.

use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub(crate) fn split_mix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a sub-seed from a master seed, a stream id, and an index.
pub(crate) fn derive(master: u64, stream: u64, index: u64) -> u64 {
    let mut state = master;
    let a = split_mix64(&mut state);
    let mut state = a ^ stream.wrapping_mul(0xA076_1D64_78BD_642F);
    let b = split_mix64(&mut state);
    let mut state = b ^ index.wrapping_mul(0xE703_7ED1_A0B4_28DB);
    split_mix64(&mut state)
}

/// The crate's generator: xoshiro256++, seeded via SplitMix64.
pub(crate) fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}
