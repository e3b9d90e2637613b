//! Counter-based randomness.
//!
//! All randomness in the crate is derived by hashing `(seed, key)` pairs with
//! the splitmix64 finalizer (Steele, Lea & Flood). The finalizer is a
//! bijection on `u64`, so for a fixed seed distinct 64-bit keys never collide;
//! 128-bit keys are absorbed in two rounds.
//!
//! Constants:
//!
//! ```text
//! z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//! z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//! z =  z ^ (z >> 31)
//! ```

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// splitmix64 output finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Keyed hash of a 128-bit key under a 64-bit seed.
#[inline]
pub fn keyed(seed: u64, key: u128) -> u64 {
    let h = mix64(seed.wrapping_add(GOLDEN_GAMMA));
    let h = mix64(h ^ key as u64);
    mix64(h.wrapping_add(GOLDEN_GAMMA) ^ (key >> 64) as u64)
}

/// Maps a hash to the open unit interval.
///
/// Uses the top 52 bits: `u = (k + 0.5) / 2^52`. Both `u` and `1 - u` are
/// exactly representable, and `u` never touches 0 or 1.
#[inline]
pub fn unit_open(x: u64) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 52) as f64;
    ((x >> 12) as f64 + 0.5) * SCALE
}

/// Uniform in (0,1) for `(seed, key)`.
#[inline]
pub fn uniform(seed: u64, key: u128) -> f64 {
    unit_open(keyed(seed, key))
}

/// Keys at or above this value never collide with packed edge identifiers
/// (which use fewer than 110 bits). Auxiliary streams live up here.
pub const AUX_STREAM: u128 = 1 << 127;
