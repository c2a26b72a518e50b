//! Counter-based seed derivation, so every trial and every adversary stream
//! can be replayed on its own.

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for stream `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix(mix(master).wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

/// Stream index reserved for channel taps within one run.
pub const TAP_STREAM: u64 = u64::MAX;
