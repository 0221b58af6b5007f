//! Stable seed derivation. Every random stream in the toolkit is seeded
//! from a value produced here, so any cell or fold can be replayed alone.

/// One round of the SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a of a byte string.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Child seed for a numbered sub-stream.
pub fn derive(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream))
}

/// Child seed for a named sub-stream.
pub fn derive_named(seed: u64, name: &str) -> u64 {
    derive(seed, fnv1a(name.as_bytes()))
}

/// Seed of one benchmark cell: `splitmix64(master ^ fnv1a(dataset))`
/// mixed with the run index. Identical for every classifier, ranker and
/// selector of that (dataset, run), so they all see the same probe.
pub fn cell_seed(master: u64, dataset: &str, run: usize) -> u64 {
    derive(splitmix64(master ^ fnv1a(dataset.as_bytes())), run as u64)
}
