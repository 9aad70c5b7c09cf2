//! Deterministic random streams for replicate farms.
//!
//! Every consumer receives its own ChaCha12 stream keyed by the master seed
//! and a path of indices (experiment, T index, replicate, ...). Streams are
//! independent of scheduling order, so a parallel farm reproduces the serial
//! results bit for bit.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// SplitMix64 step; the standard finalizer constants.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A ChaCha12 generator keyed by (master, path...). The key schedule hashes
/// the master seed and each path component through SplitMix64, then expands
/// the mixed state into the 32-byte ChaCha key.
pub fn stream(master: u64, path: &[u64]) -> ChaCha12Rng {
    let mut state = master ^ 0x243f_6a88_85a3_08d3;
    let mut mixed = splitmix64(&mut state);
    for &p in path {
        state ^= p.wrapping_mul(0x9e37_79b9_7f4a_7c15).rotate_left(17);
        mixed ^= splitmix64(&mut state);
    }
    state ^= mixed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha12Rng::from_seed(key)
}

/// Marsaglia polar standard normal pair.
pub fn normal_pair<R: Rng>(rng: &mut R) -> (f64, f64) {
    loop {
        let u = 2.0 * rng.random::<f64>() - 1.0;
        let v = 2.0 * rng.random::<f64>() - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            let f = (-2.0 * s.ln() / s).sqrt();
            return (u * f, v * f);
        }
    }
}

/// Fill a slice with independent standard normals.
pub fn fill_normal<R: Rng>(rng: &mut R, out: &mut [f64]) {
    let mut i = 0;
    while i + 1 < out.len() {
        let (a, b) = normal_pair(rng);
        out[i] = a;
        out[i + 1] = b;
        i += 2;
    }
    if i < out.len() {
        out[i] = normal_pair(rng).0;
    }
}
