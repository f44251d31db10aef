//! Labeled random substreams derived from one master seed.
//!
//! Every consumer of randomness asks for a stream by label and integer path
//! (`("shots", [circuit, batch, block])`, ...), so results do not depend on
//! the order in which work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, label: &str, path: &[u64]) -> u64 {
    let mut h = splitmix64(master ^ 0x4143_4553_5345_4544);
    for chunk in label.as_bytes().chunks(8) {
        let mut buf = [0u8; 8];
        buf[..chunk.len()].copy_from_slice(chunk);
        h = splitmix64(h ^ u64::from_le_bytes(buf));
    }
    h = splitmix64(h ^ label.len() as u64);
    for &p in path {
        h = splitmix64(h ^ p);
    }
    h
}

pub fn substream(master: u64, label: &str, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, label, path))
}
