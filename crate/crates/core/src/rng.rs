//! Deterministic random-number streams.
//!
//! Every source of randomness in the workbench is a ChaCha stream derived
//! by hashing a named master seed together with a component label and an
//! index. Reruns with the same seed are bit-identical, and parallel workers
//! (ensemble members, Markov chains) get independent streams addressed by
//! index instead of sharing mutable generator state.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

/// Derives an independent generator from `(seed, component, index)`.
pub fn stream(seed: u64, component: &str, index: u64) -> ChaCha12Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update([0x1f]);
    hasher.update(component.as_bytes());
    hasher.update([0x1f]);
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha12Rng::from_seed(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_address_same_stream() {
        let a: Vec<u64> = stream(7, "x", 3).sample_iter(rand::distributions::Standard).take(8).collect();
        let b: Vec<u64> = stream(7, "x", 3).sample_iter(rand::distributions::Standard).take(8).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_addresses_diverge() {
        let a: u64 = stream(7, "x", 3).gen();
        let b: u64 = stream(7, "x", 4).gen();
        let c: u64 = stream(7, "y", 3).gen();
        let d: u64 = stream(8, "x", 3).gen();
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }
}
