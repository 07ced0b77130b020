//! Per-purpose seed derivation from a single top-level seed.
//!
//! `derive(seed, purpose)` is the first eight bytes (little-endian) of
//! `SHA-256(seed.to_le_bytes() || purpose)`. Purposes used by this crate:
//! `"kmeans:<column>"` and `"swarm:<indicator label>"`.

use sha2::{Digest, Sha256};

pub fn derive(seed: u64, purpose: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(purpose.as_bytes());
    let out = h.finalize();
    u64::from_le_bytes(out[..8].try_into().expect("8 bytes"))
}

#[cfg(test)]
mod tests {
    #[test]
    fn stable_and_distinct() {
        assert_eq!(super::derive(7, "kmeans:a"), super::derive(7, "kmeans:a"));
        assert_ne!(super::derive(7, "kmeans:a"), super::derive(7, "kmeans:b"));
        assert_ne!(super::derive(7, "kmeans:a"), super::derive(8, "kmeans:a"));
    }
}
