//! Moral-foundations text-analysis toolkit: corpus and score file IO, model
//! persistence, and run configuration. The algorithms live in `mftk-core`;
//! this crate owns everything that touches the filesystem plus the `mftk`
//! command-line binary.

pub mod config;
pub mod io;
pub mod model;

/// Version stamped into every emitted file header.
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Version of the on-disk file formats (corpus JSONL, score CSV, model
/// JSON, report JSON).
pub const FORMAT_VERSION: u32 = 1;

/// FNV-1a 64-bit hash, used to fingerprint the resolved run configuration
/// in output headers.
pub fn fnv1a_64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
