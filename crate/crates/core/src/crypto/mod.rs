//! Key hierarchy and handshake primitives.
//!
//! Everything here is a pure function of its arguments: no clocks, no global
//! RNG. Time enters only through explicit `now` parameters and randomness only
//! through caller-supplied seeded generators.

mod anticlog;
mod psk;
mod sae;

pub use anticlog::{make_anticlog_token, verify_anticlog_token, AnticlogToken};
pub use psk::{compute_mic, derive_pmk_psk, derive_ptk, MicVersion, Nonce, Passphrase, Pmk, Ptk};
pub use sae::{
    sae_derive_pwe, sae_make_commit, sae_make_confirm, sae_process_commit, sae_verify_confirm,
    SaeCommit, SaeConfirm, SaeGroupElement, SaeKeys, SaeScalar, SaeSecret, PWE_ITERATIONS,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CryptoError {
    #[error("passphrase must be 8..=63 bytes, got {0}")]
    PassphraseLength(usize),
    #[error("ssid must be 1..=32 bytes, got {0}")]
    SsidLength(usize),
    #[error("unsupported key descriptor version {0}")]
    UnsupportedMicVersion(u8),
    #[error("no password element found within {0} iterations")]
    PweNotFound(u32),
    #[error("both SAE peers share the address {0}")]
    SameAddress(crate::frames::MacAddr),
    #[error("peer commit scalar out of range")]
    InvalidPeerScalar,
    #[error("peer commit element is not a valid group element")]
    InvalidPeerElement,
    #[error("peer commit reflects our own commit")]
    ReflectionDetected,
}
