//! Deterministic simulator for WPA2/WPA3 transition-network attacks.
//!
//! The crate models a small radio world (access points, clients, an attacker
//! with a monitor-mode sniffer) on a discrete-event medium, and implements the
//! attack chain against it: capture a downgraded WPA2 handshake, knock clients
//! off the real network, and phish the passphrase through an evil twin whose
//! captive portal checks each guess against the captured handshake.

pub mod attacks;
pub mod crypto;
pub mod events;
pub mod frames;
pub mod medium;
pub mod portal;
pub mod scenario;
pub mod sim;
pub mod stations;

pub use events::{DisconnectCause, PortalEventKind, SimEvent};

/// Errors building a station from its configuration.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StationError {
    #[error("station {0}: a passphrase is required for secured networks")]
    MissingPassphrase(String),
    #[error("station {0}: {1}")]
    Frame(String, frames::FrameError),
    #[error("station {0}: {1}")]
    Crypto(String, crypto::CryptoError),
    #[error("station {0}: {1}")]
    Config(String, String),
}
