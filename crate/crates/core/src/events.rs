//! Everything observable that happens during a run.
//!
//! Events are plain data. The scenario driver stamps each one with a tick and
//! writes it to the JSONL log, and reports are computed from the log alone.

use serde::{Deserialize, Serialize};

use crate::frames::{Akm, MacAddr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisconnectCause {
    Deauth,
    Left,
    BeaconLoss,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PortalEventKind {
    PageServed,
    Submitted { masked_len: usize },
    Verified,
    Rejected,
    FakeSuccessShown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum SimEvent {
    // access point
    Overloaded { ap: String, peer: MacAddr },
    AnticlogDemanded { ap: String, peer: MacAddr },
    SaeCommitProcessed { ap: String, peer: MacAddr },
    SaeCommitInvalid { ap: String, peer: MacAddr, reason: String },
    SaeAccepted { ap: String, peer: MacAddr },
    SaeConfirmFailed { ap: String, peer: MacAddr },
    AssocAccepted { ap: String, peer: MacAddr, akm: Option<Akm>, pmf: bool },
    AssocRefused { ap: String, peer: MacAddr, status: u16 },
    PeerConnected { ap: String, peer: MacAddr, akm: Option<Akm> },
    PeerDropped { ap: String, peer: MacAddr, reason: u16 },
    MicFailure { station: String, peer: MacAddr, msg_no: u8 },
    DeauthIgnored { station: String, peer: MacAddr },
    Ignored { station: String, peer: MacAddr, detail: String },

    // client
    ScanStarted { client: String },
    NoNetwork { client: String },
    AttemptStarted { client: String, attempt: u32, bssid: MacAddr, security: String, akm: Option<Akm> },
    AttemptFailed { client: String, attempt: u32, bssid: MacAddr, reason: String },
    SaeRejected { client: String, attempt: u32, bssid: MacAddr, status: u16 },
    ClientConnected { client: String, attempt: u32, bssid: MacAddr, akm: Option<Akm>, pmf: bool },
    ClientDisconnected { client: String, bssid: MacAddr, cause: DisconnectCause },

    // attacker
    AttackStarted { strategy: String },
    HandshakeCaptured { aa: MacAddr, sa: MacAddr, ssid: String, t1: u64, t2: u64 },
    RogueStarted { bssid: MacAddr, ssid: String, security: String },
    AttackStopped { reason: String, frames_injected: u64 },
    Portal { client: MacAddr, kind: PortalEventKind },
    Crack { candidates_tried: usize, found: Option<String>, elapsed_ms: u64 },
}

impl SimEvent {
    pub fn name(&self) -> &'static str {
        match self {
            SimEvent::Overloaded { .. } => "overloaded",
            SimEvent::AnticlogDemanded { .. } => "anticlog_demanded",
            SimEvent::SaeCommitProcessed { .. } => "sae_commit_processed",
            SimEvent::SaeCommitInvalid { .. } => "sae_commit_invalid",
            SimEvent::SaeAccepted { .. } => "sae_accepted",
            SimEvent::SaeConfirmFailed { .. } => "sae_confirm_failed",
            SimEvent::AssocAccepted { .. } => "assoc_accepted",
            SimEvent::AssocRefused { .. } => "assoc_refused",
            SimEvent::PeerConnected { .. } => "peer_connected",
            SimEvent::PeerDropped { .. } => "peer_dropped",
            SimEvent::MicFailure { .. } => "mic_failure",
            SimEvent::DeauthIgnored { .. } => "deauth_ignored",
            SimEvent::Ignored { .. } => "ignored",
            SimEvent::ScanStarted { .. } => "scan_started",
            SimEvent::NoNetwork { .. } => "no_network",
            SimEvent::AttemptStarted { .. } => "attempt_started",
            SimEvent::AttemptFailed { .. } => "attempt_failed",
            SimEvent::SaeRejected { .. } => "sae_rejected",
            SimEvent::ClientConnected { .. } => "client_connected",
            SimEvent::ClientDisconnected { .. } => "client_disconnected",
            SimEvent::AttackStarted { .. } => "attack_started",
            SimEvent::HandshakeCaptured { .. } => "handshake_captured",
            SimEvent::RogueStarted { .. } => "rogue_started",
            SimEvent::AttackStopped { .. } => "attack_stopped",
            SimEvent::Portal { .. } => "portal",
            SimEvent::Crack { .. } => "crack",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let e = SimEvent::Portal { client: MacAddr::new([2, 0, 0, 0, 0, 1]), kind: PortalEventKind::Submitted { masked_len: 8 } };
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"{"event":"portal","client":"02:00:00:00:00:01","kind":{"submitted":{"masked_len":8}}}"#);
        assert_eq!(serde_json::from_str::<SimEvent>(&s).unwrap(), e);
        assert_eq!(e.name(), "portal");
    }
}
