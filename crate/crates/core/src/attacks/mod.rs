//! The attacker toolkit: handshake capture, three ways to knock clients off
//! the real network, the evil twin, and an offline cracker for comparison.

mod actors;
mod crack;
mod handshake;

pub(crate) use actors::{CommitFlooder, DeauthActor, Injection, RaceActor};
#[cfg(feature = "parallel")]
pub use crack::crack_dictionary_parallel;
pub use crack::{crack_dictionary, crack_dictionary_sequential, parse_wordlist, CrackOutcome};
pub use handshake::{
    extract_handshake, read_handshake, verify_candidate, write_handshake, HandshakeCapture, HandshakeFileError,
    VerificationResult, HANDSHAKE_MAGIC,
};

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::events::{DisconnectCause, SimEvent};
use crate::frames::{Akm, MacAddr, Ssid, StatusCode};
use crate::medium::{MediumError, Tick};
use crate::portal::{Language, PortalError};
use crate::sim::{SimError, World};
use crate::StationError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DeauthStrategy {
    AireplayDeauth,
    CommitFlood { rate_per_sec: u32 },
    BadTokenRace,
}

impl DeauthStrategy {
    pub fn label(&self) -> &'static str {
        match self {
            DeauthStrategy::AireplayDeauth => "aireplay_deauth",
            DeauthStrategy::CommitFlood { .. } => "commit_flood",
            DeauthStrategy::BadTokenRace => "bad_token_race",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum RogueSecurity {
    #[default]
    Open,
    Wpa2Psk { decoy_passphrase: String },
}

impl RogueSecurity {
    pub fn label(&self) -> &'static str {
        match self {
            RogueSecurity::Open => "OPEN",
            RogueSecurity::Wpa2Psk { .. } => "WPA2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackPlan {
    pub target_bssid: MacAddr,
    pub target_ssid: Ssid,
    pub deauth_strategy: DeauthStrategy,
    pub spoof_mac: bool,
    #[serde(default)]
    pub rogue_security: RogueSecurity,
    pub portal_language: Language,
    /// Defaults to `evil_twin_captive_portal_password-<ssid>.txt` when a run writes files.
    pub password_log_path: Option<PathBuf>,
    pub attacker_mac: MacAddr,
    /// Spawn the rogue AP once a handshake is in hand. Off for denial-of-service-only runs.
    pub evil_twin: bool,
    pub start_at: Tick,
}

impl AttackPlan {
    pub fn new(target_bssid: MacAddr, target_ssid: Ssid, deauth_strategy: DeauthStrategy) -> Self {
        Self {
            target_bssid,
            target_ssid,
            deauth_strategy,
            spoof_mac: true,
            rogue_security: RogueSecurity::Open,
            portal_language: Language::English,
            password_log_path: None,
            attacker_mac: MacAddr::new([0x02, 0xa7, 0x7a, 0xc4, 0x00, 0x01]),
            evil_twin: true,
            start_at: 0,
        }
    }

    pub fn validate(&self) -> Result<(), AttackError> {
        if let DeauthStrategy::CommitFlood { rate_per_sec: 0 } = self.deauth_strategy {
            return Err(AttackError::InvalidRate);
        }
        if let RogueSecurity::Wpa2Psk { decoy_passphrase } = &self.rogue_security {
            crate::crypto::Passphrase::new(decoy_passphrase.clone())
                .map_err(|e| AttackError::Decoy(e.to_string()))?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AttackError {
    #[error("commit flood rate must be at least 1 per second")]
    InvalidRate,
    #[error("decoy passphrase: {0}")]
    Decoy(String),
    #[error("handshake belongs to {found:?}, plan targets {expected:?}")]
    SsidMismatch { expected: String, found: String },
    #[error("no access point with BSSID {0} in the world")]
    UnknownTarget(MacAddr),
    #[error("the strategy {0} does not match this driver")]
    WrongStrategy(&'static str),
    #[error("an attack is already installed")]
    AlreadyInstalled,
    #[error(transparent)]
    Station(#[from] StationError),
    #[error(transparent)]
    Portal(#[from] PortalError),
    #[error(transparent)]
    Medium(#[from] MediumError),
}

impl From<SimError> for AttackError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Station(e) => AttackError::Station(e),
            SimError::Medium(e) => AttackError::Medium(e),
            SimError::Attack(e) => *e,
        }
    }
}

/// Where the rogue AP lives in the world.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RogueApHandle {
    pub node: crate::sim::NodeId,
    pub bssid: MacAddr,
    pub channel: u8,
}

/// What an attack achieved over a window of simulated time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub strategy: String,
    pub window: (Tick, Tick),
    pub frames_injected: u64,
    pub disconnections: usize,
    pub deauth_ignored: usize,
    pub overloaded_events: usize,
    pub anticlog_demands: usize,
    pub legit_sae_attempts: usize,
    pub legit_sae_successes: usize,
    /// Successes over attempts with an outcome; `None` without any.
    pub legit_sae_success_rate: Option<f64>,
    pub unspecified_failure_rejects: usize,
}

impl AttackReport {
    /// Counts events in `[window.0, window.1)`. A SAE attempt belongs to the
    /// window it started in; its outcome may land later.
    pub fn from_events(strategy: &str, window: (Tick, Tick), frames_injected: u64, events: &[(Tick, SimEvent)]) -> Self {
        let inside = |t: Tick| t >= window.0 && t < window.1;
        let mut report = AttackReport {
            strategy: strategy.to_string(),
            window,
            frames_injected,
            disconnections: 0,
            deauth_ignored: 0,
            overloaded_events: 0,
            anticlog_demands: 0,
            legit_sae_attempts: 0,
            legit_sae_successes: 0,
            legit_sae_success_rate: None,
            unspecified_failure_rejects: 0,
        };
        let mut attempts: BTreeMap<(&str, u32), Option<bool>> = BTreeMap::new();
        for (tick, event) in events {
            match event {
                SimEvent::AttemptStarted { client, attempt, akm: Some(Akm::Sae), .. } if inside(*tick) => {
                    attempts.insert((client.as_str(), *attempt), None);
                }
                SimEvent::ClientConnected { client, attempt, .. } => {
                    if let Some(slot @ None) = attempts.get_mut(&(client.as_str(), *attempt)) {
                        *slot = Some(true);
                    }
                }
                SimEvent::AttemptFailed { client, attempt, .. } => {
                    if let Some(slot @ None) = attempts.get_mut(&(client.as_str(), *attempt)) {
                        *slot = Some(false);
                    }
                }
                _ if !inside(*tick) => {}
                SimEvent::ClientDisconnected { cause: DisconnectCause::Deauth, .. } => report.disconnections += 1,
                SimEvent::DeauthIgnored { .. } => report.deauth_ignored += 1,
                SimEvent::Overloaded { .. } => report.overloaded_events += 1,
                SimEvent::AnticlogDemanded { .. } => report.anticlog_demands += 1,
                SimEvent::SaeRejected { status, .. } if *status == StatusCode::UNSPECIFIED_FAILURE.0 => {
                    report.unspecified_failure_rejects += 1
                }
                _ => {}
            }
        }
        let decided: Vec<bool> = attempts.values().filter_map(|o| *o).collect();
        report.legit_sae_attempts = decided.len();
        report.legit_sae_successes = decided.iter().filter(|&&ok| ok).count();
        if !decided.is_empty() {
            report.legit_sae_success_rate = Some(report.legit_sae_successes as f64 / decided.len() as f64);
        }
        report
    }
}

fn run_strategy(
    world: &mut World,
    plan: &AttackPlan,
    duration: Tick,
    wanted: fn(&DeauthStrategy) -> bool,
) -> Result<AttackReport, AttackError> {
    if !wanted(&plan.deauth_strategy) {
        return Err(AttackError::WrongStrategy(plan.deauth_strategy.label()));
    }
    let start = plan.start_at.max(world.now());
    let plan = AttackPlan { start_at: start, ..plan.clone() };
    world.install_attack(plan)?;
    world.run_until(start + duration)?;
    world.stop_attack("window_closed");
    world.attack_report().ok_or(AttackError::AlreadyInstalled)
}

/// Forged deauthentications from the target BSSID, ten per second.
pub fn run_deauth_attack(world: &mut World, plan: &AttackPlan, duration: Tick) -> Result<AttackReport, AttackError> {
    run_strategy(world, plan, duration, |s| matches!(s, DeauthStrategy::AireplayDeauth))
}

/// SAE commits from throwaway addresses at `rate_per_sec`.
pub fn run_commit_flood(world: &mut World, plan: &AttackPlan, duration: Tick) -> Result<AttackReport, AttackError> {
    plan.validate()?;
    run_strategy(world, plan, duration, |s| matches!(s, DeauthStrategy::CommitFlood { .. }))
}

/// Races a bogus confirm ahead of every legitimate one.
pub fn run_bad_token_race(world: &mut World, plan: &AttackPlan, duration: Tick) -> Result<AttackReport, AttackError> {
    run_strategy(world, plan, duration, |s| matches!(s, DeauthStrategy::BadTokenRace))
}

/// Starts the rogue AP and its captive portal. Fails when `hs` was taken
/// from a different network than the plan targets.
pub fn spawn_evil_twin(world: &mut World, plan: &AttackPlan, hs: &HandshakeCapture) -> Result<RogueApHandle, AttackError> {
    world.spawn_evil_twin(plan, hs)
}
