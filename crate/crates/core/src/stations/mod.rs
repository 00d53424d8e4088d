//! Access point and client protocol state machines.
//!
//! Both sides are transition functions: the driver hands a station a frame or
//! a timer tick together with the current time, and gets back frames to send
//! and events to log. Stations never touch the medium themselves.

mod ap;
mod client;

pub use ap::{ApConfig, ApMode, ApState};
pub use client::{client_select_network, Capability, ClientConfig, ClientState, KnownNetwork, ScanEntry};

use crate::crypto::{compute_mic, MicVersion, Ptk};
use crate::frames::EapolKey;
use crate::events::SimEvent;
use crate::frames::{Akm, AkmSet, Frame, MacAddr, PmfPolicy};

/// Descriptor version used for every EAPOL-Key frame this simulator emits.
pub const EAPOL_VERSION: MicVersion = MicVersion::HmacSha1;

/// Frames and events produced by one transition.
#[derive(Debug, Default)]
pub struct StationOutput {
    pub frames: Vec<Frame>,
    pub events: Vec<SimEvent>,
}

impl StationOutput {
    fn send(&mut self, frame: Frame) {
        self.frames.push(frame);
    }

    fn emit(&mut self, event: SimEvent) {
        self.events.push(event);
    }
}

/// Whether management frame protection applies to an association, or `None`
/// when the AP must refuse it.
///
/// Transition networks let a PSK peer without PMF support in even under a
/// `Required` policy, which is how mixed-mode deployments keep WPA2 devices
/// working.
pub fn negotiate_pmf(policy: PmfPolicy, suites: AkmSet, akm: Option<Akm>, peer_capable: bool) -> Option<bool> {
    let Some(akm) = akm else {
        return Some(false);
    };
    match policy {
        PmfPolicy::Disabled => Some(false),
        PmfPolicy::Optional => Some(peer_capable),
        PmfPolicy::Required if peer_capable => Some(true),
        PmfPolicy::Required if akm == Akm::Psk && suites == AkmSet::TRANSITION => Some(false),
        PmfPolicy::Required => None,
    }
}

/// Integrity tag carried by protected deauthentication frames.
pub fn deauth_mic(ptk: &Ptk, src: MacAddr, dst: MacAddr, reason: u16) -> [u8; 16] {
    let mut input = Vec::with_capacity(6 + 6 + 6 + 2);
    input.extend_from_slice(b"deauth");
    input.extend_from_slice(src.as_bytes());
    input.extend_from_slice(dst.as_bytes());
    input.extend_from_slice(&reason.to_be_bytes());
    compute_mic(&ptk.kck, &input, EAPOL_VERSION).expect("HMAC-SHA1 is supported")
}

/// Checks an EAPOL-Key MIC under the descriptor version the frame names.
pub(crate) fn mic_ok(ptk: &Ptk, key: &EapolKey) -> bool {
    let Ok(version) = MicVersion::from_code(key.version) else {
        return false;
    };
    compute_mic(&ptk.kck, &key.mic_input(), version).is_ok_and(|mic| mic == key.mic)
}

/// RSN key data advertising the AKM in use: an RSNE tag and the suite type.
pub(crate) fn rsn_key_data(akm: Akm) -> Vec<u8> {
    vec![0x30, akm_suite_type(akm)]
}

pub(crate) fn akm_suite_type(akm: Akm) -> u8 {
    match akm {
        Akm::Psk => 2,
        Akm::Sae => 8,
    }
}

/// The AKM announced in a message 2 key data field, if recognisable.
pub fn key_data_akm(key_data: &[u8]) -> Option<Akm> {
    match key_data {
        [0x30, 2, ..] => Some(Akm::Psk),
        [0x30, 8, ..] => Some(Akm::Sae),
        _ => None,
    }
}
