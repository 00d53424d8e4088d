use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{deauth_mic, mic_ok, negotiate_pmf, rsn_key_data, StationOutput, EAPOL_VERSION};
use crate::crypto::{
    compute_mic, derive_pmk_psk, derive_ptk, sae_derive_pwe, sae_make_commit, sae_make_confirm, sae_process_commit,
    sae_verify_confirm, CryptoError, Nonce, Passphrase, Pmk, Ptk, SaeCommit, SaeConfirm, SaeGroupElement,
    SaeKeys, SaeSecret,
};
use crate::events::{DisconnectCause, SimEvent};
use crate::frames::{reason, Akm, AkmSet, EapolKey, Frame, FrameBody, MacAddr, NetworkInfo, Ssid, StatusCode};
use crate::medium::{Tick, TICKS_PER_SECOND};
use crate::StationError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Capability {
    Wpa2Only,
    Wpa3Capable,
    /// Joins transition networks but never completes the handshake.
    TransitionIncompatible,
}

impl Capability {
    fn can_join(self, suites: AkmSet) -> bool {
        suites.is_open() || suites.psk || (suites.sae && self == Capability::Wpa3Capable)
    }

    fn preferred_akm(self, suites: AkmSet) -> Option<Akm> {
        if suites.sae && self == Capability::Wpa3Capable {
            Some(Akm::Sae)
        } else if suites.psk {
            Some(Akm::Psk)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone)]
pub struct KnownNetwork {
    pub ssid: Ssid,
    pub passphrase: Passphrase,
}

#[derive(Debug, Clone)]
pub struct ClientConfig {
    pub name: String,
    pub mac: MacAddr,
    pub channel: u8,
    pub capability: Capability,
    pub known_network: KnownNetwork,
    /// Rescan after losing an established connection.
    pub auto_reconnect: bool,
    pub reconnect_backoff: Tick,
    pub pmf_capable: bool,
    /// Consecutive failures on one network before trying another.
    pub max_failures: u32,
    pub start_at: Tick,
    pub scan_window: Tick,
    pub attempt_timeout: Tick,
    /// Connected this long, the failure count for the network is cleared.
    pub stable_after: Tick,
    pub beacon_loss_timeout: Tick,
    /// Leave voluntarily after this long connected.
    pub session_duration: Option<Tick>,
}

impl ClientConfig {
    pub const DEFAULT_MAX_FAILURES: u32 = 3;

    pub fn new(name: impl Into<String>, mac: MacAddr, channel: u8, capability: Capability, known: KnownNetwork) -> Self {
        Self {
            name: name.into(),
            mac,
            channel,
            capability,
            known_network: known,
            auto_reconnect: true,
            reconnect_backoff: 500,
            pmf_capable: true,
            max_failures: Self::DEFAULT_MAX_FAILURES,
            start_at: 0,
            scan_window: 150,
            attempt_timeout: TICKS_PER_SECOND,
            stable_after: 10 * TICKS_PER_SECOND,
            beacon_loss_timeout: TICKS_PER_SECOND,
            session_duration: None,
        }
    }
}

/// One beacon or probe response heard during a scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanEntry {
    pub bssid: MacAddr,
    pub info: NetworkInfo,
}

/// Networks are told apart by BSSID and advertised security, so a rogue that
/// spoofs the legitimate BSSID is still a separate candidate.
type NetworkKey = (MacAddr, bool, bool);

impl ScanEntry {
    fn key(&self) -> NetworkKey {
        (self.bssid, self.info.akm_suites.psk, self.info.akm_suites.sae)
    }
}

/// Picks the network to try next.
///
/// Candidates must carry the known SSID and a security the client can use.
/// Candidates that have used up `max_failures` are skipped while any other
/// remains; secured networks win over open ones, then the lowest BSSID.
pub fn client_select_network(
    config: &ClientConfig,
    failures: &BTreeMap<(MacAddr, bool, bool), u32>,
    scan: &[ScanEntry],
) -> Option<ScanEntry> {
    let joinable: Vec<&ScanEntry> = scan
        .iter()
        .filter(|e| e.info.ssid == config.known_network.ssid && config.capability.can_join(e.info.akm_suites))
        .collect();
    let fresh: Vec<&ScanEntry> = joinable
        .iter()
        .copied()
        .filter(|e| failures.get(&e.key()).copied().unwrap_or(0) < config.max_failures)
        .collect();
    let pool = if fresh.is_empty() { joinable } else { fresh };
    pool.into_iter()
        .min_by_key(|e| (e.info.akm_suites.is_open(), *e.bssid.as_bytes(), e.info.akm_suites.psk, e.info.akm_suites.sae))
        .cloned()
}

#[derive(Debug, Clone, Copy)]
struct Target {
    bssid: MacAddr,
    suites: AkmSet,
    akm: Option<Akm>,
    pmf: bool,
    attempt: u32,
}

impl Target {
    fn key(&self) -> NetworkKey {
        (self.bssid, self.suites.psk, self.suites.sae)
    }
}

struct SaeAttempt {
    pwe: SaeGroupElement,
    secret: SaeSecret,
    own: SaeCommit,
    keys: Option<(SaeKeys, SaeCommit)>,
    early_confirm: Option<SaeConfirm>,
    token_echoes: u32,
}

enum Phase {
    Idle,
    Backoff { until: Tick },
    Scanning { until: Tick },
    Sae { target: Target, sae: Box<SaeAttempt>, deadline: Tick },
    Associating { target: Target, pmk: Option<Pmk>, deadline: Tick },
    FourWay { target: Target, pmk: Pmk, keys: Option<(Nonce, Ptk)>, deadline: Tick },
    Connected { target: Target, ptk: Option<Ptk>, since: Tick, last_beacon: Tick, stable: bool },
}

impl Phase {
    fn name(&self) -> &'static str {
        match self {
            Phase::Idle => "idle",
            Phase::Backoff { .. } => "backoff",
            Phase::Scanning { .. } => "scanning",
            Phase::Sae { .. } => "sae",
            Phase::Associating { .. } => "associating",
            Phase::FourWay { .. } => "four_way",
            Phase::Connected { .. } => "connected",
        }
    }

    fn target(&self) -> Option<&Target> {
        match self {
            Phase::Sae { target, .. }
            | Phase::Associating { target, .. }
            | Phase::FourWay { target, .. }
            | Phase::Connected { target, .. } => Some(target),
            _ => None,
        }
    }
}

const MAX_TOKEN_ECHOES: u32 = 3;

pub struct ClientState {
    config: ClientConfig,
    rng: ChaCha8Rng,
    phase: Phase,
    scan: BTreeMap<NetworkKey, ScanEntry>,
    failures: BTreeMap<NetworkKey, u32>,
    attempts: u32,
    pwe_cache: BTreeMap<MacAddr, SaeGroupElement>,
    psk_pmk: Option<Pmk>,
}

impl std::fmt::Debug for ClientState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClientState")
            .field("name", &self.config.name)
            .field("phase", &self.phase.name())
            .field("attempts", &self.attempts)
            .finish()
    }
}

impl ClientState {
    pub fn new(config: ClientConfig, seed: u64) -> Result<Self, StationError> {
        if !(1..=14).contains(&config.channel) {
            return Err(StationError::Config(config.name.clone(), format!("channel {} outside 1..=14", config.channel)));
        }
        let start = config.start_at;
        Ok(Self {
            config,
            rng: ChaCha8Rng::seed_from_u64(seed),
            phase: Phase::Backoff { until: start },
            scan: BTreeMap::new(),
            failures: BTreeMap::new(),
            attempts: 0,
            pwe_cache: BTreeMap::new(),
            psk_pmk: None,
        })
    }

    pub fn config(&self) -> &ClientConfig {
        &self.config
    }

    pub fn phase_name(&self) -> &'static str {
        self.phase.name()
    }

    pub fn is_connected(&self) -> bool {
        matches!(self.phase, Phase::Connected { .. })
    }

    /// BSSID and advertised security of the current connection.
    pub fn connected_to(&self) -> Option<(MacAddr, AkmSet)> {
        match &self.phase {
            Phase::Connected { target, .. } => Some((target.bssid, target.suites)),
            _ => None,
        }
    }

    pub fn attempts(&self) -> u32 {
        self.attempts
    }

    pub fn failures_for(&self, bssid: MacAddr, suites: AkmSet) -> u32 {
        self.failures.get(&(bssid, suites.psk, suites.sae)).copied().unwrap_or(0)
    }

    pub fn next_wakeup(&self) -> Option<Tick> {
        match &self.phase {
            Phase::Idle => None,
            Phase::Backoff { until } | Phase::Scanning { until } => Some(*until),
            Phase::Sae { deadline, .. } | Phase::Associating { deadline, .. } | Phase::FourWay { deadline, .. } => {
                Some(*deadline)
            }
            Phase::Connected { since, last_beacon, stable, .. } => {
                let mut next = *last_beacon + self.config.beacon_loss_timeout;
                if let Some(d) = self.config.session_duration {
                    next = next.min(since + d);
                }
                if !stable {
                    next = next.min(since + self.config.stable_after);
                }
                Some(next)
            }
        }
    }

    pub fn tick(&mut self, now: Tick) -> StationOutput {
        let mut out = StationOutput::default();
        match &mut self.phase {
            Phase::Backoff { until } if now >= *until => self.start_scan(now, &mut out),
            Phase::Scanning { until } if now >= *until => self.finish_scan(now, &mut out),
            Phase::Sae { deadline, .. } | Phase::Associating { deadline, .. } | Phase::FourWay { deadline, .. }
                if now >= *deadline =>
            {
                self.fail_attempt(now, "timeout".into(), &mut out)
            }
            Phase::Connected { target, ptk, since, last_beacon, stable } => {
                let target = *target;
                if self.config.session_duration.is_some_and(|d| now >= *since + d) {
                    let ptk = *ptk;
                    self.leave(target, ptk, now, &mut out);
                } else if now >= *last_beacon + self.config.beacon_loss_timeout {
                    self.lose_connection(target, DisconnectCause::BeaconLoss, now, &mut out);
                } else if !*stable && now >= *since + self.config.stable_after {
                    *stable = true;
                    self.failures.remove(&target.key());
                }
            }
            _ => {}
        }
        out
    }

    pub fn handle_frame(&mut self, frame: &Frame, now: Tick) -> StationOutput {
        let mut out = StationOutput::default();
        if frame.channel() != self.config.channel || !(frame.dst() == self.config.mac || frame.dst().is_broadcast()) {
            return out;
        }
        match frame.body() {
            FrameBody::Beacon(info) | FrameBody::ProbeResp(info) => self.on_network(frame.src(), info, now),
            FrameBody::Deauth { reason, mmic } => self.on_deauth(frame, *reason, *mmic, now, &mut out),
            _ if self.phase.target().map(|t| t.bssid) != Some(frame.src()) => {}
            FrameBody::SaeCommit(commit) => self.on_sae_commit(commit, now, &mut out),
            FrameBody::SaeConfirm(confirm) => self.on_sae_confirm(confirm, now, &mut out),
            FrameBody::SaeReject { status, token } => self.on_sae_reject(*status, token.as_ref(), now, &mut out),
            FrameBody::AssocResp { status } => self.on_assoc_resp(*status, now, &mut out),
            FrameBody::EapolKey(key) => self.on_eapol(key, now, &mut out),
            _ => {}
        }
        out
    }

    fn on_network(&mut self, bssid: MacAddr, info: &NetworkInfo, now: Tick) {
        match &mut self.phase {
            Phase::Scanning { .. } if info.ssid == self.config.known_network.ssid => {
                let entry = ScanEntry { bssid, info: info.clone() };
                self.scan.insert(entry.key(), entry);
            }
            Phase::Connected { target, last_beacon, .. } if target.bssid == bssid && target.suites == info.akm_suites => {
                *last_beacon = now;
            }
            _ => {}
        }
    }

    fn start_scan(&mut self, now: Tick, out: &mut StationOutput) {
        self.scan.clear();
        self.phase = Phase::Scanning { until: now + self.config.scan_window };
        let probe = FrameBody::ProbeReq { ssid: self.config.known_network.ssid.clone() };
        out.send(self.frame(MacAddr::BROADCAST, MacAddr::BROADCAST, false, probe));
        out.emit(SimEvent::ScanStarted { client: self.config.name.clone() });
    }

    fn finish_scan(&mut self, now: Tick, out: &mut StationOutput) {
        let scan: Vec<ScanEntry> = self.scan.values().cloned().collect();
        let Some(entry) = client_select_network(&self.config, &self.failures, &scan) else {
            out.emit(SimEvent::NoNetwork { client: self.config.name.clone() });
            self.phase = Phase::Backoff { until: now + self.config.reconnect_backoff };
            return;
        };
        if self.failures.get(&entry.key()).copied().unwrap_or(0) >= self.config.max_failures {
            self.failures.clear();
        }
        self.begin_attempt(entry, now, out);
    }

    fn begin_attempt(&mut self, entry: ScanEntry, now: Tick, out: &mut StationOutput) {
        self.attempts += 1;
        let suites = entry.info.akm_suites;
        let akm = self.config.capability.preferred_akm(suites);
        let pmf = negotiate_pmf(entry.info.pmf, suites, akm, self.config.pmf_capable).unwrap_or(false);
        let target = Target { bssid: entry.bssid, suites, akm, pmf, attempt: self.attempts };
        let deadline = now + self.config.attempt_timeout;
        out.emit(SimEvent::AttemptStarted {
            client: self.config.name.clone(),
            attempt: self.attempts,
            bssid: entry.bssid,
            security: suites.label().to_string(),
            akm,
        });
        // Placeholder so a failure below has a target to charge.
        self.phase = Phase::Associating { target, pmk: None, deadline };
        match akm {
            Some(Akm::Sae) => match self.pwe_for(target.bssid) {
                Ok(pwe) => {
                    let (own, secret) = sae_make_commit(&pwe, &mut self.rng);
                    out.send(self.frame(target.bssid, target.bssid, false, FrameBody::SaeCommit(own.clone())));
                    let sae = SaeAttempt { pwe, secret, own, keys: None, early_confirm: None, token_echoes: 0 };
                    self.phase = Phase::Sae { target, sae: Box::new(sae), deadline };
                }
                Err(e) => self.fail_attempt(now, e.to_string(), out),
            },
            Some(Akm::Psk) => match self.psk_pmk() {
                Ok(pmk) => {
                    out.send(self.assoc_req(target));
                    self.phase = Phase::Associating { target, pmk: Some(pmk), deadline };
                }
                Err(e) => self.fail_attempt(now, e.to_string(), out),
            },
            None => out.send(self.assoc_req(target)),
        }
    }

    fn on_sae_commit(&mut self, commit: &SaeCommit, now: Tick, out: &mut StationOutput) {
        let Phase::Sae { target, sae, .. } = &mut self.phase else {
            return;
        };
        if sae.keys.is_some() {
            return;
        }
        let target = *target;
        match sae_process_commit(&sae.secret, &sae.own, commit, &sae.pwe) {
            Ok(keys) => {
                let confirm = sae_make_confirm(&keys.kck, 1, &sae.own, commit);
                sae.keys = Some((keys, commit.clone()));
                let early = sae.early_confirm.take();
                out.send(self.frame(target.bssid, target.bssid, false, FrameBody::SaeConfirm(confirm)));
                if let Some(confirm) = early {
                    self.on_sae_confirm(&confirm, now, out);
                }
            }
            Err(e) => self.fail_attempt(now, e.to_string(), out),
        }
    }

    fn on_sae_confirm(&mut self, confirm: &SaeConfirm, now: Tick, out: &mut StationOutput) {
        let Phase::Sae { target, sae, deadline } = &mut self.phase else {
            return;
        };
        let Some((keys, peer)) = &sae.keys else {
            sae.early_confirm = Some(*confirm);
            return;
        };
        if sae_verify_confirm(&keys.kck, confirm, &sae.own, peer) {
            let (target, pmk, deadline) = (*target, keys.pmk, *deadline);
            out.send(self.assoc_req(target));
            self.phase = Phase::Associating { target, pmk: Some(pmk), deadline };
        } else {
            self.fail_attempt(now, "SAE confirm mismatch".into(), out);
        }
    }

    fn on_sae_reject(
        &mut self,
        status: StatusCode,
        token: Option<&crate::crypto::AnticlogToken>,
        now: Tick,
        out: &mut StationOutput,
    ) {
        let target = match &mut self.phase {
            Phase::Sae { target, sae, .. } => {
                if let (StatusCode::ANTI_CLOGGING_TOKEN_REQUIRED, Some(token)) = (status, token) {
                    if sae.token_echoes < MAX_TOKEN_ECHOES && sae.keys.is_none() {
                        sae.token_echoes += 1;
                        let mut commit = sae.own.clone();
                        commit.token = Some(*token);
                        let bssid = target.bssid;
                        out.send(self.frame(bssid, bssid, false, FrameBody::SaeCommit(commit)));
                        return;
                    }
                }
                *target
            }
            Phase::Associating { target, .. } if target.akm == Some(Akm::Sae) => *target,
            _ => return,
        };
        out.emit(SimEvent::SaeRejected {
            client: self.config.name.clone(),
            attempt: target.attempt,
            bssid: target.bssid,
            status: status.0,
        });
        self.fail_attempt(now, format!("SAE rejected with status {}", status.0), out);
    }

    fn on_assoc_resp(&mut self, status: StatusCode, now: Tick, out: &mut StationOutput) {
        let Phase::Associating { target, pmk, deadline } = &self.phase else {
            return;
        };
        let (target, pmk, deadline) = (*target, *pmk, *deadline);
        if status != StatusCode::SUCCESS {
            self.fail_attempt(now, format!("association refused with status {}", status.0), out);
            return;
        }
        match pmk {
            Some(pmk) => self.phase = Phase::FourWay { target, pmk, keys: None, deadline },
            None => self.connect(target, None, now, out),
        }
    }

    fn on_eapol(&mut self, key: &EapolKey, now: Tick, out: &mut StationOutput) {
        let Phase::FourWay { target, pmk, keys, .. } = &mut self.phase else {
            return;
        };
        let target = *target;
        match key.msg_no {
            1 => {
                if self.config.capability == Capability::TransitionIncompatible && target.suites == AkmSet::TRANSITION {
                    out.emit(SimEvent::Ignored {
                        station: self.config.name.clone(),
                        peer: target.bssid,
                        detail: "handshake on transition network unsupported".into(),
                    });
                    return;
                }
                let mut snonce = [0u8; 32];
                self.rng.fill_bytes(&mut snonce);
                let ptk = derive_ptk(pmk, target.bssid, self.config.mac, &key.nonce, &snonce);
                *keys = Some((key.nonce, ptk));
                let mut msg2 = EapolKey {
                    version: EAPOL_VERSION.code(),
                    msg_no: 2,
                    replay_counter: key.replay_counter,
                    nonce: snonce,
                    mic: [0; 16],
                    key_data: rsn_key_data(target.akm.unwrap_or(Akm::Psk)),
                };
                msg2.mic = compute_mic(&ptk.kck, &msg2.mic_input(), EAPOL_VERSION).expect("supported version");
                out.send(self.frame(target.bssid, target.bssid, false, FrameBody::EapolKey(msg2)));
            }
            3 => {
                let Some((anonce, ptk)) = keys else {
                    return;
                };
                if key.nonce != *anonce || !mic_ok(ptk, key) {
                    out.emit(SimEvent::MicFailure { station: self.config.name.clone(), peer: target.bssid, msg_no: 3 });
                    return;
                }
                let ptk = *ptk;
                let mut msg4 = EapolKey {
                    version: EAPOL_VERSION.code(),
                    msg_no: 4,
                    replay_counter: key.replay_counter,
                    nonce: [0; 32],
                    mic: [0; 16],
                    key_data: Vec::new(),
                };
                msg4.mic = compute_mic(&ptk.kck, &msg4.mic_input(), EAPOL_VERSION).expect("supported version");
                out.send(self.frame(target.bssid, target.bssid, false, FrameBody::EapolKey(msg4)));
                self.connect(target, Some(ptk), now, out);
            }
            _ => {}
        }
    }

    fn on_deauth(&mut self, frame: &Frame, reason: u16, mmic: Option<[u8; 16]>, now: Tick, out: &mut StationOutput) {
        let (target, ptk) = match &self.phase {
            Phase::Associating { target, .. } => (*target, None),
            Phase::FourWay { target, keys, .. } => (*target, keys.map(|(_, p)| p)),
            Phase::Connected { target, ptk, .. } => (*target, *ptk),
            _ => return,
        };
        if frame.src() != target.bssid {
            return;
        }
        if target.pmf {
            let genuine = match (mmic, ptk) {
                (Some(tag), Some(ptk)) => deauth_mic(&ptk, frame.src(), frame.dst(), reason) == tag,
                _ => false,
            };
            if !genuine {
                out.emit(SimEvent::DeauthIgnored { station: self.config.name.clone(), peer: frame.src() });
                return;
            }
        }
        if self.is_connected() {
            self.lose_connection(target, DisconnectCause::Deauth, now, out);
        } else {
            self.fail_attempt(now, format!("deauthenticated (reason {reason})"), out);
        }
    }

    fn connect(&mut self, target: Target, ptk: Option<Ptk>, now: Tick, out: &mut StationOutput) {
        self.phase = Phase::Connected { target, ptk, since: now, last_beacon: now, stable: false };
        out.emit(SimEvent::ClientConnected {
            client: self.config.name.clone(),
            attempt: target.attempt,
            bssid: target.bssid,
            akm: target.akm,
            pmf: target.pmf,
        });
    }

    fn leave(&mut self, target: Target, ptk: Option<Ptk>, now: Tick, out: &mut StationOutput) {
        let body = match (target.pmf, ptk) {
            (true, Some(ptk)) => FrameBody::Deauth {
                reason: reason::LEAVING,
                mmic: Some(deauth_mic(&ptk, self.config.mac, target.bssid, reason::LEAVING)),
            },
            _ => FrameBody::Deauth { reason: reason::LEAVING, mmic: None },
        };
        let protected = matches!(body, FrameBody::Deauth { mmic: Some(_), .. });
        out.send(self.frame(target.bssid, target.bssid, protected, body));
        out.emit(SimEvent::ClientDisconnected {
            client: self.config.name.clone(),
            bssid: target.bssid,
            cause: DisconnectCause::Left,
        });
        self.phase = Phase::Backoff { until: now + self.config.reconnect_backoff };
    }

    fn lose_connection(&mut self, target: Target, cause: DisconnectCause, now: Tick, out: &mut StationOutput) {
        *self.failures.entry(target.key()).or_default() += 1;
        out.emit(SimEvent::ClientDisconnected { client: self.config.name.clone(), bssid: target.bssid, cause });
        self.phase = if self.config.auto_reconnect {
            Phase::Backoff { until: now + self.config.reconnect_backoff }
        } else {
            Phase::Idle
        };
    }

    fn fail_attempt(&mut self, now: Tick, reason: String, out: &mut StationOutput) {
        if let Some(target) = self.phase.target().copied() {
            *self.failures.entry(target.key()).or_default() += 1;
            out.emit(SimEvent::AttemptFailed {
                client: self.config.name.clone(),
                attempt: target.attempt,
                bssid: target.bssid,
                reason,
            });
        }
        self.phase = Phase::Backoff { until: now + self.config.reconnect_backoff };
    }

    fn assoc_req(&self, target: Target) -> Frame {
        let body = FrameBody::AssocReq { akm: target.akm, pmf_capable: self.config.pmf_capable };
        self.frame(target.bssid, target.bssid, false, body)
    }

    fn pwe_for(&mut self, bssid: MacAddr) -> Result<SaeGroupElement, CryptoError> {
        if let Some(pwe) = self.pwe_cache.get(&bssid) {
            return Ok(*pwe);
        }
        let pwe = sae_derive_pwe(&self.config.known_network.passphrase, self.config.mac, bssid)?;
        self.pwe_cache.insert(bssid, pwe);
        Ok(pwe)
    }

    fn psk_pmk(&mut self) -> Result<Pmk, CryptoError> {
        if let Some(pmk) = self.psk_pmk {
            return Ok(pmk);
        }
        let known = &self.config.known_network;
        let pmk = derive_pmk_psk(&known.passphrase, known.ssid.as_bytes())?;
        self.psk_pmk = Some(pmk);
        Ok(pmk)
    }

    fn frame(&self, dst: MacAddr, bssid: MacAddr, protected: bool, body: FrameBody) -> Frame {
        Frame::new(self.config.mac, dst, bssid, self.config.channel, protected, body)
            .expect("channel validated at construction")
    }
}
