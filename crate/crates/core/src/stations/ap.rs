use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{deauth_mic, mic_ok, negotiate_pmf, rsn_key_data, StationOutput, EAPOL_VERSION};
use crate::crypto::{
    compute_mic, derive_pmk_psk, derive_ptk, make_anticlog_token, sae_derive_pwe, sae_make_commit, sae_make_confirm,
    sae_process_commit, sae_verify_confirm, verify_anticlog_token, CryptoError, Nonce, Passphrase, Pmk,
    Ptk, SaeCommit, SaeConfirm, SaeGroupElement, SaeKeys,
};
use crate::events::SimEvent;
use crate::frames::{
    Akm, AkmSet, EapolKey, Frame, FrameBody, FrameError, MacAddr, NetworkInfo, PmfPolicy, Ssid, StatusCode,
};
use crate::medium::{Tick, TICKS_PER_SECOND};
use crate::StationError;

/// Robust management frame policy violation.
const STATUS_PMF_POLICY: StatusCode = StatusCode(31);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ApMode {
    Wpa2Only,
    SaeOnly,
    /// WPA2-PSK/WPA3-SAE mixed mode.
    Transition,
    /// No authentication; used for captive-portal rogues.
    Open,
}

impl ApMode {
    pub fn akm_suites(self) -> AkmSet {
        match self {
            ApMode::Wpa2Only => AkmSet::PSK,
            ApMode::SaeOnly => AkmSet::SAE,
            ApMode::Transition => AkmSet::TRANSITION,
            ApMode::Open => AkmSet::OPEN,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ApConfig {
    pub name: String,
    pub ssid: Ssid,
    pub bssid: MacAddr,
    pub channel: u8,
    pub mode: ApMode,
    pub pmf: PmfPolicy,
    /// Required for every mode except `Open`.
    pub passphrase: Option<Passphrase>,
    pub work_budget_per_second: u32,
    pub commit_cost: u32,
    pub anticlog_threshold: usize,
    pub anticlog_ttl: Tick,
    pub sae_session_timeout: Tick,
    pub handshake_timeout: Tick,
    pub beacon_interval: Tick,
    /// Display-only signal strength, in percent.
    pub signal_percent: u8,
}

impl ApConfig {
    pub const DEFAULT_COMMIT_COST: u32 = 1;
    /// Fifteen commits per second; the sixteenth saturates the AP.
    pub const DEFAULT_BUDGET: u32 = 15 * Self::DEFAULT_COMMIT_COST;
    pub const DEFAULT_ANTICLOG_THRESHOLD: usize = 5;

    pub fn new(
        name: impl Into<String>,
        ssid: Ssid,
        bssid: MacAddr,
        channel: u8,
        mode: ApMode,
        passphrase: Option<Passphrase>,
    ) -> Self {
        Self {
            name: name.into(),
            ssid,
            bssid,
            channel,
            mode,
            pmf: PmfPolicy::Disabled,
            passphrase,
            work_budget_per_second: Self::DEFAULT_BUDGET,
            commit_cost: Self::DEFAULT_COMMIT_COST,
            anticlog_threshold: Self::DEFAULT_ANTICLOG_THRESHOLD,
            anticlog_ttl: 2 * TICKS_PER_SECOND,
            sae_session_timeout: 2 * TICKS_PER_SECOND,
            handshake_timeout: 2 * TICKS_PER_SECOND,
            beacon_interval: 100,
            signal_percent: 58,
        }
    }

    pub fn network_info(&self) -> NetworkInfo {
        NetworkInfo { ssid: self.ssid.clone(), akm_suites: self.mode.akm_suites(), pmf: self.pmf }
    }
}

struct SaeSession {
    own: SaeCommit,
    peer: SaeCommit,
    keys: SaeKeys,
    started: Tick,
    accepted: bool,
}

enum Link {
    FourWay { akm: Akm, pmf: bool, pmk: Pmk, anonce: Nonce, replay: u64, ptk: Option<Ptk>, started: Tick },
    Connected { pmf: bool, ptk: Option<Ptk> },
}

impl Link {
    fn pmf(&self) -> bool {
        match self {
            Link::FourWay { pmf, .. } | Link::Connected { pmf, .. } => *pmf,
        }
    }

    fn ptk(&self) -> Option<&Ptk> {
        match self {
            Link::FourWay { ptk, .. } | Link::Connected { ptk, .. } => ptk.as_ref(),
        }
    }
}

pub struct ApState {
    config: ApConfig,
    psk_pmk: Option<Pmk>,
    anticlog_secret: [u8; 32],
    rng: ChaCha8Rng,
    budget_second: u64,
    work_spent_this_second: u32,
    pending_sae: BTreeMap<MacAddr, SaeSession>,
    links: BTreeMap<MacAddr, Link>,
    pwe_cache: BTreeMap<MacAddr, SaeGroupElement>,
    next_beacon: Tick,
    next_replay: u64,
    up: bool,
}

impl std::fmt::Debug for ApState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ApState")
            .field("name", &self.config.name)
            .field("bssid", &self.config.bssid)
            .field("up", &self.up)
            .field("pending_sae", &self.pending_sae.len())
            .field("links", &self.links.len())
            .finish()
    }
}

impl ApState {
    /// Starts the AP at `now`; the first beacon goes out immediately.
    pub fn new(config: ApConfig, seed: u64, now: Tick) -> Result<Self, StationError> {
        Frame::plain(config.bssid, MacAddr::BROADCAST, config.bssid, config.channel, FrameBody::AssocResp {
            status: StatusCode::SUCCESS,
        })
        .map_err(|e: FrameError| StationError::Frame(config.name.clone(), e))?;
        if config.beacon_interval == 0 {
            return Err(StationError::Config(config.name.clone(), "beacon_interval must be positive".into()));
        }
        let suites = config.mode.akm_suites();
        let passphrase = match (&config.passphrase, suites.is_open()) {
            (Some(p), false) => Some(p),
            (None, false) => return Err(StationError::MissingPassphrase(config.name.clone())),
            (_, true) => None,
        };
        let psk_pmk = match passphrase {
            Some(p) if suites.psk => Some(
                derive_pmk_psk(p, config.ssid.as_bytes()).map_err(|e| StationError::Crypto(config.name.clone(), e))?,
            ),
            _ => None,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut anticlog_secret = [0u8; 32];
        rng.fill_bytes(&mut anticlog_secret);
        Ok(Self {
            config,
            psk_pmk,
            anticlog_secret,
            rng,
            budget_second: now / TICKS_PER_SECOND,
            work_spent_this_second: 0,
            pending_sae: BTreeMap::new(),
            links: BTreeMap::new(),
            pwe_cache: BTreeMap::new(),
            next_beacon: now,
            next_replay: 1,
            up: true,
        })
    }

    pub fn config(&self) -> &ApConfig {
        &self.config
    }

    pub fn is_up(&self) -> bool {
        self.up
    }

    /// Stops beaconing and answering; associations are forgotten.
    pub fn shut_down(&mut self) {
        self.up = false;
        self.pending_sae.clear();
        self.links.clear();
    }

    pub fn work_spent_this_second(&self) -> u32 {
        self.work_spent_this_second
    }

    pub fn pending_sae_count(&self) -> usize {
        self.pending_sae.len()
    }

    pub fn is_connected(&self, peer: MacAddr) -> bool {
        matches!(self.links.get(&peer), Some(Link::Connected { .. }))
    }

    /// `Some(pmf)` for an associated peer.
    pub fn pmf_negotiated(&self, peer: MacAddr) -> Option<bool> {
        self.links.get(&peer).map(Link::pmf)
    }

    pub fn associated_peers(&self) -> Vec<MacAddr> {
        self.links.keys().copied().collect()
    }

    pub fn next_wakeup(&self) -> Option<Tick> {
        self.up.then_some(self.next_beacon)
    }

    pub fn tick(&mut self, now: Tick) -> StationOutput {
        let mut out = StationOutput::default();
        if !self.up {
            return out;
        }
        self.roll_budget(now);
        self.expire(now);
        if now >= self.next_beacon {
            out.send(self.frame_to(MacAddr::BROADCAST, FrameBody::Beacon(self.config.network_info())));
            while self.next_beacon <= now {
                self.next_beacon += self.config.beacon_interval;
            }
        }
        out
    }

    pub fn handle_frame(&mut self, frame: &Frame, now: Tick) -> StationOutput {
        let mut out = StationOutput::default();
        if !self.up || frame.channel() != self.config.channel {
            return out;
        }
        let src = frame.src();
        let to_me = frame.dst() == self.config.bssid;
        match frame.body() {
            FrameBody::ProbeReq { ssid } if to_me || frame.dst().is_broadcast() => {
                if ssid.as_str().is_empty() || *ssid == self.config.ssid {
                    out.send(self.frame_to(src, FrameBody::ProbeResp(self.config.network_info())));
                }
            }
            _ if !to_me => {}
            FrameBody::SaeCommit(commit) => self.on_commit(src, commit, now, &mut out),
            FrameBody::SaeConfirm(confirm) => self.on_confirm(src, confirm, now, &mut out),
            FrameBody::AssocReq { akm, pmf_capable } => self.on_assoc(src, *akm, *pmf_capable, now, &mut out),
            FrameBody::EapolKey(key) => self.on_eapol(src, key, &mut out),
            FrameBody::Deauth { reason, mmic } => self.on_deauth(frame, *reason, *mmic, &mut out),
            other => out.emit(self.ignored(src, format!("unexpected {}", other.kind()))),
        }
        out
    }

    fn on_commit(&mut self, peer: MacAddr, commit: &SaeCommit, now: Tick, out: &mut StationOutput) {
        if !self.config.mode.akm_suites().sae {
            out.emit(self.ignored(peer, "SAE not offered".into()));
            return;
        }
        self.roll_budget(now);
        if self.work_spent_this_second + self.config.commit_cost > self.config.work_budget_per_second {
            out.emit(SimEvent::Overloaded { ap: self.config.name.clone(), peer });
            return;
        }
        self.work_spent_this_second += self.config.commit_cost;
        self.expire(now);

        let token_ok = commit.token.as_ref().is_some_and(|t| {
            verify_anticlog_token(&self.anticlog_secret, t, peer, now, self.config.anticlog_ttl)
        });
        if self.pending_sae.len() >= self.config.anticlog_threshold && !token_ok {
            let token = make_anticlog_token(&self.anticlog_secret, peer, now);
            out.send(self.frame_to(
                peer,
                FrameBody::SaeReject { status: StatusCode::ANTI_CLOGGING_TOKEN_REQUIRED, token: Some(token) },
            ));
            out.emit(SimEvent::AnticlogDemanded { ap: self.config.name.clone(), peer });
            return;
        }

        let pwe = match self.pwe_for(peer) {
            Ok(pwe) => pwe,
            Err(e) => {
                out.emit(self.commit_invalid(peer, e));
                return;
            }
        };
        let (own, secret) = sae_make_commit(&pwe, &mut self.rng);
        let keys = match sae_process_commit(&secret, &own, commit, &pwe) {
            Ok(keys) => keys,
            Err(e) => {
                out.emit(self.commit_invalid(peer, e));
                return;
            }
        };
        let confirm = sae_make_confirm(&keys.kck, 1, &own, commit);
        out.send(self.frame_to(peer, FrameBody::SaeCommit(own.clone())));
        out.send(self.frame_to(peer, FrameBody::SaeConfirm(confirm)));
        self.pending_sae.insert(peer, SaeSession { own, peer: commit.clone(), keys, started: now, accepted: false });
        out.emit(SimEvent::SaeCommitProcessed { ap: self.config.name.clone(), peer });
    }

    fn on_confirm(&mut self, peer: MacAddr, confirm: &SaeConfirm, now: Tick, out: &mut StationOutput) {
        self.expire(now);
        let Some(session) = self.pending_sae.get_mut(&peer) else {
            out.emit(self.ignored(peer, "confirm without SAE session".into()));
            return;
        };
        if session.accepted {
            out.emit(self.ignored(peer, "duplicate confirm".into()));
            return;
        }
        if sae_verify_confirm(&session.keys.kck, confirm, &session.own, &session.peer) {
            session.accepted = true;
            out.emit(SimEvent::SaeAccepted { ap: self.config.name.clone(), peer });
        } else {
            self.pending_sae.remove(&peer);
            out.send(self.frame_to(peer, FrameBody::SaeReject { status: StatusCode::UNSPECIFIED_FAILURE, token: None }));
            out.emit(SimEvent::SaeConfirmFailed { ap: self.config.name.clone(), peer });
        }
    }

    fn on_assoc(&mut self, peer: MacAddr, akm: Option<Akm>, pmf_capable: bool, now: Tick, out: &mut StationOutput) {
        let suites = self.config.mode.akm_suites();
        let Some(akm) = akm else {
            if suites.is_open() {
                self.links.insert(peer, Link::Connected { pmf: false, ptk: None });
                out.send(self.frame_to(peer, FrameBody::AssocResp { status: StatusCode::SUCCESS }));
                out.emit(SimEvent::AssocAccepted { ap: self.config.name.clone(), peer, akm: None, pmf: false });
                out.emit(SimEvent::PeerConnected { ap: self.config.name.clone(), peer, akm: None });
            } else {
                out.emit(self.ignored(peer, "open association to secured network".into()));
            }
            return;
        };
        if suites.is_open() {
            out.emit(self.ignored(peer, "secured association to open network".into()));
            return;
        }
        if !suites.contains(akm) {
            self.refuse(peer, StatusCode::INVALID_AKMP, out);
            return;
        }
        let Some(pmf) = negotiate_pmf(self.config.pmf, suites, Some(akm), pmf_capable) else {
            self.refuse(peer, STATUS_PMF_POLICY, out);
            return;
        };
        let pmk = match akm {
            Akm::Psk => self.psk_pmk.expect("PSK networks derive their PMK at start-up"),
            Akm::Sae => match self.pending_sae.get(&peer) {
                Some(session) if session.accepted => {
                    let pmk = session.keys.pmk;
                    self.pending_sae.remove(&peer);
                    pmk
                }
                _ => {
                    self.refuse(peer, StatusCode::UNSPECIFIED_FAILURE, out);
                    return;
                }
            },
        };
        let mut anonce = [0u8; 32];
        self.rng.fill_bytes(&mut anonce);
        let replay = self.next_replay;
        self.next_replay += 2;
        self.links.insert(peer, Link::FourWay { akm, pmf, pmk, anonce, replay, ptk: None, started: now });
        out.send(self.frame_to(peer, FrameBody::AssocResp { status: StatusCode::SUCCESS }));
        let msg1 = EapolKey {
            version: EAPOL_VERSION.code(),
            msg_no: 1,
            replay_counter: replay,
            nonce: anonce,
            mic: [0; 16],
            key_data: Vec::new(),
        };
        out.send(self.frame_to(peer, FrameBody::EapolKey(msg1)));
        out.emit(SimEvent::AssocAccepted { ap: self.config.name.clone(), peer, akm: Some(akm), pmf });
    }

    fn on_eapol(&mut self, peer: MacAddr, key: &EapolKey, out: &mut StationOutput) {
        let bssid = self.config.bssid;
        let name = self.config.name.clone();
        let Some(Link::FourWay { akm, pmf, pmk, anonce, replay, ptk, .. }) = self.links.get_mut(&peer) else {
            out.emit(self.ignored(peer, format!("EAPOL msg {} outside a handshake", key.msg_no)));
            return;
        };
        match (key.msg_no, ptk.as_ref()) {
            (2, None) if key.replay_counter == *replay => {
                let derived = derive_ptk(pmk, bssid, peer, anonce, &key.nonce);
                if !mic_ok(&derived, key) {
                    out.emit(SimEvent::MicFailure { station: name, peer, msg_no: 2 });
                    return;
                }
                let mut msg3 = EapolKey {
                    version: EAPOL_VERSION.code(),
                    msg_no: 3,
                    replay_counter: *replay + 1,
                    nonce: *anonce,
                    mic: [0; 16],
                    key_data: rsn_key_data(*akm),
                };
                msg3.mic = compute_mic(&derived.kck, &msg3.mic_input(), EAPOL_VERSION).expect("supported version");
                *ptk = Some(derived);
                out.send(self.frame_to(peer, FrameBody::EapolKey(msg3)));
            }
            (4, Some(keys)) if key.replay_counter == *replay + 1 => {
                if !mic_ok(keys, key) {
                    out.emit(SimEvent::MicFailure { station: name, peer, msg_no: 4 });
                    return;
                }
                let link = Link::Connected { pmf: *pmf, ptk: Some(*keys) };
                let akm = *akm;
                self.links.insert(peer, link);
                out.emit(SimEvent::PeerConnected { ap: name, peer, akm: Some(akm) });
            }
            _ => out.emit(self.ignored(peer, format!("unexpected EAPOL msg {}", key.msg_no))),
        }
    }

    fn on_deauth(&mut self, frame: &Frame, reason: u16, mmic: Option<[u8; 16]>, out: &mut StationOutput) {
        let peer = frame.src();
        let Some(link) = self.links.get(&peer) else {
            return;
        };
        if link.pmf() {
            let genuine = match (mmic, link.ptk()) {
                (Some(tag), Some(ptk)) => deauth_mic(ptk, peer, frame.dst(), reason) == tag,
                _ => false,
            };
            if !genuine {
                out.emit(SimEvent::DeauthIgnored { station: self.config.name.clone(), peer });
                return;
            }
        }
        self.links.remove(&peer);
        out.emit(SimEvent::PeerDropped { ap: self.config.name.clone(), peer, reason });
    }

    fn refuse(&self, peer: MacAddr, status: StatusCode, out: &mut StationOutput) {
        out.send(self.frame_to(peer, FrameBody::AssocResp { status }));
        out.emit(SimEvent::AssocRefused { ap: self.config.name.clone(), peer, status: status.0 });
    }

    fn pwe_for(&mut self, peer: MacAddr) -> Result<SaeGroupElement, CryptoError> {
        if let Some(pwe) = self.pwe_cache.get(&peer) {
            return Ok(*pwe);
        }
        let passphrase = self.config.passphrase.as_ref().expect("SAE networks carry a passphrase");
        let pwe = sae_derive_pwe(passphrase, self.config.bssid, peer)?;
        self.pwe_cache.insert(peer, pwe);
        Ok(pwe)
    }

    fn roll_budget(&mut self, now: Tick) {
        let second = now / TICKS_PER_SECOND;
        if second != self.budget_second {
            self.budget_second = second;
            self.work_spent_this_second = 0;
        }
    }

    fn expire(&mut self, now: Tick) {
        let sae_timeout = self.config.sae_session_timeout;
        self.pending_sae.retain(|_, s| now < s.started + sae_timeout);
        let hs_timeout = self.config.handshake_timeout;
        self.links.retain(|_, link| match link {
            Link::FourWay { started, .. } => now < *started + hs_timeout,
            Link::Connected { .. } => true,
        });
    }

    fn frame_to(&self, dst: MacAddr, body: FrameBody) -> Frame {
        Frame::plain(self.config.bssid, dst, self.config.bssid, self.config.channel, body)
            .expect("channel validated at construction")
    }

    fn ignored(&self, peer: MacAddr, detail: String) -> SimEvent {
        SimEvent::Ignored { station: self.config.name.clone(), peer, detail }
    }

    fn commit_invalid(&self, peer: MacAddr, e: CryptoError) -> SimEvent {
        SimEvent::SaeCommitInvalid { ap: self.config.name.clone(), peer, reason: e.to_string() }
    }
}
