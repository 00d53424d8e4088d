//! The event loop.
//!
//! A [`World`] owns the medium, every station, the attacker and the portal,
//! and advances them tick by tick. Within a tick the order is fixed:
//!
//! 1. station timers, in the order the stations were added
//! 2. the attacker's timer
//! 3. simulated victims at the portal
//! 4. frame deliveries due this tick
//! 5. passive sniffers, then the attacker's sniffer
//!
//! Anything a station sends in response goes out on the next tick. Every
//! transmission and event is appended to the run log, which is enough to
//! rebuild the run report offline.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::attacks::{
    extract_handshake, AttackError, CrackOutcome, AttackPlan, AttackReport, CommitFlooder, DeauthActor, DeauthStrategy,
    HandshakeCapture, Injection, RaceActor, RogueApHandle, RogueSecurity,
};
use crate::crypto::Passphrase;
use crate::events::{PortalEventKind, SimEvent};
use crate::frames::{CaptureRecord, Frame, FrameBody, MacAddr, PmfPolicy};
use crate::medium::{EndpointId, Medium, MediumError, Payload, SnifferHandle, Tick};
use crate::portal::{step_victim, CaptivePortal, PasswordLog, PortalConfig, VictimAction, VictimProfile, VictimState};
use crate::stations::{ApConfig, ApMode, ApState, ClientConfig, ClientState, StationOutput};
use crate::StationError;

/// Version stamped on every log line.
pub const LOG_VERSION: u32 = 1;

/// Independent per-component seed, so adding a station does not shift the
/// random streams of the others.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let digest = Sha256::new().chain_update(seed.to_be_bytes()).chain_update(label.as_bytes()).finalize();
    u64::from_be_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Station(#[from] StationError),
    #[error(transparent)]
    Medium(#[from] MediumError),
    #[error(transparent)]
    Attack(Box<AttackError>),
}

impl From<AttackError> for SimError {
    fn from(e: AttackError) -> Self {
        SimError::Attack(Box::new(e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

/// One line of the run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LogRecord {
    /// A frame handed to the medium at `tick`, due on the air at `at`.
    Tx {
        tick: Tick,
        at: Tick,
        origin: String,
        channel: u8,
        src: MacAddr,
        dst: MacAddr,
        protected: bool,
        body: serde_json::Value,
    },
    Event {
        tick: Tick,
        #[serde(flatten)]
        event: SimEvent,
    },
    AttackReport { tick: Tick, report: AttackReport },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLine {
    pub v: u32,
    #[serde(flatten)]
    pub record: LogRecord,
}

impl LogRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&LogLine { v: LOG_VERSION, record: self.clone() }).expect("log records serialize")
    }
}

enum Station {
    Ap(Box<ApState>),
    Client(Box<ClientState>),
}

struct Node {
    endpoint: EndpointId,
    station: Station,
}

impl Node {
    fn name(&self) -> &str {
        match &self.station {
            Station::Ap(ap) => &ap.config().name,
            Station::Client(c) => &c.config().name,
        }
    }

    fn mac(&self) -> MacAddr {
        match &self.station {
            Station::Ap(ap) => ap.config().bssid,
            Station::Client(c) => c.config().mac,
        }
    }

    fn next_wakeup(&self) -> Option<Tick> {
        match &self.station {
            Station::Ap(ap) => ap.next_wakeup(),
            Station::Client(c) => c.next_wakeup(),
        }
    }

    fn tick(&mut self, now: Tick) -> StationOutput {
        match &mut self.station {
            Station::Ap(ap) => ap.tick(now),
            Station::Client(c) => c.tick(now),
        }
    }

    fn handle(&mut self, frame: &Frame, now: Tick) -> StationOutput {
        match &mut self.station {
            Station::Ap(ap) => ap.handle_frame(frame, now),
            Station::Client(c) => c.handle_frame(frame, now),
        }
    }
}

struct Victim {
    mac: MacAddr,
    profile: VictimProfile,
    state: VictimState,
    rng: ChaCha8Rng,
}

enum Actor {
    Deauth(DeauthActor),
    Flood(CommitFlooder),
    Race(RaceActor),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AttackPhase {
    Pending,
    Active { since: Tick },
    Stopped,
}

struct Attacker {
    plan: AttackPlan,
    endpoint: EndpointId,
    channel: u8,
    sniffer: Option<SnifferHandle>,
    actor: Actor,
    phase: AttackPhase,
    /// Sniffed frames worth keeping for handshake extraction.
    seen: Vec<(Tick, Frame)>,
    handshake: Option<HandshakeCapture>,
    rogue: Option<RogueApHandle>,
    injected: u64,
    report: Option<AttackReport>,
}

impl Attacker {
    fn next_wakeup(&self) -> Option<Tick> {
        match self.phase {
            AttackPhase::Pending => Some(self.plan.start_at),
            AttackPhase::Active { .. } => match &self.actor {
                Actor::Deauth(a) => Some(a.next_wakeup()),
                Actor::Flood(f) => Some(f.next_wakeup()),
                Actor::Race(_) => None,
            },
            AttackPhase::Stopped => None,
        }
    }

    fn keep(&mut self, tick: Tick, frame: &Frame) -> bool {
        match frame.body() {
            FrameBody::EapolKey(key) => {
                self.seen.push((tick, frame.clone()));
                key.msg_no == 2
            }
            FrameBody::Beacon(info) | FrameBody::ProbeResp(info) => {
                let known = self.seen.iter().any(|(_, f)| {
                    f.src() == frame.src()
                        && matches!(f.body(), FrameBody::Beacon(i) | FrameBody::ProbeResp(i) if i == info)
                });
                if !known {
                    self.seen.push((tick, frame.clone()));
                }
                false
            }
            _ => false,
        }
    }
}

/// A simulated radio neighbourhood.
pub struct World {
    seed: u64,
    now: Tick,
    last_processed: Option<Tick>,
    medium: Medium,
    nodes: Vec<Node>,
    owners: BTreeMap<EndpointId, usize>,
    victims: Vec<Victim>,
    attacker: Option<Attacker>,
    portal: Option<CaptivePortal>,
    passive: Vec<(SnifferHandle, u8)>,
    capture: Vec<CaptureRecord>,
    events: Vec<(Tick, SimEvent)>,
    log: Vec<LogRecord>,
}

impl std::fmt::Debug for World {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("World")
            .field("seed", &self.seed)
            .field("now", &self.now)
            .field("nodes", &self.nodes.iter().map(Node::name).collect::<Vec<_>>())
            .field("events", &self.events.len())
            .finish()
    }
}

impl World {
    pub fn new(seed: u64, loss_rate: f64) -> Self {
        Self {
            seed,
            now: 0,
            last_processed: None,
            medium: Medium::new(derive_seed(seed, "medium"), loss_rate),
            nodes: Vec::new(),
            owners: BTreeMap::new(),
            victims: Vec::new(),
            attacker: None,
            portal: None,
            passive: Vec::new(),
            capture: Vec::new(),
            events: Vec::new(),
            log: Vec::new(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn now(&self) -> Tick {
        self.now
    }

    pub fn add_ap(&mut self, config: ApConfig) -> Result<NodeId, SimError> {
        let seed = derive_seed(self.seed, &format!("ap:{}", config.name));
        let ap = ApState::new(config, seed, self.now)?;
        self.add_node(ap.config().channel, Station::Ap(Box::new(ap)))
    }

    pub fn add_client(&mut self, config: ClientConfig) -> Result<NodeId, SimError> {
        let seed = derive_seed(self.seed, &format!("client:{}", config.name));
        let client = ClientState::new(config, seed)?;
        self.add_node(client.config().channel, Station::Client(Box::new(client)))
    }

    fn add_node(&mut self, channel: u8, station: Station) -> Result<NodeId, SimError> {
        let endpoint = self.medium.attach(channel)?;
        self.owners.insert(endpoint, self.nodes.len());
        self.nodes.push(Node { endpoint, station });
        Ok(NodeId(self.nodes.len() - 1))
    }

    /// Puts a simulated person behind `client`, who will answer the portal.
    pub fn add_victim(&mut self, client: NodeId, profile: VictimProfile) -> Result<(), SimError> {
        let Some(Station::Client(c)) = self.nodes.get(client.0).map(|n| &n.station) else {
            return Err(StationError::Config(format!("node {}", client.0), "victims attach to clients".into()).into());
        };
        profile.validate().map_err(|e| StationError::Config(c.config().name.clone(), e.to_string()))?;
        let mac = c.config().mac;
        let state = VictimState::new(c.config().known_network.passphrase.as_str());
        let rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, &format!("victim:{}", c.config().name)));
        self.victims.push(Victim { mac, profile, state, rng });
        Ok(())
    }

    /// A passive monitor whose frames end up in [`World::capture`].
    pub fn add_sniffer(&mut self, channel: u8) -> Result<(), SimError> {
        self.passive.push((self.medium.attach_sniffer(channel, None)?, channel));
        Ok(())
    }

    pub fn ap(&self, id: NodeId) -> Option<&ApState> {
        match &self.nodes.get(id.0)?.station {
            Station::Ap(ap) => Some(ap),
            Station::Client(_) => None,
        }
    }

    pub fn client(&self, id: NodeId) -> Option<&ClientState> {
        match &self.nodes.get(id.0)?.station {
            Station::Client(c) => Some(c),
            Station::Ap(_) => None,
        }
    }

    pub fn find_node(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.name() == name).map(NodeId)
    }

    pub fn events(&self) -> &[(Tick, SimEvent)] {
        &self.events
    }

    pub fn log(&self) -> &[LogRecord] {
        &self.log
    }

    /// The run log as JSON lines, each terminated by a newline.
    pub fn log_jsonl(&self) -> String {
        self.log.iter().map(|r| r.to_json_line() + "\n").collect()
    }

    pub fn capture(&self) -> &[CaptureRecord] {
        &self.capture
    }

    pub fn handshake(&self) -> Option<&HandshakeCapture> {
        self.attacker.as_ref()?.handshake.as_ref()
    }

    pub fn rogue(&self) -> Option<RogueApHandle> {
        self.attacker.as_ref()?.rogue
    }

    pub fn portal(&self) -> Option<&CaptivePortal> {
        self.portal.as_ref()
    }

    pub fn attack_report(&self) -> Option<AttackReport> {
        self.attacker.as_ref()?.report.clone()
    }

    /// Arms the attacker; it starts at `plan.start_at`.
    pub fn install_attack(&mut self, plan: AttackPlan) -> Result<(), AttackError> {
        plan.validate()?;
        if self.attacker.is_some() {
            return Err(AttackError::AlreadyInstalled);
        }
        let channel = self.target_channel(plan.target_bssid)?;
        let endpoint = self.medium.attach(channel)?;
        let rng = |label: &str| ChaCha8Rng::seed_from_u64(derive_seed(self.seed, label));
        let actor = match plan.deauth_strategy {
            DeauthStrategy::AireplayDeauth => Actor::Deauth(DeauthActor::new(plan.target_bssid, channel, plan.start_at)),
            DeauthStrategy::CommitFlood { rate_per_sec } => Actor::Flood(CommitFlooder::new(
                plan.target_bssid,
                channel,
                rate_per_sec,
                plan.start_at,
                rng("attacker:flood"),
            )),
            DeauthStrategy::BadTokenRace => {
                Actor::Race(RaceActor::new(plan.target_bssid, channel, plan.attacker_mac, rng("attacker:race")))
            }
        };
        self.attacker = Some(Attacker {
            plan,
            endpoint,
            channel,
            sniffer: None,
            actor,
            phase: AttackPhase::Pending,
            seen: Vec::new(),
            handshake: None,
            rogue: None,
            injected: 0,
            report: None,
        });
        Ok(())
    }

    fn target_channel(&self, bssid: MacAddr) -> Result<u8, AttackError> {
        self.nodes
            .iter()
            .find_map(|n| match &n.station {
                Station::Ap(ap) if ap.config().bssid == bssid => Some(ap.config().channel),
                _ => None,
            })
            .ok_or(AttackError::UnknownTarget(bssid))
    }

    /// Processes every tick up to and including `end` that has something due.
    pub fn run_until(&mut self, end: Tick) -> Result<(), SimError> {
        while let Some(next) = self.next_activity() {
            if next > end {
                break;
            }
            self.process_tick(next)?;
        }
        self.now = self.now.max(end);
        self.medium.advance_to(self.now);
        Ok(())
    }

    fn next_activity(&self) -> Option<Tick> {
        let next = [
            self.medium.next_event_tick(),
            self.nodes.iter().filter_map(Node::next_wakeup).min(),
            self.attacker.as_ref().and_then(Attacker::next_wakeup),
            self.victims.iter().filter_map(|v| v.state.next_wakeup()).min(),
        ]
        .into_iter()
        .flatten()
        .min()?;
        // Anything overdue runs on the next unprocessed tick.
        Some(match self.last_processed {
            Some(last) => next.max(last + 1),
            None => next,
        })
    }

    fn process_tick(&mut self, now: Tick) -> Result<(), SimError> {
        self.now = now;
        self.last_processed = Some(now);
        self.medium.advance_to(now);

        for idx in 0..self.nodes.len() {
            if self.nodes[idx].next_wakeup().is_some_and(|t| t <= now) {
                let out = self.nodes[idx].tick(now);
                self.dispatch(idx, out, now)?;
            }
        }
        self.attacker_timer(now)?;
        self.step_victims(now);

        if self.medium.next_event_tick().is_some_and(|t| t <= now) {
            for delivery in self.medium.step() {
                let (Some(&idx), Payload::Frame(frame)) = (self.owners.get(&delivery.receiver), &delivery.payload) else {
                    continue;
                };
                let out = self.nodes[idx].handle(frame, now);
                self.dispatch(idx, out, now)?;
            }
        }

        for (handle, channel) in self.passive.clone() {
            for (tick, payload) in self.medium.drain_sniffer(handle) {
                self.capture.push(CaptureRecord { tick, channel, payload });
            }
        }
        self.attacker_observe(now)
    }

    fn emit(&mut self, tick: Tick, event: SimEvent) {
        log::debug!("t={tick} {}", event.name());
        self.log.push(LogRecord::Event { tick, event: event.clone() });
        self.events.push((tick, event));
    }

    fn transmit(&mut self, sender: EndpointId, origin: String, frame: Frame, at: Tick) -> Result<(), SimError> {
        self.log.push(LogRecord::Tx {
            tick: self.now,
            at,
            origin,
            channel: frame.channel(),
            src: frame.src(),
            dst: frame.dst(),
            protected: frame.protected(),
            body: frame.body().summary(),
        });
        self.medium.transmit(Some(sender), frame, at)?;
        Ok(())
    }

    fn dispatch(&mut self, idx: usize, out: StationOutput, now: Tick) -> Result<(), SimError> {
        let endpoint = self.nodes[idx].endpoint;
        let origin = self.nodes[idx].name().to_string();
        for frame in out.frames {
            self.transmit(endpoint, origin.clone(), frame, now + 1)?;
        }
        let is_rogue = self.rogue().is_some_and(|r| r.node.0 == idx);
        for event in out.events {
            let captive = match &event {
                SimEvent::PeerConnected { peer, .. } if is_rogue => Some(*peer),
                _ => None,
            };
            self.emit(now, event);
            if let Some(peer) = captive {
                self.serve_portal(peer, now);
            }
        }
        Ok(())
    }

    /// Every client on the rogue is redirected to the portal page.
    fn serve_portal(&mut self, client: MacAddr, now: Tick) {
        if self.portal.is_none() {
            return;
        }
        self.emit(now, SimEvent::Portal { client, kind: PortalEventKind::PageServed });
        for victim in self.victims.iter_mut().filter(|v| v.mac == client) {
            victim.state.show_prompt(now + 1);
        }
    }

    fn on_rogue(&self, client: MacAddr) -> bool {
        self.rogue()
            .and_then(|r| self.ap(r.node))
            .is_some_and(|ap| ap.is_up() && ap.is_connected(client))
    }

    fn step_victims(&mut self, now: Tick) {
        for idx in 0..self.victims.len() {
            let victim = &mut self.victims[idx];
            if !victim.state.next_wakeup().is_some_and(|t| t <= now) {
                continue;
            }
            let Some(VictimAction::Submit(text)) = step_victim(&victim.profile, &mut victim.state, &mut victim.rng, now)
            else {
                continue;
            };
            let client = victim.mac;
            if !self.on_rogue(client) {
                self.victims[idx].state.dismiss();
                continue;
            }
            let Some(outcome) = self.portal.as_ref().map(|p| p.handle_submit(&text, now)) else {
                continue;
            };
            for kind in outcome.events {
                self.emit(now, SimEvent::Portal { client, kind });
            }
            if outcome.accepted {
                self.teardown("password_recovered", now);
            } else {
                self.victims[idx].state.show_prompt(now + 1);
            }
        }
    }

    fn attacker_timer(&mut self, now: Tick) -> Result<(), SimError> {
        let spare: std::collections::BTreeSet<MacAddr> = self
            .rogue()
            .and_then(|r| self.ap(r.node))
            .map(|ap| ap.associated_peers().into_iter().collect())
            .unwrap_or_default();
        let Some(att) = self.attacker.as_mut() else {
            return Ok(());
        };
        let injections = match att.phase {
            AttackPhase::Pending if now >= att.plan.start_at => {
                att.sniffer = Some(self.medium.attach_sniffer(att.channel, Some(att.endpoint))?);
                att.phase = AttackPhase::Active { since: now };
                let strategy = att.plan.deauth_strategy.label().to_string();
                self.emit(now, SimEvent::AttackStarted { strategy });
                return self.attacker_timer(now);
            }
            AttackPhase::Active { .. } => match &mut att.actor {
                Actor::Deauth(a) if a.next_wakeup() <= now => a.on_timer(now, &spare),
                Actor::Flood(f) if f.next_wakeup() <= now => f.on_timer(now),
                _ => Vec::new(),
            },
            _ => Vec::new(),
        };
        self.inject(injections, now)
    }

    fn inject(&mut self, injections: Vec<Injection>, earliest: Tick) -> Result<(), SimError> {
        let Some(att) = self.attacker.as_mut() else {
            return Ok(());
        };
        att.injected += injections.len() as u64;
        let endpoint = att.endpoint;
        for (frame, at) in injections {
            self.transmit(endpoint, "attacker".into(), frame, at.max(earliest))?;
        }
        Ok(())
    }

    fn attacker_observe(&mut self, now: Tick) -> Result<(), SimError> {
        let Some(att) = self.attacker.as_mut() else {
            return Ok(());
        };
        let (AttackPhase::Active { .. }, Some(handle)) = (att.phase, att.sniffer) else {
            return Ok(());
        };
        let mut injections = Vec::new();
        let mut new_msg2 = false;
        for (tick, payload) in self.medium.drain_sniffer(handle) {
            let Payload::Frame(frame) = payload else {
                continue;
            };
            match &mut att.actor {
                Actor::Deauth(a) => a.observe(&frame),
                Actor::Flood(f) => f.observe(&frame),
                Actor::Race(r) => injections.extend(r.observe(tick, &frame)),
            }
            if att.handshake.is_none() {
                new_msg2 |= att.keep(tick, &frame);
            }
        }
        self.inject(injections, now + 1)?;
        if new_msg2 {
            self.try_capture(now)?;
        }
        Ok(())
    }

    fn try_capture(&mut self, now: Tick) -> Result<(), SimError> {
        let Some(att) = self.attacker.as_mut() else {
            return Ok(());
        };
        let seen = att.seen.iter().map(|(t, f)| (*t, f));
        let Some(hs) = extract_handshake(seen, &att.plan.target_ssid) else {
            return Ok(());
        };
        if hs.aa != att.plan.target_bssid {
            return Ok(());
        }
        att.seen.clear();
        att.handshake = Some(hs.clone());
        let plan = att.plan.clone();
        self.emit(
            now,
            SimEvent::HandshakeCaptured {
                aa: hs.aa,
                sa: hs.sa,
                ssid: hs.ssid.to_string(),
                t1: hs.source_ticks.0,
                t2: hs.source_ticks.1,
            },
        );
        if plan.evil_twin {
            self.spawn_evil_twin(&plan, &hs)?;
        }
        Ok(())
    }

    /// Brings up the rogue AP one tick from now, with the portal behind it.
    pub(crate) fn spawn_evil_twin(&mut self, plan: &AttackPlan, hs: &HandshakeCapture) -> Result<RogueApHandle, AttackError> {
        if hs.ssid != plan.target_ssid {
            return Err(AttackError::SsidMismatch { expected: plan.target_ssid.to_string(), found: hs.ssid.to_string() });
        }
        if let Some(rogue) = self.rogue() {
            return Ok(rogue);
        }
        let channel = self.target_channel(plan.target_bssid)?;
        let bssid = if plan.spoof_mac { plan.target_bssid } else { self.fresh_mac() };
        let (mode, passphrase) = match &plan.rogue_security {
            RogueSecurity::Open => (ApMode::Open, None),
            RogueSecurity::Wpa2Psk { decoy_passphrase } => (
                ApMode::Wpa2Only,
                Some(Passphrase::new(decoy_passphrase.clone()).map_err(|e| AttackError::Decoy(e.to_string()))?),
            ),
        };
        let mut config = ApConfig::new("rogue", plan.target_ssid.clone(), bssid, channel, mode, passphrase);
        config.pmf = PmfPolicy::Disabled;
        let start = self.now + 1;
        let ap = ApState::new(config, derive_seed(self.seed, "rogue"), start)?;

        let log = match &plan.password_log_path {
            Some(path) => PasswordLog::at(path),
            None => PasswordLog::in_memory(),
        };
        let portal_config = PortalConfig { language: plan.portal_language, ..PortalConfig::default() };
        self.portal = Some(CaptivePortal::new(portal_config, hs.clone(), log, start)?);

        let node = self.add_node(channel, Station::Ap(Box::new(ap))).map_err(AttackError::from)?;
        let handle = RogueApHandle { node, bssid, channel };
        if let Some(att) = self.attacker.as_mut() {
            att.rogue = Some(handle);
        }
        self.emit(
            self.now,
            SimEvent::RogueStarted { bssid, ssid: plan.target_ssid.to_string(), security: plan.rogue_security.label().into() },
        );
        Ok(handle)
    }

    fn fresh_mac(&self) -> MacAddr {
        let mut counter = 0u64;
        loop {
            let bytes = derive_seed(self.seed, &format!("rogue-mac:{counter}")).to_be_bytes();
            let mac = MacAddr::local_from(bytes[..6].try_into().expect("six bytes"));
            if self.nodes.iter().all(|n| n.mac() != mac) {
                return mac;
            }
            counter += 1;
        }
    }

    /// Logs the outcome of an offline crack run after the simulation.
    pub fn record_crack(&mut self, outcome: &CrackOutcome) {
        let event = SimEvent::Crack {
            candidates_tried: outcome.candidates_tried,
            found: outcome.found.clone(),
            elapsed_ms: outcome.elapsed.as_millis() as u64,
        };
        self.emit(self.now, event);
    }

    /// Ends the attack now, if one is running.
    pub fn stop_attack(&mut self, reason: &str) {
        let now = self.now;
        self.teardown(reason, now);
    }

    fn teardown(&mut self, reason: &str, now: Tick) {
        let Some(att) = self.attacker.as_mut() else {
            return;
        };
        let since = match att.phase {
            AttackPhase::Active { since } => since,
            AttackPhase::Pending => {
                att.phase = AttackPhase::Stopped;
                return;
            }
            AttackPhase::Stopped => return,
        };
        att.phase = AttackPhase::Stopped;
        let frames_injected = att.injected;
        let strategy = att.plan.deauth_strategy.label();
        let rogue = att.rogue;
        if let Some(r) = rogue {
            if let Some(Station::Ap(ap)) = self.nodes.get_mut(r.node.0).map(|n| &mut n.station) {
                ap.shut_down();
            }
        }
        for victim in &mut self.victims {
            victim.state.dismiss();
        }
        self.emit(now, SimEvent::AttackStopped { reason: reason.to_string(), frames_injected });
        let report = AttackReport::from_events(strategy, (since, now + 1), frames_injected, &self.events);
        self.log.push(LogRecord::AttackReport { tick: now, report: report.clone() });
        if let Some(att) = self.attacker.as_mut() {
            att.report = Some(report);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::Ssid;
    use crate::stations::{Capability, KnownNetwork};

    fn mac(last: u8) -> MacAddr {
        MacAddr::new([0x02, 0, 0, 0, 0, last])
    }

    fn world_with(mode: ApMode, capability: Capability) -> (World, NodeId, NodeId) {
        let mut world = World::new(7, 0.0);
        let ssid = Ssid::new("HomeNet").unwrap();
        let pass = Passphrase::new("correct horse").unwrap();
        let ap = world.add_ap(ApConfig::new("ap", ssid.clone(), mac(1), 6, mode, Some(pass.clone()))).unwrap();
        let known = KnownNetwork { ssid, passphrase: pass };
        let client = world.add_client(ClientConfig::new("sta", mac(2), 6, capability, known)).unwrap();
        (world, ap, client)
    }

    #[test]
    fn seeds_are_label_specific() {
        assert_ne!(derive_seed(1, "a"), derive_seed(1, "b"));
        assert_ne!(derive_seed(1, "a"), derive_seed(2, "a"));
        assert_eq!(derive_seed(1, "a"), derive_seed(1, "a"));
    }

    #[test]
    fn wpa2_client_connects_to_transition_ap() {
        let (mut world, ap, client) = world_with(ApMode::Transition, Capability::Wpa2Only);
        world.run_until(2_000).unwrap();
        assert!(world.client(client).unwrap().is_connected());
        assert!(world.ap(ap).unwrap().is_connected(mac(2)));
    }

    #[test]
    fn sae_client_connects_to_sae_only_ap() {
        let (mut world, _, client) = world_with(ApMode::SaeOnly, Capability::Wpa3Capable);
        world.run_until(2_000).unwrap();
        assert!(world.client(client).unwrap().is_connected());
    }

    #[test]
    fn log_lines_round_trip() {
        let (mut world, _, _) = world_with(ApMode::Transition, Capability::Wpa2Only);
        world.run_until(500).unwrap();
        assert!(!world.log().is_empty());
        for line in world.log_jsonl().lines() {
            let parsed: LogLine = serde_json::from_str(line).unwrap();
            assert_eq!(parsed.v, LOG_VERSION);
            assert_eq!(parsed.record.to_json_line(), line);
        }
    }

    #[test]
    fn passive_sniffer_fills_capture() {
        let (mut world, _, _) = world_with(ApMode::Transition, Capability::Wpa2Only);
        world.add_sniffer(6).unwrap();
        world.run_until(1_000).unwrap();
        let eapol = world.capture().iter().filter(|r| matches!(r.payload.frame().map(Frame::body), Some(FrameBody::EapolKey(_)))).count();
        assert_eq!(eapol, 4);
    }

    #[test]
    fn attack_on_unknown_bssid_is_refused() {
        let (mut world, _, _) = world_with(ApMode::Transition, Capability::Wpa2Only);
        let plan = AttackPlan::new(mac(9), Ssid::new("HomeNet").unwrap(), DeauthStrategy::AireplayDeauth);
        assert!(matches!(world.install_attack(plan), Err(AttackError::UnknownTarget(_))));
    }
}
