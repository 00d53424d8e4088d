//! Attacker components that run inside the simulation loop.
//!
//! Each actor sees sniffed frames through `observe` and wakes on its own
//! timer; both return frames to inject, tagged with the tick to send them.

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;

use crate::crypto::{AnticlogToken, SaeCommit, SaeConfirm, SaeGroupElement, SaeScalar};
use crate::frames::{reason, Frame, FrameBody, MacAddr, StatusCode};
use crate::medium::{Tick, TICKS_PER_SECOND};

pub(crate) type Injection = (Frame, Tick);

fn forge(src: MacAddr, dst: MacAddr, bssid: MacAddr, channel: u8, body: FrameBody) -> Frame {
    Frame::plain(src, dst, bssid, channel, body).expect("attacker channel validated")
}

fn random_commit(rng: &mut ChaCha8Rng, token: Option<AnticlogToken>) -> SaeCommit {
    SaeCommit { scalar: SaeScalar::random(rng), element: SaeGroupElement::random(rng), token }
}

/// Unicast deauthentication, spoofed from the target AP, ten times a second.
pub(crate) struct DeauthActor {
    target: MacAddr,
    channel: u8,
    clients: BTreeSet<MacAddr>,
    next_burst: Tick,
}

impl DeauthActor {
    pub const INTERVAL: Tick = 100;

    pub fn new(target: MacAddr, channel: u8, start: Tick) -> Self {
        Self { target, channel, clients: BTreeSet::new(), next_burst: start }
    }

    pub fn next_wakeup(&self) -> Tick {
        self.next_burst
    }

    pub fn observe(&mut self, frame: &Frame) {
        if frame.bssid() != self.target {
            return;
        }
        if frame.src() == self.target && !frame.dst().is_broadcast() {
            self.clients.insert(frame.dst());
        } else if frame.dst() == self.target {
            self.clients.insert(frame.src());
        }
    }

    /// `spare` are clients that must not be hit, such as the rogue's own.
    pub fn on_timer(&mut self, now: Tick, spare: &BTreeSet<MacAddr>) -> Vec<Injection> {
        if now < self.next_burst {
            return Vec::new();
        }
        while self.next_burst <= now {
            self.next_burst += Self::INTERVAL;
        }
        let body = FrameBody::Deauth { reason: reason::CLASS3_FROM_NONASSOC, mmic: None };
        let victims: Vec<MacAddr> = self.clients.difference(spare).copied().collect();
        if victims.is_empty() && spare.is_empty() {
            return vec![(forge(self.target, MacAddr::BROADCAST, self.target, self.channel, body), now)];
        }
        victims.into_iter().map(|c| (forge(self.target, c, self.target, self.channel, body.clone()), now)).collect()
    }
}

/// Forged SAE commits from throwaway addresses, sent back to back at the
/// start of every second. Anti-clogging tokens are echoed from the address
/// they were issued to, and echoes count toward the rate.
pub(crate) struct CommitFlooder {
    target: MacAddr,
    channel: u8,
    rate: u32,
    next_second: Tick,
    forged: BTreeSet<MacAddr>,
    echoes: VecDeque<(MacAddr, AnticlogToken)>,
    rng: ChaCha8Rng,
}

impl CommitFlooder {
    pub fn new(target: MacAddr, channel: u8, rate: u32, start: Tick, rng: ChaCha8Rng) -> Self {
        let next_second = start.div_ceil(TICKS_PER_SECOND) * TICKS_PER_SECOND;
        Self { target, channel, rate, next_second, forged: BTreeSet::new(), echoes: VecDeque::new(), rng }
    }

    pub fn next_wakeup(&self) -> Tick {
        self.next_second
    }

    pub fn observe(&mut self, frame: &Frame) {
        if let FrameBody::SaeReject { status: StatusCode::ANTI_CLOGGING_TOKEN_REQUIRED, token: Some(token) } =
            frame.body()
        {
            if frame.src() == self.target && self.forged.contains(&frame.dst()) {
                self.echoes.push_back((frame.dst(), *token));
            }
        }
    }

    pub fn on_timer(&mut self, now: Tick) -> Vec<Injection> {
        if now < self.next_second {
            return Vec::new();
        }
        let start = self.next_second;
        self.next_second += TICKS_PER_SECOND;
        (0..self.rate as Tick)
            .map(|i| {
                let (src, token) = match self.echoes.pop_front() {
                    Some((mac, token)) => (mac, Some(token)),
                    None => {
                        let mut bytes = [0u8; 6];
                        self.rng.fill_bytes(&mut bytes);
                        let mac = MacAddr::local_from(bytes);
                        self.forged.insert(mac);
                        (mac, None)
                    }
                };
                let commit = random_commit(&mut self.rng, token);
                (forge(src, self.target, self.target, self.channel, FrameBody::SaeCommit(commit)), start + i)
            })
            .collect()
    }
}

/// Wins the confirm race: on every legitimate commit it opens its own SAE
/// exchange and sends a bogus confirm in the victim's name that lands one
/// slot ahead of the real one.
pub(crate) struct RaceActor {
    target: MacAddr,
    channel: u8,
    attacker: MacAddr,
    rng: ChaCha8Rng,
}

impl RaceActor {
    /// AP commit reaches the victim one tick after the victim's commit, and the
    /// victim's confirm goes out one tick after that.
    const CONFIRM_OFFSET: Tick = 2;

    pub fn new(target: MacAddr, channel: u8, attacker: MacAddr, rng: ChaCha8Rng) -> Self {
        Self { target, channel, attacker, rng }
    }

    pub fn observe(&mut self, tick: Tick, frame: &Frame) -> Vec<Injection> {
        let FrameBody::SaeCommit(_) = frame.body() else {
            return Vec::new();
        };
        let victim = frame.src();
        if frame.dst() != self.target || victim == self.target || victim == self.attacker {
            return Vec::new();
        }
        let own = random_commit(&mut self.rng, None);
        let bogus = SaeConfirm { send_confirm: 1, confirm_hash: self.rng.gen() };
        vec![
            (forge(self.attacker, self.target, self.target, self.channel, FrameBody::SaeCommit(own)), tick + 1),
            (forge(victim, self.target, self.target, self.channel, FrameBody::SaeConfirm(bogus)), tick + Self::CONFIRM_OFFSET),
        ]
    }
}
