//! Deterministic virtual radio.
//!
//! Pending transmissions are ordered by `(tick, sequence)`, with the sequence
//! number assigned at enqueue time. Two frames due on the same tick are
//! therefore delivered in the order they were handed to [`Medium::transmit`].

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::frames::Frame;

/// Simulated time in milliseconds.
pub type Tick = u64;

pub const TICKS_PER_SECOND: Tick = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EndpointId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SnifferHandle(usize);

/// What travels over the air: a well-formed frame, or bytes that do not decode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Frame(Frame),
    Raw(Vec<u8>),
}

impl Payload {
    pub fn frame(&self) -> Option<&Frame> {
        match self {
            Payload::Frame(f) => Some(f),
            Payload::Raw(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliveryEvent {
    pub tick: Tick,
    pub seq: u64,
    pub channel: u8,
    pub sender: Option<EndpointId>,
    pub receiver: EndpointId,
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MediumError {
    #[error("cannot schedule at tick {at}, clock is already at {now}")]
    InThePast { at: Tick, now: Tick },
    #[error("channel {0} outside 1..=14")]
    Channel(u8),
}

#[derive(Debug)]
struct Pending {
    sender: Option<EndpointId>,
    channel: u8,
    payload: Payload,
}

#[derive(Debug)]
struct Endpoint {
    channel: u8,
    attached: bool,
}

#[derive(Debug)]
struct Sniffer {
    channel: u8,
    owner: Option<EndpointId>,
    since: Tick,
    buffer: Vec<(Tick, Payload)>,
}

#[derive(Debug)]
pub struct Medium {
    clock: Tick,
    next_seq: u64,
    queue: BTreeMap<(Tick, u64), Pending>,
    endpoints: Vec<Endpoint>,
    sniffers: Vec<Sniffer>,
    rng: ChaCha8Rng,
    loss_rate: f64,
}

impl Medium {
    pub fn new(seed: u64, loss_rate: f64) -> Self {
        Self {
            clock: 0,
            next_seq: 0,
            queue: BTreeMap::new(),
            endpoints: Vec::new(),
            sniffers: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            loss_rate: loss_rate.clamp(0.0, 1.0),
        }
    }

    pub fn clock(&self) -> Tick {
        self.clock
    }

    pub fn loss_rate(&self) -> f64 {
        self.loss_rate
    }

    pub fn attach(&mut self, channel: u8) -> Result<EndpointId, MediumError> {
        check_channel(channel)?;
        self.endpoints.push(Endpoint { channel, attached: true });
        Ok(EndpointId(self.endpoints.len() - 1))
    }

    pub fn detach(&mut self, id: EndpointId) {
        if let Some(e) = self.endpoints.get_mut(id.0) {
            e.attached = false;
        }
    }

    pub fn retune(&mut self, id: EndpointId, channel: u8) -> Result<(), MediumError> {
        check_channel(channel)?;
        self.endpoints[id.0].channel = channel;
        Ok(())
    }

    pub fn channel_of(&self, id: EndpointId) -> u8 {
        self.endpoints[id.0].channel
    }

    /// A lossless monitor-mode tap. Frames sent by `owner` are not echoed back.
    pub fn attach_sniffer(&mut self, channel: u8, owner: Option<EndpointId>) -> Result<SnifferHandle, MediumError> {
        check_channel(channel)?;
        self.sniffers.push(Sniffer { channel, owner, since: self.clock, buffer: Vec::new() });
        Ok(SnifferHandle(self.sniffers.len() - 1))
    }

    pub fn drain_sniffer(&mut self, handle: SnifferHandle) -> Vec<(Tick, Payload)> {
        std::mem::take(&mut self.sniffers[handle.0].buffer)
    }

    /// Moves the clock forward without delivering anything.
    pub fn advance_to(&mut self, tick: Tick) {
        if tick > self.clock {
            self.clock = tick;
        }
    }

    pub fn transmit(&mut self, sender: Option<EndpointId>, frame: Frame, at: Tick) -> Result<(), MediumError> {
        let channel = frame.channel();
        self.enqueue(sender, channel, Payload::Frame(frame), at)
    }

    /// Puts undecodable bytes on the air, for fault injection.
    pub fn transmit_raw(&mut self, sender: Option<EndpointId>, channel: u8, bytes: Vec<u8>, at: Tick) -> Result<(), MediumError> {
        check_channel(channel)?;
        self.enqueue(sender, channel, Payload::Raw(bytes), at)
    }

    fn enqueue(&mut self, sender: Option<EndpointId>, channel: u8, payload: Payload, at: Tick) -> Result<(), MediumError> {
        if at < self.clock {
            return Err(MediumError::InThePast { at, now: self.clock });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.queue.insert((at, seq), Pending { sender, channel, payload });
        Ok(())
    }

    pub fn next_event_tick(&self) -> Option<Tick> {
        self.queue.keys().next().map(|(t, _)| *t)
    }

    pub fn is_idle(&self) -> bool {
        self.queue.is_empty()
    }

    /// Advances to the earliest pending tick and delivers everything due then.
    pub fn step(&mut self) -> Vec<DeliveryEvent> {
        let Some(tick) = self.next_event_tick() else {
            return Vec::new();
        };
        self.clock = self.clock.max(tick);

        let mut out = Vec::new();
        while let Some(entry) = self.queue.first_entry() {
            if entry.key().0 != tick {
                break;
            }
            let ((_, seq), pending) = entry.remove_entry();
            for sniffer in &mut self.sniffers {
                if sniffer.channel == pending.channel
                    && tick >= sniffer.since
                    && (sniffer.owner.is_none() || sniffer.owner != pending.sender)
                {
                    sniffer.buffer.push((tick, pending.payload.clone()));
                }
            }
            for (idx, endpoint) in self.endpoints.iter().enumerate() {
                let id = EndpointId(idx);
                if !endpoint.attached || endpoint.channel != pending.channel || Some(id) == pending.sender {
                    continue;
                }
                if self.loss_rate > 0.0 && self.rng.gen::<f64>() < self.loss_rate {
                    continue;
                }
                out.push(DeliveryEvent {
                    tick,
                    seq,
                    channel: pending.channel,
                    sender: pending.sender,
                    receiver: id,
                    payload: pending.payload.clone(),
                });
            }
        }
        out
    }
}

fn check_channel(channel: u8) -> Result<(), MediumError> {
    if (1..=14).contains(&channel) {
        Ok(())
    } else {
        Err(MediumError::Channel(channel))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{FrameBody, MacAddr};

    fn deauth(src: u8, channel: u8, reason: u16) -> Frame {
        let mac = MacAddr::new([2, 0, 0, 0, 0, src]);
        Frame::plain(mac, MacAddr::BROADCAST, mac, channel, FrameBody::Deauth { reason, mmic: None }).unwrap()
    }

    #[test]
    fn delivers_to_peers_and_sniffer_but_not_sender() {
        let mut m = Medium::new(1, 0.0);
        let a = m.attach(11).unwrap();
        let b = m.attach(11).unwrap();
        let s = m.attach_sniffer(11, None).unwrap();
        m.transmit(Some(a), deauth(1, 11, 1), 5).unwrap();
        let events = m.step();
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].receiver, b);
        assert_eq!(m.drain_sniffer(s).len(), 1);
    }

    #[test]
    fn other_channel_is_silent() {
        let mut m = Medium::new(1, 0.0);
        let a = m.attach(11).unwrap();
        let _c = m.attach(6).unwrap();
        m.transmit(Some(a), deauth(1, 11, 1), 0).unwrap();
        assert!(m.step().is_empty());
    }

    #[test]
    fn total_loss_still_reaches_sniffer() {
        let mut m = Medium::new(1, 1.0);
        let a = m.attach(11).unwrap();
        let _b = m.attach(11).unwrap();
        let s = m.attach_sniffer(11, None).unwrap();
        m.transmit(Some(a), deauth(1, 11, 1), 0).unwrap();
        assert!(m.step().is_empty());
        assert_eq!(m.drain_sniffer(s).len(), 1);
    }

    #[test]
    fn same_tick_in_enqueue_order() {
        let mut m = Medium::new(1, 0.0);
        let a = m.attach(11).unwrap();
        let _b = m.attach(11).unwrap();
        m.transmit(Some(a), deauth(1, 11, 100), 7).unwrap();
        m.transmit(Some(a), deauth(1, 11, 200), 7).unwrap();
        m.transmit(Some(a), deauth(1, 11, 50), 3).unwrap();
        let first = m.step();
        assert_eq!(m.clock(), 3);
        assert_eq!(first.len(), 1);
        let second = m.step();
        let reasons: Vec<u16> = second
            .iter()
            .map(|e| match e.payload.frame().unwrap().body() {
                FrameBody::Deauth { reason, .. } => *reason,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(reasons, vec![100, 200]);
    }

    #[test]
    fn empty_step_keeps_clock() {
        let mut m = Medium::new(1, 0.0);
        m.advance_to(40);
        assert!(m.step().is_empty());
        assert_eq!(m.clock(), 40);
    }

    #[test]
    fn rejects_the_past() {
        let mut m = Medium::new(1, 0.0);
        m.advance_to(10);
        assert_eq!(m.transmit(None, deauth(1, 11, 1), 9), Err(MediumError::InThePast { at: 9, now: 10 }));
    }

    #[test]
    fn late_sniffer_sees_only_later_frames() {
        let mut m = Medium::new(1, 0.0);
        let a = m.attach(11).unwrap();
        m.transmit(Some(a), deauth(1, 11, 1), 1).unwrap();
        m.step();
        let s = m.attach_sniffer(11, None).unwrap();
        m.transmit(Some(a), deauth(1, 11, 2), 2).unwrap();
        m.transmit_raw(Some(a), 11, vec![0xde, 0xad], 3).unwrap();
        m.step();
        m.step();
        let seen = m.drain_sniffer(s);
        assert_eq!(seen.len(), 2);
        assert_eq!(seen[1].1, Payload::Raw(vec![0xde, 0xad]));
    }

    #[test]
    fn same_seed_same_losses() {
        let run = || {
            let mut m = Medium::new(99, 0.5);
            let a = m.attach(11).unwrap();
            for _ in 0..4 {
                m.attach(11).unwrap();
            }
            for t in 0..50 {
                m.transmit(Some(a), deauth(1, 11, t as u16), t).unwrap();
            }
            let mut log = Vec::new();
            while !m.is_idle() {
                log.extend(m.step().into_iter().map(|e| (e.tick, e.receiver)));
            }
            log
        };
        assert_eq!(run(), run());
    }
}
