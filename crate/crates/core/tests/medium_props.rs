use std::collections::HashMap;

use proptest::prelude::*;
use wsim_core::frames::{Frame, FrameBody, MacAddr, Ssid};
use wsim_core::medium::{EndpointId, Medium};

fn probe(channel: u8, tag: u8) -> Frame {
    let src = MacAddr::new([2, 0, 0, 0, 0, tag]);
    Frame::plain(src, MacAddr::BROADCAST, MacAddr::BROADCAST, channel, FrameBody::ProbeReq { ssid: Ssid::new("").unwrap() })
        .unwrap()
}

#[derive(Debug, Clone)]
struct Tx {
    sender: usize,
    channel: u8,
    delay: u64,
}

fn plan() -> impl Strategy<Value = (Vec<u8>, Vec<Tx>)> {
    proptest::collection::vec(1u8..=3, 1..6).prop_flat_map(|endpoints| {
        let n = endpoints.len();
        let txs = proptest::collection::vec(
            (0..n, 1u8..=3, 0u64..20).prop_map(|(sender, channel, delay)| Tx { sender, channel, delay }),
            0..60,
        );
        (Just(endpoints), txs)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lossless_medium_conserves_deliveries((channels, txs) in plan(), seed in any::<u64>()) {
        let mut medium = Medium::new(seed, 0.0);
        let ids: Vec<EndpointId> = channels.iter().map(|&c| medium.attach(c).unwrap()).collect();
        let sniffers: Vec<_> = (1..=3).map(|c| (c, medium.attach_sniffer(c, None).unwrap())).collect();
        let mut expected = 0usize;
        for (i, tx) in txs.iter().enumerate() {
            let sender = ids[tx.sender];
            expected += channels.iter().enumerate().filter(|(j, &c)| *j != tx.sender && c == tx.channel).count();
            medium.transmit(Some(sender), probe(tx.channel, i as u8), tx.delay).unwrap();
        }

        let mut delivered = 0;
        let mut per_receiver_channel: HashMap<(usize, u8), usize> = HashMap::new();
        let mut last = (0, 0);
        while !medium.is_idle() {
            let before = medium.clock();
            let batch = medium.step();
            prop_assert!(medium.clock() >= before);
            for d in &batch {
                prop_assert!((d.tick, d.seq) >= last, "out of order delivery");
                last = (d.tick, d.seq);
                prop_assert_eq!(d.channel, channels[d.receiver.0]);
                prop_assert_ne!(Some(d.receiver), d.sender);
                *per_receiver_channel.entry((d.receiver.0, d.channel)).or_default() += 1;
            }
            delivered += batch.len();
        }
        prop_assert_eq!(delivered, expected);

        for (channel, handle) in sniffers {
            let seen = medium.drain_sniffer(handle).len();
            prop_assert_eq!(seen, txs.iter().filter(|t| t.channel == channel).count());
            for ((_, c), n) in &per_receiver_channel {
                if *c == channel {
                    prop_assert!(seen >= *n);
                }
            }
        }
    }

    #[test]
    fn lossy_medium_is_seed_deterministic((channels, txs) in plan(), seed in any::<u64>()) {
        let run = || {
            let mut medium = Medium::new(seed, 0.3);
            let ids: Vec<EndpointId> = channels.iter().map(|&c| medium.attach(c).unwrap()).collect();
            for (i, tx) in txs.iter().enumerate() {
                medium.transmit(Some(ids[tx.sender]), probe(tx.channel, i as u8), tx.delay).unwrap();
            }
            let mut out = Vec::new();
            while !medium.is_idle() {
                out.extend(medium.step().into_iter().map(|d| (d.tick, d.seq, d.receiver)));
            }
            out
        };
        prop_assert_eq!(run(), run());
    }
}

#[test]
fn same_tick_frames_arrive_in_enqueue_order() {
    let mut medium = Medium::new(0, 0.0);
    let a = medium.attach(6).unwrap();
    let b = medium.attach(6).unwrap();
    let rx = medium.attach(6).unwrap();
    medium.transmit(Some(b), probe(6, 2), 5).unwrap();
    medium.transmit(Some(a), probe(6, 1), 5).unwrap();
    let order: Vec<_> = medium.step().into_iter().filter(|d| d.receiver == rx).map(|d| d.sender).collect();
    assert_eq!(order, vec![Some(b), Some(a)]);
}

#[test]
fn owned_sniffer_skips_its_own_transmissions() {
    let mut medium = Medium::new(0, 0.0);
    let me = medium.attach(1).unwrap();
    let other = medium.attach(1).unwrap();
    let tap = medium.attach_sniffer(1, Some(me)).unwrap();
    medium.transmit(Some(me), probe(1, 1), 0).unwrap();
    medium.transmit(Some(other), probe(1, 2), 0).unwrap();
    medium.step();
    let seen = medium.drain_sniffer(tap);
    assert_eq!(seen.len(), 1);
    assert_eq!(seen[0].1.frame().unwrap().src(), MacAddr::new([2, 0, 0, 0, 0, 2]));
}

#[test]
fn scheduling_in_the_past_fails() {
    let mut medium = Medium::new(0, 0.0);
    let a = medium.attach(1).unwrap();
    medium.advance_to(10);
    assert!(medium.transmit(Some(a), probe(1, 1), 9).is_err());
    assert!(medium.attach(15).is_err());
}
