use hmac::{Hmac, Mac};
use sha2::Sha256;

use crate::frames::MacAddr;
use crate::medium::Tick;

/// Stateless anti-clogging cookie bound to one station address.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnticlogToken {
    pub mac: MacAddr,
    pub tag: [u8; 32],
    pub issued_at: Tick,
}

fn token_mac(ap_secret: &[u8; 32], peer: MacAddr, issued_at: Tick) -> Hmac<Sha256> {
    let mut mac = Hmac::<Sha256>::new_from_slice(ap_secret).expect("hmac accepts any key length");
    mac.update(peer.as_bytes());
    mac.update(&issued_at.to_be_bytes());
    mac
}

pub fn make_anticlog_token(ap_secret: &[u8; 32], peer: MacAddr, now: Tick) -> AnticlogToken {
    let tag = token_mac(ap_secret, peer, now).finalize().into_bytes().into();
    AnticlogToken { mac: peer, tag, issued_at: now }
}

/// Valid iff issued under `ap_secret`, bound to `peer`, and no older than `ttl`.
pub fn verify_anticlog_token(ap_secret: &[u8; 32], token: &AnticlogToken, peer: MacAddr, now: Tick, ttl: Tick) -> bool {
    if token.mac != peer || now < token.issued_at || now - token.issued_at > ttl {
        return false;
    }
    token_mac(ap_secret, peer, token.issued_at).verify_slice(&token.tag).is_ok()
}
