//! Simulated 802.11 frames and their wire encoding.
//!
//! The encoding is this crate's own compact format, not the IEEE bit layout:
//!
//! ```text
//! frame  := src[6] dst[6] bssid[6] channel:u8 flags:u8 tag:u8 body
//! flags  := bit 0 = protected (management frame protection applied)
//! ```
//!
//! All integers are big-endian and variable-length fields carry a length
//! prefix. Decoding is strict (unknown bits, trailing bytes and invariant
//! violations are rejected) so the encoding is canonical: two frames are equal
//! exactly when their encodings are.

mod capture;
mod mac;

pub use capture::{read_capture, write_capture, CaptureError, CaptureFile, CaptureRecord, CAPTURE_MAGIC};
pub use mac::{MacAddr, ParseMacError};

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::crypto::{AnticlogToken, Nonce, SaeCommit, SaeConfirm, SaeGroupElement, SaeScalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrameError {
    #[error("channel {0} outside 1..=14")]
    Channel(u8),
    #[error("ssid is {0} bytes, at most 32 allowed")]
    SsidTooLong(usize),
    #[error("only deauthentication frames may be protected")]
    ProtectedBody,
    #[error("protected flag and management MIC disagree")]
    ProtectionMismatch,
    #[error("EAPOL-Key message number {0} outside 1..=4")]
    EapolMsgNo(u8),
    #[error("EAPOL-Key message {0} has an invalid MIC slot")]
    EapolMic(u8),
    #[error("key data is {0} bytes, at most 65535 allowed")]
    KeyDataTooLong(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed frame at offset {offset}: {description}")]
pub struct MalformedFrame {
    pub offset: usize,
    pub description: String,
}

/// Network name, at most 32 bytes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
#[serde(transparent)]
pub struct Ssid(String);

impl Ssid {
    pub fn new(name: impl Into<String>) -> Result<Self, FrameError> {
        let name = name.into();
        if name.len() > 32 {
            return Err(FrameError::SsidTooLong(name.len()));
        }
        Ok(Self(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }
}

impl fmt::Display for Ssid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Ssid {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ssid::new(String::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PmfPolicy {
    Disabled,
    Optional,
    Required,
}

impl PmfPolicy {
    fn code(self) -> u8 {
        match self {
            PmfPolicy::Disabled => 0,
            PmfPolicy::Optional => 1,
            PmfPolicy::Required => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Akm {
    Psk,
    Sae,
}

/// Advertised AKM suites. Empty means an open network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AkmSet {
    pub psk: bool,
    pub sae: bool,
}

impl AkmSet {
    pub const OPEN: AkmSet = AkmSet { psk: false, sae: false };
    pub const PSK: AkmSet = AkmSet { psk: true, sae: false };
    pub const SAE: AkmSet = AkmSet { psk: false, sae: true };
    pub const TRANSITION: AkmSet = AkmSet { psk: true, sae: true };

    pub fn is_open(&self) -> bool {
        !self.psk && !self.sae
    }

    pub fn contains(&self, akm: Akm) -> bool {
        match akm {
            Akm::Psk => self.psk,
            Akm::Sae => self.sae,
        }
    }

    fn bits(self) -> u8 {
        self.psk as u8 | (self.sae as u8) << 1
    }

    pub fn label(&self) -> &'static str {
        match (self.psk, self.sae) {
            (false, false) => "OPEN",
            (true, false) => "WPA2",
            (false, true) => "WPA3",
            (true, true) => "WPA2/WPA3",
        }
    }
}

/// 802.11 status code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StatusCode(pub u16);

impl StatusCode {
    pub const SUCCESS: StatusCode = StatusCode(0);
    /// 0x0001, "Unspecified Failure".
    pub const UNSPECIFIED_FAILURE: StatusCode = StatusCode(0x0001);
    pub const INVALID_AKMP: StatusCode = StatusCode(43);
    pub const ANTI_CLOGGING_TOKEN_REQUIRED: StatusCode = StatusCode(76);
}

pub mod reason {
    pub const UNSPECIFIED: u16 = 1;
    pub const LEAVING: u16 = 3;
    pub const CLASS3_FROM_NONASSOC: u16 = 7;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkInfo {
    pub ssid: Ssid,
    pub akm_suites: AkmSet,
    pub pmf: PmfPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EapolKey {
    pub version: u8,
    pub msg_no: u8,
    pub replay_counter: u64,
    /// ANonce in messages 1 and 3, SNonce in message 2, zero in message 4.
    pub nonce: Nonce,
    pub mic: [u8; 16],
    pub key_data: Vec<u8>,
}

impl EapolKey {
    /// Encoded body with the MIC slot zeroed; this is what the MIC covers.
    pub fn mic_input(&self) -> Vec<u8> {
        let mut zeroed = self.clone();
        zeroed.mic = [0; 16];
        let mut w = Writer::default();
        w.u8(TAG_EAPOL);
        zeroed.encode_fields(&mut w);
        w.0
    }

    fn encode_fields(&self, w: &mut Writer) {
        w.u8(self.version);
        w.u8(self.msg_no);
        w.u64(self.replay_counter);
        w.bytes(&self.nonce);
        w.bytes(&self.mic);
        w.u16(self.key_data.len() as u16);
        w.bytes(&self.key_data);
    }

    fn validate(&self) -> Result<(), FrameError> {
        if !(1..=4).contains(&self.msg_no) {
            return Err(FrameError::EapolMsgNo(self.msg_no));
        }
        let zero = self.mic == [0; 16];
        if (self.msg_no == 1) != zero {
            return Err(FrameError::EapolMic(self.msg_no));
        }
        if self.key_data.len() > u16::MAX as usize {
            return Err(FrameError::KeyDataTooLong(self.key_data.len()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrameBody {
    Beacon(NetworkInfo),
    /// Empty ssid is a wildcard probe.
    ProbeReq { ssid: Ssid },
    ProbeResp(NetworkInfo),
    SaeCommit(SaeCommit),
    SaeConfirm(SaeConfirm),
    SaeReject { status: StatusCode, token: Option<AnticlogToken> },
    /// `akm: None` requests open-system association.
    AssocReq { akm: Option<Akm>, pmf_capable: bool },
    AssocResp { status: StatusCode },
    /// `mmic` is present exactly when the enclosing frame is protected.
    Deauth { reason: u16, mmic: Option<[u8; 16]> },
    EapolKey(EapolKey),
}

const TAG_BEACON: u8 = 0x01;
const TAG_PROBE_REQ: u8 = 0x02;
const TAG_PROBE_RESP: u8 = 0x03;
const TAG_SAE_COMMIT: u8 = 0x04;
const TAG_SAE_CONFIRM: u8 = 0x05;
const TAG_SAE_REJECT: u8 = 0x06;
const TAG_ASSOC_REQ: u8 = 0x07;
const TAG_ASSOC_RESP: u8 = 0x08;
const TAG_DEAUTH: u8 = 0x09;
const TAG_EAPOL: u8 = 0x0a;

impl FrameBody {
    pub fn kind(&self) -> &'static str {
        match self {
            FrameBody::Beacon(_) => "beacon",
            FrameBody::ProbeReq { .. } => "probe_req",
            FrameBody::ProbeResp(_) => "probe_resp",
            FrameBody::SaeCommit(_) => "sae_commit",
            FrameBody::SaeConfirm(_) => "sae_confirm",
            FrameBody::SaeReject { .. } => "sae_reject",
            FrameBody::AssocReq { .. } => "assoc_req",
            FrameBody::AssocResp { .. } => "assoc_resp",
            FrameBody::Deauth { .. } => "deauth",
            FrameBody::EapolKey(_) => "eapol_key",
        }
    }

    /// Short machine-readable summary for event logs.
    pub fn summary(&self) -> serde_json::Value {
        match self {
            FrameBody::Beacon(n) | FrameBody::ProbeResp(n) => {
                json!({"ssid": n.ssid.as_str(), "security": n.akm_suites.label(), "pmf": n.pmf})
            }
            FrameBody::ProbeReq { ssid } => json!({"ssid": ssid.as_str()}),
            FrameBody::SaeCommit(c) => json!({"token": c.token.is_some()}),
            FrameBody::SaeConfirm(c) => json!({"send_confirm": c.send_confirm}),
            FrameBody::SaeReject { status, token } => json!({"status": status.0, "token": token.is_some()}),
            FrameBody::AssocReq { akm, pmf_capable } => json!({"akm": akm, "pmf_capable": pmf_capable}),
            FrameBody::AssocResp { status } => json!({"status": status.0}),
            FrameBody::Deauth { reason, mmic } => json!({"reason": reason, "mmic": mmic.is_some()}),
            FrameBody::EapolKey(k) => json!({"msg": k.msg_no, "replay": k.replay_counter}),
        }
    }
}

/// A frame whose invariants have been checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    src: MacAddr,
    dst: MacAddr,
    bssid: MacAddr,
    channel: u8,
    protected: bool,
    body: FrameBody,
}

impl Frame {
    pub fn new(
        src: MacAddr,
        dst: MacAddr,
        bssid: MacAddr,
        channel: u8,
        protected: bool,
        body: FrameBody,
    ) -> Result<Self, FrameError> {
        if !(1..=14).contains(&channel) {
            return Err(FrameError::Channel(channel));
        }
        match &body {
            FrameBody::Deauth { mmic, .. } => {
                if mmic.is_some() != protected {
                    return Err(FrameError::ProtectionMismatch);
                }
            }
            _ if protected => return Err(FrameError::ProtectedBody),
            FrameBody::EapolKey(k) => k.validate()?,
            _ => {}
        }
        Ok(Self { src, dst, bssid, channel, protected, body })
    }

    /// Shorthand for an unprotected frame.
    pub fn plain(src: MacAddr, dst: MacAddr, bssid: MacAddr, channel: u8, body: FrameBody) -> Result<Self, FrameError> {
        Self::new(src, dst, bssid, channel, false, body)
    }

    pub fn src(&self) -> MacAddr {
        self.src
    }
    pub fn dst(&self) -> MacAddr {
        self.dst
    }
    pub fn bssid(&self) -> MacAddr {
        self.bssid
    }
    pub fn channel(&self) -> u8 {
        self.channel
    }
    pub fn protected(&self) -> bool {
        self.protected
    }
    pub fn body(&self) -> &FrameBody {
        &self.body
    }
    pub fn into_body(self) -> FrameBody {
        self.body
    }
}

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u16(&mut self, v: u16) {
        self.0.extend_from_slice(&v.to_be_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_be_bytes());
    }
    fn bytes(&mut self, v: &[u8]) {
        self.0.extend_from_slice(v);
    }
    fn mac(&mut self, m: MacAddr) {
        self.bytes(m.as_bytes());
    }
    fn ssid(&mut self, s: &Ssid) {
        self.u8(s.as_bytes().len() as u8);
        self.bytes(s.as_bytes());
    }
    fn network(&mut self, n: &NetworkInfo) {
        self.ssid(&n.ssid);
        self.u8(n.akm_suites.bits());
        self.u8(n.pmf.code());
    }
    fn token(&mut self, t: &Option<AnticlogToken>) {
        match t {
            None => self.u8(0),
            Some(t) => {
                self.u8(1);
                self.mac(t.mac);
                self.bytes(&t.tag);
                self.u64(t.issued_at);
            }
        }
    }
}

pub fn encode_frame(frame: &Frame) -> Vec<u8> {
    let mut w = Writer::default();
    w.mac(frame.src);
    w.mac(frame.dst);
    w.mac(frame.bssid);
    w.u8(frame.channel);
    w.u8(frame.protected as u8);
    match &frame.body {
        FrameBody::Beacon(n) => {
            w.u8(TAG_BEACON);
            w.network(n);
        }
        FrameBody::ProbeReq { ssid } => {
            w.u8(TAG_PROBE_REQ);
            w.ssid(ssid);
        }
        FrameBody::ProbeResp(n) => {
            w.u8(TAG_PROBE_RESP);
            w.network(n);
        }
        FrameBody::SaeCommit(c) => {
            w.u8(TAG_SAE_COMMIT);
            w.bytes(&c.scalar.to_bytes());
            w.bytes(&c.element.to_bytes());
            w.token(&c.token);
        }
        FrameBody::SaeConfirm(c) => {
            w.u8(TAG_SAE_CONFIRM);
            w.u16(c.send_confirm);
            w.bytes(&c.confirm_hash);
        }
        FrameBody::SaeReject { status, token } => {
            w.u8(TAG_SAE_REJECT);
            w.u16(status.0);
            w.token(token);
        }
        FrameBody::AssocReq { akm, pmf_capable } => {
            w.u8(TAG_ASSOC_REQ);
            w.u8(match akm {
                None => 0,
                Some(Akm::Psk) => 1,
                Some(Akm::Sae) => 2,
            });
            w.u8(*pmf_capable as u8);
        }
        FrameBody::AssocResp { status } => {
            w.u8(TAG_ASSOC_RESP);
            w.u16(status.0);
        }
        FrameBody::Deauth { reason, mmic } => {
            w.u8(TAG_DEAUTH);
            w.u16(*reason);
            if let Some(m) = mmic {
                w.bytes(m);
            }
        }
        FrameBody::EapolKey(k) => {
            w.u8(TAG_EAPOL);
            k.encode_fields(&mut w);
        }
    }
    w.0
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, description: impl Into<String>) -> MalformedFrame {
        MalformedFrame { offset: self.pos, description: description.into() }
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], MalformedFrame> {
        if self.buf.len() - self.pos < n {
            return Err(self.err(format!("truncated {what}")));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn array<const N: usize>(&mut self, what: &str) -> Result<[u8; N], MalformedFrame> {
        Ok(self.take(N, what)?.try_into().unwrap())
    }

    fn u8(&mut self, what: &str) -> Result<u8, MalformedFrame> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16, MalformedFrame> {
        Ok(u16::from_be_bytes(self.array(what)?))
    }

    fn u64(&mut self, what: &str) -> Result<u64, MalformedFrame> {
        Ok(u64::from_be_bytes(self.array(what)?))
    }

    fn flag(&mut self, what: &str) -> Result<bool, MalformedFrame> {
        let at = self.pos;
        match self.u8(what)? {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(MalformedFrame { offset: at, description: format!("{what} flag {v:#04x}") }),
        }
    }

    fn mac(&mut self, what: &str) -> Result<MacAddr, MalformedFrame> {
        Ok(MacAddr::new(self.array(what)?))
    }

    fn ssid(&mut self) -> Result<Ssid, MalformedFrame> {
        let at = self.pos;
        let len = self.u8("ssid length")? as usize;
        if len > 32 {
            return Err(MalformedFrame { offset: at, description: format!("ssid length {len}") });
        }
        let raw = self.take(len, "ssid")?;
        let text = std::str::from_utf8(raw).map_err(|_| MalformedFrame { offset: at + 1, description: "ssid is not UTF-8".into() })?;
        Ok(Ssid(text.to_string()))
    }

    fn network(&mut self) -> Result<NetworkInfo, MalformedFrame> {
        let ssid = self.ssid()?;
        let at = self.pos;
        let bits = self.u8("akm suites")?;
        if bits & !0b11 != 0 {
            return Err(MalformedFrame { offset: at, description: format!("unknown akm bits {bits:#04x}") });
        }
        let akm_suites = AkmSet { psk: bits & 1 != 0, sae: bits & 2 != 0 };
        let at = self.pos;
        let pmf = match self.u8("pmf policy")? {
            0 => PmfPolicy::Disabled,
            1 => PmfPolicy::Optional,
            2 => PmfPolicy::Required,
            v => return Err(MalformedFrame { offset: at, description: format!("pmf policy {v}") }),
        };
        Ok(NetworkInfo { ssid, akm_suites, pmf })
    }

    fn token(&mut self) -> Result<Option<AnticlogToken>, MalformedFrame> {
        if !self.flag("token")? {
            return Ok(None);
        }
        let mac = self.mac("token address")?;
        let tag = self.array("token tag")?;
        let issued_at = self.u64("token tick")?;
        Ok(Some(AnticlogToken { mac, tag, issued_at }))
    }
}

pub fn decode_frame(bytes: &[u8]) -> Result<Frame, MalformedFrame> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let src = r.mac("src")?;
    let dst = r.mac("dst")?;
    let bssid = r.mac("bssid")?;
    let channel = r.u8("channel")?;
    let flags_at = r.pos;
    let flags = r.u8("flags")?;
    if flags & !1 != 0 {
        return Err(MalformedFrame { offset: flags_at, description: format!("unknown flag bits {flags:#04x}") });
    }
    let protected = flags & 1 != 0;
    let tag_at = r.pos;
    let tag = r.u8("body tag")?;
    let body = match tag {
        TAG_BEACON => FrameBody::Beacon(r.network()?),
        TAG_PROBE_REQ => FrameBody::ProbeReq { ssid: r.ssid()? },
        TAG_PROBE_RESP => FrameBody::ProbeResp(r.network()?),
        TAG_SAE_COMMIT => {
            let at = r.pos;
            let scalar = SaeScalar::from_bytes(&r.array("commit scalar")?)
                .ok_or_else(|| MalformedFrame { offset: at, description: "commit scalar not reduced".into() })?;
            let at = r.pos;
            let element = SaeGroupElement::from_bytes(&r.array("commit element")?)
                .map_err(|_| MalformedFrame { offset: at, description: "commit element off curve".into() })?;
            let token = r.token()?;
            FrameBody::SaeCommit(SaeCommit { scalar, element, token })
        }
        TAG_SAE_CONFIRM => {
            let send_confirm = r.u16("send-confirm")?;
            let confirm_hash = r.array("confirm hash")?;
            FrameBody::SaeConfirm(SaeConfirm { send_confirm, confirm_hash })
        }
        TAG_SAE_REJECT => {
            let status = StatusCode(r.u16("status")?);
            let token = r.token()?;
            FrameBody::SaeReject { status, token }
        }
        TAG_ASSOC_REQ => {
            let at = r.pos;
            let akm = match r.u8("akm")? {
                0 => None,
                1 => Some(Akm::Psk),
                2 => Some(Akm::Sae),
                v => return Err(MalformedFrame { offset: at, description: format!("akm {v}") }),
            };
            let pmf_capable = r.flag("pmf capable")?;
            FrameBody::AssocReq { akm, pmf_capable }
        }
        TAG_ASSOC_RESP => FrameBody::AssocResp { status: StatusCode(r.u16("status")?) },
        TAG_DEAUTH => {
            let reason = r.u16("reason")?;
            let mmic = if protected { Some(r.array("management mic")?) } else { None };
            FrameBody::Deauth { reason, mmic }
        }
        TAG_EAPOL => {
            let version = r.u8("key version")?;
            let msg_no = r.u8("message number")?;
            let replay_counter = r.u64("replay counter")?;
            let nonce = r.array("nonce")?;
            let mic = r.array("mic")?;
            let len = r.u16("key data length")? as usize;
            let key_data = r.take(len, "key data")?.to_vec();
            FrameBody::EapolKey(EapolKey { version, msg_no, replay_counter, nonce, mic, key_data })
        }
        other => {
            return Err(MalformedFrame { offset: tag_at, description: format!("unknown body tag {other:#04x}") })
        }
    };
    if r.pos != bytes.len() {
        return Err(r.err(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    Frame::new(src, dst, bssid, channel, protected, body).map_err(|e| MalformedFrame { offset: 0, description: e.to_string() })
}
