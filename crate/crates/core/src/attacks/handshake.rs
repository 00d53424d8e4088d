//! Offline handshake material: extraction from a capture, verification of a
//! candidate passphrase, and the handshake file format.
//!
//! ```text
//! file := "WSHS1" aa[6] sa[6] ssid_len:u8 ssid anonce[32] snonce[32] mic[16]
//!         version:u8 t1:u64 t2:u64 body_len:u32 body
//! ```
//!
//! Integers are big-endian; `body` is EAPOL message 2 with its MIC zeroed.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use crate::crypto::{compute_mic, derive_pmk_psk, derive_ptk, MicVersion, Nonce, Passphrase};
use crate::frames::{Akm, Frame, FrameBody, MacAddr, Ssid};
use crate::medium::Tick;
use crate::stations::key_data_akm;

pub const HANDSHAKE_MAGIC: &[u8; 5] = b"WSHS1";

/// EAPOL messages 1 and 2 of one WPA2 handshake; enough to test a passphrase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HandshakeCapture {
    pub aa: MacAddr,
    pub sa: MacAddr,
    pub ssid: Ssid,
    pub anonce: Nonce,
    pub snonce: Nonce,
    pub msg2_body: Vec<u8>,
    pub mic: [u8; 16],
    pub version: MicVersion,
    pub source_ticks: (Tick, Tick),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerificationResult {
    Verified { passphrase: String },
    Rejected,
    Indeterminate { reason: String },
}

impl VerificationResult {
    pub fn is_verified(&self) -> bool {
        matches!(self, VerificationResult::Verified { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            VerificationResult::Verified { .. } => "Verified",
            VerificationResult::Rejected => "Rejected",
            VerificationResult::Indeterminate { .. } => "Indeterminate",
        }
    }
}

/// Finds the most recent msg1/msg2 pair for `ssid`.
///
/// A pair matches when msg2 travels from the supplicant back to the
/// authenticator that sent msg1 and echoes its replay counter. Handshakes
/// keyed from an SAE PMK are skipped since a passphrase alone cannot
/// reproduce them.
pub fn extract_handshake<'a, I>(capture: I, ssid: &Ssid) -> Option<HandshakeCapture>
where
    I: IntoIterator<Item = (Tick, &'a Frame)>,
    I::IntoIter: Clone,
{
    let frames = capture.into_iter();
    let mut networks: BTreeMap<MacAddr, &Ssid> = BTreeMap::new();
    for (_, frame) in frames.clone() {
        if let FrameBody::Beacon(info) | FrameBody::ProbeResp(info) = frame.body() {
            if info.akm_suites.psk {
                networks.insert(frame.bssid(), &info.ssid);
            }
        }
    }

    let mut msg1: BTreeMap<(MacAddr, MacAddr), (Tick, Nonce, u64)> = BTreeMap::new();
    let mut found = None;
    for (tick, frame) in frames {
        let FrameBody::EapolKey(key) = frame.body() else {
            continue;
        };
        match key.msg_no {
            1 => {
                msg1.insert((frame.src(), frame.dst()), (tick, key.nonce, key.replay_counter));
            }
            2 => {
                let (aa, sa) = (frame.dst(), frame.src());
                let Some(&(t1, anonce, replay)) = msg1.get(&(aa, sa)) else {
                    continue;
                };
                let Ok(version) = MicVersion::from_code(key.version) else {
                    continue;
                };
                if replay != key.replay_counter
                    || t1 >= tick
                    || networks.get(&aa) != Some(&ssid)
                    || key_data_akm(&key.key_data) == Some(Akm::Sae)
                    || key.mic == [0; 16]
                {
                    continue;
                }
                found = Some(HandshakeCapture {
                    aa,
                    sa,
                    ssid: ssid.clone(),
                    anonce,
                    snonce: key.nonce,
                    msg2_body: key.mic_input(),
                    mic: key.mic,
                    version,
                    source_ticks: (t1, tick),
                });
            }
            _ => {}
        }
    }
    found
}

/// Recomputes the msg2 MIC under `candidate` and compares.
pub fn verify_candidate(hs: &HandshakeCapture, candidate: &str) -> VerificationResult {
    let passphrase = match Passphrase::new(candidate) {
        Ok(p) => p,
        Err(e) => return VerificationResult::Indeterminate { reason: e.to_string() },
    };
    let pmk = match derive_pmk_psk(&passphrase, hs.ssid.as_bytes()) {
        Ok(pmk) => pmk,
        Err(e) => return VerificationResult::Indeterminate { reason: e.to_string() },
    };
    let ptk = derive_ptk(&pmk, hs.aa, hs.sa, &hs.anonce, &hs.snonce);
    match compute_mic(&ptk.kck, &hs.msg2_body, hs.version) {
        Ok(mic) if mic == hs.mic => VerificationResult::Verified { passphrase: candidate.to_string() },
        Ok(_) => VerificationResult::Rejected,
        Err(e) => VerificationResult::Indeterminate { reason: e.to_string() },
    }
}

#[derive(Debug, thiserror::Error)]
pub enum HandshakeFileError {
    #[error("handshake i/o: {0}")]
    Io(#[from] io::Error),
    #[error("not a handshake file (bad magic)")]
    BadMagic,
    #[error("handshake file truncated")]
    Truncated,
    #[error("invalid handshake: {0}")]
    Invalid(String),
}

impl HandshakeCapture {
    pub fn to_bytes(&self) -> Vec<u8> {
        let ssid = self.ssid.as_bytes();
        let mut out = Vec::with_capacity(5 + 12 + 1 + ssid.len() + 80 + 1 + 16 + 4 + self.msg2_body.len());
        out.extend_from_slice(HANDSHAKE_MAGIC);
        out.extend_from_slice(self.aa.as_bytes());
        out.extend_from_slice(self.sa.as_bytes());
        out.push(ssid.len() as u8);
        out.extend_from_slice(ssid);
        out.extend_from_slice(&self.anonce);
        out.extend_from_slice(&self.snonce);
        out.extend_from_slice(&self.mic);
        out.push(self.version.code());
        out.extend_from_slice(&self.source_ticks.0.to_be_bytes());
        out.extend_from_slice(&self.source_ticks.1.to_be_bytes());
        out.extend_from_slice(&(self.msg2_body.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.msg2_body);
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self, HandshakeFileError> {
        let rest = data.strip_prefix(HANDSHAKE_MAGIC.as_slice()).ok_or(HandshakeFileError::BadMagic)?;
        let mut r = Cursor(rest);
        let aa = MacAddr::new(r.array()?);
        let sa = MacAddr::new(r.array()?);
        let ssid_len = r.take(1)?[0] as usize;
        let ssid = String::from_utf8(r.take(ssid_len)?.to_vec())
            .map_err(|_| HandshakeFileError::Invalid("ssid is not UTF-8".into()))?;
        let ssid = Ssid::new(ssid).map_err(|e| HandshakeFileError::Invalid(e.to_string()))?;
        let anonce = r.array()?;
        let snonce = r.array()?;
        let mic: [u8; 16] = r.array()?;
        let version =
            MicVersion::from_code(r.take(1)?[0]).map_err(|e| HandshakeFileError::Invalid(e.to_string()))?;
        let t1 = u64::from_be_bytes(r.array()?);
        let t2 = u64::from_be_bytes(r.array()?);
        let body_len = u32::from_be_bytes(r.array()?) as usize;
        let msg2_body = r.take(body_len)?.to_vec();
        if !r.0.is_empty() {
            return Err(HandshakeFileError::Invalid("trailing bytes".into()));
        }
        if mic == [0; 16] {
            return Err(HandshakeFileError::Invalid("zero MIC".into()));
        }
        if t1 >= t2 {
            return Err(HandshakeFileError::Invalid("message 1 does not precede message 2".into()));
        }
        Ok(Self { aa, sa, ssid, anonce, snonce, msg2_body, mic, version, source_ticks: (t1, t2) })
    }
}

struct Cursor<'a>(&'a [u8]);

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], HandshakeFileError> {
        if self.0.len() < n {
            return Err(HandshakeFileError::Truncated);
        }
        let (head, tail) = self.0.split_at(n);
        self.0 = tail;
        Ok(head)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N], HandshakeFileError> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }
}

pub fn write_handshake(path: &Path, hs: &HandshakeCapture) -> Result<(), HandshakeFileError> {
    fs::write(path, hs.to_bytes())?;
    Ok(())
}

pub fn read_handshake(path: &Path) -> Result<HandshakeCapture, HandshakeFileError> {
    HandshakeCapture::from_bytes(&fs::read(path)?)
}
