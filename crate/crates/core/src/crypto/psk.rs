//! WPA2-PSK key hierarchy: PBKDF2 passphrase hashing, pairwise key expansion
//! and the EAPOL-Key MIC.

use std::fmt;

use hmac::{Hmac, Mac};
use sha1::Sha1;

use super::CryptoError;
use crate::frames::MacAddr;

type HmacSha1 = Hmac<Sha1>;

pub const PBKDF2_ROUNDS: u32 = 4096;
const PTK_LABEL: &[u8] = b"Pairwise key expansion";

pub type Nonce = [u8; 32];

/// A WPA passphrase, 8 to 63 bytes of UTF-8.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Passphrase(String);

impl Passphrase {
    pub fn new(text: impl Into<String>) -> Result<Self, CryptoError> {
        let text = text.into();
        if !(8..=63).contains(&text.len()) {
            return Err(CryptoError::PassphraseLength(text.len()));
        }
        Ok(Self(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }
}

impl fmt::Debug for Passphrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Passphrase(<{} bytes>)", self.0.len())
    }
}

impl fmt::Display for Passphrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Pairwise master key.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Pmk(pub [u8; 32]);

impl fmt::Debug for Pmk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pmk({})", hex::encode(self.0))
    }
}

/// Pairwise transient key, split as KCK || KEK || TK.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ptk {
    pub kck: [u8; 16],
    pub kek: [u8; 16],
    pub tk: [u8; 16],
}

impl Ptk {
    pub fn to_bytes(&self) -> [u8; 48] {
        let mut out = [0u8; 48];
        out[..16].copy_from_slice(&self.kck);
        out[16..32].copy_from_slice(&self.kek);
        out[32..].copy_from_slice(&self.tk);
        out
    }
}

/// PMK = PBKDF2-HMAC-SHA1(passphrase, ssid, 4096, 32).
pub fn derive_pmk_psk(passphrase: &Passphrase, ssid: &[u8]) -> Result<Pmk, CryptoError> {
    if !(1..=32).contains(&ssid.len()) {
        return Err(CryptoError::SsidLength(ssid.len()));
    }
    let mut out = [0u8; 32];
    pbkdf2::pbkdf2_hmac::<Sha1>(passphrase.as_bytes(), ssid, PBKDF2_ROUNDS, &mut out);
    Ok(Pmk(out))
}

/// PRF-384 over min/max-ordered addresses and nonces, so the result does not
/// depend on which side is called the authenticator.
pub fn derive_ptk(pmk: &Pmk, aa: MacAddr, sa: MacAddr, anonce: &Nonce, snonce: &Nonce) -> Ptk {
    let (lo_mac, hi_mac) = if aa <= sa { (aa, sa) } else { (sa, aa) };
    let (lo_nonce, hi_nonce) = if anonce <= snonce { (anonce, snonce) } else { (snonce, anonce) };

    let mut data = [0u8; 76];
    data[..6].copy_from_slice(lo_mac.as_bytes());
    data[6..12].copy_from_slice(hi_mac.as_bytes());
    data[12..44].copy_from_slice(lo_nonce);
    data[44..].copy_from_slice(hi_nonce);

    let mut stream = [0u8; 60];
    for (i, block) in stream.chunks_mut(20).enumerate() {
        let mut mac = HmacSha1::new_from_slice(&pmk.0).expect("hmac accepts any key length");
        mac.update(PTK_LABEL);
        mac.update(&[0]);
        mac.update(&data);
        mac.update(&[i as u8]);
        block.copy_from_slice(&mac.finalize().into_bytes());
    }

    let mut ptk = Ptk { kck: [0; 16], kek: [0; 16], tk: [0; 16] };
    ptk.kck.copy_from_slice(&stream[..16]);
    ptk.kek.copy_from_slice(&stream[16..32]);
    ptk.tk.copy_from_slice(&stream[32..48]);
    ptk
}

/// EAPOL-Key descriptor versions. Only [`MicVersion::HmacSha1`] is implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MicVersion {
    HmacMd5,
    HmacSha1,
    AesCmac,
}

impl MicVersion {
    pub fn code(self) -> u8 {
        match self {
            MicVersion::HmacMd5 => 1,
            MicVersion::HmacSha1 => 2,
            MicVersion::AesCmac => 3,
        }
    }

    pub fn from_code(code: u8) -> Result<Self, CryptoError> {
        match code {
            1 => Ok(MicVersion::HmacMd5),
            2 => Ok(MicVersion::HmacSha1),
            3 => Ok(MicVersion::AesCmac),
            other => Err(CryptoError::UnsupportedMicVersion(other)),
        }
    }
}

/// HMAC-SHA1 over the EAPOL body (MIC slot zeroed), truncated to 16 bytes.
pub fn compute_mic(kck: &[u8; 16], eapol_body: &[u8], version: MicVersion) -> Result<[u8; 16], CryptoError> {
    match version {
        MicVersion::HmacSha1 => {
            let mut mac = HmacSha1::new_from_slice(kck).expect("hmac accepts any key length");
            mac.update(eapol_body);
            let digest = mac.finalize().into_bytes();
            let mut out = [0u8; 16];
            out.copy_from_slice(&digest[..16]);
            Ok(out)
        }
        other => Err(CryptoError::UnsupportedMicVersion(other.code())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mac(s: &str) -> MacAddr {
        s.parse().unwrap()
    }

    #[test]
    fn passphrase_bounds() {
        assert!(Passphrase::new("1234567").is_err());
        assert!(Passphrase::new("12345678").is_ok());
        assert!(Passphrase::new("a".repeat(63)).is_ok());
        assert_eq!(Passphrase::new("a".repeat(64)), Err(CryptoError::PassphraseLength(64)));
        assert_eq!(Passphrase::new("short"), Err(CryptoError::PassphraseLength(5)));
    }

    #[test]
    fn ssid_bounds() {
        let p = Passphrase::new("12345678").unwrap();
        assert_eq!(derive_pmk_psk(&p, b""), Err(CryptoError::SsidLength(0)));
        assert_eq!(derive_pmk_psk(&p, &[b'a'; 33]), Err(CryptoError::SsidLength(33)));
    }

    #[test]
    fn pmk_is_deterministic() {
        let p = Passphrase::new("12345678").unwrap();
        assert_eq!(derive_pmk_psk(&p, b"WPA3OpenWrt"), derive_pmk_psk(&p, b"WPA3OpenWrt"));
    }

    #[test]
    fn ptk_symmetric_under_role_swap() {
        let pmk = Pmk([7; 32]);
        let a = mac("B8:27:EB:6C:61:7A");
        let b = mac("02:42:AC:11:00:02");
        let n1 = [1u8; 32];
        let n2 = [2u8; 32];
        assert_eq!(derive_ptk(&pmk, a, b, &n1, &n2), derive_ptk(&pmk, b, a, &n2, &n1));
    }

    #[test]
    fn unsupported_mic_versions() {
        assert_eq!(
            compute_mic(&[0; 16], b"x", MicVersion::HmacMd5),
            Err(CryptoError::UnsupportedMicVersion(1))
        );
        assert_eq!(
            compute_mic(&[0; 16], b"x", MicVersion::AesCmac),
            Err(CryptoError::UnsupportedMicVersion(3))
        );
        assert!(MicVersion::from_code(9).is_err());
    }

    #[test]
    fn mic_flips_on_every_early_bit() {
        let kck = [0x5a; 16];
        let body: Vec<u8> = (0..95u8).collect();
        let base = compute_mic(&kck, &body, MicVersion::HmacSha1).unwrap();
        for bit in 0..64 {
            let mut flipped = body.clone();
            flipped[bit / 8] ^= 1 << (bit % 8);
            assert_ne!(compute_mic(&kck, &flipped, MicVersion::HmacSha1).unwrap(), base, "bit {bit}");
        }
    }
}
