//! Dragonfly (SAE) over the NIST P-256 group.
//!
//! The password element is found by hunting-and-pecking with a fixed number
//! of iterations; every iteration runs even after a valid element is found.

use std::fmt;

use hmac::{Hmac, Mac};
use p256::elliptic_curve::ff::{Field, PrimeField};
use p256::elliptic_curve::group::Group;
use p256::elliptic_curve::point::DecompressPoint;
use p256::elliptic_curve::sec1::{FromEncodedPoint, ToEncodedPoint};
use p256::elliptic_curve::subtle::Choice;
use p256::{AffinePoint, EncodedPoint, FieldBytes, ProjectivePoint, Scalar};
use rand::RngCore;
use sha2::Sha256;
use subtle::ConstantTimeEq;

use super::{AnticlogToken, CryptoError, Passphrase, Pmk};
use crate::frames::MacAddr;

type HmacSha256 = Hmac<Sha256>;

/// Hunting-and-pecking loop count.
pub const PWE_ITERATIONS: u32 = 40;

const P256_PRIME: [u8; 32] = [
    0xff, 0xff, 0xff, 0xff, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
    0x00, 0x00, 0x00, 0x00, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff,
];

fn field_bytes(bytes: &[u8]) -> FieldBytes {
    let array: [u8; 32] = bytes.try_into().expect("32-byte field element");
    array.into()
}

/// A non-identity point of the group.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct SaeGroupElement(AffinePoint);

impl SaeGroupElement {
    /// Parses `x || y` (32 bytes each, big-endian). Rejects points off the curve.
    pub fn from_bytes(bytes: &[u8; 64]) -> Result<Self, CryptoError> {
        let encoded = EncodedPoint::from_affine_coordinates(
            &field_bytes(&bytes[..32]),
            &field_bytes(&bytes[32..]),
            false,
        );
        Option::<AffinePoint>::from(AffinePoint::from_encoded_point(&encoded))
            .map(Self)
            .ok_or(CryptoError::InvalidPeerElement)
    }

    fn from_projective(point: ProjectivePoint) -> Option<Self> {
        if bool::from(point.is_identity()) {
            None
        } else {
            Some(Self(point.to_affine()))
        }
    }

    pub fn to_bytes(&self) -> [u8; 64] {
        let encoded = self.0.to_encoded_point(false);
        let mut out = [0u8; 64];
        out[..32].copy_from_slice(encoded.x().expect("non-identity"));
        out[32..].copy_from_slice(encoded.y().expect("uncompressed"));
        out
    }

    pub fn x_bytes(&self) -> [u8; 32] {
        let mut out = [0u8; 32];
        out.copy_from_slice(&self.to_bytes()[..32]);
        out
    }

    fn projective(&self) -> ProjectivePoint {
        ProjectivePoint::from(self.0)
    }

    /// A uniformly random group element, unrelated to any password.
    pub fn random<R: RngCore>(rng: &mut R) -> Self {
        loop {
            if let Some(e) = Self::from_projective(ProjectivePoint::GENERATOR * Scalar::random(&mut *rng)) {
                return e;
            }
        }
    }
}

impl fmt::Debug for SaeGroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bytes = self.to_bytes();
        write!(f, "SaeGroupElement(x={}..)", hex::encode(&bytes[..6]))
    }
}

/// An integer modulo the group order.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct SaeScalar(Scalar);

impl SaeScalar {
    /// Big-endian parse; values `>= q` are rejected.
    pub fn from_bytes(bytes: &[u8; 32]) -> Option<Self> {
        Option::<Scalar>::from(Scalar::from_repr(field_bytes(bytes))).map(Self)
    }

    pub fn to_bytes(&self) -> [u8; 32] {
        self.0.to_repr().into()
    }

    /// True for scalars in `[2, q-1]`.
    /// A random scalar in `[2, q-1]`.
    pub fn random<R: RngCore>(rng: &mut R) -> Self {
        Self(random_commit_scalar(rng))
    }

    pub fn in_commit_range(&self) -> bool {
        !(bool::from(self.0.is_zero()) || self.0 == Scalar::ONE)
    }
}

impl fmt::Debug for SaeScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SaeScalar({})", hex::encode(self.to_bytes()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaeCommit {
    pub scalar: SaeScalar,
    pub element: SaeGroupElement,
    pub token: Option<AnticlogToken>,
}

impl SaeCommit {
    /// Same scalar and element, ignoring any attached token.
    pub fn same_exchange(&self, other: &SaeCommit) -> bool {
        self.scalar == other.scalar && self.element == other.element
    }
}

/// The per-exchange secrets behind a commit.
#[derive(Clone)]
pub struct SaeSecret {
    rand: Scalar,
    mask: Scalar,
}

impl SaeSecret {
    /// Builds a secret from explicit values; used to replay fixed vectors.
    pub fn from_parts(rand: SaeScalar, mask: SaeScalar) -> Self {
        Self { rand: rand.0, mask: mask.0 }
    }

    /// The commit this secret produces for `pwe`, or `None` if the scalar
    /// falls outside `[2, q-1]`.
    pub fn commit(&self, pwe: &SaeGroupElement) -> Option<SaeCommit> {
        let scalar = SaeScalar(self.rand + self.mask);
        if !scalar.in_commit_range() {
            return None;
        }
        let element = SaeGroupElement::from_projective(-(pwe.projective() * self.mask))?;
        Some(SaeCommit { scalar, element, token: None })
    }
}

impl fmt::Debug for SaeSecret {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SaeSecret(..)")
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub struct SaeKeys {
    pub kck: [u8; 32],
    pub pmk: Pmk,
}

impl fmt::Debug for SaeKeys {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SaeKeys(..)")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SaeConfirm {
    pub send_confirm: u16,
    pub confirm_hash: [u8; 32],
}

fn hmac_sha256(key: &[u8], parts: &[&[u8]]) -> [u8; 32] {
    let mut mac = HmacSha256::new_from_slice(key).expect("hmac accepts any key length");
    for part in parts {
        mac.update(part);
    }
    mac.finalize().into_bytes().into()
}

/// KDF-n: counter-mode HMAC-SHA256 with 16-bit little-endian counter and length.
fn kdf_sha256(key: &[u8], label: &[u8], context: &[u8], out: &mut [u8]) {
    let bits = (out.len() * 8) as u16;
    for (i, block) in out.chunks_mut(32).enumerate() {
        let counter = (i as u16 + 1).to_le_bytes();
        let digest = hmac_sha256(key, &[&counter, label, context, &bits.to_le_bytes()]);
        block.copy_from_slice(&digest[..block.len()]);
    }
}

/// Derives the password element for the pair of stations. Address order does
/// not matter.
pub fn sae_derive_pwe(
    passphrase: &Passphrase,
    mac_a: MacAddr,
    mac_b: MacAddr,
) -> Result<SaeGroupElement, CryptoError> {
    if mac_a == mac_b {
        return Err(CryptoError::SameAddress(mac_a));
    }
    let (hi, lo) = if mac_a > mac_b { (mac_a, mac_b) } else { (mac_b, mac_a) };
    let mut salt = [0u8; 12];
    salt[..6].copy_from_slice(hi.as_bytes());
    salt[6..].copy_from_slice(lo.as_bytes());

    let mut found: Option<(FieldBytes, bool)> = None;
    for counter in 1..=PWE_ITERATIONS {
        let seed = hmac_sha256(&salt, &[passphrase.as_bytes(), &[counter as u8]]);
        let mut value = [0u8; 32];
        kdf_sha256(&seed, b"SAE Hunting and Pecking", &P256_PRIME, &mut value);
        if value >= P256_PRIME {
            continue;
        }
        let x = field_bytes(&value);
        let y_is_odd = seed[31] & 1 == 1;
        let candidate = AffinePoint::decompress(&x, Choice::from(y_is_odd as u8));
        if bool::from(candidate.is_some()) && found.is_none() {
            found = Some((x, y_is_odd));
        }
    }

    let (x, y_is_odd) = found.ok_or(CryptoError::PweNotFound(PWE_ITERATIONS))?;
    let point = AffinePoint::decompress(&x, Choice::from(y_is_odd as u8)).unwrap();
    Ok(SaeGroupElement(point))
}

fn random_commit_scalar<R: RngCore>(rng: &mut R) -> Scalar {
    loop {
        let s = Scalar::random(&mut *rng);
        if SaeScalar(s).in_commit_range() {
            return s;
        }
    }
}

/// Draws `rand` and `mask` from `rng` and builds the commit, resampling until
/// the commit scalar lands in `[2, q-1]`.
pub fn sae_make_commit<R: RngCore>(pwe: &SaeGroupElement, rng: &mut R) -> (SaeCommit, SaeSecret) {
    loop {
        let secret = SaeSecret { rand: random_commit_scalar(rng), mask: random_commit_scalar(rng) };
        if let Some(commit) = secret.commit(pwe) {
            return (commit, secret);
        }
    }
}

/// Validates the peer commit and derives the shared KCK and PMK.
pub fn sae_process_commit(
    secret: &SaeSecret,
    own: &SaeCommit,
    peer: &SaeCommit,
    pwe: &SaeGroupElement,
) -> Result<SaeKeys, CryptoError> {
    if !peer.scalar.in_commit_range() {
        return Err(CryptoError::InvalidPeerScalar);
    }
    if own.same_exchange(peer) {
        return Err(CryptoError::ReflectionDetected);
    }
    let shared = (pwe.projective() * peer.scalar.0 + peer.element.projective()) * secret.rand;
    let shared = SaeGroupElement::from_projective(shared).ok_or(CryptoError::InvalidPeerElement)?;

    let keyseed = hmac_sha256(&[0u8; 32], &[&shared.x_bytes()]);
    let context = SaeScalar(own.scalar.0 + peer.scalar.0).to_bytes();
    let mut out = [0u8; 64];
    kdf_sha256(&keyseed, b"SAE KCK and PMK", &context, &mut out);

    let mut kck = [0u8; 32];
    let mut pmk = [0u8; 32];
    kck.copy_from_slice(&out[..32]);
    pmk.copy_from_slice(&out[32..]);
    Ok(SaeKeys { kck, pmk: Pmk(pmk) })
}

pub fn sae_make_confirm(kck: &[u8; 32], send_confirm: u16, own: &SaeCommit, peer: &SaeCommit) -> SaeConfirm {
    let confirm_hash = hmac_sha256(
        kck,
        &[
            &send_confirm.to_le_bytes(),
            &own.scalar.to_bytes(),
            &peer.scalar.to_bytes(),
            &own.element.to_bytes(),
            &peer.element.to_bytes(),
        ],
    );
    SaeConfirm { send_confirm, confirm_hash }
}

/// Checks a confirm received from `peer`; `own` is our side of the exchange.
pub fn sae_verify_confirm(kck: &[u8; 32], confirm: &SaeConfirm, own: &SaeCommit, peer: &SaeCommit) -> bool {
    let expected = sae_make_confirm(kck, confirm.send_confirm, peer, own);
    bool::from(expected.confirm_hash.ct_eq(&confirm.confirm_hash))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mac(s: &str) -> MacAddr {
        s.parse().unwrap()
    }

    fn pass(s: &str) -> Passphrase {
        Passphrase::new(s).unwrap()
    }

    #[test]
    fn pwe_is_order_independent() {
        let a = mac("B8:27:EB:6C:61:7A");
        let b = mac("02:42:AC:11:00:02");
        let e1 = sae_derive_pwe(&pass("12345678"), a, b).unwrap();
        let e2 = sae_derive_pwe(&pass("12345678"), b, a).unwrap();
        assert_eq!(e1, e2);
        assert_ne!(e1, sae_derive_pwe(&pass("12345679"), a, b).unwrap());
    }

    #[test]
    fn pwe_rejects_identical_addresses() {
        let a = mac("B8:27:EB:6C:61:7A");
        assert_eq!(sae_derive_pwe(&pass("12345678"), a, a), Err(CryptoError::SameAddress(a)));
    }

    #[test]
    fn seeded_commit_is_reproducible() {
        let pwe = sae_derive_pwe(&pass("12345678"), mac("02:00:00:00:00:01"), mac("02:00:00:00:00:02")).unwrap();
        let (c1, _) = sae_make_commit(&pwe, &mut ChaCha8Rng::seed_from_u64(3));
        let (c2, _) = sae_make_commit(&pwe, &mut ChaCha8Rng::seed_from_u64(3));
        let (c3, _) = sae_make_commit(&pwe, &mut ChaCha8Rng::seed_from_u64(4));
        assert_eq!(c1, c2);
        assert_ne!(c1.scalar, c3.scalar);
    }

    #[test]
    fn commit_scalar_stays_in_range() {
        let pwe = sae_derive_pwe(&pass("12345678"), mac("02:00:00:00:00:01"), mac("02:00:00:00:00:02")).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let (commit, _) = sae_make_commit(&pwe, &mut rng);
            assert!(commit.scalar.in_commit_range());
        }
    }

    #[test]
    fn small_scalars_are_out_of_range() {
        let mut b = [0u8; 32];
        assert!(!SaeScalar::from_bytes(&b).unwrap().in_commit_range());
        b[31] = 1;
        assert!(!SaeScalar::from_bytes(&b).unwrap().in_commit_range());
        b[31] = 2;
        assert!(SaeScalar::from_bytes(&b).unwrap().in_commit_range());
        assert!(SaeScalar::from_bytes(&[0xff; 32]).is_none());
    }

    #[test]
    fn reflection_is_detected() {
        let pwe = sae_derive_pwe(&pass("12345678"), mac("02:00:00:00:00:01"), mac("02:00:00:00:00:02")).unwrap();
        let (own, secret) = sae_make_commit(&pwe, &mut ChaCha8Rng::seed_from_u64(1));
        let echoed = own.clone();
        assert_eq!(sae_process_commit(&secret, &own, &echoed, &pwe), Err(CryptoError::ReflectionDetected));
    }

    #[test]
    fn off_curve_element_rejected() {
        let mut bytes = [0u8; 64];
        bytes[31] = 1;
        bytes[63] = 1;
        assert_eq!(SaeGroupElement::from_bytes(&bytes), Err(CryptoError::InvalidPeerElement));
    }

    #[test]
    fn confirm_round_trip_and_tamper() {
        let a = mac("02:00:00:00:00:01");
        let b = mac("02:00:00:00:00:02");
        let pwe = sae_derive_pwe(&pass("12345678"), a, b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (ca, sa) = sae_make_commit(&pwe, &mut rng);
        let (cb, sb) = sae_make_commit(&pwe, &mut rng);
        let ka = sae_process_commit(&sa, &ca, &cb, &pwe).unwrap();
        let kb = sae_process_commit(&sb, &cb, &ca, &pwe).unwrap();
        assert_eq!(ka, kb);

        let confirm = sae_make_confirm(&ka.kck, 1, &ca, &cb);
        assert!(sae_verify_confirm(&kb.kck, &confirm, &cb, &ca));

        let mut tampered = confirm;
        tampered.confirm_hash[0] ^= 1;
        assert!(!sae_verify_confirm(&kb.kck, &tampered, &cb, &ca));
    }
}
