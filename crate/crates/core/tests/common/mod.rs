//! Shared helpers for the integration tests.
#![allow(dead_code)]

use wsim_core::crypto::{
    compute_mic, derive_pmk_psk, derive_ptk, sae_derive_pwe, sae_make_confirm, sae_process_commit, MicVersion,
    Passphrase, SaeScalar, SaeSecret,
};
use wsim_core::frames::MacAddr;

pub const VECTORS: &str = include_str!("../fixtures/crypto_vectors.txt");

/// Fixture records as (kind, hex-decoded fields).
pub fn vectors() -> Vec<(String, Vec<Vec<u8>>)> {
    VECTORS
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let mut parts = l.split_whitespace();
            let kind = parts.next().unwrap().to_string();
            (kind, parts.map(|h| hex::decode(h).expect("hex field")).collect())
        })
        .collect()
}

pub fn arr<const N: usize>(b: &[u8]) -> [u8; N] {
    b.try_into().expect("field width")
}

pub fn mac(b: &[u8]) -> MacAddr {
    MacAddr::new(arr(b))
}

fn pass(b: &[u8]) -> Passphrase {
    Passphrase::new(String::from_utf8(b.to_vec()).unwrap()).unwrap()
}

/// Checks one fixture record against the crate; `Err` describes the mismatch.
pub fn check_vector(kind: &str, f: &[Vec<u8>]) -> Result<(), String> {
    let eq = |what: &str, got: &[u8], want: &[u8]| {
        if got == want {
            Ok(())
        } else {
            Err(format!("{kind} {what}: got {} want {}", hex::encode(got), hex::encode(want)))
        }
    };
    match kind {
        "pmk" => {
            let pmk = derive_pmk_psk(&pass(&f[0]), &f[1]).map_err(|e| e.to_string())?;
            eq("pmk", &pmk.0, &f[2])
        }
        "ptk" => {
            let pmk = wsim_core::crypto::Pmk(arr(&f[0]));
            let ptk = derive_ptk(&pmk, mac(&f[1]), mac(&f[2]), &arr(&f[3]), &arr(&f[4]));
            eq("ptk", &ptk.to_bytes(), &f[5])
        }
        "mic" => {
            let mic = compute_mic(&arr(&f[0]), &f[1], MicVersion::HmacSha1).map_err(|e| e.to_string())?;
            eq("mic", &mic, &f[2])
        }
        "pwe" => {
            let pwe = sae_derive_pwe(&pass(&f[0]), mac(&f[1]), mac(&f[2])).map_err(|e| e.to_string())?;
            let xy = pwe.to_bytes();
            eq("x", &xy[..32], &f[3])?;
            eq("y", &xy[32..], &f[4])
        }
        "sae" => {
            let pwe = sae_derive_pwe(&pass(&f[0]), mac(&f[1]), mac(&f[2])).map_err(|e| e.to_string())?;
            let scalar = |b: &[u8]| SaeScalar::from_bytes(&arr(b)).expect("scalar below order");
            let secret_a = SaeSecret::from_parts(scalar(&f[3]), scalar(&f[4]));
            let secret_b = SaeSecret::from_parts(scalar(&f[5]), scalar(&f[6]));
            let ca = secret_a.commit(&pwe).ok_or("commit a out of range")?;
            let cb = secret_b.commit(&pwe).ok_or("commit b out of range")?;
            eq("scalar a", &ca.scalar.to_bytes(), &f[7])?;
            eq("element a", &ca.element.to_bytes(), &f[8])?;
            eq("scalar b", &cb.scalar.to_bytes(), &f[9])?;
            eq("element b", &cb.element.to_bytes(), &f[10])?;
            let ka = sae_process_commit(&secret_a, &ca, &cb, &pwe).map_err(|e| e.to_string())?;
            let kb = sae_process_commit(&secret_b, &cb, &ca, &pwe).map_err(|e| e.to_string())?;
            eq("kck", &ka.kck, &f[11])?;
            eq("pmk", &ka.pmk.0, &f[12])?;
            eq("peer kck", &kb.kck, &f[11])?;
            eq("confirm", &sae_make_confirm(&ka.kck, 1, &ca, &cb).confirm_hash, &f[13])
        }
        other => Err(format!("unknown record kind {other}")),
    }
}
