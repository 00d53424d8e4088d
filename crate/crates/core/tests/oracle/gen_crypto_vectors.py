#!/usr/bin/env python3
"""Reference oracle for crates/core/tests/fixtures/crypto_vectors.txt.

Uses only the Python standard library (hashlib, hmac) and plain integer
elliptic-curve arithmetic, so it shares no code with the Rust crate.
Regenerate with:

    python3 crates/core/tests/oracle/gen_crypto_vectors.py > crates/core/tests/fixtures/crypto_vectors.txt
"""
import hashlib
import hmac
import random

# NIST P-256
P = 0xFFFFFFFF00000001000000000000000000000000FFFFFFFFFFFFFFFFFFFFFFFF
A = P - 3
B = 0x5AC635D8AA3A93E7B3EBBD55769886BC651D06B0CC53B0F63BCE3C3E27D2604B
N = 0xFFFFFFFF00000000FFFFFFFFFFFFFFFFBCE6FAADA7179E84F3B9CAC2FC632551
G = (0x6B17D1F2E12C4247F8BCE6E563A440F277037D812DEB33A0F4A13945D898C296,
     0x4FE342E2FE1A7F9B8EE7EB4A7C0F9E162BCE33576B315ECECBB6406837BF51F5)


def ec_add(p1, p2):
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    x1, y1 = p1
    x2, y2 = p2
    if x1 == x2 and (y1 + y2) % P == 0:
        return None
    if p1 == p2:
        lam = (3 * x1 * x1 + A) * pow(2 * y1, -1, P) % P
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, P) % P
    x3 = (lam * lam - x1 - x2) % P
    return (x3, (lam * (x1 - x3) - y1) % P)


def ec_mul(k, pt):
    acc = None
    while k:
        if k & 1:
            acc = ec_add(acc, pt)
        pt = ec_add(pt, pt)
        k >>= 1
    return acc


def ec_neg(pt):
    return (pt[0], (-pt[1]) % P)


def i2b(v, n=32):
    return v.to_bytes(n, "big")


def pbkdf2_pmk(passphrase, ssid):
    return hashlib.pbkdf2_hmac("sha1", passphrase, ssid, 4096, 32)


def prf(key, label, data, nbytes):
    out = b""
    i = 0
    while len(out) < nbytes:
        out += hmac.new(key, label + b"\x00" + data + bytes([i]), hashlib.sha1).digest()
        i += 1
    return out[:nbytes]


def ptk(pmk, aa, sa, anonce, snonce):
    data = min(aa, sa) + max(aa, sa) + min(anonce, snonce) + max(anonce, snonce)
    return prf(pmk, b"Pairwise key expansion", data, 48)


def mic(kck, body):
    return hmac.new(kck, body, hashlib.sha1).digest()[:16]


def kdf(key, label, context, bits):
    out = b""
    i = 1
    while len(out) * 8 < bits:
        out += hmac.new(key, i.to_bytes(2, "little") + label + context + bits.to_bytes(2, "little"),
                        hashlib.sha256).digest()
        i += 1
    return out[: bits // 8]


def sae_pwe(password, mac_a, mac_b, k=40):
    salt = max(mac_a, mac_b) + min(mac_a, mac_b)
    found = None
    for counter in range(1, k + 1):
        seed = hmac.new(salt, password + bytes([counter]), hashlib.sha256).digest()
        value = int.from_bytes(kdf(seed, b"SAE Hunting and Pecking", i2b(P), 256), "big")
        if value >= P:
            continue
        rhs = (value ** 3 + A * value + B) % P
        if pow(rhs, (P - 1) // 2, P) in (0, 1) and found is None:
            found = (value, seed)
    x, seed = found
    y = pow((x ** 3 + A * x + B) % P, (P + 1) // 4, P)
    if (y & 1) != (seed[-1] & 1):
        y = P - y
    return (x, y)


def enc_point(pt):
    return i2b(pt[0]) + i2b(pt[1])


def sae_side(pwe, rand, mask):
    scalar = (rand + mask) % N
    element = ec_neg(ec_mul(mask, pwe))
    return scalar, element


def sae_keys(pwe, rand, own_scalar, peer_scalar, peer_element):
    k = ec_mul(rand, ec_add(ec_mul(peer_scalar, pwe), peer_element))
    keyseed = hmac.new(b"\x00" * 32, i2b(k[0]), hashlib.sha256).digest()
    ctx = i2b((own_scalar + peer_scalar) % N)
    out = kdf(keyseed, b"SAE KCK and PMK", ctx, 512)
    return out[:32], out[32:]


def sae_confirm(kck, send_confirm, own_scalar, peer_scalar, own_el, peer_el):
    msg = send_confirm.to_bytes(2, "little") + i2b(own_scalar) + i2b(peer_scalar) + enc_point(own_el) + enc_point(peer_el)
    return hmac.new(kck, msg, hashlib.sha256).digest()


def h(b):
    return b.hex()


def main():
    rng = random.Random(20240611)
    alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 !#$%&*+-.:=?@_~"

    print("# Crypto reference vectors, generated by tests/oracle/gen_crypto_vectors.py.")
    print("# One record per line, whitespace-separated, every field hex-encoded.")
    print("# pmk <passphrase> <ssid> <pmk>")
    print("# ptk <pmk> <aa> <sa> <anonce> <snonce> <kck||kek||tk>")
    print("# mic <kck> <eapol body, mic zeroed> <mic>")
    print("# pwe <passphrase> <mac a> <mac b> <x> <y>")
    print("# sae <passphrase> <mac a> <mac b> <rand a> <mask a> <rand b> <mask b> <scalar a> <element a> <scalar b> <element b> <kck> <pmk> <confirm a, send_confirm=1>")

    cases = [(b"12345678", b"WPA3OpenWrt"), (b"password", b"IEEE")]
    for _ in range(12):
        plen = rng.randint(8, 63)
        slen = rng.randint(1, 32)
        pw = "".join(rng.choice(alphabet) for _ in range(plen)).encode()
        ssid = "".join(rng.choice(alphabet) for _ in range(slen)).encode()
        cases.append((pw, ssid))

    for pw, ssid in cases:
        print("pmk", h(pw), h(ssid), h(pbkdf2_pmk(pw, ssid)))

    aa = bytes.fromhex("b827eb6c617a")
    sa = bytes.fromhex("0242ac110002")
    for i, (pw, ssid) in enumerate(cases):
        pmk = pbkdf2_pmk(pw, ssid)
        if i == 0:
            a, s = aa, sa
        else:
            a = bytes(rng.getrandbits(8) for _ in range(6))
            s = bytes(rng.getrandbits(8) for _ in range(6))
        an = bytes(rng.getrandbits(8) for _ in range(32))
        sn = bytes(rng.getrandbits(8) for _ in range(32))
        print("ptk", h(pmk), h(a), h(s), h(an), h(sn), h(ptk(pmk, a, s, an, sn)))

    for _ in range(12):
        kck = bytes(rng.getrandbits(8) for _ in range(16))
        body = bytes(rng.getrandbits(8) for _ in range(rng.randint(40, 140)))
        print("mic", h(kck), h(body), h(mic(kck, body)))

    pwe_cases = [(b"12345678", aa, sa), (b"12345679", aa, sa)]
    for _ in range(4):
        pw = "".join(rng.choice(alphabet) for _ in range(rng.randint(8, 20))).encode()
        ma = bytes(rng.getrandbits(8) for _ in range(6))
        mb = bytes(rng.getrandbits(8) for _ in range(6))
        pwe_cases.append((pw, ma, mb))
    for pw, ma, mb in pwe_cases:
        x, y = sae_pwe(pw, ma, mb)
        assert (y * y - (x ** 3 + A * x + B)) % P == 0
        print("pwe", h(pw), h(ma), h(mb), h(i2b(x)), h(i2b(y)))

    for pw, ma, mb in pwe_cases[:3]:
        pwe = sae_pwe(pw, ma, mb)
        ra, ma_, rb, mb_ = (rng.randrange(2, N) for _ in range(4))
        sa_, ea = sae_side(pwe, ra, ma_)
        sb_, eb = sae_side(pwe, rb, mb_)
        kck_a, pmk_a = sae_keys(pwe, ra, sa_, sb_, eb)
        kck_b, pmk_b = sae_keys(pwe, rb, sb_, sa_, ea)
        assert (kck_a, pmk_a) == (kck_b, pmk_b)
        conf = sae_confirm(kck_a, 1, sa_, sb_, ea, eb)
        print("sae", h(pw), h(ma), h(mb), *(h(i2b(v)) for v in (ra, ma_, rb, mb_)),
              h(i2b(sa_)), h(enc_point(ea)), h(i2b(sb_)), h(enc_point(eb)),
              h(kck_a), h(pmk_a), h(conf))


if __name__ == "__main__":
    main()
