"""Authenticated-share preprocessing: BDOZ bits, SPDZ field elements,
and resharing from outsourcing parties to executing parties.

BDOZ: a holder's bit x carries, per verifier j, the tag
M_j[x] = K_j[x] XOR (x * Delta_j) under the verifier's random key and its
global key Delta_j; XOR of authenticated bits stays authenticated.
SPDZ: additive shares of x plus additive shares of alpha*x under the
global key alpha = sum(alpha_i); the MAC survives addition and scalar
multiplication.  Resharing splits every share (value, MAC and key share
alike) along a cover's edges, so the receiving set opens the same value
under the same global key.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cover import Cover, IncompleteCoverError

KAPPA = 128
SPDZ_PRIME = (1 << 61) - 1


class MacFailure(Exception):
    """An opened value failed its MAC identity."""


# --- BDOZ bits ----------------------------------------------------------


@dataclass(frozen=True)
class BdozBit:
    """One party's authenticated XOR-share of a secret bit.

    macs[j] tags this party's bit under verifier j's keys; keys[i] is this
    party's verification key for holder i's bit.
    """

    holder: int
    bit: int
    macs: dict[int, int]
    keys: dict[int, int]


@dataclass(frozen=True)
class BdozSharedBit:
    deltas: tuple[int, ...]
    parties: tuple[BdozBit, ...]

    @property
    def n_parties(self) -> int:
        return len(self.parties)


def bdoz_authenticate(x: int, n_parties: int, rng) -> BdozSharedBit:
    """XOR-share x and authenticate every share to every other party."""
    if n_parties < 2:
        raise ValueError("BDOZ needs at least 2 parties")
    if x not in (0, 1):
        raise ValueError("x must be a bit")
    deltas = tuple(rng.getrandbits(KAPPA) | 1 for _ in range(n_parties))
    bits = [rng.getrandbits(1) for _ in range(n_parties - 1)]
    bits.append(x ^ _xor_all(bits))
    keys = [[0] * n_parties for _ in range(n_parties)]  # keys[j][i] = K_j[x_i]
    for i in range(n_parties):
        for j in range(n_parties):
            if i != j:
                keys[j][i] = rng.getrandbits(KAPPA)
    parties = []
    for i in range(n_parties):
        macs = {j: keys[j][i] ^ (deltas[j] if bits[i] else 0)
                for j in range(n_parties) if j != i}
        mine = {i2: keys[i][i2] for i2 in range(n_parties) if i2 != i}
        parties.append(BdozBit(holder=i, bit=bits[i], macs=macs, keys=mine))
    return BdozSharedBit(deltas=deltas, parties=tuple(parties))


def _xor_all(bits) -> int:
    acc = 0
    for b in bits:
        acc ^= b
    return acc


def bdoz_open(shared: BdozSharedBit) -> int:
    return _xor_all(p.bit for p in shared.parties)


def bdoz_check(shared: BdozSharedBit) -> bool:
    """Verify M_j[x_i] = K_j[x_i] XOR (x_i * Delta_j) for every pair."""
    for holder in shared.parties:
        for j, mac in holder.macs.items():
            key = shared.parties[j].keys[holder.holder]
            want = key ^ (shared.deltas[j] if holder.bit else 0)
            if mac != want:
                return False
    return True


def bdoz_xor(a: BdozSharedBit, b: BdozSharedBit) -> BdozSharedBit:
    """Componentwise XOR; valid because x*Delta is linear in x over GF(2)."""
    if a.deltas != b.deltas:
        raise ValueError("XOR requires shares under the same global keys")
    parties = []
    for pa, pb in zip(a.parties, b.parties):
        parties.append(BdozBit(
            holder=pa.holder,
            bit=pa.bit ^ pb.bit,
            macs={j: pa.macs[j] ^ pb.macs[j] for j in pa.macs},
            keys={i: pa.keys[i] ^ pb.keys[i] for i in pa.keys},
        ))
    return BdozSharedBit(deltas=a.deltas, parties=tuple(parties))


# --- SPDZ field elements --------------------------------------------------


@dataclass(frozen=True)
class SpdzShare:
    """Additive share vector with MAC shares under alpha = sum(key_shares)."""

    prime: int
    shares: tuple[int, ...]
    mac_shares: tuple[int, ...]
    key_shares: tuple[int, ...]

    @property
    def n_parties(self) -> int:
        return len(self.shares)


def spdz_share(x: int, n_parties: int, rng, prime: int = SPDZ_PRIME,
               key_shares: tuple[int, ...] | None = None) -> SpdzShare:
    if n_parties < 1:
        raise ValueError("need at least one party")
    x %= prime
    if key_shares is None:
        key_shares = tuple(rng.randrange(prime) for _ in range(n_parties))
    alpha = sum(key_shares) % prime
    shares = [rng.randrange(prime) for _ in range(n_parties - 1)]
    shares.append((x - sum(shares)) % prime)
    target = alpha * x % prime
    macs = [rng.randrange(prime) for _ in range(n_parties - 1)]
    macs.append((target - sum(macs)) % prime)
    return SpdzShare(prime, tuple(shares), tuple(macs), tuple(key_shares))


def spdz_open_check(s: SpdzShare) -> int:
    """Open by summation and verify sum(gamma_i) = alpha * x."""
    x = sum(s.shares) % s.prime
    alpha = sum(s.key_shares) % s.prime
    if sum(s.mac_shares) % s.prime != alpha * x % s.prime:
        raise MacFailure("SPDZ MAC identity violated on open")
    return x


def spdz_add(a: SpdzShare, b: SpdzShare) -> SpdzShare:
    if a.prime != b.prime or a.key_shares != b.key_shares:
        raise ValueError("addition requires matching field and MAC key")
    return SpdzShare(
        a.prime,
        tuple((x + y) % a.prime for x, y in zip(a.shares, b.shares)),
        tuple((x + y) % a.prime for x, y in zip(a.mac_shares, b.mac_shares)),
        a.key_shares,
    )


def spdz_scale(a: SpdzShare, c: int) -> SpdzShare:
    c %= a.prime
    return SpdzShare(
        a.prime,
        tuple(x * c % a.prime for x in a.shares),
        tuple(x * c % a.prime for x in a.mac_shares),
        a.key_shares,
    )


# --- resharing across a cover ---------------------------------------------


def _split(value: int, ways: int, rng, prime: int) -> list[int]:
    parts = [rng.randrange(prime) for _ in range(ways - 1)]
    parts.append((value - sum(parts)) % prime)
    return parts


def reshare(o_share: SpdzShare, cover: Cover, rng) -> SpdzShare:
    """Move an authenticated value from the outsourcing set to the
    executing set along the cover's edges.

    Every outsourcer splits its value share, MAC share and key share into
    fresh sub-shares for the executors it serves; executors sum what they
    receive.  The totals, and hence the MAC identity under the unchanged
    global key, are preserved.
    """
    if o_share.n_parties != cover.n_outsourcers:
        raise ValueError("share vector does not match the cover's O-set")
    cover.validate()
    p = o_share.prime
    recv_x = [0] * cover.n_executors
    recv_m = [0] * cover.n_executors
    recv_k = [0] * cover.n_executors
    for o_idx in range(cover.n_outsourcers):
        targets = cover.assignment[o_idx]
        if not targets:
            raise IncompleteCoverError(f"outsourcer {o_idx} serves nobody")
        for bucket, value in ((recv_x, o_share.shares[o_idx]),
                              (recv_m, o_share.mac_shares[o_idx]),
                              (recv_k, o_share.key_shares[o_idx])):
            for e_idx, part in zip(targets, _split(value, len(targets), rng, p)):
                bucket[e_idx] = (bucket[e_idx] + part) % p
    return SpdzShare(p, tuple(recv_x), tuple(recv_m), tuple(recv_k))


# --- share-bundle file format ----------------------------------------------


def export_share_bundle(s: SpdzShare) -> str:
    """Text form: field modulus, party count, hex shares + MACs + keys."""
    lines = [f"modulus {s.prime:x}", f"parties {s.n_parties}"]
    for i in range(s.n_parties):
        lines.append(f"{i} {s.shares[i]:x} {s.mac_shares[i]:x} {s.key_shares[i]:x}")
    return "\n".join(lines) + "\n"


def import_share_bundle(text: str) -> SpdzShare:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2 or not lines[0].startswith("modulus ") \
            or not lines[1].startswith("parties "):
        raise ValueError("malformed share bundle header")
    prime = int(lines[0].split()[1], 16)
    n = int(lines[1].split()[1])
    shares, macs, keys = [], [], []
    if len(lines) != 2 + n:
        raise ValueError("share bundle row count mismatch")
    for row, line in enumerate(lines[2:]):
        idx, xs, ms, ks = line.split()
        if int(idx) != row:
            raise ValueError("share bundle rows out of order")
        shares.append(int(xs, 16))
        macs.append(int(ms, 16))
        keys.append(int(ks, 16))
    return SpdzShare(prime, tuple(shares), tuple(macs), tuple(keys))
