"""1-out-of-2 oblivious transfer for wire-label delivery.

Two instantiations behind one interface:

* ``dealer``: a trusted third party receives both messages and the choice
  and forwards the selection.  Fast, hash-free, and the sender's view is
  bytewise independent of the choice bit.
* ``group``: a three-message protocol over a prime-order group.  The
  receiver commits to a group element that depends on its choice bit, the
  sender derives two keys from the commitment, and the receiver can
  compute exactly one of them.

Both run over `transport` sessions; messages are length-prefixed and
tagged with a session id and step index.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .hashing import LABEL_BYTES, kdf
from .transport import ClosedChannelError, PartyId, Role, run_session

DEALER = PartyId(Role.TRUSTED_SIGNER, 99)
_SENDER = PartyId(Role.NODE, 0)
_RECEIVER = PartyId(Role.NODE, 1)


class OtError(Exception):
    pass


class AbortedSessionError(OtError):
    """Channel closed mid-protocol."""


@dataclass(frozen=True)
class OtMessagePair:
    m0: bytes
    m1: bytes

    def __post_init__(self) -> None:
        if len(self.m0) != len(self.m1):
            raise OtError("message pair lengths differ")

    def pick(self, bit: int) -> bytes:
        return self.m1 if bit else self.m0


@dataclass(frozen=True)
class GroupParams:
    """Prime-order subgroup of Z_p^*: order q, generator g."""

    p: int
    q: int
    g: int

    def exp(self, base: int, e: int) -> int:
        return pow(base, e, self.p)

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def inv(self, a: int) -> int:
        return pow(a, -1, self.p)

    def element_bytes(self) -> int:
        return (self.p.bit_length() + 7) // 8

    def rand_scalar(self, rng) -> int:
        return rng.randrange(1, self.q)


# 512-bit safe prime, enough for desk-scale tests; g = 4 generates the
# order-q subgroup of quadratic residues.
TOY_GROUP = GroupParams(
    p=int(
        "0x41071dc3c4de944896c0a1ffb3263496d21dca5f56bfa463f4c4498329b22bb1"
        "e318cad8f819d257c8d5d537dbb100f56bf47946a519f1c758d48fe5ec4177f3",
        16,
    ),
    q=int(
        "0x20838ee1e26f4a244b6050ffd9931a4b690ee52fab5fd231fa6224c194d915d8"
        "f18c656c7c0ce92be46aea9bedd8807ab5fa3ca3528cf8e3ac6a47f2f620bbf9",
        16,
    ),
    g=4,
)


def _frame(session_id: int, step: int, body: bytes) -> bytes:
    return struct.pack(">QII", session_id, step, len(body)) + body


def _unframe(frame: bytes, session_id: int, step: int) -> bytes:
    if len(frame) < 16:
        raise OtError("short OT frame")
    sid, stp, length = struct.unpack(">QII", frame[:16])
    if sid != session_id or stp != step:
        raise OtError(f"unexpected OT frame (session {sid}, step {stp})")
    body = frame[16:]
    if len(body) != length:
        raise OtError("OT frame length mismatch")
    return body


def _derive_key(group: GroupParams, shared: int, index: int) -> bytes:
    size = group.element_bytes()
    return kdf(b"ot-group-key", shared.to_bytes(size, "big"), index,
               size=LABEL_BYTES)


def _xor(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b))


def _pad(key: bytes, length: int, tag: int) -> bytes:
    return kdf(key, b"ot-pad", tag, size=length)


# --- generator subroutines, embeddable in larger protocol programs -----


def ot_send(ctx, receiver: PartyId, pairs: list[OtMessagePair],
            flavor: str = "dealer", group: GroupParams = TOY_GROUP,
            session_id: int = 0, dealer: PartyId = DEALER):
    """Sender side of a batched OT; a generator to `yield from`."""
    try:
        if flavor == "dealer":
            body = b"".join(p.m0 + p.m1 for p in pairs)
            ctx.send(dealer, _frame(session_id, 0, struct.pack(">I", len(pairs)) + body))
            return None
        if flavor != "group":
            raise OtError(f"unknown OT flavor {flavor!r}")
        a = group.rand_scalar(ctx.rng)
        big_a = group.exp(group.g, a)
        size = group.element_bytes()
        ctx.send(receiver, _frame(session_id, 0, big_a.to_bytes(size, "big")))
        frame = yield from ctx.recv(receiver)
        body = _unframe(frame, session_id, 1)
        inv_a = group.inv(big_a)
        out = []
        if pairs:
            mlen = len(pairs[0].m0)
            for i, pair in enumerate(pairs):
                b_elem = int.from_bytes(body[i * size : (i + 1) * size], "big")
                k0 = _derive_key(group, group.exp(b_elem, a), i)
                k1 = _derive_key(group, group.exp(group.mul(b_elem, inv_a), a), i)
                e0 = _xor(pair.m0, _pad(k0, mlen, 0))
                e1 = _xor(pair.m1, _pad(k1, mlen, 1))
                out.append(e0 + e1)
        ctx.send(receiver, _frame(session_id, 2, b"".join(out)))
        return None
    except ClosedChannelError as exc:
        raise AbortedSessionError(str(exc)) from exc


def ot_recv(ctx, sender: PartyId, choices: list[int],
            flavor: str = "dealer", group: GroupParams = TOY_GROUP,
            session_id: int = 0, dealer: PartyId = DEALER,
            msg_len: int = LABEL_BYTES):
    """Receiver side of a batched OT; returns list of chosen messages."""
    try:
        if flavor == "dealer":
            ctx.send(dealer, _frame(session_id, 1, bytes(c & 1 for c in choices)))
            frame = yield from ctx.recv(dealer)
            body = _unframe(frame, session_id, 2)
            if len(choices) and len(body) % len(choices):
                raise OtError("dealer reply length mismatch")
            step = len(body) // len(choices) if choices else 0
            return [body[i * step : (i + 1) * step] for i in range(len(choices))]
        if flavor != "group":
            raise OtError(f"unknown OT flavor {flavor!r}")
        frame = yield from ctx.recv(sender)
        size = group.element_bytes()
        big_a = int.from_bytes(_unframe(frame, session_id, 0), "big")
        scalars = []
        commits = []
        for c in choices:
            b = group.rand_scalar(ctx.rng)
            elem = group.exp(group.g, b)
            if c & 1:
                elem = group.mul(big_a, elem)
            scalars.append(b)
            commits.append(elem.to_bytes(size, "big"))
        ctx.send(sender, _frame(session_id, 1, b"".join(commits)))
        frame = yield from ctx.recv(sender)
        body = _unframe(frame, session_id, 2)
        out = []
        for i, (c, b) in enumerate(zip(choices, scalars)):
            k = _derive_key(group, group.exp(big_a, b), i)
            pair = body[i * 2 * msg_len : (i + 1) * 2 * msg_len]
            e = pair[msg_len:] if c & 1 else pair[:msg_len]
            out.append(_xor(e, _pad(k, msg_len, c & 1)))
        return out
    except ClosedChannelError as exc:
        raise AbortedSessionError(str(exc)) from exc


def ot_dealer(ctx, sender: PartyId, receiver: PartyId, session_id: int = 0):
    """Trusted-dealer relay: forwards each chosen message to the receiver."""
    try:
        frame = yield from ctx.recv(sender)
        body = _unframe(frame, session_id, 0)
        (n,) = struct.unpack(">I", body[:4])
        blob = body[4:]
        mlen = len(blob) // (2 * n) if n else 0
        frame = yield from ctx.recv(receiver)
        choices = _unframe(frame, session_id, 1)
        if len(choices) != n:
            raise OtError("dealer: choice count mismatch")
        picks = []
        for i, c in enumerate(choices):
            pair = blob[i * 2 * mlen : (i + 1) * 2 * mlen]
            picks.append(pair[mlen:] if c else pair[:mlen])
        ctx.send(receiver, _frame(session_id, 2, b"".join(picks)))
        return None
    except ClosedChannelError as exc:
        raise AbortedSessionError(str(exc)) from exc


# --- standalone session wrappers ---------------------------------------


def run_ot(pairs: list[OtMessagePair], choices: list[int], seed: bytes,
           flavor: str = "dealer", group: GroupParams = TOY_GROUP):
    """Run a full OT session; returns (received messages, transcript)."""
    if len(pairs) != len(choices):
        raise OtError("pair/choice count mismatch")
    mlen = len(pairs[0].m0) if pairs else LABEL_BYTES

    def sender_prog(ctx):
        yield from ot_send(ctx, _RECEIVER, pairs, flavor, group)
        return None

    def receiver_prog(ctx):
        got = yield from ot_recv(ctx, _SENDER, choices, flavor, group,
                                 msg_len=mlen)
        return got

    parties = [_SENDER, _RECEIVER]
    programs = {_SENDER: sender_prog, _RECEIVER: receiver_prog}
    if flavor == "dealer":
        parties.append(DEALER)
        programs[DEALER] = lambda ctx: ot_dealer(ctx, _SENDER, _RECEIVER)
    results, transcript = run_session(parties, programs, seed)
    return results[_RECEIVER], transcript


def ot_transfer(pair: OtMessagePair, choice: int, seed: bytes,
                flavor: str = "dealer", group: GroupParams = TOY_GROUP) -> bytes:
    """Single transfer; returns m_choice."""
    out, _ = run_ot([pair], [choice], seed, flavor, group)
    return out[0]


def ot_batch(pairs: list[OtMessagePair], choices: list[int], seed: bytes,
             flavor: str = "dealer", group: GroupParams = TOY_GROUP) -> list[bytes]:
    """Vectorized transfers; element-wise ot_transfer results."""
    out, _ = run_ot(pairs, choices, seed, flavor, group)
    return out
