"""Deterministic simulated network: parties, FIFO channels, sessions.

Party programs are generator functions `prog(ctx)` that use
`yield from ctx.recv(channel)` to block on input and `ctx.send(channel,
payload)` to emit messages.  A round-robin scheduler advances parties
cooperatively, so a run is a pure function of (parties, programs, seed).
Every sent message lands in the session transcript for offline-party and
privacy assertions.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from enum import Enum


class Role(str, Enum):
    CONTRACT_PARTY = "E"
    NODE = "N"
    GARBLER = "NG"
    EVALUATOR = "NE"
    TRUSTED_SIGNER = "T"
    OUTSOURCER = "O"


@dataclass(frozen=True, order=True)
class PartyId:
    role: Role
    index: int = 0

    def __str__(self) -> str:
        return f"{self.role.value}{self.index}"


class TransportError(Exception):
    pass


class ClosedChannelError(TransportError):
    pass


class DeadlockError(TransportError):
    def __init__(self, blocked: list[PartyId]) -> None:
        super().__init__(f"deadlock: blocked parties {[str(p) for p in blocked]}")
        self.blocked = blocked


@dataclass(frozen=True)
class TranscriptEntry:
    step: int
    sender: PartyId
    receiver: PartyId
    payload: bytes

    @property
    def n_bytes(self) -> int:
        return len(self.payload)


@dataclass
class Transcript:
    entries: list[TranscriptEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def messages_from(self, party: PartyId) -> list[TranscriptEntry]:
        return [e for e in self.entries if e.sender == party]

    def messages_seen_by(self, party: PartyId) -> list[TranscriptEntry]:
        return [e for e in self.entries if party in (e.sender, e.receiver)]

    def total_bytes(self) -> int:
        return sum(e.n_bytes for e in self.entries)

    def export_lines(self) -> str:
        """Line-oriented text export: step, from, to, byte length."""
        return "\n".join(
            f"{e.step} {e.sender} {e.receiver} {e.n_bytes}" for e in self.entries
        ) + ("\n" if self.entries else "")


class Channel:
    """Ordered reliable FIFO between two parties."""

    def __init__(self, sender: PartyId, receiver: PartyId, latency_ms: float = 0.0):
        self.endpoints = (sender, receiver)
        self.latency_ms = latency_ms
        self.queue: list[bytes] = []
        self.sent_count = 0
        self.delivered_count = 0
        self.closed = False

    def send(self, payload: bytes) -> None:
        if self.closed:
            raise ClosedChannelError(f"send on closed channel {self.endpoints}")
        self.queue.append(bytes(payload))
        self.sent_count += 1

    def try_recv(self) -> bytes | None:
        if self.queue:
            self.delivered_count += 1
            return self.queue.pop(0)
        if self.closed:
            raise ClosedChannelError(f"recv on closed channel {self.endpoints}")
        return None

    def close(self) -> None:
        self.closed = True


class Context:
    """Per-party view of a running session."""

    def __init__(self, session: "Session", me: PartyId, seed: bytes):
        self._session = session
        self.me = me
        material = hashlib.blake2b(
            str(me).encode(), key=seed[:64], digest_size=16
        ).digest()
        self.rng = random.Random(int.from_bytes(material, "big"))
        self._counter = 0

    def random_bytes(self, n: int) -> bytes:
        return self.rng.getrandbits(8 * n).to_bytes(n, "big") if n else b""

    def send(self, to: PartyId, payload: bytes) -> None:
        self._session._send(self.me, to, payload)

    def recv(self, frm: PartyId):
        """Generator: yields while the channel is empty, returns the payload."""
        ch = self._session._channel(frm, self.me)
        while True:
            payload = ch.try_recv()
            if payload is not None:
                return payload
            yield

    def close_to(self, to: PartyId) -> None:
        """Close the outbound channel to a party (mid-protocol abort)."""
        self._session._channel(self.me, to).close()


class Session:
    """Cooperative deterministic scheduler over a set of party programs."""

    def __init__(self, parties: list[PartyId], seed: bytes, idle_budget: int = 10_000):
        if len(set(parties)) != len(parties):
            raise TransportError("duplicate party ids in session")
        self.parties = list(parties)
        self.seed = seed
        self.idle_budget = idle_budget
        self.transcript = Transcript()
        self._channels: dict[tuple[PartyId, PartyId], Channel] = {}
        self._step = 0

    def _channel(self, sender: PartyId, receiver: PartyId) -> Channel:
        key = (sender, receiver)
        ch = self._channels.get(key)
        if ch is None:
            if sender not in self.parties or receiver not in self.parties:
                raise TransportError(f"channel endpoint not in session: {key}")
            ch = Channel(sender, receiver)
            self._channels[key] = ch
        return ch

    def _send(self, sender: PartyId, receiver: PartyId, payload: bytes) -> None:
        self._channel(sender, receiver).send(payload)
        self.transcript.entries.append(
            TranscriptEntry(self._step, sender, receiver, bytes(payload))
        )
        self._step += 1

    def run(self, programs: dict[PartyId, "callable"]) -> dict[PartyId, object]:
        """Drive all programs to completion; returns per-party results."""
        for p in programs:
            if p not in self.parties:
                raise TransportError(f"program for unknown party {p}")
        ctxs = {p: Context(self, p, self.seed) for p in programs}
        gens = {p: programs[p](ctxs[p]) for p in sorted(programs)}
        results: dict[PartyId, object] = {}
        live = {p: g for p, g in gens.items() if hasattr(g, "__next__")}
        for p, g in gens.items():
            if p not in live:
                results[p] = g  # plain function, already done
        idle_rounds = 0
        while live:
            progressed = False
            for p in sorted(live):
                g = live[p]
                before = self._step
                try:
                    next(g)
                except StopIteration as stop:
                    results[p] = stop.value
                    del live[p]
                    progressed = True
                    continue
                if self._step != before:
                    progressed = True
            if progressed:
                idle_rounds = 0
            else:
                idle_rounds += 1
                if idle_rounds > self.idle_budget:
                    raise DeadlockError(sorted(live))
        return results


def run_session(
    parties: list[PartyId],
    programs: dict[PartyId, "callable"],
    seed: bytes,
    idle_budget: int = 10_000,
) -> tuple[dict[PartyId, object], Transcript]:
    """One-shot helper: build a session, run it, return results + transcript."""
    session = Session(parties, seed, idle_budget=idle_budget)
    results = session.run(programs)
    return results, session.transcript
