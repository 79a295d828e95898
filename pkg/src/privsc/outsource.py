"""Server-aided outsourced execution with offline parties.

Parties establish a shared key k_S with the garbling node through a
non-interactive key-exchange interface, upload PRF encodings of their
input bits once, and go offline.  On each computation request the
garbling node garbles the contract, derives per-(party, bit) pivot keys
from k_S and the stored nonces, and publishes a pivot table holding both
wire labels encrypted under the two possible pivot keys in shuffled
order.  The evaluator node can open exactly one entry per wire with its
stored encodings, evaluates, and returns the output labels for decoding.
The evaluator never holds k_S; contract parties send nothing during the
computation phase, and their stored encodings serve any number of later
contracts.

Neither NIKE instantiation realizes the multilinear-map construction the
interface anticipates: the dealer flavor trusts its setup master, and
the group flavor only anchors the two lowest-index members in real
Diffie-Hellman, deriving the rest from the setup seed.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

from .circuit import Circuit, gate_counts
from .garble import (
    InputEncoding,
    decode,
    deserialize_garbled,
    encode,
    eval_garbled,
    garble,
    serialize_garbled,
)
from .hashing import DecryptionError, LABEL_BYTES, kdf, open_sealed, prf, seal
from .ot import GroupParams, TOY_GROUP
from .transport import PartyId, Role, Session, Transcript


class OutsourceError(Exception):
    pass


class IndexOutOfSetError(OutsourceError):
    pass


class MissingPartyError(OutsourceError):
    pass


class PivotDecryptionError(OutsourceError):
    pass


# --- non-interactive key exchange interface -------------------------------


@dataclass(frozen=True)
class NikeParams:
    flavor: str              # "dealer" | "group"
    max_group: int           # M: largest derivable set
    max_parties: int         # N
    security_bits: int       # lambda
    master: bytes = b""      # dealer flavor
    seed: bytes = b""        # group flavor
    group: GroupParams | None = None


def nike_setup(max_group: int, max_parties: int, security_bits: int,
               flavor: str = "dealer", seed: bytes = b"\x00" * 32) -> NikeParams:
    if max_group < 1 or max_parties < max_group:
        raise OutsourceError("need 1 <= M <= N")
    if flavor == "dealer":
        return NikeParams(flavor, max_group, max_parties, security_bits,
                          master=kdf(seed, b"nike-master", size=32))
    if flavor == "group":
        return NikeParams(flavor, max_group, max_parties, security_bits,
                          seed=kdf(seed, b"nike-seed", size=32),
                          group=TOY_GROUP)
    raise OutsourceError(f"unknown NIKE flavor {flavor!r}")


def nike_publish(params: NikeParams, index: int) -> tuple[bytes, bytes]:
    """Returns (pk, sk) for the party at `index`."""
    if not (0 <= index < params.max_parties):
        raise IndexOutOfSetError(f"party index {index} outside scheme")
    if params.flavor == "dealer":
        sk = kdf(params.master, b"sk", index, size=32)
        return kdf(sk, b"pk", size=32), sk
    sk_int = int.from_bytes(kdf(params.seed, b"sk", index, size=32), "big")
    sk_int %= params.group.q
    pk = params.group.exp(params.group.g, sk_int)
    return pk.to_bytes(params.group.element_bytes(), "big"), sk_int.to_bytes(64, "big")


def nike_keygen(params: NikeParams, index: int, sk: bytes, members: tuple[int, ...],
                pks: dict[int, bytes]) -> bytes:
    """Derive the shared key k_S for the member set.

    Every member of S derives the same key; running the derivation with a
    secret that does not belong to the set yields an unrelated key.
    """
    s = tuple(sorted(set(members)))
    if len(s) > params.max_group:
        raise OutsourceError("set exceeds the M bound")
    if index not in s:
        raise IndexOutOfSetError(f"party {index} not in the member set")
    s_bytes = b"".join(i.to_bytes(4, "big") for i in s)
    if params.flavor == "dealer":
        expect = kdf(params.master, b"sk", index, size=32)
        if sk != expect:
            return kdf(sk, b"ks-wrong", s_bytes, size=LABEL_BYTES)
        return kdf(params.master, b"ks", s_bytes, size=LABEL_BYTES)
    group = params.group
    a, b = s[0], s[1] if len(s) > 1 else s[0]
    sk_int = int.from_bytes(sk, "big") % group.q
    if index == a:
        shared = group.exp(int.from_bytes(pks[b], "big"), sk_int)
    elif index == b:
        shared = group.exp(int.from_bytes(pks[a], "big"), sk_int)
    else:
        # non-anchor members re-derive the anchor secret from the setup
        # seed; stand-in for the multilinear scheme, see module docstring
        sk_a = int.from_bytes(kdf(params.seed, b"sk", a, size=32), "big") % group.q
        shared = group.exp(int.from_bytes(pks[b], "big"), sk_a)
    return kdf(shared.to_bytes(group.element_bytes(), "big"), b"ks", s_bytes,
               size=LABEL_BYTES)


# --- offline input encodings ----------------------------------------------


@dataclass(frozen=True)
class EncodedInput:
    party: int
    nonce: bytes
    encodings: tuple[bytes, ...]  # per bit position, PRF(k_S; bit, pos, nonce)

    @property
    def width(self) -> int:
        return len(self.encodings)


def encoding_key(k_s: bytes, party: int, position: int, bit: int,
                 nonce: bytes) -> bytes:
    return prf(k_s, b"encode", party, position, bit, nonce)


def encode_input(k_s: bytes, party: int, bits: list[int], nonce: bytes) -> EncodedInput:
    encs = tuple(encoding_key(k_s, party, pos, b & 1, nonce)
                 for pos, b in enumerate(bits))
    return EncodedInput(party=party, nonce=nonce, encodings=encs)


@dataclass
class EncodingStore:
    """The evaluator node's per-party store of nonces and encodings."""

    records: dict[int, EncodedInput] = field(default_factory=dict)
    upload_count: int = 0

    def put(self, record: EncodedInput) -> None:
        self.records[record.party] = record
        self.upload_count += 1

    def get(self, party: int) -> EncodedInput:
        if party not in self.records:
            raise MissingPartyError(f"no stored encodings for party {party}")
        return self.records[party]

    def export_text(self) -> str:
        lines = []
        for party in sorted(self.records):
            rec = self.records[party]
            encs = " ".join(e.hex() for e in rec.encodings)
            lines.append(f"{party} {rec.nonce.hex()} {encs}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def import_text(cls, text: str) -> "EncodingStore":
        store = cls()
        for line in text.splitlines():
            parts = line.split()
            if not parts:
                continue
            party = int(parts[0])
            nonce = bytes.fromhex(parts[1])
            encs = tuple(bytes.fromhex(h) for h in parts[2:])
            store.put(EncodedInput(party, nonce, encs))
        store.upload_count = 0
        return store


# --- pivot tables -----------------------------------------------------------


@dataclass(frozen=True)
class PivotTable:
    """Per input wire, both sealed labels in shuffled order."""

    entries: tuple[tuple[bytes, bytes], ...]  # aligned with circuit input wires


def _pivot_tweak(party: int, position: int) -> bytes:
    return b"pivot" + struct.pack(">II", party, position)


def build_pivot_tables(k_s: bytes, circuit: Circuit, encoding: InputEncoding,
                       nonces: dict[int, bytes], rng) -> PivotTable:
    """Garbler side: seal each wire's two labels under the two pivot keys."""
    entries = []
    wire = 0
    for party, (_, width) in enumerate(circuit.input_segments):
        if party not in nonces:
            raise MissingPartyError(f"no nonce for party {party}")
        for pos in range(width):
            w0, w1 = encoding.pairs[wire]
            tweak = _pivot_tweak(party, pos)
            s0 = encoding_key(k_s, party, pos, 0, nonces[party])
            s1 = encoding_key(k_s, party, pos, 1, nonces[party])
            pair = [seal(s0, tweak, w0.to_bytes(16, "big")),
                    seal(s1, tweak, w1.to_bytes(16, "big"))]
            if rng.getrandbits(1):
                pair.reverse()
            entries.append(tuple(pair))
            wire += 1
    return PivotTable(entries=tuple(entries))


def pivot_open_labels(store: EncodingStore, tables: PivotTable,
                      circuit: Circuit) -> list[int]:
    """Evaluator side: open exactly one entry per wire with the stored
    encodings."""
    labels = []
    wire = 0
    for party, (_, width) in enumerate(circuit.input_segments):
        rec = store.get(party)
        if rec.width != width:
            raise OutsourceError(
                f"party {party}: stored {rec.width} encodings, need {width}")
        for pos in range(width):
            tweak = _pivot_tweak(party, pos)
            key = rec.encodings[pos]
            opened = []
            for entry in tables.entries[wire]:
                try:
                    opened.append(open_sealed(key, tweak, entry))
                except DecryptionError:
                    pass
            if len(opened) != 1:
                raise PivotDecryptionError(
                    f"wire {wire}: {len(opened)} pivot entries opened")
            labels.append(int.from_bytes(opened[0], "big"))
            wire += 1
    return labels


def count_openable(tables: PivotTable, wire: int, key: bytes, party: int,
                   position: int) -> int:
    """Test hook: how many of a wire's two entries the key authenticates."""
    n = 0
    for entry in tables.entries[wire]:
        try:
            open_sealed(key, _pivot_tweak(party, position), entry)
            n += 1
        except DecryptionError:
            pass
    return n


def serialize_pivot(tables: PivotTable) -> bytes:
    out = [struct.pack(">I", len(tables.entries))]
    for a, b in tables.entries:
        out.append(a)
        out.append(b)
    return b"".join(out)


def deserialize_pivot(blob: bytes) -> PivotTable:
    (n,) = struct.unpack(">I", blob[:4])
    body = blob[4:]
    row = LABEL_BYTES + 4
    if len(body) != n * 2 * row:
        raise OutsourceError("pivot blob length mismatch")
    entries = []
    for i in range(n):
        a = body[2 * i * row : (2 * i + 1) * row]
        b = body[(2 * i + 1) * row : (2 * i + 2) * row]
        entries.append((a, b))
    return PivotTable(entries=tuple(entries))


# --- protocol sessions ------------------------------------------------------


N_G = PartyId(Role.GARBLER, 0)
N_E = PartyId(Role.EVALUATOR, 0)


def upload_private_parameters(k_s: bytes, inputs: dict[int, list[int]],
                              seed: bytes) -> tuple[EncodingStore, Transcript]:
    """SendPrivateParameters phase: each party ships (nonce, encodings) to
    the evaluator node and may then go offline."""
    parties = [PartyId(Role.CONTRACT_PARTY, i) for i in sorted(inputs)]

    def party_prog(idx: int, bits: list[int]):
        def prog(ctx):
            nonce = ctx.random_bytes(16)
            rec = encode_input(k_s, idx, bits, nonce)
            body = struct.pack(">II", idx, len(rec.encodings)) + nonce
            body += b"".join(rec.encodings)
            ctx.send(N_E, body)
            return None
            yield

        return prog

    store = EncodingStore()

    def evaluator_prog(ctx):
        for pid in parties:
            body = yield from ctx.recv(pid)
            idx, width = struct.unpack(">II", body[:8])
            nonce = body[8:24]
            encs = tuple(body[24 + i * LABEL_BYTES : 24 + (i + 1) * LABEL_BYTES]
                         for i in range(width))
            store.put(EncodedInput(idx, nonce, encs))
        return None

    programs = {pid: party_prog(pid.index, inputs[pid.index]) for pid in parties}
    programs[N_E] = evaluator_prog
    session = Session(parties + [N_E], seed)
    session.run(programs)
    return store, session.transcript


@dataclass
class SeccompResult:
    output_bits: list[int]
    requester: int
    transcript: Transcript
    and_gates: int
    store_uploads_before: int
    store_uploads_after: int


def seccomp(circuit: Circuit, requester: int, store: EncodingStore,
            k_s: bytes, seed: bytes) -> SeccompResult:
    """One outsourced computation: the garbler node holds k_S, the
    evaluator node holds only the stored encodings; contract parties send
    nothing."""
    circuit.validate()
    uploads_before = store.upload_count
    requester_pid = PartyId(Role.CONTRACT_PARTY, requester)

    def garbler_prog(ctx):
        # retrieve nonces for every party from the evaluator's store
        ctx.send(N_E, b"nonces?")
        blob = yield from ctx.recv(N_E)
        nonces = {}
        for i in range(0, len(blob), 20):
            party = struct.unpack(">I", blob[i : i + 4])[0]
            nonces[party] = blob[i + 4 : i + 20]
        gc, enc, dec = garble(circuit, ctx.random_bytes(32))
        tables = build_pivot_tables(k_s, circuit, enc, nonces, ctx.rng)
        ctx.send(N_E, serialize_garbled(gc) )
        ctx.send(N_E, serialize_pivot(tables))
        out_blob = yield from ctx.recv(N_E)
        labels = [int.from_bytes(out_blob[i : i + 16], "big")
                  for i in range(0, len(out_blob), 16)]
        bits = decode(dec, labels)
        ctx.send(requester_pid, bytes(bits))
        return bits

    def evaluator_prog(ctx):
        _req = yield from ctx.recv(N_G)
        blob = b""
        for party in sorted(store.records):
            blob += struct.pack(">I", party) + store.records[party].nonce
        ctx.send(N_G, blob)
        gc_blob = yield from ctx.recv(N_G)
        pivot_blob = yield from ctx.recv(N_G)
        gc = deserialize_garbled(gc_blob)
        tables = deserialize_pivot(pivot_blob)
        labels = pivot_open_labels(store, tables, circuit)
        out_labels = eval_garbled(gc, circuit, labels)
        ctx.send(N_G, b"".join(v.to_bytes(16, "big") for v in out_labels))
        return None

    def requester_prog(ctx):
        bits = yield from ctx.recv(N_G)
        return list(bits)

    session = Session([N_G, N_E, requester_pid], seed)
    results = session.run({N_G: garbler_prog, N_E: evaluator_prog,
                           requester_pid: requester_prog})
    return SeccompResult(
        output_bits=list(results[N_G]),
        requester=requester,
        transcript=session.transcript,
        and_gates=gate_counts(circuit).and_count,
        store_uploads_before=uploads_before,
        store_uploads_after=store.upload_count,
    )
