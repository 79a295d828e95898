"""Private contract execution: parties ship input shares to two executing
nodes, the nodes run a garbled-circuit session, and the result reaches the
ledger through deterministic consensus.

Every contract party XOR-shares each input bit between the garbling node
and the evaluating node, so no node (and no transcript) ever carries a
plaintext input.  The two nodes evaluate the share-recombining expansion
of the contract circuit; extra nodes replicate the result bytes for the
consensus quorum.  Engine selection is checked before any message is
sent: disagreement aborts with an empty transcript.
"""

from __future__ import annotations

import struct
import time
from dataclasses import dataclass, field

from .chain import Block, Ledger, append_with_consensus
from .circuit import Circuit, CircuitBuilder, gate_counts
from .garble import (
    decode,
    deserialize_garbled,
    encode,
    eval_garbled,
    garble,
    serialize_garbled,
)
from .ot import DEALER, TOY_GROUP, OtMessagePair, ot_dealer, ot_recv, ot_send
from .transport import PartyId, Role, Session, Transcript


class MpcError(Exception):
    pass


class EngineDisagreement(MpcError):
    pass


class VerificationRequired(MpcError):
    pass


SUPPORTED_ENGINES = ("yao_semi_honest",)


@dataclass(frozen=True)
class EngineChoice:
    declared_by: tuple[str, ...]

    def agreed(self) -> str:
        choices = set(self.declared_by)
        if len(choices) != 1:
            raise EngineDisagreement(
                f"parties disagree on the engine: {sorted(choices)}")
        engine = choices.pop()
        if engine not in SUPPORTED_ENGINES:
            raise EngineDisagreement(f"unsupported engine {engine!r}")
        return engine


@dataclass
class SessionResult:
    output_bits: list[int]
    per_party: dict[PartyId, list[int]]
    ledger_block: Block | None
    transcript: Transcript
    and_gates: int
    message_count: int
    message_bytes: int
    timings: dict[str, float] = field(default_factory=dict)


def shared_input_circuit(circuit: Circuit) -> Circuit:
    """Two-segment expansion: node G holds one XOR share of every input
    bit, node E the other; free XOR gates recombine before the contract
    gates run."""
    n_in = circuit.n_inputs
    b = CircuitBuilder()
    g_share = b.add_input_party(n_in)
    e_share = b.add_input_party(n_in)
    mapping = [b.bxor(x, y) for x, y in zip(g_share, e_share)]
    for kind, a, bb, out in circuit.gates:
        if kind == 0:
            mapping.append(b.band(mapping[a], mapping[bb]))
        elif kind == 1:
            mapping.append(b.bxor(mapping[a], mapping[bb]))
        else:
            mapping.append(b.bnot(mapping[a]))
    return b.finish([mapping[w] for w in circuit.output_wires])


def _pack_bits(bits: list[int]) -> bytes:
    out = bytearray(struct.pack(">I", len(bits)))
    acc = 0
    for i, bit in enumerate(bits):
        if bit:
            acc |= 1 << i
    out += acc.to_bytes((len(bits) + 7) // 8 or 1, "big")
    return bytes(out)


def _unpack_bits(blob: bytes) -> list[int]:
    (n,) = struct.unpack(">I", blob[:4])
    acc = int.from_bytes(blob[4:], "big")
    return [(acc >> i) & 1 for i in range(n)]


def _pack_labels(labels: list[int]) -> bytes:
    return b"".join(v.to_bytes(16, "big") for v in labels)


def _unpack_labels(blob: bytes) -> list[int]:
    return [int.from_bytes(blob[i : i + 16], "big")
            for i in range(0, len(blob), 16)]


def run_private_contract(
    contract: Circuit,
    inputs: list[list[int]],
    engines: EngineChoice,
    nodes: int = 2,
    ledger: Ledger | None = None,
    seed: bytes = b"\x00" * 32,
    ot_flavor: str = "dealer",
    package=None,
    policy=None,
    waive_verification: bool = False,
    write_ledger: bool = True,
    quorum: int | None = None,
) -> SessionResult:
    """Run Protocol-4.2-style execution of a contract circuit.

    Contract verification runs first when a package is supplied (or is
    explicitly waived); engine unanimity is checked before any protocol
    message exists.
    """
    if package is not None and not waive_verification:
        from .verify import verify_standard

        ok, reasons = verify_standard(package, policy)
        if not ok:
            raise VerificationRequired(
                f"contract failed verification: {reasons}")
    elif package is None and not waive_verification:
        raise VerificationRequired(
            "no contract package supplied; pass waive_verification=True "
            "to run unverified")

    if nodes < 2:
        raise MpcError("need at least two executing nodes")
    engines.agreed()  # raises before any message on disagreement

    contract.validate()
    for party, bits in enumerate(inputs):
        if len(bits) != contract.party_width(party):
            raise MpcError(f"party {party}: input width mismatch")

    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    expanded = contract._cache.get("shared_expansion")
    if expanded is None:
        expanded = shared_input_circuit(contract)
        contract._cache["shared_expansion"] = expanded
    timings["compile_s"] = time.perf_counter() - t0

    parties = [PartyId(Role.CONTRACT_PARTY, i) for i in range(len(inputs))]
    n_g = PartyId(Role.GARBLER, 0)
    n_e = PartyId(Role.EVALUATOR, 0)
    extra = [PartyId(Role.NODE, 2 + i) for i in range(nodes - 2)]
    session_parties = parties + [n_g, n_e] + extra
    if ot_flavor == "dealer":
        session_parties.append(DEALER)

    n_in = contract.n_inputs

    def party_prog(pid: PartyId, bits: list[int]):
        def prog(ctx):
            share = [ctx.rng.getrandbits(1) for _ in bits]
            other = [x ^ r for x, r in zip(bits, share)]
            ctx.send(n_g, _pack_bits(share))
            ctx.send(n_e, _pack_bits(other))
            blob = yield from ctx.recv(n_g)
            return _unpack_bits(blob)

        return prog

    def garbler_prog(ctx):
        g_bits: list[int] = []
        for pid in parties:
            got = yield from ctx.recv(pid)
            g_bits.extend(_unpack_bits(got))
        t = time.perf_counter()
        gc, enc, dec = garble(expanded, ctx.random_bytes(32))
        timings["garble_s"] = time.perf_counter() - t
        ctx.send(n_e, serialize_garbled(gc))
        own_labels = encode(enc, g_bits + [0] * n_in)[:n_in]
        ctx.send(n_e, _pack_labels(own_labels))
        pairs = [OtMessagePair(p0.to_bytes(16, "big"), p1.to_bytes(16, "big"))
                 for p0, p1 in enc.pairs[n_in:]]
        yield from ot_send(ctx, n_e, pairs, ot_flavor, TOY_GROUP, session_id=1)
        out_blob = yield from ctx.recv(n_e)
        result = decode(dec, _unpack_labels(out_blob))
        payload = _pack_bits(result)
        ctx.send(n_e, payload)
        for pid in parties:
            ctx.send(pid, payload)
        for node in extra:
            ctx.send(node, payload)
        return bytes(payload)

    def evaluator_prog(ctx):
        e_bits: list[int] = []
        for pid in parties:
            got = yield from ctx.recv(pid)
            e_bits.extend(_unpack_bits(got))
        gc_blob = yield from ctx.recv(n_g)
        gc = deserialize_garbled(gc_blob)
        g_label_blob = yield from ctx.recv(n_g)
        g_labels = _unpack_labels(g_label_blob)
        mine = yield from ot_recv(ctx, n_g, e_bits, ot_flavor, TOY_GROUP,
                                  session_id=1)
        e_labels = [int.from_bytes(m, "big") for m in mine]
        t = time.perf_counter()
        out_labels = eval_garbled(gc, expanded, g_labels + e_labels)
        timings["eval_s"] = time.perf_counter() - t
        ctx.send(n_g, _pack_labels(out_labels))
        blob = yield from ctx.recv(n_g)
        return bytes(blob)

    def echo_prog(ctx):
        blob = yield from ctx.recv(n_g)
        return bytes(blob)

    programs = {pid: party_prog(pid, bits)
                for pid, bits in zip(parties, inputs)}
    programs[n_g] = garbler_prog
    programs[n_e] = evaluator_prog
    for node in extra:
        programs[node] = echo_prog
    if ot_flavor == "dealer":
        programs[DEALER] = lambda ctx: ot_dealer(ctx, n_g, n_e, session_id=1)

    t1 = time.perf_counter()
    session = Session(session_parties, seed)
    results = session.run(programs)
    timings["session_s"] = time.perf_counter() - t1

    output_bits = _unpack_bits(results[n_g])
    per_party = {pid: list(output_bits) for pid in parties}

    block = None
    if write_ledger and ledger is not None:
        node_results = [(str(n_g), results[n_g]), (str(n_e), results[n_e])]
        node_results += [(str(node), results[node]) for node in extra]
        k = quorum if quorum is not None else len(node_results)
        t2 = time.perf_counter()
        block = append_with_consensus(ledger, node_results, k)
        timings["consensus_s"] = time.perf_counter() - t2

    return SessionResult(
        output_bits=output_bits,
        per_party=per_party,
        ledger_block=block,
        transcript=session.transcript,
        and_gates=gate_counts(expanded).and_count,
        message_count=len(session.transcript),
        message_bytes=session.transcript.total_bytes(),
        timings=timings,
    )
