"""Circuit intermediate representation and the plaintext oracle evaluator.

A circuit is a DAG of AND/XOR/INV gates over integer wire ids.  Wires
0..n_inputs-1 are the primary inputs, split into per-party contiguous
segments; every other wire is driven by exactly one gate, and gates are
stored in topological order.  Circuits are immutable once constructed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

AND, XOR, INV = 0, 1, 2
KIND_NAMES = {AND: "AND", XOR: "XOR", INV: "INV"}
KIND_IDS = {v: k for k, v in KIND_NAMES.items()}


class CircuitError(Exception):
    """Raised when a circuit violates a structural invariant."""


class InputArityError(CircuitError):
    """Raised when supplied input bits do not match the input segments."""


@dataclass(frozen=True)
class GateCounts:
    and_count: int = 0
    xor_count: int = 0
    inv_count: int = 0

    @property
    def total(self) -> int:
        return self.and_count + self.xor_count + self.inv_count


@dataclass(frozen=True)
class Circuit:
    """Immutable boolean circuit.

    gates: tuples (kind, in_a, in_b, out); INV gates carry in_b == in_a.
    input_segments: per-party (start, width) ranges over the input wires.
    """

    n_wires: int
    gates: tuple[tuple[int, int, int, int], ...]
    input_segments: tuple[tuple[int, int], ...]
    output_wires: tuple[int, ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    @property
    def n_inputs(self) -> int:
        return sum(w for _, w in self.input_segments)

    def party_width(self, party: int) -> int:
        return self.input_segments[party][1]

    @property
    def n_parties(self) -> int:
        return len(self.input_segments)

    def validate(self) -> None:
        n_in = 0
        for start, width in self.input_segments:
            if start != n_in or width < 0:
                raise CircuitError("input segments must be contiguous from wire 0")
            n_in += width
        driven = [False] * self.n_wires
        available = n_in
        for j, (kind, a, b, out) in enumerate(self.gates):
            if kind not in KIND_NAMES:
                raise CircuitError(f"gate {j}: unknown kind {kind}")
            ins = (a,) if kind == INV else (a, b)
            for w in ins:
                if not (0 <= w < available):
                    raise CircuitError(f"gate {j}: input wire {w} not yet defined")
            if out != available:
                raise CircuitError(f"gate {j}: output wire {out} out of order")
            if out >= self.n_wires:
                raise CircuitError(f"gate {j}: output wire {out} exceeds wire count")
            if driven[out]:
                raise CircuitError(f"gate {j}: wire {out} driven twice")
            driven[out] = True
            available += 1
        if available != self.n_wires:
            raise CircuitError("wire count does not match inputs plus gates")
        for w in self.output_wires:
            if not (0 <= w < self.n_wires):
                raise CircuitError(f"output wire {w} undefined")


def gate_counts(circuit: Circuit) -> GateCounts:
    """Exact per-kind gate tallies from a full scan of the gate list."""
    n = [0, 0, 0]
    for kind, _, _, _ in circuit.gates:
        n[kind] += 1
    return GateCounts(and_count=n[AND], xor_count=n[XOR], inv_count=n[INV])


def _check_arity(circuit: Circuit, inputs) -> None:
    if len(inputs) != circuit.n_parties:
        raise InputArityError(
            f"expected inputs for {circuit.n_parties} parties, got {len(inputs)}"
        )
    for party, bits in enumerate(inputs):
        want = circuit.party_width(party)
        if len(bits) != want:
            raise InputArityError(
                f"party {party}: expected {want} input bits, got {len(bits)}"
            )


def eval_plaintext_batch(
    circuit: Circuit, batches: list[list[list[int]]]
) -> list[list[int]]:
    """Evaluate many input vectors at once.

    Wire values are carried as arbitrary-precision ints with one bit per
    batch element, so the cost of a gate is independent of batch size.
    """
    for inputs in batches:
        _check_arity(circuit, inputs)
    n_batch = len(batches)
    if n_batch == 0:
        return []
    values = [0] * circuit.n_wires
    wire = 0
    for party, (_, width) in enumerate(circuit.input_segments):
        for i in range(width):
            acc = 0
            for k in range(n_batch):
                if batches[k][party][i]:
                    acc |= 1 << k
            values[wire] = acc
            wire += 1
    mask = (1 << n_batch) - 1
    for kind, a, b, out in circuit.gates:
        if kind == XOR:
            values[out] = values[a] ^ values[b]
        elif kind == AND:
            values[out] = values[a] & values[b]
        else:
            values[out] = values[a] ^ mask
    outs = []
    for k in range(n_batch):
        outs.append([(values[w] >> k) & 1 for w in circuit.output_wires])
    return outs


def eval_plaintext(circuit: Circuit, inputs: list[list[int]]) -> list[int]:
    """Evaluate one input vector per party; returns the output bits."""
    return eval_plaintext_batch(circuit, [inputs])[0]


def int_to_bits(value: int, width: int) -> list[int]:
    """Two's-complement little-endian bit vector of `value`."""
    return [(value >> i) & 1 for i in range(width)]


def bits_to_int(bits: list[int], signed: bool = False) -> int:
    """Inverse of int_to_bits; interprets the vector as (un)signed."""
    v = 0
    for i, b in enumerate(bits):
        if b:
            v |= 1 << i
    if signed and bits and bits[-1]:
        v -= 1 << len(bits)
    return v
