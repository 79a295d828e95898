"""Yao garbling with free XOR and point-and-permute.

Labels are 128-bit values; within a wire the two labels differ by a
global offset R whose low bit is forced to 1, so a label's low bit is its
permute bit.  XOR gates are free, INV gates swap label roles; only AND
gates carry a 4-row table in permute-bit order.  Rows are sealed with the
authenticated pad cipher from `hashing`, so evaluation decrypts exactly
one row per gate and any corrupted label or row fails its tag.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass

from .circuit import AND, XOR, INV, Circuit, emit_circuit
from .hashing import (
    LABEL_BYTES,
    ROW_BYTES,
    DecryptionError,
    digest_hex,
    kdf,
    open_sealed,
    seal,
)

MAGIC = b"PGC1"


class GarbleError(Exception):
    pass


@dataclass(frozen=True)
class WireLabel:
    """One wire label; permute bit is the least significant bit."""

    bits: bytes

    @property
    def permute_bit(self) -> int:
        return self.bits[-1] & 1

    @classmethod
    def from_int(cls, value: int) -> "WireLabel":
        return cls(value.to_bytes(LABEL_BYTES, "big"))

    def to_int(self) -> int:
        return int.from_bytes(self.bits, "big")


@dataclass(frozen=True)
class GarbledCircuit:
    tables: tuple[tuple[bytes, bytes, bytes, bytes], ...]
    and_gate_indices: tuple[int, ...]
    circuit_digest: str
    free_xor: bool = True


@dataclass(frozen=True)
class InputEncoding:
    """Per input wire, the (label0, label1) pair as ints."""

    pairs: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class OutputDecoding:
    """Per output wire, the permute bit of the 0-label."""

    permute_bits: tuple[int, ...]


def _label_bytes(v: int) -> bytes:
    return v.to_bytes(LABEL_BYTES, "big")


def _row_key(a: int, b: int) -> bytes:
    return _label_bytes(a) + _label_bytes(b)


def garble(circuit: Circuit, seed: bytes) -> tuple[GarbledCircuit, InputEncoding, OutputDecoding]:
    """Garble deterministically from a 256-bit seed."""
    import hashlib

    if len(seed) < 16:
        raise GarbleError("seed must be at least 16 bytes")
    offset = int.from_bytes(kdf(seed, b"global-offset"), "big") | 1
    n_in = circuit.n_inputs
    label_key = kdf(seed, b"wire-label-key", size=32)

    def fresh_label(w: int) -> int:
        return int.from_bytes(
            hashlib.blake2b(w.to_bytes(8, "big"), key=label_key,
                            digest_size=LABEL_BYTES).digest(), "big")

    zero = [0] * circuit.n_wires  # 0-label of every wire
    for w in range(n_in):
        zero[w] = fresh_label(w)

    tables = []
    and_idx = []
    for gi, (kind, a, b, out) in enumerate(circuit.gates):
        if kind == XOR:
            zero[out] = zero[a] ^ zero[b]
            continue
        if kind == INV:
            zero[out] = zero[a] ^ offset
            continue
        out0 = fresh_label(out)
        zero[out] = out0
        rows: list[bytes] = [b""] * 4
        tweak = gi.to_bytes(8, "big")
        a0, b0 = zero[a], zero[b]
        for va in (0, 1):
            la = a0 ^ offset if va else a0
            for vb in (0, 1):
                lb = b0 ^ offset if vb else b0
                lo = out0 ^ offset if (va & vb) else out0
                idx = (la & 1) << 1 | (lb & 1)
                rows[idx] = seal(_row_key(la, lb), tweak + bytes([idx]), _label_bytes(lo))
        tables.append(tuple(rows))
        and_idx.append(gi)

    pairs = tuple((zero[w], zero[w] ^ offset) for w in range(n_in))
    out_perm = tuple(zero[w] & 1 for w in circuit.output_wires)
    gc = GarbledCircuit(
        tables=tuple(tables),
        and_gate_indices=tuple(and_idx),
        circuit_digest=digest_hex(emit_circuit(circuit).encode()),
    )
    return gc, InputEncoding(pairs), OutputDecoding(out_perm)


def encode(encoding: InputEncoding, inputs: list[int]) -> list[int]:
    """Select the active label per input wire."""
    if len(inputs) != len(encoding.pairs):
        raise GarbleError(
            f"expected {len(encoding.pairs)} input bits, got {len(inputs)}"
        )
    return [pair[1] if bit else pair[0] for pair, bit in zip(encoding.pairs, inputs)]


def eval_garbled(gc: GarbledCircuit, circuit: Circuit, labels: list[int]) -> list[int]:
    """Evaluate on active input labels; returns active output labels.

    Raises DecryptionError if any AND-gate row fails authentication,
    which signals a corrupted label or table.
    """
    n_in = circuit.n_inputs
    if len(labels) != n_in:
        raise GarbleError(f"expected {n_in} input labels, got {len(labels)}")
    values = [0] * circuit.n_wires
    values[:n_in] = labels
    ti = 0  # AND tables appear in gate order
    for gi, (kind, a, b, out) in enumerate(circuit.gates):
        if kind == XOR:
            values[out] = values[a] ^ values[b]
        elif kind == INV:
            values[out] = values[a]
        else:
            la, lb = values[a], values[b]
            idx = (la & 1) << 1 | (lb & 1)
            row = gc.tables[ti][idx]
            ti += 1
            tweak = gi.to_bytes(8, "big") + bytes([idx])
            plain = open_sealed(_row_key(la, lb), tweak, row)
            values[out] = int.from_bytes(plain, "big")
    return [values[w] for w in circuit.output_wires]


def decode(decoding: OutputDecoding, labels: list[int]) -> list[int]:
    """Map active output labels to plaintext bits via their permute bits."""
    if len(labels) != len(decoding.permute_bits):
        raise GarbleError("output label count mismatch")
    return [(lab & 1) ^ p for lab, p in zip(labels, decoding.permute_bits)]


def count_valid_rows(gc: GarbledCircuit, and_position: int, la: int, lb: int) -> int:
    """Test instrumentation: how many rows of one AND table authenticate
    under the active label pair (must be exactly one for honest labels)."""
    gi = gc.and_gate_indices[and_position]
    n = 0
    for idx, row in enumerate(gc.tables[and_position]):
        try:
            open_sealed(_row_key(la, lb), gi.to_bytes(8, "big") + bytes([idx]), row)
            n += 1
        except DecryptionError:
            pass
    return n


def serialize_garbled(gc: GarbledCircuit) -> bytes:
    """Versioned binary form: header (magic, kappa, counts, digest) + rows."""
    out = io.BytesIO()
    out.write(MAGIC)
    digest = bytes.fromhex(gc.circuit_digest)
    out.write(struct.pack(">HHI", LABEL_BYTES * 8, len(digest), len(gc.tables)))
    out.write(digest)
    out.write(struct.pack(">B", 1 if gc.free_xor else 0))
    for gi in gc.and_gate_indices:
        out.write(struct.pack(">I", gi))
    for rows in gc.tables:
        for row in rows:
            out.write(row)
    return out.getvalue()


def deserialize_garbled(data: bytes) -> GarbledCircuit:
    view = io.BytesIO(data)
    if view.read(4) != MAGIC:
        raise GarbleError("bad magic bytes")
    kappa, dlen, n_tables = struct.unpack(">HHI", view.read(8))
    if kappa != LABEL_BYTES * 8:
        raise GarbleError(f"unsupported label width {kappa}")
    digest = view.read(dlen).hex()
    (free_xor,) = struct.unpack(">B", view.read(1))
    idx = struct.unpack(f">{n_tables}I", view.read(4 * n_tables)) if n_tables else ()
    tables = []
    for _ in range(n_tables):
        rows = tuple(view.read(ROW_BYTES) for _ in range(4))
        if any(len(r) != ROW_BYTES for r in rows):
            raise GarbleError("truncated garbled table")
        tables.append(rows)
    return GarbledCircuit(
        tables=tuple(tables),
        and_gate_indices=tuple(idx),
        circuit_digest=digest,
        free_xor=bool(free_xor),
    )
