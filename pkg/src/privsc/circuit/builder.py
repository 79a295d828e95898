"""Incremental circuit construction with compile-time constant folding.

Wire handles are ints: nonnegative values are real wires, the sentinels
CONST0/CONST1 are compile-time constants.  Gate helpers fold constants
away so that, e.g., multiplying by a constant bit pattern only emits the
gates the set bits require.  The only other rewrite is the INV involution
cache; there are no optimization passes beyond constant folding.
"""

from __future__ import annotations

from .ir import AND, XOR, INV, Circuit, CircuitError

CONST0 = -1
CONST1 = -2


def is_const(w: int) -> bool:
    return w < 0


def const_val(w: int) -> int:
    return 0 if w == CONST0 else 1


class CircuitBuilder:
    def __init__(self) -> None:
        self._segments: list[tuple[int, int]] = []
        self._gates: list[tuple[int, int, int, int]] = []
        self._n_wires = 0
        self._inputs_frozen = False
        self._inv_cache: dict[int, int] = {}

    def add_input_party(self, width: int) -> list[int]:
        """Declare the next party's contiguous input segment."""
        if self._inputs_frozen:
            raise CircuitError("all input parties must be declared before gates")
        start = self._n_wires
        self._segments.append((start, width))
        self._n_wires += width
        return list(range(start, start + width))

    def _emit(self, kind: int, a: int, b: int) -> int:
        self._inputs_frozen = True
        out = self._n_wires
        self._n_wires += 1
        self._gates.append((kind, a, b, out))
        return out

    def band(self, a: int, b: int) -> int:
        if is_const(a):
            return b if const_val(a) else CONST0
        if is_const(b):
            return a if const_val(b) else CONST0
        if a == b:
            return a
        return self._emit(AND, a, b)

    def bxor(self, a: int, b: int) -> int:
        if is_const(a) and is_const(b):
            return CONST1 if const_val(a) ^ const_val(b) else CONST0
        if is_const(a):
            return self.bnot(b) if const_val(a) else b
        if is_const(b):
            return self.bnot(a) if const_val(b) else a
        if a == b:
            return CONST0
        return self._emit(XOR, a, b)

    def bnot(self, a: int) -> int:
        if is_const(a):
            return CONST0 if const_val(a) else CONST1
        cached = self._inv_cache.get(a)
        if cached is not None:
            return cached
        out = self._emit(INV, a, a)
        self._inv_cache[a] = out
        self._inv_cache[out] = a
        return out

    def bor(self, a: int, b: int) -> int:
        if is_const(a):
            return CONST1 if const_val(a) else b
        if is_const(b):
            return CONST1 if const_val(b) else a
        if a == b:
            return a
        return self.bnot(self.band(self.bnot(a), self.bnot(b)))

    def mux_bit(self, sel: int, a: int, b: int) -> int:
        """a if sel else b."""
        return self.bxor(b, self.band(sel, self.bxor(a, b)))

    def and_many(self, bits: list[int]) -> int:
        acc = CONST1
        for b in bits:
            acc = self.band(acc, b)
        return acc

    def or_many(self, bits: list[int]) -> int:
        acc = CONST0
        for b in bits:
            acc = self.bor(acc, b)
        return acc

    def xor_many(self, bits: list[int]) -> int:
        acc = CONST0
        for b in bits:
            acc = self.bxor(acc, b)
        return acc

    def _materialize(self, w: int) -> int:
        if not is_const(w):
            return w
        # Bristol text has no constant wires; realize one from any input.
        if self._n_wires == 0:
            raise CircuitError("cannot materialize a constant in an input-free circuit")
        zero = self._emit(XOR, 0, 0)
        return zero if w == CONST0 else self.bnot(zero)

    def literal_bits(self, value: int, width: int) -> list[int]:
        """Constant materialized as fresh wires per bit, so no downstream
        algebraic identity can fold the consumers away."""
        if self._n_wires == 0:
            raise CircuitError("cannot materialize a constant in an input-free circuit")
        out = []
        for i in range(width):
            zero = self._emit(XOR, 0, 0)
            out.append(self._emit(INV, zero, zero) if (value >> i) & 1 else zero)
        return out

    def finish(self, outputs: list[int]) -> Circuit:
        outs = tuple(self._materialize(w) for w in outputs)
        circuit = Circuit(
            n_wires=self._n_wires,
            gates=tuple(self._gates),
            input_segments=tuple(self._segments),
            output_wires=outs,
        )
        circuit.validate()
        return circuit
