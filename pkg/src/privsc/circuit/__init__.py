"""Boolean-circuit IR, gadget compiler and plaintext evaluator."""

from .ir import (
    AND,
    XOR,
    INV,
    KIND_NAMES,
    Circuit,
    CircuitError,
    GateCounts,
    InputArityError,
    eval_plaintext,
    eval_plaintext_batch,
    gate_counts,
)
from .builder import CircuitBuilder, CONST0, CONST1
from .bristol import emit_circuit, parse_circuit, CircuitParseError
from .gadgets import build_gadget, GADGET_NAMES, UnknownGadgetError
from .fixedpoint import FixedPoint, FRACTION_BITS, WORD_BITS

__all__ = [
    "AND",
    "XOR",
    "INV",
    "KIND_NAMES",
    "Circuit",
    "CircuitError",
    "GateCounts",
    "InputArityError",
    "eval_plaintext",
    "eval_plaintext_batch",
    "gate_counts",
    "CircuitBuilder",
    "CONST0",
    "CONST1",
    "emit_circuit",
    "parse_circuit",
    "CircuitParseError",
    "build_gadget",
    "GADGET_NAMES",
    "UnknownGadgetError",
    "FixedPoint",
    "FRACTION_BITS",
    "WORD_BITS",
]
