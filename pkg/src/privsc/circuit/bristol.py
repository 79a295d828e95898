"""Bristol-fashion circuit text: emit and parse.

Layout (UTF-8, LF line endings):

    <n_gates> <n_wires>
    <n_parties> <width_1> ... <width_p>
    <n_outputs> <out_wire_1> ... <out_wire_k>
    2 1 <in_a> <in_b> <out> AND|XOR     (one line per gate)
    1 1 <in_a> <out> INV

parse(emit(c)) reproduces c structurally.
"""

from __future__ import annotations

from .ir import AND, XOR, INV, KIND_IDS, KIND_NAMES, Circuit


class CircuitParseError(Exception):
    def __init__(self, line_no: int, message: str) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def emit_circuit(circuit: Circuit) -> str:
    lines = [f"{len(circuit.gates)} {circuit.n_wires}"]
    widths = " ".join(str(w) for _, w in circuit.input_segments)
    lines.append(f"{len(circuit.input_segments)} {widths}".rstrip())
    outs = " ".join(str(w) for w in circuit.output_wires)
    lines.append(f"{len(circuit.output_wires)} {outs}".rstrip())
    for kind, a, b, out in circuit.gates:
        if kind == INV:
            lines.append(f"1 1 {a} {out} INV")
        else:
            lines.append(f"2 1 {a} {b} {out} {KIND_NAMES[kind]}")
    return "\n".join(lines) + "\n"


def _ints(line: str, line_no: int, expect: int | None = None) -> list[int]:
    parts = line.split()
    try:
        vals = [int(p) for p in parts]
    except ValueError as exc:
        raise CircuitParseError(line_no, f"expected integers, got {line!r}") from exc
    if expect is not None and len(vals) != expect:
        raise CircuitParseError(line_no, f"expected {expect} fields, got {len(vals)}")
    return vals


def parse_circuit(text: str) -> Circuit:
    lines = text.splitlines()
    if len(lines) < 3:
        raise CircuitParseError(len(lines), "truncated header")
    n_gates, n_wires = _ints(lines[0], 1, 2)
    head = _ints(lines[1], 2)
    if not head or head[0] != len(head) - 1:
        raise CircuitParseError(2, "party count does not match widths")
    widths = head[1:]
    segments = []
    start = 0
    for w in widths:
        segments.append((start, w))
        start += w
    out_head = _ints(lines[2], 3)
    if not out_head or out_head[0] != len(out_head) - 1:
        raise CircuitParseError(3, "output count does not match wire list")
    outputs = tuple(out_head[1:])
    gates = []
    for idx in range(n_gates):
        line_no = 4 + idx
        if 3 + idx >= len(lines):
            raise CircuitParseError(line_no, "missing gate line")
        parts = lines[3 + idx].split()
        if not parts:
            raise CircuitParseError(line_no, "empty gate line")
        name = parts[-1]
        if name not in KIND_IDS:
            raise CircuitParseError(line_no, f"unknown gate kind {name!r}")
        kind = KIND_IDS[name]
        nums = _ints(" ".join(parts[:-1]), line_no)
        if kind == INV:
            if nums[:2] != [1, 1] or len(nums) != 4:
                raise CircuitParseError(line_no, "INV gate expects '1 1 in out'")
            gates.append((INV, nums[2], nums[2], nums[3]))
        else:
            if nums[:2] != [2, 1] or len(nums) != 5:
                raise CircuitParseError(line_no, "binary gate expects '2 1 a b out'")
            gates.append((kind, nums[2], nums[3], nums[4]))
    circuit = Circuit(
        n_wires=n_wires,
        gates=tuple(gates),
        input_segments=tuple(segments),
        output_wires=outputs,
    )
    try:
        circuit.validate()
    except Exception as exc:
        raise CircuitParseError(4 + n_gates, f"invalid circuit: {exc}") from exc
    return circuit
