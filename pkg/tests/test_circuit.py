"""Circuit IR, evaluator and serialization tests."""

import random

import pytest

from privsc.circuit import (
    AND,
    XOR,
    Circuit,
    CircuitBuilder,
    CircuitParseError,
    InputArityError,
    emit_circuit,
    eval_plaintext,
    eval_plaintext_batch,
    gate_counts,
    parse_circuit,
)
from privsc.circuit.ir import bits_to_int, int_to_bits


def single_gate(kind):
    b = CircuitBuilder()
    x = b.add_input_party(1)[0]
    y = b.add_input_party(1)[0]
    op = b.band if kind == AND else b.bxor
    return b.finish([op(x, y)])


@pytest.mark.parametrize("x,y,expect", [(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 1)])
def test_single_and_gate(x, y, expect):
    assert eval_plaintext(single_gate(AND), [[x], [y]]) == [expect]


@pytest.mark.parametrize("x,y,expect", [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)])
def test_single_xor_gate(x, y, expect):
    assert eval_plaintext(single_gate(XOR), [[x], [y]]) == [expect]


def test_arity_mismatch_raises():
    c = single_gate(AND)
    with pytest.raises(InputArityError):
        eval_plaintext(c, [[1, 0], [1]])
    with pytest.raises(InputArityError):
        eval_plaintext(c, [[1]])


def test_gate_counts_empty_and_small():
    b = CircuitBuilder()
    b.add_input_party(1)
    empty = b.finish([0])
    assert gate_counts(empty) == gate_counts(empty).__class__(0, 0, 0)

    b = CircuitBuilder()
    x = b.add_input_party(1)[0]
    y = b.add_input_party(1)[0]
    c = b.finish([b.band(x, y), b.bxor(x, y)])
    gc = gate_counts(c)
    assert (gc.and_count, gc.xor_count, gc.inv_count) == (1, 1, 0)


def test_eval_is_deterministic():
    rng = random.Random(7)
    c = random_circuit(rng, 200)
    inputs = random_inputs(rng, c)
    first = eval_plaintext(c, inputs)
    for _ in range(5):
        assert eval_plaintext(c, inputs) == first


def random_circuit(rng, n_gates, parties=(8, 8)):
    b = CircuitBuilder()
    wires = []
    for w in parties:
        wires.extend(b.add_input_party(w))
    for _ in range(n_gates):
        op = rng.choice(("and", "xor", "inv"))
        if op == "inv":
            wires.append(b.bnot(rng.choice(wires)))
        elif op == "and":
            wires.append(b.band(rng.choice(wires), rng.choice(wires)))
        else:
            wires.append(b.bxor(rng.choice(wires), rng.choice(wires)))
    outs = [w for w in rng.sample(wires, min(8, len(wires))) if w >= 0] or [wires[0]]
    return b.finish(outs)


def random_inputs(rng, circuit):
    return [[rng.randint(0, 1) for _ in range(circuit.party_width(p))]
            for p in range(circuit.n_parties)]


def test_batch_matches_single():
    rng = random.Random(11)
    c = random_circuit(rng, 300)
    batch = [random_inputs(rng, c) for _ in range(50)]
    outs = eval_plaintext_batch(c, batch)
    for inputs, out in zip(batch, outs):
        assert eval_plaintext(c, inputs) == out


def test_validate_rejects_forward_reference():
    c = Circuit(
        n_wires=3,
        gates=((AND, 0, 2, 2),),
        input_segments=((0, 2),),
        output_wires=(2,),
    )
    with pytest.raises(Exception):
        c.validate()


def test_bits_roundtrip():
    for v in (0, 1, 5, 255, -1, -128, 2**31 - 1, -(2**31)):
        assert bits_to_int(int_to_bits(v, 32), signed=True) == v


class TestBristol:
    def test_empty_roundtrip(self):
        b = CircuitBuilder()
        b.add_input_party(2)
        c = b.finish([0, 1])
        assert parse_circuit(emit_circuit(c)) == c

    def test_single_and_roundtrip(self):
        c = single_gate(AND)
        text = emit_circuit(c)
        assert "AND" in text
        assert parse_circuit(text) == c

    def test_random_roundtrip_preserves_counts(self):
        rng = random.Random(3)
        for _ in range(10):
            c = random_circuit(rng, rng.randint(1, 120))
            c2 = parse_circuit(emit_circuit(c))
            assert c2 == c
            assert gate_counts(c2) == gate_counts(c)

    def test_parse_error_carries_line_number(self):
        c = single_gate(AND)
        lines = emit_circuit(c).splitlines()
        lines[3] = "2 1 0 1 2 NAND"
        with pytest.raises(CircuitParseError) as err:
            parse_circuit("\n".join(lines))
        assert "line 4" in str(err.value)

    def test_parse_rejects_bad_header(self):
        with pytest.raises(CircuitParseError):
            parse_circuit("1\n")
