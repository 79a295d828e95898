"""Garbling scheme: correctness vs the plaintext oracle, free-XOR shape,
row authenticity and serialization."""

import random

import pytest

from privsc.circuit import CircuitBuilder, build_gadget, eval_plaintext
from privsc.circuit.ir import bits_to_int, int_to_bits
from privsc.garble import (
    GarbleError,
    count_valid_rows,
    decode,
    deserialize_garbled,
    encode,
    eval_garbled,
    garble,
    serialize_garbled,
)
from privsc.hashing import DecryptionError

from test_circuit import random_circuit, random_inputs

SEED = bytes(range(32))


def pipeline(circuit, inputs, seed=SEED):
    gc, enc, dec = garble(circuit, seed)
    flat = [bit for party in inputs for bit in party]
    labels = encode(enc, flat)
    return decode(dec, eval_garbled(gc, circuit, labels))


def test_same_seed_is_bit_identical():
    c = build_gadget("add", 8)
    a = garble(c, SEED)
    b = garble(c, SEED)
    assert a == b
    assert serialize_garbled(a[0]) == serialize_garbled(b[0])


def test_different_seeds_differ():
    c = build_gadget("add", 8)
    assert garble(c, SEED)[0] != garble(c, b"\x07" * 32)[0]


def test_xor_only_circuit_has_no_tables():
    b = CircuitBuilder()
    xs = b.add_input_party(8)
    ys = b.add_input_party(8)
    c = b.finish([b.bxor(x, y) for x, y in zip(xs, ys)])
    gc, enc, dec = garble(c, SEED)
    assert gc.tables == ()
    for x, y in [(0, 0), (170, 85), (255, 255)]:
        out = pipeline(c, [int_to_bits(x, 8), int_to_bits(y, 8)])
        assert bits_to_int(out) == x ^ y


def test_single_and_gate_truth_table():
    b = CircuitBuilder()
    x = b.add_input_party(1)[0]
    y = b.add_input_party(1)[0]
    c = b.finish([b.band(x, y)])
    for x_v in (0, 1):
        for y_v in (0, 1):
            assert pipeline(c, [[x_v], [y_v]]) == [x_v & y_v]


def test_encode_selects_correct_labels():
    c = build_gadget("add", 4)
    gc, enc, dec = garble(c, SEED)
    zeros = encode(enc, [0] * 8)
    ones = encode(enc, [1] * 8)
    assert zeros == [p[0] for p in enc.pairs]
    assert ones == [p[1] for p in enc.pairs]
    with pytest.raises(GarbleError):
        encode(enc, [0] * 7)


def test_free_xor_offset_consistency():
    c = build_gadget("add", 8)
    gc, enc, dec = garble(c, SEED)
    offsets = {p[0] ^ p[1] for p in enc.pairs}
    assert len(offsets) == 1
    assert offsets.pop() & 1 == 1  # forced permute bit on the offset
    from privsc.garble import WireLabel

    w0, w1 = (WireLabel.from_int(v) for v in enc.pairs[0])
    assert w0.permute_bit != w1.permute_bit
    assert w0.to_int() == enc.pairs[0][0]


def test_adder_matches_plaintext():
    c = build_gadget("add", 8)
    rng = random.Random(1)
    for _ in range(30):
        x, y = rng.randrange(256), rng.randrange(256)
        inputs = [int_to_bits(x, 8), int_to_bits(y, 8)]
        assert pipeline(c, inputs) == eval_plaintext(c, inputs)


def test_correctness_on_1000_random_circuit_input_pairs():
    rng = random.Random(42)
    for trial in range(250):
        c = random_circuit(rng, rng.randint(1, 400))
        seed = rng.getrandbits(256).to_bytes(32, "big")
        for _ in range(4):
            inputs = random_inputs(rng, c)
            assert pipeline(c, inputs, seed) == eval_plaintext(c, inputs)


def test_large_random_circuit_many_inputs():
    rng = random.Random(9)
    c = random_circuit(rng, 2000, parties=(16, 16))
    gc, enc, dec = garble(c, SEED)
    for _ in range(20):
        inputs = random_inputs(rng, c)
        flat = [bit for party in inputs for bit in party]
        out = decode(dec, eval_garbled(gc, c, encode(enc, flat)))
        assert out == eval_plaintext(c, inputs)


def test_tampered_label_fails_decryption():
    c = build_gadget("add", 8)
    gc, enc, dec = garble(c, SEED)
    labels = encode(enc, [1, 0, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 1, 1, 1, 1])
    labels[3] ^= 1 << 40
    with pytest.raises(DecryptionError):
        eval_garbled(gc, c, labels)


def test_tampered_row_fails_decryption():
    b = CircuitBuilder()
    x = b.add_input_party(1)[0]
    y = b.add_input_party(1)[0]
    c = b.finish([b.band(x, y)])
    rng = random.Random(3)
    for _ in range(200):
        gc, enc, dec = garble(c, rng.getrandbits(256).to_bytes(32, "big"))
        labels = encode(enc, [rng.randint(0, 1), rng.randint(0, 1)])
        idx = (labels[0] & 1) << 1 | (labels[1] & 1)
        row = bytearray(gc.tables[0][idx])
        bit = rng.randrange(len(row) * 8)
        row[bit // 8] ^= 1 << (bit % 8)
        rows = list(gc.tables[0])
        rows[idx] = bytes(row)
        tampered = gc.__class__(
            tables=(tuple(rows),),
            and_gate_indices=gc.and_gate_indices,
            circuit_digest=gc.circuit_digest,
        )
        with pytest.raises(DecryptionError):
            eval_garbled(tampered, c, labels)


def test_exactly_one_row_decrypts_per_and_gate():
    c = build_gadget("mul", 4)
    gc, enc, dec = garble(c, SEED)
    rng = random.Random(4)
    active = encode(enc, [rng.randint(0, 1) for _ in range(8)])
    # walk the evaluation and probe every table with the active labels
    values = list(active) + [0] * (c.n_wires - len(active))
    ti = 0
    from privsc.circuit import AND, XOR, INV
    for gi, (kind, a, b2, out) in enumerate(c.gates):
        if kind == XOR:
            values[out] = values[a] ^ values[b2]
        elif kind == INV:
            values[out] = values[a]
        else:
            assert count_valid_rows(gc, ti, values[a], values[b2]) == 1
            idx = (values[a] & 1) << 1 | (values[b2] & 1)
            from privsc.garble import _row_key
            from privsc.hashing import open_sealed
            plain = open_sealed(_row_key(values[a], values[b2]),
                                gi.to_bytes(8, "big") + bytes([idx]),
                                gc.tables[ti][idx])
            values[out] = int.from_bytes(plain, "big")
            ti += 1


def test_evaluator_never_sees_both_labels():
    c = build_gadget("add", 8)
    gc, enc, dec = garble(c, SEED)
    rng = random.Random(5)
    flat = [rng.randint(0, 1) for _ in range(16)]
    active = encode(enc, flat)
    offset = enc.pairs[0][0] ^ enc.pairs[0][1]
    seen = set(active)
    values = list(active) + [0] * (c.n_wires - len(active))
    from privsc.circuit import AND, XOR, INV
    from privsc.garble import _row_key
    from privsc.hashing import open_sealed
    ti = 0
    for gi, (kind, a, b2, out) in enumerate(c.gates):
        if kind == XOR:
            values[out] = values[a] ^ values[b2]
        elif kind == INV:
            values[out] = values[a]
        else:
            idx = (values[a] & 1) << 1 | (values[b2] & 1)
            plain = open_sealed(_row_key(values[a], values[b2]),
                                gi.to_bytes(8, "big") + bytes([idx]),
                                gc.tables[ti][idx])
            values[out] = int.from_bytes(plain, "big")
            ti += 1
        seen.add(values[out])
    for lab in seen:
        assert lab ^ offset not in seen, "evaluator held both labels of a wire"


def test_full_pipeline_on_crowdfund_circuit():
    from privsc.contracts import get_contract

    spec = get_contract("crowdfund")
    c = spec.circuit()
    inputs = spec.encode_inputs([[600], [500]])
    out = pipeline(c, inputs)
    assert spec.decode_outputs(out) == [1100]
    assert out == eval_plaintext(c, inputs)


def test_decode_rejects_unknown_label():
    c = build_gadget("add", 4)
    gc, enc, dec = garble(c, SEED)
    with pytest.raises(GarbleError):
        decode(dec, [0] * 3)


def test_serialization_roundtrip():
    c = build_gadget("mul", 8)
    gc, enc, dec = garble(c, SEED)
    blob = serialize_garbled(gc)
    assert deserialize_garbled(blob) == gc


def test_serialization_rejects_bad_magic():
    with pytest.raises(GarbleError):
        deserialize_garbled(b"XXXX" + b"\x00" * 16)
