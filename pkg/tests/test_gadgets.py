"""Gadget soundness: exhaustive at small widths, randomized at wide widths."""

import random

import pytest

from privsc.circuit import build_gadget, eval_plaintext_batch, UnknownGadgetError
from privsc.circuit.ir import bits_to_int, int_to_bits


def run_all(circuit, pairs, widths):
    batch = [[int_to_bits(v, w) for v, w in zip(vals, widths)] for vals in pairs]
    return eval_plaintext_batch(circuit, batch)


def exhaustive_pairs(width):
    return [(x, y) for x in range(1 << width) for y in range(1 << width)]


REFS = {
    "gt": lambda x, y, m: int(x > y),
    "ge": lambda x, y, m: int(x >= y),
    "eq": lambda x, y, m: int(x == y),
    "add": lambda x, y, m: (x + y) & m,
    "sub": lambda x, y, m: (x - y) & m,
    "mul": lambda x, y, m: (x * y) & m,
}


@pytest.mark.parametrize("kind", sorted(REFS))
@pytest.mark.parametrize("width", [1, 2, 4, 8])
def test_exhaustive_small_widths(kind, width):
    if width == 8 and kind == "mul":
        pairs = exhaustive_pairs(4)
        width = 4
    else:
        pairs = exhaustive_pairs(width) if width <= 4 else None
    if pairs is None:
        rng = random.Random(width)
        pairs = [(rng.randrange(1 << width), rng.randrange(1 << width))
                 for _ in range(4000)] + [(0, 0), (255, 255), (255, 0)]
    c = build_gadget(kind, width)
    mask = (1 << width) - 1
    outs = run_all(c, pairs, (width, width))
    for (x, y), out in zip(pairs, outs):
        expect = REFS[kind](x, y, mask)
        got = bits_to_int(out)
        assert got == expect, f"{kind}({x},{y}) width {width}: {got} != {expect}"


def test_add8_exhaustive_all_pairs():
    c = build_gadget("add", 8)
    pairs = exhaustive_pairs(8)
    outs = run_all(c, pairs, (8, 8))
    for (x, y), out in zip(pairs, outs):
        assert bits_to_int(out) == (x + y) & 0xFF


@pytest.mark.parametrize("kind", sorted(REFS))
def test_random_equivalence_width32(kind):
    rng = random.Random(hash(kind) & 0xFFFF)
    c = build_gadget(kind, 32)
    mask = (1 << 32) - 1
    pairs = [(rng.randrange(1 << 32), rng.randrange(1 << 32)) for _ in range(10_000)]
    pairs += [(0, 0), (mask, mask), (mask, 0), (1, mask)]
    outs = run_all(c, pairs, (32, 32))
    for (x, y), out in zip(pairs, outs):
        assert bits_to_int(out) == REFS[kind](x, y, mask)


def test_gt_width1_is_a_and_not_b():
    c = build_gadget("gt", 1)
    outs = run_all(c, [(a, b) for a in (0, 1) for b in (0, 1)], (1, 1))
    got = [o[0] for o in outs]
    assert got == [int(a and not b) for a in (0, 1) for b in (0, 1)]


def test_32bit_comparator_on_5_and_3():
    c = build_gadget("gt", 32)
    outs = run_all(c, [(5, 3), (3, 5), (7, 7)], (32, 32))
    assert [o[0] for o in outs] == [1, 0, 0]


def test_mux_selects():
    c = build_gadget("mux", 8)
    batch = [
        [[1], int_to_bits(0xAB, 8), int_to_bits(0x13, 8)],
        [[0], int_to_bits(0xAB, 8), int_to_bits(0x13, 8)],
    ]
    outs = eval_plaintext_batch(c, batch)
    assert bits_to_int(outs[0]) == 0xAB
    assert bits_to_int(outs[1]) == 0x13


def test_unknown_gadget_rejected():
    with pytest.raises(UnknownGadgetError):
        build_gadget("nand", 8)
    with pytest.raises(UnknownGadgetError):
        build_gadget("add", 0)
    with pytest.raises(UnknownGadgetError):
        build_gadget("fixed_exp", 16)
