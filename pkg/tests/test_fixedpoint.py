"""Fixed-point gadget accuracy against double-precision references."""

import math
import random

import pytest

from privsc.circuit import build_gadget, eval_plaintext_batch
from privsc.circuit.fixedpoint import FixedPoint, FRACTION_BITS

TOL = 1e-2


def phi(x):
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def run_unary(kind, values):
    c = build_gadget(kind, 32)
    batch = [[FixedPoint.encode(v).to_bits()] for v in values]
    outs = eval_plaintext_batch(c, batch)
    return [FixedPoint.from_bits(o).decode() for o in outs]


def run_binary(kind, pairs):
    c = build_gadget(kind, 32)
    batch = [[FixedPoint.encode(x).to_bits(), FixedPoint.encode(y).to_bits()]
             for x, y in pairs]
    outs = eval_plaintext_batch(c, batch)
    return [FixedPoint.from_bits(o).decode() for o in outs]


def assert_close(got, expect, what):
    err = abs(got - expect) / max(1.0, abs(expect))
    assert err <= TOL, f"{what}: got {got}, expected {expect} (err {err:.2e})"


def test_encode_decode_identity():
    for v in (0.0, 1.0, -1.0, 0.5, -0.25, 1234.0625, -32000.5):
        fp = FixedPoint.encode(v)
        assert fp.decode() == v
        assert FixedPoint.from_bits(fp.to_bits()) == fp


def test_encode_saturates():
    assert FixedPoint.encode(1e9).raw == (1 << 31) - 1
    assert FixedPoint.encode(-1e9).raw == -((1 << 31) - 1)


def test_fixed_mul_random():
    rng = random.Random(5)
    pairs = [(rng.uniform(-100, 100), rng.uniform(-100, 100)) for _ in range(500)]
    pairs += [(0.0, 3.5), (1.0, 1.0), (-2.0, 8.25), (181.0, 181.0)]
    got = run_binary("fixed_mul", pairs)
    for (x, y), g in zip(pairs, got):
        xq = FixedPoint.encode(x).decode()
        yq = FixedPoint.encode(y).decode()
        assert_close(g, xq * yq, f"mul({x},{y})")


def test_fixed_mul_saturates():
    got = run_binary("fixed_mul", [(30000.0, 30000.0), (-30000.0, 30000.0)])
    max_val = ((1 << 31) - 1) / (1 << FRACTION_BITS)
    assert got[0] == pytest.approx(max_val)
    assert got[1] == pytest.approx(-max_val)


def test_fixed_div_random():
    rng = random.Random(6)
    pairs = []
    while len(pairs) < 400:
        x, y = rng.uniform(-200, 200), rng.uniform(-200, 200)
        if abs(y) > 0.01 and abs(x / y) < 30000:
            pairs.append((x, y))
    got = run_binary("fixed_div", pairs)
    for (x, y), g in zip(pairs, got):
        xq = FixedPoint.encode(x).decode()
        yq = FixedPoint.encode(y).decode()
        assert_close(g, xq / yq, f"div({x},{y})")


def test_fixed_sqrt_grid():
    values = [0.0, 1.0, 2.0, 0.25, 100.0, 30000.0, 3.3]
    got = run_unary("fixed_sqrt", values)
    for v, g in zip(values, got):
        assert_close(g, math.sqrt(v), f"sqrt({v})")
    assert run_unary("fixed_sqrt", [-4.0])[0] == 0.0


def test_fixed_exp_1000_random_points():
    rng = random.Random(7)
    values = [rng.uniform(-8.0, 8.0) for _ in range(1000)]
    values += [0.0, 1.0, -1.0, 8.0, -8.0]
    got = run_unary("fixed_exp", values)
    for v, g in zip(values, got):
        assert_close(g, math.exp(v), f"exp({v})")


def test_fixed_exp_saturates_high():
    got = run_unary("fixed_exp", [12.0, 100.0])
    max_val = ((1 << 31) - 1) / (1 << FRACTION_BITS)
    assert got == [max_val, max_val]


def test_fixed_ln_1000_random_points():
    rng = random.Random(8)
    values = [math.exp(rng.uniform(math.log(0.01), math.log(100.0)))
              for _ in range(1000)]
    values += [1.0, 2.0, 0.5, 0.01, 100.0]
    got = run_unary("fixed_ln", values)
    for v, g in zip(values, got):
        vq = FixedPoint.encode(v).decode()
        assert_close(g, math.log(vq), f"ln({v})")


def test_fixed_ln_nonpositive_saturates():
    got = run_unary("fixed_ln", [0.0, -3.0])
    min_val = -((1 << 31) - 1) / (1 << FRACTION_BITS)
    assert got == [min_val, min_val]


def test_fixed_phi_at_zero_is_half():
    assert run_unary("fixed_phi", [0.0])[0] == pytest.approx(0.5, abs=TOL)


def test_fixed_phi_1000_random_points():
    rng = random.Random(9)
    values = [rng.uniform(-6.0, 6.0) for _ in range(1000)]
    values += [0.0, 4.0, -4.0, 5.5, -5.5, 0.1]
    got = run_unary("fixed_phi", values)
    for v, g in zip(values, got):
        assert_close(g, phi(v), f"phi({v})")


def test_fixed_phi_clamps_beyond_four():
    got = run_unary("fixed_phi", [4.5, -4.5])
    assert got[0] == 1.0
    assert got[1] == 0.0
