"""Q16.16 fixed-point gadgets: multiply, divide, exp, ln, sqrt and the
standard normal CDF.

Values are signed two's-complement 32-bit words with 16 fraction bits.
Multiplication rounds half-up at the fraction shift and saturates to
+/-(2^31 - 1).  exp reduces its argument to 2^n * 2^f with f in [0,1) and
evaluates a degree-6 polynomial for 2^f; ln normalizes to m * 2^e with
m in [1,2) and evaluates a degree-6 polynomial for ln(1+u); the normal
CDF uses the Abramowitz-Stegun rational tail approximation 26.2.17 on
|x| <= 4 and clamps to {0,1} outside.
"""

from __future__ import annotations

from dataclasses import dataclass

from .builder import CONST0, CONST1, CircuitBuilder
from .ir import Circuit
from . import gadgets as g

WORD_BITS = 32
FRACTION_BITS = 16
_ONE = 1 << FRACTION_BITS
_MAX_RAW = (1 << (WORD_BITS - 1)) - 1

LOG2E_RAW = 94548          # round(log2(e) * 2^16)
LN2_RAW = 45426            # round(ln 2 * 2^16)
INV_SQRT_2PI = 0.3989422804014327
PHI_P = 0.2316419
# Abramowitz-Stegun 26.2.17 tail coefficients b1..b5.
PHI_B = (0.319381530, -0.356563782, 1.781477937, -1.821255978, 1.330274429)
# Degree-6 Chebyshev-fitted polynomials (max abs error < 7e-9 resp. 4e-6).
EXP2_COEFFS = (
    1.000000006100636, 0.6931468388399908, 0.24023109003913998,
    0.055478928792359314, 0.009686169379721353, 0.0012382470549029282,
    0.00021871340520616714,
)
LN1P_COEFFS = (
    3.472989623276579e-06, 0.9997931699245077, -0.4969827004702162,
    0.31460410622118673, -0.18880111420023107, 0.08173839908379534,
    -0.017210670015302652,
)


@dataclass(frozen=True)
class FixedPoint:
    """Host-side Q(I).(F) value; raw is the signed two's-complement word."""

    raw: int
    integer_bits: int = WORD_BITS - FRACTION_BITS
    fraction_bits: int = FRACTION_BITS

    @property
    def width(self) -> int:
        return self.integer_bits + self.fraction_bits

    @classmethod
    def encode(cls, value: float) -> "FixedPoint":
        raw = round(value * _ONE)
        raw = max(-_MAX_RAW, min(_MAX_RAW, raw))
        return cls(raw)

    def decode(self) -> float:
        return self.raw / _ONE

    def to_bits(self) -> list[int]:
        return [(self.raw >> i) & 1 for i in range(self.width)]

    @classmethod
    def from_bits(cls, bits: list[int]) -> "FixedPoint":
        v = 0
        for i, bit in enumerate(bits):
            if bit:
                v |= 1 << i
        if bits[-1]:
            v -= 1 << len(bits)
        return cls(v)


def _round_shift(b: CircuitBuilder, bits: list[int]) -> list[int]:
    """Add half an ulp then drop the fraction shift (round half up)."""
    half = g.const_bits(1 << (FRACTION_BITS - 1), len(bits))
    summed = g.add(b, bits, half, carry_out=True)
    return summed[FRACTION_BITS:]


def _saturate_mag(b: CircuitBuilder, mag: list[int]) -> tuple[list[int], int]:
    """Clamp a magnitude to 31 bits; returns (31+1-bit word, overflowed)."""
    over = b.or_many(mag[WORD_BITS - 1 :])
    low = g.zero_extend(mag[: WORD_BITS - 1], WORD_BITS - 1)
    maxed = g.const_bits(_MAX_RAW, WORD_BITS - 1)
    out = g.mux(b, over, maxed, low)
    return out + [CONST0], over


def _split_sign(b: CircuitBuilder, xs: list[int]) -> tuple[int, list[int]]:
    sign = xs[-1]
    return sign, g.conditional_negate(b, sign, xs)


def fx_mul(b: CircuitBuilder, xs: list[int], ys: list[int],
           x_mag_bits: int = WORD_BITS - 1, y_mag_bits: int = WORD_BITS - 1) -> list[int]:
    """Saturating signed Q16.16 product.

    x_mag_bits/y_mag_bits may narrow the magnitude multiplier when the
    caller can bound the operands, which prunes the schoolbook array.
    """
    sx, ax = _split_sign(b, xs)
    sy, ay = _split_sign(b, ys)
    prod = g.mul(b, ax[:x_mag_bits], ay[:y_mag_bits],
                 out_width=x_mag_bits + y_mag_bits)
    mag = _round_shift(b, prod)
    mag = g.zero_extend(mag, max(len(mag), WORD_BITS))
    out, _ = _saturate_mag(b, mag)
    return g.conditional_negate(b, b.bxor(sx, sy), out)


def fx_mul_pos(b: CircuitBuilder, xs: list[int], ys: list[int]) -> list[int]:
    """Unsigned Q16.16 product for operands known nonnegative; no saturation.

    Result width is len(xs)+len(ys)-16 bits; caller tracks ranges.
    """
    prod = g.mul(b, xs, ys, out_width=len(xs) + len(ys))
    return _round_shift(b, prod)


def fx_const_mul(b: CircuitBuilder, xs: list[int], value: float,
                 x_mag_bits: int = WORD_BITS - 1) -> list[int]:
    """Multiply by a host constant; folding keeps only set-bit partials."""
    raw = round(abs(value) * _ONE)
    cw = max(raw.bit_length(), 1)
    sx, ax = _split_sign(b, xs)
    prod = g.mul(b, ax[:x_mag_bits], g.const_bits(raw, cw),
                 out_width=x_mag_bits + cw)
    mag = _round_shift(b, prod)
    mag = g.zero_extend(mag, max(len(mag), WORD_BITS))
    out, _ = _saturate_mag(b, mag)
    sign = b.bnot(sx) if value < 0 else sx
    return g.conditional_negate(b, sign, out)


def fx_div(b: CircuitBuilder, xs: list[int], ys: list[int]) -> list[int]:
    """Saturating signed Q16.16 quotient; division by zero saturates."""
    sx, ax = _split_sign(b, xs)
    sy, ay = _split_sign(b, ys)
    num = g.shift_left_const(g.zero_extend(ax[: WORD_BITS - 1], WORD_BITS - 1 + FRACTION_BITS), FRACTION_BITS)
    quot = g.unsigned_div(b, num, ay[: WORD_BITS - 1])
    mag = g.zero_extend(quot, max(len(quot), WORD_BITS))
    out, _ = _saturate_mag(b, mag)
    return g.conditional_negate(b, b.bxor(sx, sy), out)


def fx_sqrt(b: CircuitBuilder, xs: list[int]) -> list[int]:
    """Q16.16 square root; negative inputs yield 0."""
    sign = xs[-1]
    wide = g.shift_left_const(g.zero_extend(xs[:-1], WORD_BITS - 1 + FRACTION_BITS), FRACTION_BITS)
    root = g.integer_sqrt(b, wide)
    out = g.zero_extend(root, WORD_BITS)
    return g.mux(b, sign, g.const_bits(0, WORD_BITS), out)


def _poly_horner(b: CircuitBuilder, t: list[int], coeffs, t_mag_bits: int,
                 acc_mag_bits: int) -> list[int]:
    """Horner evaluation with Q16.16 constant coefficients.

    t must be nonnegative; acc_mag_bits bounds every intermediate value's
    magnitude (checked by the host-side reference tests).
    """
    acc = g.const_bits(round(coeffs[-1] * _ONE), acc_mag_bits + 1)
    for c in reversed(coeffs[:-1]):
        sa, aa = _split_sign(b, acc)
        prod = g.mul(b, aa[:acc_mag_bits], t[:t_mag_bits],
                     out_width=acc_mag_bits + t_mag_bits)
        mag = _round_shift(b, prod)
        mag = g.zero_extend(mag, acc_mag_bits)[:acc_mag_bits] + [CONST0]
        term = g.conditional_negate(b, sa, mag)
        acc = g.add(b, term, g.const_bits(round(c * _ONE), acc_mag_bits + 1))
    return acc


def fx_exp(b: CircuitBuilder, xs: list[int]) -> list[int]:
    """e^x with range reduction to 2^n * 2^f, f in [0,1); saturates high."""
    t = fx_const_mul(b, xs, 1.4426950408889634)  # x * log2(e), Q16.16
    # Clamp t to [-16, 15) in the exponent domain so n+16 fits 5 bits.
    t_lo = g.const_bits(-(16 << FRACTION_BITS), WORD_BITS)
    t_hi = g.const_bits((15 << FRACTION_BITS) - 1, WORD_BITS)
    too_small = g.signed_less_than(b, t, t_lo)
    too_big = g.signed_less_than(b, t_hi, t)
    t = g.mux(b, too_small, t_lo, t)
    t = g.mux(b, too_big, t_hi, t)
    frac = t[:FRACTION_BITS]
    m_bits = t[FRACTION_BITS : FRACTION_BITS + 5]
    m_bits = m_bits[:4] + [b.bnot(m_bits[4])]  # n+16 mod 32 flips the sign bit
    p = _poly_horner(b, g.zero_extend(frac, 17), EXP2_COEFFS,
                     t_mag_bits=17, acc_mag_bits=18)
    wide = g.zero_extend(p[:18], 18 + 31)
    shifted = g.barrel_shift_left(b, wide, m_bits)
    out = shifted[FRACTION_BITS : FRACTION_BITS + WORD_BITS - 1] + [CONST0]
    return g.mux(b, too_big, g.const_bits(_MAX_RAW, WORD_BITS), out)


def fx_ln(b: CircuitBuilder, xs: list[int]) -> list[int]:
    """ln x for x > 0; nonpositive inputs saturate to the most negative word."""
    nonpos = b.bor(xs[-1], b.bnot(b.or_many(xs[:-1])))
    raw = g.mux(b, nonpos, g.const_bits(1, WORD_BITS), xs)
    # Normalize so the leading one sits at bit 31.
    z = raw
    shift_bits = []
    for k in (16, 8, 4, 2, 1):
        top_zero = b.bnot(b.or_many(z[WORD_BITS - k :]))
        z = g.mux(b, top_zero, g.shift_left_const(z, k), z)
        shift_bits.append(top_zero)
    # leading-zero count c from the normalization decisions
    c_bits = [shift_bits[4], shift_bits[3], shift_bits[2], shift_bits[1], shift_bits[0]]
    m = z[15:32]                # m in [1,2) as Q1.16
    u = m[:16]                  # m - 1 in [0,1)
    ln_m = _poly_horner(b, g.zero_extend(u, 17), LN1P_COEFFS,
                        t_mag_bits=17, acc_mag_bits=18)
    # exponent e = 15 - c in [-16, 15]
    e = g.sub(b, g.const_bits(15, 6), g.zero_extend(c_bits, 6))
    se, ae = _split_sign(b, e)
    e_ln2 = g.mul(b, ae[:5], g.const_bits(LN2_RAW, 16), out_width=21)
    e_ln2 = g.conditional_negate(b, se, g.zero_extend(e_ln2, WORD_BITS))
    total = g.add(b, g.sign_extend(ln_m, WORD_BITS), e_ln2)
    min_word = g.const_bits(-_MAX_RAW, WORD_BITS)
    return g.mux(b, nonpos, min_word, total)


def fx_phi(b: CircuitBuilder, xs: list[int]) -> list[int]:
    """Standard normal CDF via A&S 26.2.17; exact {0,1} clamp past |x| = 4."""
    sign, a = _split_sign(b, xs)
    four = g.const_bits(4 << FRACTION_BITS, WORD_BITS)
    beyond = g.signed_less_than(b, four, a)
    a = g.mux(b, beyond, four, a)
    # t = 1 / (1 + P*|x|)
    pa = fx_const_mul(b, a, PHI_P, x_mag_bits=19)
    den = g.add(b, pa, g.const_bits(_ONE, WORD_BITS))
    num = g.const_bits(_ONE << FRACTION_BITS, 33)
    t = g.unsigned_div(b, num, den[:18])
    t17 = t[:17]
    poly = _poly_horner(b, t17, (0.0,) + PHI_B, t_mag_bits=17, acc_mag_bits=21)
    # pdf(|x|) = inv_sqrt_2pi * e^(-x^2/2)
    a_sq = fx_mul_pos(b, a[:19], a[:19])
    half_sq = a_sq[1:]  # divide by two
    neg = g.conditional_negate(b, CONST1, g.zero_extend(half_sq, WORD_BITS))
    pdf = fx_const_mul(b, fx_exp(b, neg), INV_SQRT_2PI, x_mag_bits=17)
    sp, ap = _split_sign(b, poly)
    tail_mag = fx_mul_pos(b, ap[:21], pdf[:17])
    tail = g.conditional_negate(b, sp, g.zero_extend(tail_mag, WORD_BITS))
    upper = g.sub(b, g.const_bits(_ONE, WORD_BITS), tail)
    upper = g.mux(b, beyond, g.const_bits(_ONE, WORD_BITS), upper)
    lower = g.sub(b, g.const_bits(_ONE, WORD_BITS), upper)
    return g.mux(b, sign, lower, upper)


_FIXED_BUILDERS = {
    "fixed_mul": lambda b, xs, ys: fx_mul(b, xs, ys),
    "fixed_div": lambda b, xs, ys: fx_div(b, xs, ys),
}
_FIXED_UNARY = {
    "fixed_exp": fx_exp,
    "fixed_ln": fx_ln,
    "fixed_sqrt": fx_sqrt,
    "fixed_phi": fx_phi,
}


def build_fixed_gadget(kind: str, width: int) -> Circuit:
    from .gadgets import UnknownGadgetError

    if width != WORD_BITS:
        raise UnknownGadgetError(f"{kind} supports only width {WORD_BITS}")
    b = CircuitBuilder()
    if kind in _FIXED_BUILDERS:
        xs = b.add_input_party(WORD_BITS)
        ys = b.add_input_party(WORD_BITS)
        return b.finish(_FIXED_BUILDERS[kind](b, xs, ys))
    if kind in _FIXED_UNARY:
        xs = b.add_input_party(WORD_BITS)
        return b.finish(_FIXED_UNARY[kind](b, xs))
    raise UnknownGadgetError(f"unknown fixed gadget {kind!r}")
