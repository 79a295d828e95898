"""Integer gadgets over bit vectors (lsb first) and the named-gadget registry.

The arithmetic building blocks follow the free-XOR costing convention:
a full adder spends one AND per bit, comparisons one AND per bit, a
multiplexer one AND per bit.  Integer overflow wraps modulo 2^width.
"""

from __future__ import annotations

from .builder import CONST0, CONST1, CircuitBuilder
from .ir import Circuit


class UnknownGadgetError(Exception):
    pass


def const_bits(value: int, width: int) -> list[int]:
    """Two's-complement constant as sentinel bits."""
    return [CONST1 if (value >> i) & 1 else CONST0 for i in range(width)]


def add(b: CircuitBuilder, xs: list[int], ys: list[int], cin: int = CONST0,
        carry_out: bool = False) -> list[int]:
    """Ripple-carry addition, one AND per bit; result width = len(xs)."""
    assert len(xs) == len(ys)
    c = cin
    out = []
    for x, y in zip(xs, ys):
        xc = b.bxor(x, c)
        yc = b.bxor(y, c)
        out.append(b.bxor(xc, y))
        c = b.bxor(c, b.band(xc, yc))
    if carry_out:
        out.append(c)
    return out


def negate(b: CircuitBuilder, xs: list[int]) -> list[int]:
    """Two's-complement negation."""
    inv = [b.bnot(x) for x in xs]
    return add(b, inv, const_bits(1, len(xs)))


def sub(b: CircuitBuilder, xs: list[int], ys: list[int]) -> list[int]:
    """xs - ys mod 2^width."""
    inv = [b.bnot(y) for y in ys]
    return add(b, xs, inv, cin=CONST1)


def less_than(b: CircuitBuilder, xs: list[int], ys: list[int]) -> int:
    """Unsigned xs < ys via the borrow of xs - ys."""
    assert len(xs) == len(ys)
    c = CONST1  # carry-in for xs + ~ys + 1
    for x, y in zip(xs, ys):
        ny = b.bnot(y)
        xc = b.bxor(x, c)
        yc = b.bxor(ny, c)
        c = b.bxor(c, b.band(xc, yc))
    return b.bnot(c)  # no carry out => borrow => xs < ys


def greater_than(b: CircuitBuilder, xs: list[int], ys: list[int]) -> int:
    return less_than(b, ys, xs)


def greater_equal(b: CircuitBuilder, xs: list[int], ys: list[int]) -> int:
    return b.bnot(less_than(b, xs, ys))


def signed_less_than(b: CircuitBuilder, xs: list[int], ys: list[int]) -> int:
    """Two's-complement comparison: flip sign bits, compare unsigned."""
    xs2 = xs[:-1] + [b.bnot(xs[-1])]
    ys2 = ys[:-1] + [b.bnot(ys[-1])]
    return less_than(b, xs2, ys2)


def equals(b: CircuitBuilder, xs: list[int], ys: list[int]) -> int:
    return b.and_many([b.bnot(b.bxor(x, y)) for x, y in zip(xs, ys)])


def mux(b: CircuitBuilder, sel: int, xs: list[int], ys: list[int]) -> list[int]:
    """Bitwise xs if sel else ys."""
    return [b.mux_bit(sel, x, y) for x, y in zip(xs, ys)]


def zero_extend(xs: list[int], width: int) -> list[int]:
    return xs + [CONST0] * (width - len(xs))


def sign_extend(xs: list[int], width: int) -> list[int]:
    return xs + [xs[-1]] * (width - len(xs))


def shift_left_const(xs: list[int], amount: int) -> list[int]:
    return [CONST0] * amount + xs[: len(xs) - amount] if amount else list(xs)


def mul(b: CircuitBuilder, xs: list[int], ys: list[int],
        out_width: int | None = None) -> list[int]:
    """Schoolbook product; low `out_width` bits (default len(xs))."""
    width = out_width or len(xs)
    acc = [CONST0] * width
    for j, y in enumerate(ys):
        if j >= width:
            break
        take = min(len(xs), width - j)
        partial = [CONST0] * j + [b.band(x, y) for x in xs[:take]]
        partial += [CONST0] * (width - len(partial))
        acc = add(b, acc, partial)
    return acc


def conditional_negate(b: CircuitBuilder, sign: int, xs: list[int]) -> list[int]:
    """Negate xs when sign is 1 (xor with sign, add sign)."""
    flipped = [b.bxor(x, sign) for x in xs]
    inc = [sign] + [CONST0] * (len(xs) - 1)
    return add(b, flipped, inc)


def barrel_shift_left(b: CircuitBuilder, xs: list[int], amount_bits: list[int]) -> list[int]:
    """Shift xs left by the value of amount_bits (zero fill, fixed width)."""
    cur = list(xs)
    for k, bit in enumerate(amount_bits):
        shifted = shift_left_const(cur, 1 << k)
        cur = mux(b, bit, shifted, cur)
    return cur


def barrel_shift_right(b: CircuitBuilder, xs: list[int], amount_bits: list[int]) -> list[int]:
    cur = list(xs)
    for k, bit in enumerate(amount_bits):
        s = 1 << k
        shifted = cur[s:] + [CONST0] * min(s, len(cur))
        cur = mux(b, bit, shifted, cur)
    return cur


def unsigned_div(b: CircuitBuilder, xs: list[int], ys: list[int]) -> list[int]:
    """Restoring long division, quotient of len(xs) bits; x/0 yields all-ones."""
    n = len(xs)
    m = len(ys)
    rem = [CONST0] * (m + 1)
    q = [CONST0] * n
    ys_w = ys + [CONST0]
    for i in range(n - 1, -1, -1):
        rem = [xs[i]] + rem[:-1]
        trial = sub(b, rem, ys_w)
        fits = b.bnot(trial[-1])  # no borrow => rem >= ys
        rem = mux(b, fits, trial, rem)
        q[i] = fits
    return q


def integer_sqrt(b: CircuitBuilder, xs: list[int]) -> list[int]:
    """Digit-by-digit square root; result has ceil(len/2) bits."""
    n = len(xs)
    if n % 2:
        xs = xs + [CONST0]
        n += 1
    rn = n // 2
    root: list[int] = []
    rem: list[int] = []
    for i in range(rn - 1, -1, -1):
        rem = [xs[2 * i], xs[2 * i + 1]] + rem
        # candidate subtrahend: (root << 2) | 01
        cand = [CONST1, CONST0] + root
        width = len(rem) + 1
        trial = sub(b, zero_extend(rem, width), zero_extend(cand, width))
        fits = b.bnot(trial[-1])
        rem = mux(b, fits, trial[: len(rem)], rem)
        root = [fits] + root
    return root


_INT_GADGETS = {"gt", "ge", "eq", "add", "sub", "mul", "mux"}
GADGET_NAMES = sorted(_INT_GADGETS | {
    "fixed_mul", "fixed_div", "fixed_exp", "fixed_ln", "fixed_sqrt", "fixed_phi",
})


def build_gadget(kind: str, width: int) -> Circuit:
    """Compile a named gadget at the given bit width.

    Binary gadgets take party 0 = a, party 1 = b; mux takes party 0 = sel
    (1 bit), party 1 = a, party 2 = b.  Fixed-point gadgets require
    width == 32 (Q16.16) and are defined in `fixedpoint`.
    """
    from . import fixedpoint

    if kind not in GADGET_NAMES:
        raise UnknownGadgetError(f"unknown gadget {kind!r}")
    if kind.startswith("fixed_"):
        return fixedpoint.build_fixed_gadget(kind, width)
    if width < 1:
        raise UnknownGadgetError(f"gadget {kind!r} unsupported at width {width}")
    b = CircuitBuilder()
    if kind == "mux":
        sel = b.add_input_party(1)[0]
        xs = b.add_input_party(width)
        ys = b.add_input_party(width)
        return b.finish(mux(b, sel, xs, ys))
    xs = b.add_input_party(width)
    ys = b.add_input_party(width)
    if kind == "gt":
        return b.finish([greater_than(b, xs, ys)])
    if kind == "ge":
        return b.finish([greater_equal(b, xs, ys)])
    if kind == "eq":
        return b.finish([equals(b, xs, ys)])
    if kind == "add":
        return b.finish(add(b, xs, ys))
    if kind == "sub":
        return b.finish(sub(b, xs, ys))
    if kind == "mul":
        return b.finish(mul(b, xs, ys))
    raise UnknownGadgetError(f"unknown gadget {kind!r}")
