"""Boolean-circuit builders for the example contracts.

Integer contracts use two's-complement wraparound; monetary values are
unsigned 32-bit words, real-valued quantities Q16.16.  Each builder
returns a circuit whose input segments follow the registry schema.
"""

from __future__ import annotations

from ..circuit import CONST0, CONST1, Circuit, CircuitBuilder
from ..circuit import gadgets as g
from ..circuit.fixedpoint import (
    FRACTION_BITS,
    fx_div,
    fx_exp,
    fx_ln,
    fx_mul,
    fx_phi,
    fx_sqrt,
)
from .oracles import CROWDFUND_MINIMUM, DAO_GROWTH

W = 32
_ONE = 1 << FRACTION_BITS


def millionaire_circuit() -> Circuit:
    b = CircuitBuilder()
    x = b.add_input_party(W)
    y = b.add_input_party(W)
    return b.finish([g.greater_than(b, y, x)])


def _tournament(b: CircuitBuilder, entries):
    """Reduce [(bits, idx_bits, second_bits)] to the (max, argmax, second).

    Left-biased strict comparison keeps the lowest index on ties.
    """
    while len(entries) > 1:
        nxt = []
        for i in range(0, len(entries) - 1, 2):
            lv, li, ls = entries[i]
            rv, ri, rs = entries[i + 1]
            right_wins = g.greater_than(b, rv, lv)
            top = g.mux(b, right_wins, rv, lv)
            idx = g.mux(b, right_wins, ri, li)
            loser = g.mux(b, right_wins, lv, rv)
            cand = g.mux(b, g.greater_than(b, ls, rs), ls, rs)
            second = g.mux(b, g.greater_than(b, loser, cand), loser, cand)
            nxt.append((top, idx, second))
        if len(entries) % 2:
            nxt.append(entries[-1])
        entries = nxt
    return entries[0]


def second_price_auction_circuit(n_bidders: int = 2) -> Circuit:
    if n_bidders < 2:
        raise ValueError("auction needs at least 2 bidders")
    b = CircuitBuilder()
    idx_width = max(1, (n_bidders - 1).bit_length())
    entries = []
    for i in range(n_bidders):
        bid = b.add_input_party(W)
        entries.append((bid, g.const_bits(i, idx_width), g.const_bits(0, W)))
    _, winner, second = _tournament(b, entries)
    return b.finish(list(winner) + list(second))


def crowdfund_circuit(n_parties: int = 2) -> Circuit:
    b = CircuitBuilder()
    total = b.add_input_party(W)
    for _ in range(n_parties - 1):
        total = g.add(b, total, b.add_input_party(W))
    reached = g.greater_equal(b, total, g.const_bits(CROWDFUND_MINIMUM, W))
    return b.finish(g.mux(b, reached, total, g.const_bits(0, W)))


def dao_invest_fund_circuit(n_parties: int = 2) -> Circuit:
    """Sum in [0, 26000] (documented domain) compounded by the fund growth
    factor.  The power itself is folded at build time; the product runs
    through the general fixed multiplier on materialized constant wires,
    matching what a straightforward contract compiler emits."""
    b = CircuitBuilder()
    total = b.add_input_party(W)
    for _ in range(n_parties - 1):
        total = g.add(b, total, b.add_input_party(W))
    reached = g.greater_equal(b, total, g.const_bits(CROWDFUND_MINIMUM, W))
    fixed = [CONST0] * FRACTION_BITS + total[: W - FRACTION_BITS]
    growth = b.literal_bits(round(DAO_GROWTH * _ONE), W)
    grown = fx_mul(b, fixed, growth)
    return b.finish(g.mux(b, reached, grown, g.const_bits(0, W)))


def _fx_double(b, xs):
    return g.shift_left_const(xs, 1)


def _fx_halve_signed(b, xs):
    return xs[1:] + [xs[-1]]


def _clamp_nonneg(b, xs):
    return g.mux(b, xs[-1], g.const_bits(0, len(xs)), xs)


def exchange_option_circuit() -> Circuit:
    """Margrabe price; party 0 holds (S1, q1, sigma1, rho), party 1
    (S2, q2, sigma2, t)."""
    b = CircuitBuilder()
    p0 = b.add_input_party(4 * W)
    p1 = b.add_input_party(4 * W)
    s1, q1, sig1, rho = (p0[i * W : (i + 1) * W] for i in range(4))
    s2, q2, sig2, t = (p1[i * W : (i + 1) * W] for i in range(4))

    var = g.add(b, fx_mul(b, sig1, sig1), fx_mul(b, sig2, sig2))
    cross = _fx_double(b, fx_mul(b, rho, fx_mul(b, sig1, sig2)))
    var = _clamp_nonneg(b, g.sub(b, var, cross))
    sigma = fx_sqrt(b, var)
    sqrt_t = fx_sqrt(b, t)
    sig_rt = fx_mul(b, sigma, sqrt_t)

    log_ratio = fx_ln(b, fx_div(b, s1, s2))
    drift = g.add(b, g.sub(b, q2, q1), _fx_halve_signed(b, var))
    numer = g.add(b, log_ratio, fx_mul(b, drift, t))
    d1 = fx_div(b, numer, sig_rt)
    d2 = g.sub(b, d1, sig_rt)

    leg1 = fx_mul(b, fx_mul(b, s1, _fx_discount(b, q1, t)), fx_phi(b, d1))
    leg2 = fx_mul(b, fx_mul(b, s2, _fx_discount(b, q2, t)), fx_phi(b, d2))
    return b.finish(g.sub(b, leg1, leg2))


def _fx_discount(b, rate, t):
    """e^(-rate * t)"""
    rt = fx_mul(b, rate, t)
    return fx_exp(b, g.conditional_negate(b, CONST1, rt))


def fx_option_circuit(kind: str = "call") -> Circuit:
    """Garman-Kohlhagen currency option; party 0 holds (S0, r, rho),
    party 1 (X, sigma, t)."""
    if kind not in ("call", "put"):
        raise ValueError(f"unknown option kind {kind!r}")
    b = CircuitBuilder()
    p0 = b.add_input_party(3 * W)
    p1 = b.add_input_party(3 * W)
    s0, r, rho = (p0[i * W : (i + 1) * W] for i in range(3))
    strike, sigma, t = (p1[i * W : (i + 1) * W] for i in range(3))

    sqrt_t = fx_sqrt(b, t)
    sig_rt = fx_mul(b, sigma, sqrt_t)
    var_half = _fx_halve_signed(b, fx_mul(b, sigma, sigma))
    numer = g.add(b, fx_ln(b, fx_div(b, s0, strike)),
                  fx_mul(b, g.add(b, g.sub(b, r, rho), var_half), t))
    d1 = fx_div(b, numer, sig_rt)
    d2 = g.sub(b, d1, sig_rt)
    fwd_dom = fx_mul(b, s0, _fx_discount(b, rho, t))
    fwd_for = fx_mul(b, strike, _fx_discount(b, r, t))
    phi1 = fx_phi(b, d1)
    phi2 = fx_phi(b, d2)
    one = g.const_bits(_ONE, W)
    if kind == "call":
        price = g.sub(b, fx_mul(b, fwd_dom, phi1), fx_mul(b, fwd_for, phi2))
    else:
        price = g.sub(b, fx_mul(b, fwd_for, g.sub(b, one, phi2)),
                      fx_mul(b, fwd_dom, g.sub(b, one, phi1)))
    return b.finish(price)


def _order_key(b, price, idx, idx_width, invert_idx):
    idx_bits = g.const_bits(idx, idx_width)
    if invert_idx:
        idx_bits = [CONST1 if bit == CONST0 else CONST0 for bit in idx_bits]
    return idx_bits + price  # lsb-first: index is the low tiebreak field


def _sort_book(b, book, idx_width, descending):
    """Odd-even transposition network over (key, payload) orders."""
    entries = [( _order_key(b, price, i, idx_width, invert_idx=descending),
                 price, qty) for i, (price, qty) in enumerate(book)]
    n = len(entries)
    for round_ in range(n):
        start = round_ % 2
        for i in range(start, n - 1, 2):
            ka, pa, qa = entries[i]
            kb, pb, qb = entries[i + 1]
            if descending:
                swap = g.greater_than(b, kb, ka)
            else:
                swap = g.greater_than(b, ka, kb)
            entries[i] = (g.mux(b, swap, kb, ka), g.mux(b, swap, pb, pa),
                          g.mux(b, swap, qb, qa))
            entries[i + 1] = (g.mux(b, swap, ka, kb), g.mux(b, swap, pa, pb),
                              g.mux(b, swap, qa, qb))
    return [(p, q) for _, p, q in entries]


def double_auction_circuit(n_buys: int = 4, n_sells: int = 4) -> Circuit:
    """Uniform-price midpoint clearing over secret books; one party per
    order holding (price, qty)."""
    b = CircuitBuilder()
    buys, sells = [], []
    for _ in range(n_buys):
        bits = b.add_input_party(2 * W)
        buys.append((bits[:W], bits[W:]))
    for _ in range(n_sells):
        bits = b.add_input_party(2 * W)
        sells.append((bits[:W], bits[W:]))
    iw = max(1, (max(n_buys, n_sells) - 1).bit_length())
    demand = _sort_book(b, buys, iw, descending=True)
    supply = _sort_book(b, sells, iw, descending=False)

    price = g.const_bits(0, W)
    qty = g.const_bits(0, W)
    cum_b = g.const_bits(0, W)
    cum_s = g.const_bits(0, W)
    for (bp, bq), (sp, sq) in zip(demand, supply):
        crosses = g.greater_equal(b, bp, sp)
        cum_b = g.add(b, cum_b, bq)
        cum_s = g.add(b, cum_s, sq)
        mid = g.add(b, bp, sp, carry_out=True)[1:]  # (bp + sp) >> 1
        matched = g.mux(b, g.greater_than(b, cum_b, cum_s), cum_s, cum_b)
        price = g.mux(b, crosses, mid, price)
        qty = g.mux(b, crosses, matched, qty)
    return b.finish(price + qty)


def secrecy_discount_circuit() -> Circuit:
    """e^(-yT) (2 Phi(sigma sqrt(T) / 2) - 1); single holder party."""
    b = CircuitBuilder()
    p0 = b.add_input_party(3 * W)
    y, sigma, t = (p0[i * W : (i + 1) * W] for i in range(3))
    disc = _fx_discount(b, y, t)
    half_arg = _fx_halve_signed(b, fx_mul(b, sigma, fx_sqrt(b, t)))
    spread = g.sub(b, _fx_double(b, fx_phi(b, half_arg)), g.const_bits(_ONE, W))
    return b.finish(fx_mul(b, disc, spread))
