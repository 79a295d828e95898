"""Plaintext reference functions for the example contracts.

These are the double-precision oracles every secure execution is checked
against.  Option pricing follows Margrabe's exchange-option formula and
the Garman-Kohlhagen currency-option model; the secrecy discount applied
to withheld private data is e^(-yT) * (2*Phi(sigma*sqrt(T)/2) - 1).
"""

from __future__ import annotations

import math


def norm_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def millionaire(x: int, y: int) -> int:
    """1 iff the second party holds the bigger number (strict; ties -> 0)."""
    return int(y > x)


def second_price_auction(bids: list[int]) -> tuple[int, int]:
    """Winner is the argmax (lowest index on ties); price is the highest
    remaining bid."""
    if len(bids) < 2:
        raise ValueError("auction needs at least 2 bids")
    winner = max(range(len(bids)), key=lambda i: (bids[i], -i))
    rest = list(bids)
    rest.pop(winner)
    return winner, max(rest)


def exchange_option_price(S1: float, S2: float, q1: float, q2: float,
                          sigma1: float, sigma2: float, rho: float,
                          t: float) -> float:
    """Margrabe: option to exchange asset 2 for asset 1 at maturity."""
    if S1 <= 0 or S2 <= 0 or t <= 0:
        raise ValueError("prices and maturity must be positive")
    if abs(rho) > 1:
        raise ValueError("correlation must lie in [-1, 1]")
    var = sigma1 * sigma1 + sigma2 * sigma2 - 2.0 * rho * sigma1 * sigma2
    sigma = math.sqrt(max(0.0, var))
    f1 = S1 * math.exp(-q1 * t)
    f2 = S2 * math.exp(-q2 * t)
    if sigma * math.sqrt(t) < 1e-12:
        return max(0.0, f1 - f2)
    d1 = (math.log(S1 / S2) + (q2 - q1 + 0.5 * sigma * sigma) * t) / (
        sigma * math.sqrt(t))
    d2 = d1 - sigma * math.sqrt(t)
    return f1 * norm_cdf(d1) - f2 * norm_cdf(d2)


def fx_option_price(S0: float, X: float, r: float, rho: float, sigma: float,
                    t: float, kind: str = "call") -> float:
    """Garman-Kohlhagen currency option; r domestic, rho foreign rate."""
    if S0 <= 0 or X <= 0 or t <= 0:
        raise ValueError("spot, strike and maturity must be positive")
    if kind not in ("call", "put"):
        raise ValueError(f"unknown option kind {kind!r}")
    fwd_dom = S0 * math.exp(-rho * t)
    fwd_for = X * math.exp(-r * t)
    if sigma * math.sqrt(t) < 1e-12:
        intrinsic = fwd_dom - fwd_for
        return max(0.0, intrinsic) if kind == "call" else max(0.0, -intrinsic)
    d1 = (math.log(S0 / X) + (r - rho + 0.5 * sigma * sigma) * t) / (
        sigma * math.sqrt(t))
    d2 = d1 - sigma * math.sqrt(t)
    if kind == "call":
        return fwd_dom * norm_cdf(d1) - fwd_for * norm_cdf(d2)
    return fwd_for * norm_cdf(-d2) - fwd_dom * norm_cdf(-d1)


CROWDFUND_MINIMUM = 1000


def crowdfund(inputs: list[int]) -> int:
    """Raised amount when the minimum target is reached, else 0."""
    total = sum(inputs)
    return total if total >= CROWDFUND_MINIMUM else 0


DAO_GROWTH = (1.0 + 0.04 / 4.0) ** (4 * 5)  # quarterly 4% over 5 years


def dao_invest_fund(inputs: list[int]) -> float:
    """Principal compounded at the fund rate once the target is reached."""
    total = sum(inputs)
    return total * DAO_GROWTH if total >= CROWDFUND_MINIMUM else 0.0


def _book_sorted(orders: list[tuple[int, int]], descending: bool):
    if descending:
        return sorted(enumerate(orders), key=lambda e: (-e[1][0], e[0]))
    return sorted(enumerate(orders), key=lambda e: (e[1][0], e[0]))


def double_auction_clear(buys: list[tuple[int, int]],
                         sells: list[tuple[int, int]]) -> tuple[int, int]:
    """Uniform-price clearing: midpoint of the last crossing pair, matched
    quantity = min of the cumulative quantities at the cross; (0,0) when
    no order crosses."""
    for p, q in buys + sells:
        if p < 0 or q < 0:
            raise ValueError("prices and quantities must be nonnegative")
    demand = [orders for _, orders in _book_sorted(buys, descending=True)]
    supply = [orders for _, orders in _book_sorted(sells, descending=False)]
    price = qty = 0
    cum_b = cum_s = 0
    for (bp, bq), (sp, sq) in zip(demand, supply):
        if bp < sp:
            break
        cum_b += bq
        cum_s += sq
        price = (bp + sp) // 2
        qty = min(cum_b, cum_s)
    return price, qty


def secrecy_discount(y: float, sigma: float, T: float) -> float:
    """Valuation haircut on withheld data: e^(-yT)(2*Phi(sigma*sqrt(T)/2)-1)."""
    if T < 0 or sigma < 0:
        raise ValueError("volatility and maturity must be nonnegative")
    return math.exp(-y * T) * (2.0 * norm_cdf(sigma * math.sqrt(T) / 2.0) - 1.0)
