"""Contract oracles, circuit/oracle agreement, financial identities."""

import math
import random

import pytest

from privsc.circuit import eval_plaintext_batch, gate_counts
from privsc.contracts import REGISTRY, get_contract
from privsc.contracts import oracles

FIXED_TOL = 1e-2


class TestOracles:
    def test_millionaire(self):
        assert oracles.millionaire(3, 5) == 1
        assert oracles.millionaire(5, 3) == 0
        assert oracles.millionaire(7, 7) == 0

    def test_auction_basic(self):
        assert oracles.second_price_auction([5, 9, 7]) == (1, 7)
        assert oracles.second_price_auction([4, 4]) == (0, 4)

    def test_auction_matches_sorting_oracle(self):
        rng = random.Random(0)
        for _ in range(300):
            bids = [rng.randrange(1000) for _ in range(8)]
            winner, price = oracles.second_price_auction(bids)
            order = sorted(range(8), key=lambda i: (-bids[i], i))
            assert winner == order[0]
            assert price == sorted(bids, reverse=True)[1]

    def test_auction_rejects_single_bid(self):
        with pytest.raises(ValueError):
            oracles.second_price_auction([1])

    def test_exchange_margrabe_value(self):
        price = oracles.exchange_option_price(100, 100, 0, 0, 0.2, 0.0, 0.0, 1.0)
        assert price == pytest.approx(7.9656, abs=2e-4)

    def test_exchange_zero_vol_limit(self):
        assert oracles.exchange_option_price(100, 90, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0) \
            == pytest.approx(10.0)
        assert oracles.exchange_option_price(90, 100, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0) == 0.0

    def test_fx_call_value(self):
        price = oracles.fx_option_price(1.0, 1.0, 0.0, 0.0, 0.2, 1.0, "call")
        assert price == pytest.approx(0.0797, abs=1e-4)

    def test_fx_zero_vol_call(self):
        assert oracles.fx_option_price(1.2, 1.0, 0.0, 0.0, 0.0, 1.0, "call") \
            == pytest.approx(0.2)

    def test_put_call_parity_100_points(self):
        rng = random.Random(1)
        for _ in range(100):
            S0 = rng.uniform(0.5, 2.0)
            X = rng.uniform(0.5, 2.0)
            r = rng.uniform(0.0, 0.1)
            rho = rng.uniform(0.0, 0.1)
            sigma = rng.uniform(0.1, 0.5)
            t = rng.uniform(0.25, 2.0)
            call = oracles.fx_option_price(S0, X, r, rho, sigma, t, "call")
            put = oracles.fx_option_price(S0, X, r, rho, sigma, t, "put")
            parity = S0 * math.exp(-rho * t) - X * math.exp(-r * t)
            assert call - put == pytest.approx(parity, abs=1e-9)

    def test_crowdfund(self):
        assert oracles.crowdfund([600, 500]) == 1100
        assert oracles.crowdfund([400, 500]) == 0
        assert oracles.crowdfund([1000, 0]) == 1000

    def test_dao_fund(self):
        assert oracles.dao_invest_fund([600, 500]) == pytest.approx(1342.209, abs=0.01)
        assert oracles.dao_invest_fund([400, 500]) == 0.0
        assert oracles.dao_invest_fund([1000, 0]) == pytest.approx(1220.19, abs=0.01)

    def test_double_auction_midpoint(self):
        assert oracles.double_auction_clear([(10, 1)], [(8, 1)]) == (9, 1)

    def test_double_auction_no_cross(self):
        assert oracles.double_auction_clear([(5, 1)], [(8, 1)]) == (0, 0)

    def test_double_auction_brute_force(self):
        rng = random.Random(2)
        for _ in range(200):
            buys = [(rng.randrange(50), rng.randrange(1, 10)) for _ in range(4)]
            sells = [(rng.randrange(50), rng.randrange(1, 10)) for _ in range(4)]
            price, qty = oracles.double_auction_clear(buys, sells)
            # brute force over all cross depths
            demand = sorted(enumerate(buys), key=lambda e: (-e[1][0], e[0]))
            supply = sorted(enumerate(sells), key=lambda e: (e[1][0], e[0]))
            best = (0, 0)
            cb = cs = 0
            for k in range(4):
                bp, bq = demand[k][1]
                sp, sq = supply[k][1]
                if bp < sp:
                    break
                cb += bq
                cs += sq
                best = ((bp + sp) // 2, min(cb, cs))
            assert (price, qty) == best

    def test_option_domain_errors(self):
        with pytest.raises(ValueError):
            oracles.exchange_option_price(-1.0, 1.0, 0, 0, 0.2, 0.2, 0.0, 1.0)
        with pytest.raises(ValueError):
            oracles.exchange_option_price(1.0, 1.0, 0, 0, 0.2, 0.2, 0.0, 0.0)
        with pytest.raises(ValueError):
            oracles.exchange_option_price(1.0, 1.0, 0, 0, 0.2, 0.2, 1.5, 1.0)
        with pytest.raises(ValueError):
            oracles.fx_option_price(1.0, 0.0, 0, 0, 0.2, 1.0, "call")
        with pytest.raises(ValueError):
            oracles.fx_option_price(1.0, 1.0, 0, 0, 0.2, 1.0, "straddle")
        with pytest.raises(ValueError):
            oracles.secrecy_discount(0.0, -0.1, 1.0)

    def test_secrecy_discount_zero_vol(self):
        assert oracles.secrecy_discount(0.05, 0.0, 2.0) == 0.0

    def test_secrecy_discount_value(self):
        assert oracles.secrecy_discount(0.0, 0.2, 1.0) == pytest.approx(0.0797, abs=1e-4)

    def test_secrecy_discount_equals_margrabe_100_points(self):
        rng = random.Random(3)
        for _ in range(100):
            y = rng.uniform(0.0, 0.2)
            sigma = rng.uniform(0.01, 0.6)
            T = rng.uniform(0.1, 4.0)
            direct = oracles.secrecy_discount(y, sigma, T)
            via_margrabe = oracles.exchange_option_price(
                1.0, 1.0, y, y, sigma, 0.0, 0.0, T)
            assert direct == pytest.approx(via_margrabe, abs=1e-9)


def _agreement_points(name, n):
    spec = get_contract(name)
    rng = random.Random(hash(name) & 0xFFFF)
    return [spec.random_inputs(rng) for _ in range(n)]


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_circuit_matches_oracle(name):
    spec = get_contract(name)
    circuit = spec.circuit()
    points = _agreement_points(name, 1000)
    batch = [spec.encode_inputs(v) for v in points]
    outs = eval_plaintext_batch(circuit, batch)
    for values, out_bits in zip(points, outs):
        got = spec.decode_outputs(out_bits)
        expect = spec.oracle(spec.quantize_inputs(values))
        if spec.integer_valued:
            assert got == expect, f"{name}{values}: {got} != {expect}"
        else:
            for gv, ev in zip(got, expect):
                err = abs(gv - ev) / max(1.0, abs(ev))
                assert err <= FIXED_TOL, \
                    f"{name}{values}: {gv} vs {ev} (err {err:.2e})"


def test_crowdfund_boundary_cases():
    spec = get_contract("crowdfund")
    circuit = spec.circuit()
    for vals, expect in [([[600], [500]], 1100), ([[400], [500]], 0),
                         ([[1000], [0]], 1000), ([[999], [0]], 0)]:
        out = eval_plaintext_batch(circuit, [spec.encode_inputs(vals)])[0]
        assert spec.decode_outputs(out) == [expect]


def test_crowdfund_monotone_above_threshold():
    spec = get_contract("crowdfund")
    circuit = spec.circuit()
    rng = random.Random(4)
    for _ in range(100):
        x = rng.randint(1000, 10**6)
        y = rng.randint(0, 10**6)
        bumped = spec.encode_inputs([[x + 7], [y]])
        base = spec.encode_inputs([[x], [y]])
        outs = eval_plaintext_batch(circuit, [base, bumped])
        assert spec.decode_outputs(outs[1])[0] >= spec.decode_outputs(outs[0])[0]


def test_option_price_monotone_in_volatility():
    rng = random.Random(5)
    for _ in range(100):
        S0, X = rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)
        t = rng.uniform(0.25, 2.0)
        lo = rng.uniform(0.05, 0.3)
        hi = lo + rng.uniform(0.01, 0.3)
        assert oracles.fx_option_price(S0, X, 0.02, 0.01, hi, t, "call") >= \
            oracles.fx_option_price(S0, X, 0.02, 0.01, lo, t, "call") - 1e-12
        assert oracles.exchange_option_price(S0, X, 0.0, 0.0, hi, 0.0, 0.0, t) >= \
            oracles.exchange_option_price(S0, X, 0.0, 0.0, lo, 0.0, 0.0, t) - 1e-12


def test_and_counts_reported_against_table():
    reference = {"millionaire": 96, "second_price_auction": 192, "crowdfund": 128,
             "dao_invest_fund": 2144}
    for name, expect in reference.items():
        ours = gate_counts(get_contract(name).circuit()).and_count
        ratio = ours / expect
        assert 0.25 <= ratio <= 4.0, f"{name}: {ours} vs reference {expect}"
