"""Contract registry: plaintext oracle + compiled circuit per contract.

Each entry carries a typed per-party input schema with documented value
domains (fixed-point contracts are accurate to the stated tolerance only
inside these), the output schema, the reference function, and the AND
count reported in the reference experiment table when one exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from ..circuit import Circuit, gate_counts
from ..circuit.fixedpoint import FixedPoint
from ..circuit.ir import bits_to_int, int_to_bits
from . import circuits, oracles


@dataclass(frozen=True)
class Field:
    name: str
    kind: str            # "uint" | "q16"
    lo: float
    hi: float
    width: int = 32


@dataclass(frozen=True)
class ContractSpec:
    name: str
    description: str
    party_fields: tuple[tuple[Field, ...], ...]
    output_fields: tuple[Field, ...]
    build: "callable"
    oracle: "callable"   # nested per-party values -> list of output values
    reference_and_count: int | None = None
    integer_valued: bool = True

    @property
    def n_parties(self) -> int:
        return len(self.party_fields)

    def circuit(self) -> Circuit:
        return _cached_circuit(self.name)

    def encode_inputs(self, values: list[list]) -> list[list[int]]:
        """Per-party host values -> per-party bit vectors."""
        if len(values) != self.n_parties:
            raise ValueError(f"{self.name}: expected {self.n_parties} parties")
        out = []
        for fields, vals in zip(self.party_fields, values):
            if len(vals) != len(fields):
                raise ValueError(f"{self.name}: field count mismatch")
            bits: list[int] = []
            for f, v in zip(fields, vals):
                if f.kind == "uint":
                    bits.extend(int_to_bits(int(v), f.width))
                else:
                    bits.extend(FixedPoint.encode(float(v)).to_bits())
            out.append(bits)
        return out

    def quantize_inputs(self, values: list[list]) -> list[list]:
        """Round fixed-point inputs to their circuit representation."""
        out = []
        for fields, vals in zip(self.party_fields, values):
            row = []
            for f, v in zip(fields, vals):
                row.append(int(v) if f.kind == "uint"
                           else FixedPoint.encode(float(v)).decode())
            out.append(row)
        return out

    def decode_outputs(self, bits: list[int]) -> list:
        out = []
        pos = 0
        for f in self.output_fields:
            chunk = bits[pos : pos + f.width]
            pos += f.width
            if f.kind == "uint":
                out.append(bits_to_int(chunk))
            else:
                out.append(FixedPoint.from_bits(chunk).decode())
        return out

    def random_inputs(self, rng) -> list[list]:
        values = []
        for fields in self.party_fields:
            row = []
            for f in fields:
                if f.kind == "uint":
                    row.append(rng.randint(int(f.lo), int(f.hi)))
                else:
                    row.append(rng.uniform(f.lo, f.hi))
            values.append(row)
        return values


def _u(name, hi=2**31 - 1, lo=0):
    return Field(name, "uint", lo, hi)


def _q(name, lo, hi):
    return Field(name, "q16", lo, hi)


def _auction_oracle(values):
    winner, price = oracles.second_price_auction([v[0] for v in values])
    return [winner, price]


def _double_auction_oracle(values):
    buys = [tuple(v) for v in values[:4]]
    sells = [tuple(v) for v in values[4:]]
    price, qty = oracles.double_auction_clear(buys, sells)
    return [price, qty]


REGISTRY: dict[str, ContractSpec] = {}


def _register(spec: ContractSpec) -> None:
    REGISTRY[spec.name] = spec


_register(ContractSpec(
    name="millionaire",
    description="who holds the bigger number, and nothing else",
    party_fields=((_u("wealth"),), (_u("wealth"),)),
    output_fields=(Field("second_is_richer", "uint", 0, 1, width=1),),
    build=circuits.millionaire_circuit,
    oracle=lambda v: [oracles.millionaire(v[0][0], v[1][0])],
    reference_and_count=96,
))

_register(ContractSpec(
    name="second_price_auction",
    description="sealed-bid auction; winner pays the second-highest bid",
    party_fields=((_u("bid"),), (_u("bid"),)),
    output_fields=(Field("winner", "uint", 0, 1, width=1), _u("price")),
    build=circuits.second_price_auction_circuit,
    oracle=_auction_oracle,
    reference_and_count=192,
))

_register(ContractSpec(
    name="exchange_option",
    description="Margrabe exchange-option valuation on private terms",
    party_fields=(
        (_q("S1", 0.5, 2.0), _q("q1", 0.0, 0.1), _q("sigma1", 0.15, 0.4),
         _q("rho", -0.5, 0.5)),
        (_q("S2", 0.5, 2.0), _q("q2", 0.0, 0.1), _q("sigma2", 0.15, 0.4),
         _q("t", 0.5, 2.0)),
    ),
    output_fields=(_q("price", 0.0, 4.0),),
    build=circuits.exchange_option_circuit,
    oracle=lambda v: [oracles.exchange_option_price(
        v[0][0], v[1][0], v[0][1], v[1][1], v[0][2], v[1][2], v[0][3], v[1][3])],
    reference_and_count=267507,
    integer_valued=False,
))

_register(ContractSpec(
    name="currency_call_option",
    description="Garman-Kohlhagen currency call on private rates",
    party_fields=(
        (_q("S0", 0.5, 2.0), _q("r", 0.0, 0.1), _q("rho", 0.0, 0.1)),
        (_q("X", 0.5, 2.0), _q("sigma", 0.15, 0.5), _q("t", 0.5, 2.0)),
    ),
    output_fields=(_q("price", 0.0, 4.0),),
    build=lambda: circuits.fx_option_circuit("call"),
    oracle=lambda v: [oracles.fx_option_price(
        v[0][0], v[1][0], v[0][1], v[0][2], v[1][1], v[1][2], "call")],
    reference_and_count=323529,
    integer_valued=False,
))

_register(ContractSpec(
    name="crowdfund",
    description="threshold crowdfunding: raised sum or nothing",
    party_fields=((_u("contribution", 10**6),), (_u("contribution", 10**6),)),
    output_fields=(_u("raised"),),
    build=circuits.crowdfund_circuit,
    oracle=lambda v: [oracles.crowdfund([p[0] for p in v])],
    reference_and_count=128,
))

_register(ContractSpec(
    name="dao_invest_fund",
    description="investment fund compounding the raised principal",
    party_fields=((_u("contribution", 13000),), (_u("contribution", 13000),)),
    output_fields=(_q("payout", 0.0, 32000.0),),
    build=circuits.dao_invest_fund_circuit,
    oracle=lambda v: [oracles.dao_invest_fund([p[0] for p in v])],
    reference_and_count=2144,
    integer_valued=False,
))

_register(ContractSpec(
    name="double_auction",
    description="secret order books cleared at the uniform midpoint price",
    party_fields=tuple(
        (_u("price", 1000), _u("qty", 1000)) for _ in range(8)),
    output_fields=(_u("price"), _u("qty")),
    build=circuits.double_auction_circuit,
    oracle=_double_auction_oracle,
    reference_and_count=567829,
))

_register(ContractSpec(
    name="secrecy_discount",
    description="valuation haircut applied to withheld private data",
    party_fields=((_q("yield", 0.0, 0.1), _q("sigma", 0.05, 0.5),
                   _q("T", 0.25, 4.0)),),
    output_fields=(_q("discount", 0.0, 1.0),),
    build=circuits.secrecy_discount_circuit,
    oracle=lambda v: [oracles.secrecy_discount(v[0][0], v[0][1], v[0][2])],
    reference_and_count=None,
    integer_valued=False,
))

TABLE1_NAMES = [
    "millionaire", "second_price_auction", "exchange_option",
    "currency_call_option", "crowdfund", "dao_invest_fund", "double_auction",
]


@lru_cache(maxsize=None)
def _cached_circuit(name: str) -> Circuit:
    return REGISTRY[name].build()


def get_contract(name: str) -> ContractSpec:
    try:
        return REGISTRY[name]
    except KeyError:
        raise KeyError(
            f"unknown contract {name!r}; known: {sorted(REGISTRY)}") from None


def and_count(name: str) -> int:
    return gate_counts(get_contract(name).circuit()).and_count
