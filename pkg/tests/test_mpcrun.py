"""Protocol-level private contract execution: oracle equivalence, engine
agreement, privacy canaries, ledger consensus."""

import random

import pytest

from privsc.chain import Ledger
from privsc.circuit import eval_plaintext
from privsc.contracts import get_contract
from privsc.mpcrun import (
    EngineChoice,
    EngineDisagreement,
    VerificationRequired,
    run_private_contract,
    shared_input_circuit,
)
from privsc.transport import PartyId, Role

SEED = b"\x11" * 32
YAO = EngineChoice(("yao_semi_honest", "yao_semi_honest"))


def run_contract(name, values, seed=SEED, **kw):
    spec = get_contract(name)
    circuit = spec.circuit()
    inputs = spec.encode_inputs(values)
    engines = EngineChoice(tuple("yao_semi_honest" for _ in inputs))
    result = run_private_contract(circuit, inputs, engines, seed=seed,
                                  waive_verification=True, **kw)
    return spec.decode_outputs(result.output_bits), result


def test_shared_input_circuit_recombines():
    spec = get_contract("millionaire")
    c = spec.circuit()
    expanded = shared_input_circuit(c)
    rng = random.Random(0)
    for _ in range(50):
        bits = [rng.randint(0, 1) for _ in range(c.n_inputs)]
        shares = [rng.randint(0, 1) for _ in range(c.n_inputs)]
        other = [b ^ s for b, s in zip(bits, shares)]
        direct = eval_plaintext(c, [bits[:32], bits[32:]])
        via = eval_plaintext(expanded, [shares, other])
        assert direct == via


def test_every_contract_expansion_equivalent_on_100_vectors():
    """The executed (share-expanded) circuit equals eval_plaintext of the
    contract circuit on 100 random input vectors per registered contract."""
    from privsc.circuit import eval_plaintext_batch
    from privsc.contracts import REGISTRY

    rng = random.Random(7)
    for name, spec in sorted(REGISTRY.items()):
        c = spec.circuit()
        expanded = shared_input_circuit(c)
        direct_batch, shared_batch = [], []
        for _ in range(100):
            inputs = spec.encode_inputs(spec.random_inputs(rng))
            flat = [b for party in inputs for b in party]
            shares = [rng.randint(0, 1) for _ in flat]
            other = [b ^ s for b, s in zip(flat, shares)]
            direct_batch.append(inputs)
            shared_batch.append([shares, other])
        direct = eval_plaintext_batch(c, direct_batch)
        via = eval_plaintext_batch(expanded, shared_batch)
        assert direct == via, name


def test_millionaire_semantics():
    out, _ = run_contract("millionaire", [[3], [5]])
    assert out == [1]
    out, _ = run_contract("millionaire", [[5], [3]])
    assert out == [0]


def test_crowdfund_result_and_ledger():
    ledger = Ledger()
    out, result = run_contract("crowdfund", [[600], [500]], ledger=ledger)
    assert out == [1100]
    assert result.ledger_block is not None
    assert ledger.verify_integrity()
    assert result.ledger_block.height == 0


def test_engine_disagreement_sends_nothing():
    spec = get_contract("millionaire")
    engines = EngineChoice(("yao_semi_honest", "something_else"))
    with pytest.raises(EngineDisagreement):
        run_private_contract(spec.circuit(), spec.encode_inputs([[1], [2]]),
                             engines, waive_verification=True, seed=SEED)
    # nothing was built, so there is no session and no transcript at all


def test_unverified_contract_requires_waiver():
    spec = get_contract("millionaire")
    with pytest.raises(VerificationRequired):
        run_private_contract(spec.circuit(), spec.encode_inputs([[1], [2]]),
                             YAO, seed=SEED)


def test_deterministic_given_seed():
    out1, r1 = run_contract("crowdfund", [[700], [400]])
    out2, r2 = run_contract("crowdfund", [[700], [400]])
    assert out1 == out2
    assert [e.payload for e in r1.transcript.entries] == \
        [e.payload for e in r2.transcript.entries]


def test_oracle_equivalence_random_inputs():
    rng = random.Random(1)
    for name in ("millionaire", "crowdfund", "second_price_auction"):
        spec = get_contract(name)
        for trial in range(15):
            values = spec.random_inputs(rng)
            seed = rng.getrandbits(256).to_bytes(32, "big")
            out, _ = run_contract(name, values, seed=seed)
            assert out == spec.oracle(values), (name, values)


def test_evaluator_transcript_carries_no_plaintext_canary():
    canary_x, canary_y = 0xDEADBEEF, 0x1337C0DE
    spec = get_contract("millionaire")
    _, result = run_contract("millionaire", [[canary_x], [canary_y]])
    evaluator = PartyId(Role.EVALUATOR, 0)
    blob = b"".join(e.payload
                    for e in result.transcript.messages_seen_by(evaluator))
    for canary in (canary_x, canary_y):
        for order in ("big", "little"):
            assert canary.to_bytes(4, order) not in blob


def test_group_ot_flavor_end_to_end():
    out, result = run_contract("millionaire", [[9], [4]], ot_flavor="group")
    assert out == [0]
    # three OT messages plus shares, tables, labels, outputs, results
    assert result.message_count > 6


def test_extra_nodes_echo_into_quorum():
    ledger = Ledger()
    out, result = run_contract("crowdfund", [[900], [400]], ledger=ledger,
                               nodes=4)
    assert out == [1300]
    assert result.ledger_block is not None
    payload = result.ledger_block.payload[0]
    assert "N2" in payload and "N3" in payload
