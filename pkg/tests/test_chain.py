"""Ledger integrity, consensus quorum semantics, deposits, gas arithmetic,
and the oracle call pattern."""

import os

import pytest

from privsc.chain import (
    Block,
    ChainError,
    ConsensusFailure,
    DepositRecord,
    DepositStatus,
    InsufficientGasError,
    InvalidTransitionError,
    Ledger,
    OracleExecutor,
    append_with_consensus,
    encrypt_call_parameters,
    gas_cost,
    manage_deposit,
    oracle_roundtrip,
)


def test_chain_linkage_and_integrity():
    ledger = Ledger()
    for i in range(5):
        ledger.append_block([f"record-{i}"])
    assert ledger.verify_integrity()
    assert ledger.blocks[3].prev_digest == ledger.blocks[2].digest


def test_mutation_detected():
    ledger = Ledger()
    ledger.append_block(["a"])
    ledger.append_block(["b"])
    tampered = Block(1, ("evil",), ledger.blocks[1].prev_digest,
                     ledger.blocks[1].digest)
    ledger.blocks[1] = tampered
    assert not ledger.verify_integrity()


def test_export_import_roundtrip(tmp_path):
    ledger = Ledger()
    ledger.append_block(["x"])
    ledger.append_block(["y", "z"])
    text = ledger.export_lines()
    again = Ledger.import_lines(text)
    assert again.blocks == ledger.blocks
    ledger.store_blob(b"B" * 2000)
    blob_dir = tmp_path / "blobs"
    ledger.dump_blobs(str(blob_dir))
    fresh = Ledger()
    fresh.load_blobs(str(blob_dir))
    assert fresh.blob_store == ledger.blob_store


class TestConsensus:
    def test_unanimous_appends(self):
        ledger = Ledger()
        results = [(f"n{i}", b"R") for i in range(3)]
        block = append_with_consensus(ledger, results, quorum=3)
        assert block.height == 0
        assert ledger.verify_integrity()

    def test_one_dissenter_fails_at_full_quorum(self):
        ledger = Ledger()
        results = [("n0", b"R"), ("n1", b"R"), ("n2", b"X")]
        with pytest.raises(ConsensusFailure) as err:
            append_with_consensus(ledger, results, quorum=3)
        assert "n2" in err.value.dissenting
        assert ledger.blocks == []

    def test_majority_of_four_meets_k3(self):
        ledger = Ledger()
        results = [("n0", b"R"), ("n1", b"R"), ("n2", b"R"), ("n3", b"X")]
        block = append_with_consensus(ledger, results, quorum=3)
        assert "R".encode().hex() in block.payload[0]

    def test_determinism(self):
        results = [("n0", b"R"), ("n1", b"R"), ("n2", b"R")]
        a = append_with_consensus(Ledger(), list(results), quorum=3)
        b = append_with_consensus(Ledger(), list(results), quorum=3)
        assert a == b


class TestGasCost:
    def test_quoted_multiplication_cost(self):
        assert gas_cost(10_000_000, 5, 21, 380) == pytest.approx(399.00, abs=0.01)

    def test_quoted_storage_cost(self):
        assert gas_cost(32_768, 2000, 21, 380) == pytest.approx(523.00, abs=0.5)

    def test_zero_gas_price_is_free(self):
        assert gas_cost(123456, 0, 21, 380) == 0

    def test_expense_ratio_vs_local_compute(self):
        ratio = gas_cost(10_000_000, 5, 21, 380) / 0.000000022
        assert ratio == pytest.approx(1.8136e10, rel=1e-3)

    def test_negative_rejected(self):
        with pytest.raises(ChainError):
            gas_cost(-1, 5, 21, 380)


class TestDeposits:
    def test_misbehavior_confiscates(self):
        rec = DepositRecord("E0", 10_000)
        out = manage_deposit(rec, "misbehavior")
        assert out.status == DepositStatus.CONFISCATED

    def test_completion_returns(self):
        rec = DepositRecord("E0", 10_000)
        assert manage_deposit(rec, "completion").status == DepositStatus.RETURNED

    def test_terminal_states_reject_events(self):
        rec = manage_deposit(DepositRecord("E0", 5), "misbehavior")
        with pytest.raises(InvalidTransitionError):
            manage_deposit(rec, "completion")


class TestOracle:
    def setup_method(self):
        self.ledger = Ledger()
        self.executor = OracleExecutor.create(lambda params: params * 2)

    def call(self, params: bytes, gas=100_000, executor=None):
        blob = encrypt_call_parameters(
            (executor or self.executor).public_key_bytes(), params,
            rng_bytes=b"\x09" * 32)
        return oracle_roundtrip(self.ledger, blob, gas, self.executor)

    def test_small_result_inline(self):
        out = self.call(b"\x01" * 8)
        assert out.inline == b"\x01" * 16
        assert out.blob_digest is None

    def test_large_result_goes_to_blob_store(self):
        out = self.call(b"\x02" * 2048)
        assert out.inline is None
        assert self.ledger.get_blob(out.blob_digest) == b"\x02" * 4096

    def test_zero_gas_rejected(self):
        with pytest.raises(InsufficientGasError):
            self.call(b"\x01", gas=0)

    def test_wrong_key_fails(self):
        other = OracleExecutor.create(lambda p: p)
        with pytest.raises(ChainError):
            self.call(b"\x03" * 8, executor=other)
