"""Simulated blockchain: hash-linked ledger, k-of-n byte-equality
consensus, deposits, the oracle call pattern, and gas-cost arithmetic.

Consensus is deliberately a quorum over byte-identical results computed
by a restricted node set, not a full BFT protocol; the result of a
successful round is appended as a block.  Large oracle results live in a
content-addressed blob store standing in for off-chain storage.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from enum import Enum

from .hashing import digest_hex

INLINE_RESULT_LIMIT = 1024  # bytes; larger results go to the blob store


class ChainError(Exception):
    pass


class ConsensusFailure(ChainError):
    def __init__(self, dissenting: list[str]) -> None:
        super().__init__(f"consensus failure; dissenting nodes: {dissenting}")
        self.dissenting = dissenting


class InsufficientGasError(ChainError):
    pass


class InvalidTransitionError(ChainError):
    pass


class DepositStatus(str, Enum):
    HELD = "held"
    CONFISCATED = "confiscated"
    RETURNED = "returned"


@dataclass(frozen=True)
class DepositRecord:
    party: str
    amount: int
    status: DepositStatus = DepositStatus.HELD

    def __post_init__(self) -> None:
        if self.amount < 0:
            raise ChainError("deposit amount must be nonnegative")


@dataclass(frozen=True)
class Block:
    height: int
    payload: tuple[str, ...]
    prev_digest: str
    digest: str = ""

    @staticmethod
    def compute_digest(height: int, payload: tuple[str, ...], prev_digest: str) -> str:
        body = json.dumps([height, list(payload), prev_digest]).encode()
        return digest_hex(body)

    @classmethod
    def make(cls, height: int, payload: tuple[str, ...], prev_digest: str) -> "Block":
        return cls(height, payload, prev_digest,
                   cls.compute_digest(height, payload, prev_digest))


GENESIS_DIGEST = "0" * 64


@dataclass
class Ledger:
    blocks: list[Block] = field(default_factory=list)
    blob_store: dict[str, bytes] = field(default_factory=dict)

    def tip_digest(self) -> str:
        return self.blocks[-1].digest if self.blocks else GENESIS_DIGEST

    def append_block(self, payload: list[str]) -> Block:
        block = Block.make(len(self.blocks), tuple(payload), self.tip_digest())
        self.blocks.append(block)
        return block

    def store_blob(self, data: bytes) -> str:
        digest = digest_hex(data)
        self.blob_store[digest] = bytes(data)
        return digest

    def get_blob(self, digest: str) -> bytes:
        return self.blob_store[digest]

    def verify_integrity(self) -> bool:
        """Recompute every digest and the chain linkage from genesis."""
        prev = GENESIS_DIGEST
        for i, b in enumerate(self.blocks):
            if b.height != i or b.prev_digest != prev:
                return False
            if Block.compute_digest(b.height, b.payload, b.prev_digest) != b.digest:
                return False
            prev = b.digest
        for digest, data in self.blob_store.items():
            if digest_hex(data) != digest:
                return False
        return True

    def export_lines(self) -> str:
        """Line-delimited block records with hex digests."""
        lines = []
        for b in self.blocks:
            record = json.dumps(
                {"height": b.height, "payload": list(b.payload),
                 "prev": b.prev_digest, "digest": b.digest},
                separators=(",", ":"), sort_keys=True)
            lines.append(record)
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def import_lines(cls, text: str) -> "Ledger":
        ledger = cls()
        for line in text.splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            ledger.blocks.append(Block(rec["height"], tuple(rec["payload"]),
                                       rec["prev"], rec["digest"]))
        if not ledger.verify_integrity():
            raise ChainError("imported ledger fails integrity check")
        return ledger

    def dump_blobs(self, directory: str) -> None:
        os.makedirs(directory, exist_ok=True)
        for digest, data in self.blob_store.items():
            with open(os.path.join(directory, digest), "wb") as fh:
                fh.write(data)

    def load_blobs(self, directory: str) -> None:
        for name in os.listdir(directory):
            with open(os.path.join(directory, name), "rb") as fh:
                data = fh.read()
            if digest_hex(data) != name:
                raise ChainError(f"blob {name} content does not match its digest")
            self.blob_store[name] = data


def append_with_consensus(
    ledger: Ledger, results: list[tuple[str, bytes]], quorum: int
) -> Block:
    """Append a block committing the quorum result of a restricted node set.

    Requires at least `quorum` byte-identical results; ties between
    equally large agreeing groups fail the round.
    """
    if quorum < 1:
        raise ChainError("quorum must be at least 1")
    nodes = [n for n, _ in results]
    if len(set(nodes)) != len(nodes):
        raise ChainError("duplicate node ids in consensus round")
    if len(results) < quorum:
        raise ConsensusFailure(nodes)
    groups: dict[bytes, list[str]] = {}
    for node, data in results:
        groups.setdefault(bytes(data), []).append(node)
    best = max(groups.values(), key=len)
    contenders = [g for g in groups.values() if len(g) == len(best)]
    if len(best) < quorum or len(contenders) > 1:
        dissent = [n for n, _ in results if n not in best]
        raise ConsensusFailure(dissent or nodes)
    winning = next(data for data, g in groups.items() if g is best)
    payload = [
        json.dumps({"kind": "result", "data": winning.hex(),
                    "nodes": sorted(best), "quorum": quorum},
                   separators=(",", ":"), sort_keys=True)
    ]
    return ledger.append_block(payload)


def gas_cost(ops: int, gas_per_op: float, gwei_per_gas: float,
             usd_per_eth: float) -> float:
    """USD cost of `ops` operations at the given gas and price levels."""
    if min(ops, gas_per_op, gwei_per_gas, usd_per_eth) < 0:
        raise ChainError("gas_cost inputs must be nonnegative")
    return ops * gas_per_op * gwei_per_gas * 1e-9 * usd_per_eth


def manage_deposit(record: DepositRecord, event: str) -> DepositRecord:
    """held -> confiscated on misbehavior, held -> returned on completion."""
    if record.status != DepositStatus.HELD:
        raise InvalidTransitionError(
            f"deposit in state {record.status.value} cannot transition")
    if event == "misbehavior":
        return DepositRecord(record.party, record.amount, DepositStatus.CONFISCATED)
    if event == "completion":
        return DepositRecord(record.party, record.amount, DepositStatus.RETURNED)
    raise InvalidTransitionError(f"unknown deposit event {event!r}")


# --- oracle call pattern -------------------------------------------------

# Parameters travel encrypted to the executing oracle; X25519 + the
# authenticated pad cipher stand in for the public-key layer.

from cryptography.hazmat.primitives.asymmetric.x25519 import (
    X25519PrivateKey,
    X25519PublicKey,
)

from .hashing import DecryptionError, kdf, open_sealed, seal


@dataclass
class OracleExecutor:
    """Off-chain executor with a decryption key and a callback."""

    private_key: X25519PrivateKey
    callback: "callable"

    @classmethod
    def create(cls, callback) -> "OracleExecutor":
        return cls(X25519PrivateKey.generate(), callback)

    def public_key_bytes(self) -> bytes:
        from cryptography.hazmat.primitives import serialization

        return self.private_key.public_key().public_bytes(
            serialization.Encoding.Raw, serialization.PublicFormat.Raw)


def encrypt_call_parameters(executor_public: bytes, params: bytes,
                            rng_bytes: bytes) -> bytes:
    """ECIES-style: ephemeral X25519 + keyed stream with per-chunk tags."""
    eph = X25519PrivateKey.from_private_bytes(rng_bytes[:32])
    from cryptography.hazmat.primitives import serialization

    eph_pub = eph.public_key().public_bytes(
        serialization.Encoding.Raw, serialization.PublicFormat.Raw)
    shared = eph.exchange(X25519PublicKey.from_public_bytes(executor_public))
    key = kdf(shared, b"oracle-params")
    chunks = []
    for i in range(0, len(params), 16):
        chunk = params[i : i + 16].ljust(16, b"\x00")
        chunks.append(seal(key, b"chunk%d" % (i // 16), chunk))
    header = len(params).to_bytes(4, "big")
    return eph_pub + header + b"".join(chunks)


def decrypt_call_parameters(private_key: X25519PrivateKey, blob: bytes) -> bytes:
    eph_pub, header, body = blob[:32], blob[32:36], blob[36:]
    shared = private_key.exchange(X25519PublicKey.from_public_bytes(eph_pub))
    key = kdf(shared, b"oracle-params")
    length = int.from_bytes(header, "big")
    out = []
    for i in range(0, len(body), 20):
        out.append(open_sealed(key, b"chunk%d" % (i // 20), body[i : i + 20]))
    return b"".join(out)[:length]


@dataclass(frozen=True)
class OracleResult:
    inline: bytes | None = None
    blob_digest: str | None = None


def oracle_roundtrip(ledger: Ledger, encrypted_params: bytes, gas_budget: int,
                     executor: OracleExecutor,
                     return_cost: int = 21_000) -> OracleResult:
    """Ethereum-style oracle call: decrypt off-chain, run, return or store.

    Results over INLINE_RESULT_LIMIT bytes land in the blob store and a
    digest pointer is returned instead.
    """
    if gas_budget < return_cost:
        raise InsufficientGasError(
            f"gas budget {gas_budget} below return cost {return_cost}")
    try:
        params = decrypt_call_parameters(executor.private_key, encrypted_params)
    except DecryptionError as exc:
        raise ChainError(f"oracle cannot decrypt parameters: {exc}") from exc
    result = executor.callback(params)
    if len(result) <= INLINE_RESULT_LIMIT:
        return OracleResult(inline=bytes(result))
    return OracleResult(blob_digest=ledger.store_blob(result))
