"""Keyed-hash primitives shared by the garbling, outsourcing and chain layers.

All symmetric material is derived from BLAKE2b.  The authenticated row
cipher used for garbled tables and pivot entries is a one-time pad with a
polynomial MAC over GF(p), p = 2**61 - 1, truncated to a 32-bit tag: a
wrong key, or any flipped ciphertext bit, fails the tag check with
probability at least 1 - 2**-32.
"""

from __future__ import annotations

import hashlib

LABEL_BYTES = 16  # kappa = 128
TAG_BYTES = 4
ROW_BYTES = LABEL_BYTES + TAG_BYTES

_MAC_P = (1 << 61) - 1


class DecryptionError(Exception):
    """Raised when an authenticated ciphertext fails its tag check."""


def kdf(key: bytes, *parts: bytes | int, size: int = LABEL_BYTES) -> bytes:
    """Derive `size` bytes from `key` and a tuple of domain-separated parts."""
    h = hashlib.blake2b(key=key[:64], digest_size=size)
    for p in parts:
        if isinstance(p, int):
            p = p.to_bytes(8, "big", signed=True)
        h.update(len(p).to_bytes(4, "big"))
        h.update(p)
    return h.digest()


def prf(key: bytes, *parts: bytes | int) -> bytes:
    """128-bit PRF used for input encodings and pivot keys."""
    return kdf(key, *parts, size=LABEL_BYTES)


def _poly_mac(r: int, s: int, data: bytes) -> int:
    # Polynomial evaluation over GF(2^61 - 1) in sub-61-bit chunks, then
    # truncated to 32 bits for storage.  The 16-byte case is unrolled;
    # it is the only shape the row cipher produces.
    if len(data) == 16:
        acc = (16 * r + int.from_bytes(data[:7], "big")) % _MAC_P
        acc = (acc * r + int.from_bytes(data[7:14], "big")) % _MAC_P
        acc = (acc * r + int.from_bytes(data[14:], "big")) % _MAC_P
        return (acc * r + s) % _MAC_P & 0xFFFFFFFF
    acc = len(data) % _MAC_P
    for i in range(0, len(data), 7):
        chunk = int.from_bytes(data[i : i + 7], "big")
        acc = (acc * r + chunk) % _MAC_P
    return (acc * r + s) % _MAC_P & 0xFFFFFFFF


def _row_pad(key: bytes, tweak: bytes) -> tuple[bytes, int, int]:
    d = hashlib.blake2b(tweak, key=key[:64], digest_size=LABEL_BYTES + 18).digest()
    pad = d[:LABEL_BYTES]
    r = int.from_bytes(d[LABEL_BYTES : LABEL_BYTES + 9], "big") % _MAC_P
    s = int.from_bytes(d[LABEL_BYTES + 9 :], "big") % _MAC_P
    return pad, r, s


def seal(key: bytes, tweak: bytes, plaintext: bytes) -> bytes:
    """Encrypt-and-authenticate a 16-byte plaintext under (key, tweak)."""
    if len(plaintext) != LABEL_BYTES:
        raise ValueError("seal expects a 16-byte plaintext")
    pad, r, s = _row_pad(key, tweak)
    ct = (int.from_bytes(plaintext, "big") ^ int.from_bytes(pad, "big")
          ).to_bytes(LABEL_BYTES, "big")
    return ct + _poly_mac(r, s, ct).to_bytes(TAG_BYTES, "big")


def open_sealed(key: bytes, tweak: bytes, row: bytes) -> bytes:
    """Decrypt a sealed row; raise DecryptionError on any tag mismatch."""
    if len(row) != ROW_BYTES:
        raise DecryptionError("malformed row length")
    ct, tag = row[:LABEL_BYTES], row[LABEL_BYTES:]
    pad, r, s = _row_pad(key, tweak)
    if _poly_mac(r, s, ct) != int.from_bytes(tag, "big"):
        raise DecryptionError("authentication tag mismatch")
    return (int.from_bytes(ct, "big") ^ int.from_bytes(pad, "big")
            ).to_bytes(LABEL_BYTES, "big")


def digest_hex(data: bytes) -> str:
    """Hex SHA-256, the content digest used across ledger and packages."""
    return hashlib.sha256(data).hexdigest()
