"""CRC-aided polar codes: construction, encoding and codebook membership.

Conventions used throughout the package:

* ``x = u F^{(x)n}`` with ``F = [[1, 0], [1, 1]]``, natural index order (no
  bit reversal). The transform is its own inverse over GF(2).
* The ``K`` non-frozen positions carry the payload, which is the
  ``K - crc_degree`` information bits followed by the CRC, in ascending
  position order.
* Polynomials are integers with the leading term included, e.g. the NR CRC11
  ``D^11 + D^10 + D^9 + D^5 + 1`` is ``0xE21``. Bit vectors are read MSB first.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import CodeConstructionError

CRC11_NR = 0xE21
CRC4 = 0x13  # D^4 + D + 1, only used for small test codes
BETA = 2 ** 0.25


def poly_degree(poly: Optional[int]) -> int:
    return 0 if not poly else int(poly).bit_length() - 1


def crc_remainder(bits, poly: int) -> np.ndarray:
    """Remainder of ``bits(D) * D^r`` modulo ``poly``, as ``r`` bits MSB first."""
    r = poly_degree(poly)
    reg = 0
    top = 1 << r
    for b in np.asarray(bits, dtype=np.int64).tolist():
        reg = (reg << 1) | b
        if reg & top:
            reg ^= poly
    # flush r zeros through the divider
    for _ in range(r):
        reg <<= 1
        if reg & top:
            reg ^= poly
    return np.array([(reg >> (r - 1 - i)) & 1 for i in range(r)], dtype=np.uint8)


def crc_attach(info, poly: int = CRC11_NR) -> np.ndarray:
    """Append the CRC to ``info`` (or to each row of a batch)."""
    info = np.asarray(info, dtype=np.uint8)
    if info.ndim > 1:
        return np.stack([crc_attach(row, poly) for row in info.reshape(-1, info.shape[-1])]).reshape(
            info.shape[:-1] + (-1,)
        )
    return np.concatenate([info, crc_remainder(info, poly)])


def crc_check(word, poly: int = CRC11_NR) -> bool:
    """True iff ``word(D)`` is divisible by ``poly``."""
    r = poly_degree(poly)
    word = np.asarray(word, dtype=np.uint8)
    if len(word) <= r:
        raise ValueError(f"word of length {len(word)} is too short for a degree-{r} CRC")
    reg = 0
    top = 1 << r
    for b in word.tolist():
        reg = (reg << 1) | b
        if reg & top:
            reg ^= poly
    return reg == 0


def polar_transform(u) -> np.ndarray:
    """Apply ``F^{(x)n}`` along the last axis (works on batches)."""
    x = np.array(u, dtype=np.uint8, copy=True)
    n = x.shape[-1]
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    lead = x.shape[:-1]
    step = 1
    while step < n:
        v = x.reshape(*lead, n // (2 * step), 2, step)
        v[..., 0, :] ^= v[..., 1, :]
        step <<= 1
    return x


def beta_expansion_weights(n_bits: int) -> np.ndarray:
    """Polarization weight ``sum_j b_j(i) * 2^(j/4)`` for every index i."""
    m = int(np.log2(n_bits))
    idx = np.arange(n_bits)
    bits = (idx[:, None] >> np.arange(m)) & 1
    return bits @ (BETA ** np.arange(m))


@dataclass(frozen=True, eq=False)
class PolarCode:
    n_bits: int
    k_nonfrozen: int
    frozen_mask: np.ndarray
    crc_poly: Optional[int]
    reliability_order: np.ndarray

    @property
    def crc_degree(self) -> int:
        return poly_degree(self.crc_poly)

    @property
    def n_info(self) -> int:
        """Information bits per codeword (``K`` minus the CRC)."""
        return self.k_nonfrozen - self.crc_degree

    @cached_property
    def info_positions(self) -> np.ndarray:
        return np.flatnonzero(~self.frozen_mask)

    @cached_property
    def _crc_matrix(self) -> np.ndarray:
        # row i: remainder of a unit payload bit at position i
        K, r = self.k_nonfrozen, self.crc_degree
        if r == 0:
            return np.zeros((K, 0), dtype=np.uint8)
        rows = []
        for i in range(K):
            e = np.zeros(K, dtype=np.uint8)
            e[i] = 1
            rem = 0
            for b in e.tolist():
                rem = (rem << 1) | b
                if rem & (1 << r):
                    rem ^= self.crc_poly
            rows.append([(rem >> (r - 1 - j)) & 1 for j in range(r)])
        return np.array(rows, dtype=np.uint8)

    @cached_property
    def parity_check(self) -> np.ndarray:
        """``(N, n_checks)`` matrix S with ``x`` a codeword iff ``x @ S = 0`` (mod 2)."""
        F = polar_transform(np.eye(self.n_bits, dtype=np.uint8))  # row j = transform of e_j
        frozen_part = F[:, self.frozen_mask]
        crc_part = (F[:, self.info_positions].astype(np.int64) @ self._crc_matrix) % 2
        return np.concatenate([frozen_part, crc_part.astype(np.uint8)], axis=1)

    @cached_property
    def packed_columns(self) -> np.ndarray:
        """Per-bit syndrome contributions packed into uint64 words, shape ``(N, W)``."""
        return pack_rows(self.parity_check)

    def syndrome(self, x) -> np.ndarray:
        """Packed syndrome of one word or a batch of words."""
        x = np.asarray(x, dtype=np.int64)
        s = (x @ self.parity_check.astype(np.int64)) % 2
        return pack_rows(s.astype(np.uint8))

    def frozen_mask_hex(self) -> str:
        """Frozen mask as hex, position 0 in the most significant bit."""
        value = int("".join("1" if f else "0" for f in self.frozen_mask), 2)
        width = (self.n_bits + 3) // 4
        return format(value << (4 * width - self.n_bits), f"0{width}x")

    def payload_of(self, x) -> np.ndarray:
        """Non-frozen bits of ``u`` for codeword(s) ``x``."""
        return polar_transform(x)[..., self.info_positions]

    def info_of(self, x) -> np.ndarray:
        return self.payload_of(x)[..., : self.n_info]


def pack_rows(bits) -> np.ndarray:
    """Pack the last axis of a 0/1 array into little-endian uint64 words."""
    bits = np.asarray(bits, dtype=np.uint8)
    r = bits.shape[-1]
    w = max(1, (r + 63) // 64)
    padded = np.zeros(bits.shape[:-1] + (64 * w,), dtype=np.uint64)
    padded[..., :r] = bits
    weights = np.uint64(1) << np.arange(64, dtype=np.uint64)
    return (padded.reshape(bits.shape[:-1] + (w, 64)) * weights).sum(axis=-1, dtype=np.uint64)


def construct(n_bits: int, k_nonfrozen: int, crc_poly: Optional[int] = CRC11_NR) -> PolarCode:
    """Build a code whose frozen set is the ``N - K`` lowest beta-expansion weights."""
    if n_bits < 2 or n_bits & (n_bits - 1):
        raise CodeConstructionError(f"N must be a power of two >= 2, got {n_bits}")
    r = poly_degree(crc_poly)
    if not (0 <= k_nonfrozen <= n_bits):
        raise CodeConstructionError(f"K must lie in [0, N], got {k_nonfrozen}")
    if r and k_nonfrozen <= r:
        raise CodeConstructionError(f"K={k_nonfrozen} leaves no information bits next to a degree-{r} CRC")
    order = np.argsort(beta_expansion_weights(n_bits), kind="stable")
    frozen = np.zeros(n_bits, dtype=bool)
    frozen[order[: n_bits - k_nonfrozen]] = True
    return PolarCode(n_bits, k_nonfrozen, frozen, crc_poly, order)


def encode(payload, code: PolarCode) -> np.ndarray:
    """Encode the ``K`` payload bits (information plus CRC)."""
    payload = np.asarray(payload, dtype=np.uint8)
    if payload.shape[-1] != code.k_nonfrozen:
        raise ValueError(f"expected {code.k_nonfrozen} payload bits, got {payload.shape[-1]}")
    u = np.zeros(payload.shape[:-1] + (code.n_bits,), dtype=np.uint8)
    u[..., code.info_positions] = payload
    return polar_transform(u)


def encode_info(info, code: PolarCode) -> np.ndarray:
    """CRC-attach then encode ``n_info`` information bits."""
    if code.crc_degree:
        return encode(crc_attach(info, code.crc_poly), code)
    return encode(info, code)


def is_codeword(x, code: PolarCode) -> bool:
    x = np.asarray(x, dtype=np.uint8)
    if len(x) != code.n_bits:
        raise ValueError(f"expected {code.n_bits} bits, got {len(x)}")
    u = polar_transform(x)
    if np.any(u[code.frozen_mask]):
        return False
    if code.crc_degree == 0:
        return True
    return crc_check(u[code.info_positions], code.crc_poly)
