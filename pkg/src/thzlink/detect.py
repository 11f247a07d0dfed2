"""Per-subcarrier detection and bit reliabilities.

LLR sign convention: a positive value favours bit 0. The max-log expressions
below compute ``(d1 - d0) / sigma^2`` where ``d_b`` is the smallest squared
distance to a point whose bit is ``b``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import SingularChannelError
from .modem import Constellation, slice_hard

REGIMES = ("hard", "psi", "soft")


def _check_gain(h):
    if np.any(np.asarray(h) == 0):
        raise SingularChannelError("zero channel gain on at least one subcarrier")


def zf_equalize(y, h):
    """``(h^H h)^-1 h^H y``, which for a scalar gain is ``y / h``."""
    _check_gain(h)
    return np.asarray(y) / np.asarray(h)


def effective_noise_variance_zf(h, sigma2):
    _check_gain(h)
    return sigma2 / np.abs(h) ** 2


def psi_zf(h, sigma2):
    """Pseudo-soft reliability ``1 / sigma_zf^2 = |h|^2 / sigma^2`` of one symbol."""
    _check_gain(h)
    return np.abs(h) ** 2 / sigma2


def _maxlog(dist, c: Constellation, scale):
    # dist: (..., M) squared distances; returns (..., q)
    masks = c.bit_masks()
    out = []
    for j in range(c.q):
        d1 = np.min(np.where(masks[j], dist, np.inf), axis=-1)
        d0 = np.min(np.where(~masks[j], dist, np.inf), axis=-1)
        out.append((d1 - d0) / scale)
    return np.stack(out, axis=-1)


def llr_ml(y, h, sigma2, c: Constellation):
    """Max-log LLRs from the raw observation; shape ``(..., q)``."""
    y = np.asarray(y)
    h = np.asarray(h)
    dist = np.abs(y[..., None] - h[..., None] * c.points) ** 2
    return _maxlog(dist, c, np.asarray(sigma2))


def llr_zf(y_hat, sigma2_zf, c: Constellation):
    """Max-log LLRs of an equalized symbol with effective noise variance ``sigma2_zf``."""
    y_hat = np.asarray(y_hat)
    dist = np.abs(y_hat[..., None] - c.points) ** 2
    return _maxlog(dist, c, np.asarray(sigma2_zf))


def ml_detect(y, h, c: Constellation):
    """Per-subcarrier ML decisions; the diagonal channel makes the joint search separable."""
    y = np.asarray(y)
    h = np.asarray(h)
    dist = np.abs(y[..., None] - h[..., None] * c.points) ** 2
    return c.points[np.argmin(dist, axis=-1)]


def ml_detect_joint(y, h, c: Constellation):
    """Exhaustive search over all ``|X|^L`` symbol vectors. Only for small L."""
    best, best_x = np.inf, None
    for cand in itertools.product(c.points, repeat=len(y)):
        x = np.array(cand)
        d = np.sum(np.abs(np.asarray(y) - np.asarray(h) * x) ** 2)
        if d < best:
            best, best_x = d, x
    return best_x


@dataclass
class ReliabilityVector:
    regime: str
    hard_bits: np.ndarray
    values: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.hard_bits)

    def magnitudes(self) -> np.ndarray:
        """Reliability magnitudes; unit for the hard regime."""
        if self.values is None:
            return np.ones(len(self.hard_bits))
        return self.values

    def signed_llrs(self) -> np.ndarray:
        """Decoder input with positive values meaning bit 0."""
        return (1.0 - 2.0 * self.hard_bits) * self.magnitudes()

    def segment(self, start: int, stop: int) -> "ReliabilityVector":
        vals = None if self.values is None else self.values[start:stop]
        return ReliabilityVector(self.regime, self.hard_bits[start:stop], vals)


def build_reliability(regime: str, hard_bits, llrs=None, psi=None, q: int = 1) -> ReliabilityVector:
    """Package detection output for one regime.

    ``llrs`` are per-bit signed LLRs (soft), ``psi`` per-symbol reliabilities
    that get repeated over the ``q`` bits of each symbol.
    """
    hard_bits = np.asarray(hard_bits, dtype=np.uint8).ravel()
    if regime == "hard":
        return ReliabilityVector("hard", hard_bits, None)
    if regime == "psi":
        psi = np.asarray(psi, dtype=float).ravel()
        if len(psi) * q != len(hard_bits):
            raise ValueError("psi length times q must equal the number of bits")
        values = np.repeat(psi, q)
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ValueError("psi values must be finite and non-negative")
        return ReliabilityVector("psi", hard_bits, values)
    if regime == "soft":
        llrs = np.asarray(llrs, dtype=float).ravel()
        if len(llrs) != len(hard_bits):
            raise ValueError("llr and hard-bit lengths differ")
        if not np.all(np.isfinite(llrs)):
            raise ValueError("llrs must be finite")
        if np.any((llrs < 0) != hard_bits.astype(bool)):
            raise ValueError("hard bits disagree with LLR signs")
        return ReliabilityVector("soft", hard_bits, np.abs(llrs))
    raise ValueError(f"unknown regime {regime!r}; expected one of {REGIMES}")


def detect_frame(y, h, sigma2, c: Constellation, regime: str) -> ReliabilityVector:
    """ZF detection of a whole frame: equalize, slice, and attach reliabilities."""
    y_hat = zf_equalize(y, h)
    if regime == "soft":
        llrs = llr_zf(y_hat, effective_noise_variance_zf(h, sigma2), c)
        return build_reliability("soft", (llrs < 0).astype(np.uint8), llrs=llrs)
    _, bits = slice_hard(y_hat, c)
    if regime == "psi":
        return build_reliability("psi", bits, psi=psi_zf(h, sigma2), q=c.q)
    return build_reliability(regime, bits)
