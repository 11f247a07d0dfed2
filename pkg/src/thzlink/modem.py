"""Gray-labelled BPSK / QPSK constellations with unit average energy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FramingError


@dataclass(frozen=True, eq=False)
class Constellation:
    name: str
    points: np.ndarray  # complex, indexed by the integer value of the label (MSB first)
    labels: np.ndarray  # (M, q) uint8

    @property
    def q(self) -> int:
        return self.labels.shape[1]

    @property
    def size(self) -> int:
        return len(self.points)

    def bit_masks(self):
        """Boolean ``(q, M)`` table: ``masks[j, m]`` is True when point m has bit j set."""
        return self.labels.T.astype(bool)


def bpsk() -> Constellation:
    # bit 0 -> +1, bit 1 -> -1
    return Constellation("bpsk", np.array([1.0 + 0j, -1.0 + 0j]), np.array([[0], [1]], dtype=np.uint8))


def qpsk() -> Constellation:
    labels = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=np.uint8)
    pts = ((1 - 2.0 * labels[:, 0]) + 1j * (1 - 2.0 * labels[:, 1])) / np.sqrt(2)
    return Constellation("qpsk", pts, labels)


_BUILDERS = {"bpsk": bpsk, "qpsk": qpsk}


def constellation(name: str) -> Constellation:
    try:
        return _BUILDERS[name.lower()]()
    except KeyError:
        raise ValueError(f"unknown modulation {name!r}; expected one of {sorted(_BUILDERS)}") from None


def map_bits(bits, c: Constellation) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64)
    if bits.ndim != 1 or len(bits) % c.q:
        raise FramingError(f"{len(bits)} bits cannot be split into {c.q}-bit symbols")
    groups = bits.reshape(-1, c.q)
    index = groups @ (1 << np.arange(c.q - 1, -1, -1))
    return c.points[index]


def slice_hard(y_hat, c: Constellation):
    """Nearest-point decision; works on a scalar or an array of symbols.

    Ties go to the lowest point index (``argmin`` returns the first minimum).
    Returns ``(points, bits)`` where ``bits`` has shape ``(..., q)``.
    """
    y_hat = np.asarray(y_hat)
    d = np.abs(y_hat[..., None] - c.points) ** 2
    idx = np.argmin(d, axis=-1)
    return c.points[idx], c.labels[idx]
