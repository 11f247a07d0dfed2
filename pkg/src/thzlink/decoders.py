"""Polar-code decoders: SC, CRC-aided SCL, GRAND and ORBGRAND.

All decoders take a :class:`~thzlink.detect.ReliabilityVector`. SC and SCL
consume signed pseudo-LLRs (hard bits get unit magnitude, PSI bits get the
reliability of their symbol). The GRAND family uses the hard bits for the
initial guess and the magnitudes only to rank bits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .detect import ReliabilityVector
from .polar import PolarCode, polar_transform

DECODED = "Decoded"
ABANDONED = "AbandonedAtBudget"
CRC_FAIL = "CrcFailAllPaths"

HAMMING = "HammingWeight"
LOGISTIC = "LogisticWeight"

DEFAULT_BUDGET = 2**16
DECODER_KINDS = ("sc", "scl", "grand", "orbgrand", "uncoded")


@dataclass
class DecodeOutcome:
    info_bits: np.ndarray
    codeword: np.ndarray
    queries: int = 0
    list_rank: int = 0
    status: str = DECODED


@dataclass(frozen=True)
class DecoderConfig:
    kind: str = "orbgrand"
    list_size: int = 16
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.kind not in DECODER_KINDS:
            raise ValueError(f"unknown decoder {self.kind!r}; expected one of {DECODER_KINDS}")
        if self.list_size < 1:
            raise ValueError("list_size must be >= 1")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")


def _outcome(x, code: PolarCode, **kw) -> DecodeOutcome:
    x = np.asarray(x, dtype=np.uint8)
    return DecodeOutcome(info_bits=code.info_of(x), codeword=x, **kw)


def _minsum(a, b):
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


# --- successive cancellation -------------------------------------------------


def _sc(llr, frozen):
    n = len(llr)
    if frozen.all():
        return np.zeros(n, dtype=np.uint8)
    if n == 1:
        return np.array([0 if llr[0] >= 0 else 1], dtype=np.uint8)
    h = n // 2
    a, b = llr[:h], llr[h:]
    xl = _sc(_minsum(a, b), frozen[:h])
    xr = _sc(b + (1.0 - 2.0 * xl) * a, frozen[h:])
    return np.concatenate([xl ^ xr, xr])


def sc_decode(rel: ReliabilityVector, code: PolarCode) -> DecodeOutcome:
    """Min-sum successive cancellation. Status reports whether the CRC holds."""
    llr = rel.signed_llrs().astype(float)
    if len(llr) != code.n_bits:
        raise ValueError("reliability length does not match the code")
    x = _sc(llr, code.frozen_mask)
    ok = not np.any(code.syndrome(x))
    return _outcome(x, code, status=DECODED if ok else CRC_FAIL)


# --- successive cancellation list ------------------------------------------


class _ListState:
    def __init__(self, list_size):
        self.list_size = list_size
        self.pm = np.zeros(1)

    def leaf(self, llr, frozen):
        # llr: (P,) ; penalty |llr| for deciding against the sign
        if frozen:
            self.pm = self.pm + np.where(llr < 0, -llr, 0.0)
            return np.zeros((len(llr), 1), dtype=np.uint8), np.arange(len(llr))
        P = len(llr)
        pen0 = np.where(llr < 0, -llr, 0.0)
        pen1 = np.where(llr >= 0, llr, 0.0)
        cand = np.concatenate([self.pm + pen0, self.pm + pen1])
        keep = np.argsort(cand, kind="stable")[: min(2 * P, self.list_size)]
        self.pm = cand[keep]
        return (keep // P).astype(np.uint8)[:, None], keep % P

    def walk(self, llr, frozen):
        P, n = llr.shape
        if n == 1:
            return self.leaf(llr[:, 0], bool(frozen[0]))
        h = n // 2
        a, b = llr[:, :h], llr[:, h:]
        xl, p1 = self.walk(_minsum(a, b), frozen[:h])
        a, b = a[p1], b[p1]
        xr, p2 = self.walk(b + (1.0 - 2.0 * xl) * a, frozen[h:])
        return np.concatenate([xl[p2] ^ xr, xr], axis=1), p1[p2]


def scl_decode(rel: ReliabilityVector, code: PolarCode, list_size: int = 16) -> DecodeOutcome:
    """CRC-aided SCL with the hardware-style approximate path metric.

    The returned path is the lowest-metric survivor that passes the CRC; when
    none does, the lowest-metric survivor is returned with ``CrcFailAllPaths``.
    """
    if list_size < 1:
        raise ValueError("list_size must be >= 1")
    llr = rel.signed_llrs().astype(float)
    if len(llr) != code.n_bits:
        raise ValueError("reliability length does not match the code")
    state = _ListState(list_size)
    paths, _ = state.walk(llr[None, :], code.frozen_mask)
    order = np.argsort(state.pm, kind="stable")
    syn = code.syndrome(paths[order])
    ok = np.flatnonzero(~np.any(syn, axis=1))
    if len(ok):
        rank = int(ok[0])
        return _outcome(paths[order[rank]], code, list_rank=rank, status=DECODED)
    return _outcome(paths[order[0]], code, list_rank=0, status=CRC_FAIL)


# --- GRAND -------------------------------------------------------------------


def _distinct_parts(total, m, lo, hi):
    """Ascending m-tuples of distinct integers in [lo, hi] summing to ``total``, lexicographic."""
    if m == 0:
        if total == 0:
            yield ()
        return
    for a in range(lo, hi + 1):
        rest = total - a
        k = m - 1
        if rest < k * (a + 1) + k * (k - 1) // 2:
            break
        if rest > k * hi - k * (k - 1) // 2:
            continue
        for tail in _distinct_parts(rest, k, a + 1, hi):
            yield (a,) + tail


def rank_sets(n: int, order: str):
    """All subsets of ranks 1..n in query order.

    Hamming order sorts by size then lexicographically. Logistic order sorts
    by rank sum, then size, then lexicographically.
    """
    if order == HAMMING:
        for w in range(n + 1):
            yield from itertools.combinations(range(1, n + 1), w)
    elif order == LOGISTIC:
        yield ()
        for w in range(1, n * (n + 1) // 2 + 1):
            m = 1
            while m * (m + 1) // 2 <= w and m <= n:
                yield from _distinct_parts(w, m, 1, n)
                m += 1
    else:
        raise ValueError(f"unknown pattern order {order!r}")


@lru_cache(maxsize=32)
def pattern_table(n: int, order: str, budget: int) -> np.ndarray:
    """First ``budget`` rank sets as a 0-based array padded with ``n``."""
    sets = list(itertools.islice(rank_sets(n, order), budget))
    width = max(1, max(len(s) for s in sets))
    table = np.full((len(sets), width), n, dtype=np.int32)
    for i, s in enumerate(sets):
        if s:
            table[i, : len(s)] = np.array(s) - 1
    table.setflags(write=False)
    return table


@dataclass
class PatternGenerator:
    order: str
    rank_permutation: np.ndarray
    budget: int

    def rank_sets(self):
        return itertools.islice(rank_sets(len(self.rank_permutation), self.order), self.budget)

    def __iter__(self):
        """Bit-index patterns (tuples of positions to flip)."""
        perm = self.rank_permutation
        for s in self.rank_sets():
            yield tuple(int(perm[r - 1]) for r in s)

    def table(self) -> np.ndarray:
        return pattern_table(len(self.rank_permutation), self.order, self.budget)


def make_pattern_generator(rel: ReliabilityVector, order: str, budget: int = DEFAULT_BUDGET) -> PatternGenerator:
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if order not in (HAMMING, LOGISTIC):
        raise ValueError(f"unknown pattern order {order!r}")
    perm = np.argsort(rel.magnitudes(), kind="stable")
    return PatternGenerator(order, perm, int(budget))


_CHUNKS = (64, 1024, 8192)


def grand_decode(rel: ReliabilityVector, code: PolarCode, order: str = LOGISTIC, budget: int = DEFAULT_BUDGET) -> DecodeOutcome:
    """Guess noise patterns in generator order until the word is in the codebook.

    Hard-regime input carries no ranking, so it always uses Hamming order.
    """
    c_hat = np.asarray(rel.hard_bits, dtype=np.uint8)
    if len(c_hat) != code.n_bits:
        raise ValueError("reliability length does not match the code")
    if rel.regime == "hard":
        order = HAMMING
    gen = make_pattern_generator(rel, order, budget)
    s0 = code.syndrome(c_hat)
    if not np.any(s0):
        return _outcome(c_hat, code, queries=1)
    table = gen.table()
    cols = np.concatenate([code.packed_columns[gen.rank_permutation], np.zeros((1, s0.shape[-1]), np.uint64)])
    start = 1
    chunks = iter(_CHUNKS)
    while start < len(table):
        stop = min(len(table), start + next(chunks, len(table)))
        syn = np.bitwise_xor.reduce(cols[table[start:stop]], axis=1)
        hit = np.flatnonzero(np.all(syn == s0, axis=1))
        if len(hit):
            idx = start + int(hit[0])
            ranks = table[idx][table[idx] < code.n_bits]
            x = c_hat.copy()
            x[gen.rank_permutation[ranks]] ^= 1
            return _outcome(x, code, queries=idx + 1)
        start = stop
    return _outcome(c_hat, code, queries=len(table), status=ABANDONED)


def decode(rel: ReliabilityVector, code: PolarCode, cfg: DecoderConfig) -> DecodeOutcome:
    if cfg.kind == "sc":
        return sc_decode(rel, code)
    if cfg.kind == "scl":
        return scl_decode(rel, code, cfg.list_size)
    if cfg.kind == "grand":
        return grand_decode(rel, code, HAMMING, cfg.budget)
    if cfg.kind == "orbgrand":
        return grand_decode(rel, code, LOGISTIC, cfg.budget)
    # uncoded: the detected bits are the payload
    bits = np.asarray(rel.hard_bits, dtype=np.uint8)
    return DecodeOutcome(info_bits=bits, codeword=bits)
