"""Independent brute-force references. Nothing here imports the code under test's algorithms."""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import integrate


def kron_generator(n_bits):
    """Explicit F^{(x)n} with F = [[1, 0], [1, 1]]."""
    F = np.array([[1, 0], [1, 1]], dtype=np.int64)
    G = np.array([[1]], dtype=np.int64)
    while G.shape[0] < n_bits:
        G = np.kron(G, F)
    return G


def polar_encode_matrix(u):
    u = np.asarray(u, dtype=np.int64)
    return (u @ kron_generator(len(u))) % 2


def gf2_poly_mod(dividend: int, divisor: int) -> int:
    """Remainder of integer-coded GF(2) polynomials."""
    dl = divisor.bit_length()
    while dividend.bit_length() >= dl:
        dividend ^= divisor << (dividend.bit_length() - dl)
    return dividend


def crc_bits(message, poly: int):
    r = poly.bit_length() - 1
    m = int("".join(str(int(b)) for b in message), 2) if len(message) else 0
    rem = gf2_poly_mod(m << r, poly)
    return [int(c) for c in format(rem, f"0{r}b")]


def codebook(code_n, frozen_mask, info_positions, n_info, poly):
    """All codewords by enumerating information words through the explicit generator."""
    G = kron_generator(code_n)
    words = []
    for info in itertools.product((0, 1), repeat=n_info):
        payload = list(info) + (crc_bits(info, poly) if poly else [])
        u = np.zeros(code_n, dtype=np.int64)
        u[info_positions] = payload
        words.append((u @ G) % 2)
    return np.array(words, dtype=np.uint8)


def sc_maxlog_exhaustive(llr, frozen_mask):
    """SC decisions where each bit LLR is the exact max-log over all completions.

    Past bits are fixed to earlier decisions, future bits (frozen or not) are free.
    """
    llr = np.asarray(llr, dtype=float)
    N = len(llr)
    G = kron_generator(N)
    u_hat = []
    for i in range(N):
        if frozen_mask[i]:
            u_hat.append(0)
            continue
        best = {0: -np.inf, 1: -np.inf}
        for tail in itertools.product((0, 1), repeat=N - i - 1):
            for b in (0, 1):
                u = np.array(u_hat + [b] + list(tail))
                x = (u @ G) % 2
                score = np.sum((1 - 2 * x) * llr) / 2
                best[b] = max(best[b], score)
        u_hat.append(0 if best[0] - best[1] >= 0 else 1)
    return (np.array(u_hat) @ G) % 2


def quad_cdf_on_grid(pdf, grid):
    """CDF at increasing grid points by summing adaptive quadrature over consecutive intervals."""
    out = np.empty(len(grid))
    acc, prev = 0.0, 0.0
    for i, t in enumerate(grid):
        acc += integrate.quad(pdf, prev, t, limit=200)[0]
        out[i] = acc
        prev = t
    return out


def q_function(x):
    return 0.5 * math.erfc(x / math.sqrt(2))
