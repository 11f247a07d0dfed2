"""Frequency-selective THz channel realizations.

Each subcarrier gain factors into a deterministic path gain (spreading loss
plus molecular absorption) and a small-scale fading term::

    h_l = h^p_l * a_l * exp(j theta_l)

The fading amplitude ``a_l`` comes from an alpha-mu or mixture-gamma law
(i.i.d. over subcarriers), from a short random multipath response (correlated
over subcarriers), or is fixed to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import special, stats

from .errors import InvalidModelError, NoAnalyticPdfError

SPEED_OF_LIGHT = 299_792_458.0


def _positive(name, value):
    if not (np.isfinite(value) and value > 0):
        raise InvalidModelError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class AlphaMu:
    """alpha-mu amplitude fading; ``z_hat`` is the alpha-root mean value of the amplitude."""

    alpha: float
    mu: float
    z_hat: float = 1.0

    def __post_init__(self):
        _positive("alpha", self.alpha)
        _positive("mu", self.mu)
        _positive("z_hat", self.z_hat)


@dataclass(frozen=True)
class MixtureGamma:
    """Weighted sum of gamma densities, ``components`` as ``(w, beta, zeta)`` triples."""

    components: tuple

    def __post_init__(self):
        comps = tuple(tuple(float(v) for v in c) for c in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise InvalidModelError("mixture gamma needs at least one component")
        for i, c in enumerate(comps):
            if len(c) != 3:
                raise InvalidModelError(f"component {i} must be (w, beta, zeta)")
            w, beta, zeta = c
            if not (np.isfinite(w) and 0 < w <= 1):
                raise InvalidModelError(f"component {i} weight must lie in (0, 1], got {w!r}")
            _positive(f"component {i} beta", beta)
            _positive(f"component {i} zeta", zeta)
        total = sum(c[0] for c in comps)
        if abs(total - 1.0) > 1e-9:
            raise InvalidModelError(f"mixture weights sum to {total!r}, expected 1")

    @property
    def weights(self):
        return np.array([c[0] for c in self.components])

    @property
    def shapes(self):
        return np.array([c[1] for c in self.components])

    @property
    def rates(self):
        return np.array([c[2] for c in self.components])


@dataclass(frozen=True)
class SimplifiedMultipath:
    """Poisson number of NLoS taps plus an optional LoS tap.

    NLoS tap ``k`` (1-based) has amplitude ``10**(-per_path_decay_db*k/20)``
    relative to the LoS tap, a uniform phase and a delay uniform on
    ``[0, max_excess_delay_s)``.
    """

    mean_num_nlos_paths: float
    los_present: bool = True
    per_path_decay_db: float = 6.0
    max_excess_delay_s: float = 5e-9

    def __post_init__(self):
        _positive("mean_num_nlos_paths", self.mean_num_nlos_paths)
        if not np.isfinite(self.per_path_decay_db):
            raise InvalidModelError("per_path_decay_db must be finite")
        if not (np.isfinite(self.max_excess_delay_s) and self.max_excess_delay_s >= 0):
            raise InvalidModelError("max_excess_delay_s must be finite and >= 0")


@dataclass(frozen=True)
class Unfaded:
    pass


FadingModel = Union[AlphaMu, MixtureGamma, SimplifiedMultipath, Unfaded]


@dataclass(frozen=True)
class PathGainSpec:
    carrier_freq_hz: float
    bandwidth_hz: float
    num_subcarriers: int
    distance_m: float
    absorption_coeff_per_m: float = 0.0

    def __post_init__(self):
        if int(self.num_subcarriers) != self.num_subcarriers or self.num_subcarriers < 1:
            raise InvalidModelError("num_subcarriers must be a positive integer")
        if not (np.isfinite(self.distance_m) and self.distance_m > 0):
            raise InvalidModelError(f"distance must be > 0, got {self.distance_m!r}")
        if not (np.isfinite(self.bandwidth_hz) and self.bandwidth_hz >= 0):
            raise InvalidModelError("bandwidth must be finite and >= 0")
        if not (np.isfinite(self.absorption_coeff_per_m) and self.absorption_coeff_per_m >= 0):
            raise InvalidModelError("absorption coefficient must be finite and >= 0")
        if np.any(self.subcarrier_freqs() <= 0):
            raise InvalidModelError("all subcarrier frequencies must be positive")

    def subcarrier_freqs(self) -> np.ndarray:
        """Grid centred on the carrier: ``f_l = f_c + (l - (L+1)/2) B / L`` for l = 1..L."""
        L = int(self.num_subcarriers)
        l = np.arange(1, L + 1)
        return self.carrier_freq_hz + (l - (L + 1) / 2) * self.bandwidth_hz / L


@dataclass
class ChannelRealization:
    gains: np.ndarray
    path_gain: np.ndarray
    fading_amp: np.ndarray
    noise_variance: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.noise_variance > 0:
            raise InvalidModelError("noise variance must be > 0")

    @property
    def num_subcarriers(self) -> int:
        return len(self.gains)


def fading_pdf(model: FadingModel, t):
    """Amplitude density of an alpha-mu or mixture-gamma model, vectorised over ``t``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    if isinstance(model, AlphaMu):
        a, mu, z = model.alpha, model.mu, model.z_hat
        # log form avoids overflow in mu**mu and t**(a*mu - 1) for large shapes
        with np.errstate(divide="ignore", invalid="ignore"):
            log_f = (
                math.log(a) + mu * math.log(mu) + (a * mu - 1) * np.log(t)
                - a * mu * math.log(z) - special.gammaln(mu) - mu * (t / z) ** a
            )
        out = np.exp(log_f)
        if a * mu == 1:
            out = np.where(t == 0, a * mu**mu / (z ** (a * mu) * special.gamma(mu)), out)
        return out
    if isinstance(model, MixtureGamma):
        out = np.zeros_like(t)
        for w, beta, zeta in model.components:
            coef = w * zeta**beta / special.gamma(beta)
            if beta == 1:
                term = coef * np.exp(-zeta * t)
            else:
                term = coef * np.power(t, beta - 1) * np.exp(-zeta * t)
            out = out + term
        return out
    raise NoAnalyticPdfError(f"no analytic PDF for {type(model).__name__}")


def fading_cdf(model: FadingModel, t):
    """Closed-form CDF (regularized incomplete gamma) for the analytic models."""
    t = np.asarray(t, dtype=float)
    if isinstance(model, AlphaMu):
        return special.gammainc(model.mu, model.mu * (t / model.z_hat) ** model.alpha)
    if isinstance(model, MixtureGamma):
        return sum(w * special.gammainc(beta, zeta * t) for w, beta, zeta in model.components)
    raise NoAnalyticPdfError(f"no analytic CDF for {type(model).__name__}")


def sample_fading_amplitude(model: FadingModel, rng: np.random.Generator, size=None):
    """Draw fading amplitudes. ``size=None`` returns a scalar float."""
    if isinstance(model, Unfaded):
        return 1.0 if size is None else np.ones(size)
    if isinstance(model, AlphaMu):
        # mu * (Z / z_hat)**alpha ~ Gamma(mu, 1)
        g = rng.gamma(model.mu, 1.0, size=size)
        return model.z_hat * (g / model.mu) ** (1.0 / model.alpha)
    if isinstance(model, MixtureGamma):
        w = model.weights
        idx = rng.choice(len(w), size=size, p=w / w.sum())
        g = rng.standard_gamma(model.shapes[idx], size=size)
        return g / model.rates[idx]
    if isinstance(model, SimplifiedMultipath):
        raise NoAnalyticPdfError("multipath amplitudes are produced per subcarrier by realize_channel")
    raise InvalidModelError(f"unknown fading model {model!r}")


def mean_power_gain(model: FadingModel) -> float:
    """E[a^2] of the fading amplitude; used to calibrate SNR."""
    if isinstance(model, Unfaded):
        return 1.0
    if isinstance(model, AlphaMu):
        a, mu = model.alpha, model.mu
        return float(model.z_hat**2 * special.gamma(mu + 2 / a) / (mu ** (2 / a) * special.gamma(mu)))
    if isinstance(model, MixtureGamma):
        return float(sum(w * beta * (beta + 1) / zeta**2 for w, beta, zeta in model.components))
    if isinstance(model, SimplifiedMultipath):
        # E|sum of taps|^2 with independent uniform phases = sum of tap powers
        lam = model.mean_num_nlos_paths
        kmax = int(lam + 20 * math.sqrt(lam) + 50)
        k = np.arange(1, kmax + 1)
        nlos = np.sum(stats.poisson.sf(k - 1, lam) * 10 ** (-model.per_path_decay_db * k / 10))
        return float(model.los_present) + float(nlos)
    raise InvalidModelError(f"unknown fading model {model!r}")


def path_gain(spec: PathGainSpec, l=None):
    """Amplitude path gain ``c/(4 pi f_l d) * exp(-kappa d / 2)``.

    ``l`` is a 1-based subcarrier index; ``None`` returns the whole band.
    """
    freqs = spec.subcarrier_freqs()
    if l is not None:
        if not 1 <= l <= spec.num_subcarriers:
            raise InvalidModelError(f"subcarrier index {l} outside 1..{spec.num_subcarriers}")
        freqs = freqs[l - 1]
    d = spec.distance_m
    return SPEED_OF_LIGHT / (4 * np.pi * freqs * d) * np.exp(-spec.absorption_coeff_per_m * d / 2)


def _multipath_response(model: SimplifiedMultipath, freqs, rng):
    n_nlos = rng.poisson(model.mean_num_nlos_paths)
    amps = [1.0] if model.los_present else []
    delays = [0.0] if model.los_present else []
    k = np.arange(1, n_nlos + 1)
    amps = np.concatenate([amps, 10 ** (-model.per_path_decay_db * k / 20)])
    delays = np.concatenate([delays, rng.uniform(0.0, model.max_excess_delay_s, size=n_nlos)])
    phases = rng.uniform(0.0, 2 * np.pi, size=len(amps))
    taps = amps * np.exp(1j * phases)
    # baseband response, frequencies measured from the first subcarrier
    f_rel = freqs - freqs[0]
    response = np.exp(-2j * np.pi * np.outer(f_rel, delays)) @ taps if len(taps) else np.zeros(len(freqs), complex)
    return response, int(n_nlos)


def realize_channel(
    spec: PathGainSpec, model: FadingModel, noise_variance: float, rng: np.random.Generator
) -> ChannelRealization:
    if not noise_variance > 0:
        raise InvalidModelError("noise variance must be > 0")
    L = spec.num_subcarriers
    hp = np.asarray(path_gain(spec), dtype=float)
    meta = {}
    if isinstance(model, SimplifiedMultipath):
        response, n_nlos = _multipath_response(model, spec.subcarrier_freqs(), rng)
        amp = np.abs(response)
        gains = hp * response
        meta["num_nlos_paths"] = n_nlos
    else:
        amp = np.asarray(sample_fading_amplitude(model, rng, size=L), dtype=float)
        # unfaded is the plain AWGN reference: no phase rotation either
        theta = np.zeros(L) if isinstance(model, Unfaded) else rng.uniform(0.0, 2 * np.pi, size=L)
        gains = hp * amp * np.exp(1j * theta)
    return ChannelRealization(gains=gains, path_gain=hp, fading_amp=amp, noise_variance=float(noise_variance), meta=meta)
