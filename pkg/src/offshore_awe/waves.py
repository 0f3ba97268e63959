"""JONSWAP sea states and random-amplitude synthesis of excitation loads."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import AliasError

G = 9.81
_CHUNK = 4096


def _shape(x, gamma_j):
    """Unnormalized JONSWAP shape in the reduced frequency x = f / f_p."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    xp = x[pos]
    sigma = np.where(xp <= 1.0, 0.07, 0.09)
    peak = np.exp(-((xp - 1.0) ** 2) / (2.0 * sigma ** 2))
    out[pos] = xp ** -5 * np.exp(-1.25 * xp ** -4) * gamma_j ** peak
    return out


@lru_cache(maxsize=64)
def _shape_integral(gamma_j):
    f = lambda x: float(_shape(np.array([x]), gamma_j)[0])  # noqa: E731
    parts = [(0.0, 0.9), (0.9, 1.0), (1.0, 1.1), (1.1, 3.0), (3.0, np.inf)]
    return sum(integrate.quad(f, a, b, limit=200)[0] for a, b in parts)


def jonswap_psd(f, hs, te, gamma_j=3.3):
    """One-sided JONSWAP density in m^2/Hz, scaled so that 4 sqrt(m0) = hs.

    ``te`` is the peak period.
    """
    fp = 1.0 / te
    x = np.asarray(f, dtype=float) / fp
    m0 = (hs / 4.0) ** 2
    return m0 * _shape(x, gamma_j) / (fp * _shape_integral(gamma_j))


@dataclass(frozen=True, eq=False)
class WaveScenario:
    hs: float
    te: float
    gamma_j: float = 3.1
    seed: int = 0
    f_min: float = 0.02
    f_max: float = 0.5
    n_bins: int = 240
    exc_coeffs: np.ndarray | None = None

    def __post_init__(self):
        problems = []
        if self.hs < 0:
            problems.append("hs must be >= 0")
        if self.te <= 0:
            problems.append("te must be > 0")
        if self.gamma_j < 1:
            problems.append("gamma_j must be >= 1")
        if not self.f_min < self.f_max:
            problems.append("f_min must be < f_max")
        if self.n_bins < 2:
            problems.append("n_bins must be >= 2")
        if problems:
            raise ValueError("; ".join(problems))
        if self.exc_coeffs is not None:
            c = np.asarray(self.exc_coeffs, dtype=complex)
            if c.shape != (self.n_bins, 6):
                raise ValueError(f"exc_coeffs must have shape ({self.n_bins}, 6)")
            object.__setattr__(self, "exc_coeffs", c)

    @property
    def df(self):
        return (self.f_max - self.f_min) / self.n_bins

    def frequencies(self):
        """Bin centres."""
        return self.f_min + (np.arange(self.n_bins) + 0.5) * self.df

    def psd(self):
        return jonswap_psd(self.frequencies(), self.hs, self.te, self.gamma_j)


@dataclass
class ExcitationSeries:
    dt: float
    samples: np.ndarray     # (n, 6)
    elevation: np.ndarray   # (n,)

    @property
    def times(self):
        return np.arange(len(self.elevation)) * self.dt

    def at(self, t):
        """Linear interpolation of the 6-DOF load; held constant past the end."""
        x = t / self.dt
        i = int(x)
        n = len(self.samples)
        if i >= n - 1:
            return self.samples[-1]
        w = x - i
        return (1.0 - w) * self.samples[i] + w * self.samples[i + 1]


def draw_components(scenario):
    """Complex amplitudes of the random-amplitude scheme.

    Real and imaginary parts are independent N(0, S df); the elevation
    ``sum Re[a_k exp(i w_k t)]`` then has variance ``m0``.
    """
    s = scenario.psd()
    rng = np.random.default_rng(scenario.seed)
    z = rng.standard_normal((scenario.n_bins, 2))
    scale = np.sqrt(s * scenario.df)
    return scale * (z[:, 0] + 1j * z[:, 1])


def synthesize(scenario, duration, dt, coeffs=None):
    """Free-surface elevation at the origin and the 6-DOF excitation load.

    ``coeffs`` overrides ``scenario.exc_coeffs``; if both are missing only the
    elevation is non-zero.
    """
    if dt >= 1.0 / (2.0 * scenario.f_max):
        raise AliasError(f"dt={dt} s too coarse for f_max={scenario.f_max} Hz")
    if duration < 10.0 * scenario.te:
        raise ValueError(f"duration must be at least 10 * te = {10 * scenario.te} s")
    coeffs = scenario.exc_coeffs if coeffs is None else np.asarray(coeffs, complex)
    n = int(round(duration / dt))
    a = draw_components(scenario)
    w = 2.0 * np.pi * scenario.frequencies()
    force_amp = np.zeros((scenario.n_bins, 6), dtype=complex) if coeffs is None \
        else coeffs * a[:, None]
    elevation = np.empty(n)
    samples = np.empty((n, 6))
    for start in range(0, n, _CHUNK):
        t = np.arange(start, min(start + _CHUNK, n)) * dt
        phase = np.exp(1j * np.outer(t, w))
        elevation[start:start + len(t)] = (phase @ a).real
        samples[start:start + len(t)] = (phase @ force_amp).real
    return ExcitationSeries(dt, samples, elevation)


def significant_height(elevation):
    """4 sqrt(variance) of an elevation record."""
    return 4.0 * math.sqrt(float(np.var(elevation)))
