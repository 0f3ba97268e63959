"""Linear 6-DOF platform model with state-space radiation memory.

DOF order throughout: surge, sway, heave, roll, pitch, yaw.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import linalg

from .errors import EmptyResult, SingularMassMatrix

DOF_NAMES = ("surge", "sway", "heave", "roll", "pitch", "yaw")


def _mat(a, shape=None):
    a = np.array(a, dtype=float)
    if shape is not None and a.shape != shape:
        raise ValueError(f"expected shape {shape}, got {a.shape}")
    return a


@dataclass(frozen=True, eq=False)
class HydroMatrices:
    mass: np.ndarray
    added_mass_inf: np.ndarray
    hydrostatic: np.ndarray
    mooring_mass: np.ndarray
    mooring_damping: np.ndarray
    mooring_stiffness: np.ndarray

    def __post_init__(self):
        for name in ("mass", "added_mass_inf", "hydrostatic", "mooring_mass",
                     "mooring_damping", "mooring_stiffness"):
            object.__setattr__(self, name, _mat(getattr(self, name), (6, 6)))

    @property
    def total_mass(self):
        return self.mass + self.added_mass_inf + self.mooring_mass

    @property
    def total_stiffness(self):
        return self.hydrostatic + self.mooring_stiffness

    def problems(self):
        """Every violated invariant, as human-readable strings."""
        out = []
        try:
            np.linalg.cholesky(0.5 * (self.mass + self.mass.T))
        except np.linalg.LinAlgError:
            out.append("rigid-body mass matrix M is not positive definite")
        m = self.total_mass
        if not np.allclose(m, m.T, rtol=1e-9, atol=1e-9 * np.abs(m).max()):
            out.append("total mass matrix M + Minf + Mm is not symmetric")
        try:
            np.linalg.cholesky(0.5 * (m + m.T))
        except np.linalg.LinAlgError:
            out.append("total mass matrix M + Minf + Mm is not positive definite")
        k = self.total_stiffness
        ev = np.linalg.eigvalsh(0.5 * (k + k.T))
        if ev.min() < -1e-9 * max(1.0, abs(ev).max()):
            out.append("total stiffness matrix Kh + Km is not positive semidefinite")
        return out

    @cached_property
    def mass_inverse(self):
        """Inverse of the total inertia, from a Cholesky factorization."""
        try:
            factor = linalg.cho_factor(self.total_mass)
        except linalg.LinAlgError as exc:
            raise SingularMassMatrix(str(exc)) from exc
        return linalg.cho_solve(factor, np.eye(6))


@dataclass(eq=False)
class RadiationStateSpace:
    """Realization ``z' = A z + B v``, ``mu = C z + D v`` of the memory kernel."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray = None
    state: np.ndarray = None

    def __post_init__(self):
        self.A = _mat(self.A)
        n = self.A.shape[0]
        if self.A.shape != (n, n):
            raise ValueError("A must be square")
        self.B = _mat(self.B, (n, 6))
        self.C = _mat(self.C, (6, n))
        self.D = np.zeros((6, 6)) if self.D is None else _mat(self.D, (6, 6))
        self.state = np.zeros(n) if self.state is None else _mat(self.state, (n,))

    @property
    def order(self):
        return self.A.shape[0]

    @classmethod
    def empty(cls):
        return cls(np.zeros((0, 0)), np.zeros((0, 6)), np.zeros((6, 0)))

    def is_stable(self):
        if self.order == 0:
            return True
        return bool(np.all(np.linalg.eigvals(self.A).real < 0))

    def impulse_response(self, t):
        """Kernel ``C exp(A t) B`` sampled at times ``t`` -> (len(t), 6, 6)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.order == 0:
            return np.zeros((len(t), 6, 6))
        w, v = np.linalg.eig(self.A)
        vinv_b = np.linalg.solve(v, self.B)
        cv = self.C @ v
        out = np.einsum("ik,tk,kj->tij", cv, np.exp(np.outer(t, w)), vinv_b)
        return out.real

    def transfer(self, s):
        """Radiation impedance ``C (sI - A)^-1 B + D`` at complex ``s``."""
        if self.order == 0:
            return self.D.astype(complex)
        n = self.order
        return self.C @ np.linalg.solve(s * np.eye(n) - self.A, self.B) + self.D

    def dc_gain(self):
        """Integral of the kernel over [0, inf)."""
        if self.order == 0:
            return np.zeros((6, 6))
        return -self.C @ np.linalg.solve(self.A, self.B)


@dataclass
class PlatformState:
    nu: np.ndarray = field(default_factory=lambda: np.zeros(6))
    nu_dot: np.ndarray = field(default_factory=lambda: np.zeros(6))
    radiation_state: np.ndarray = field(default_factory=lambda: np.zeros(0))


def radiation_force(ss, nu_dot, z=None):
    """Memory force ``-mu`` and the radiation state derivative."""
    z = ss.state if z is None else z
    nu_dot = np.asarray(nu_dot, dtype=float)
    mu = ss.C @ z + ss.D @ nu_dot
    return -mu, ss.A @ z + ss.B @ nu_dot


def platform_acceleration(h, ps, radiation_mu, f_exc, f_tether):
    """Platform acceleration from the Cummins balance.

    ``radiation_mu`` is the memory term ``mu`` itself (enters with a minus
    sign); added mass and mooring inertia sit on the left-hand side.
    """
    rhs = (-(h.total_stiffness @ ps.nu) - radiation_mu
           - h.mooring_damping @ ps.nu_dot + f_exc + f_tether)
    return h.mass_inverse @ rhs


@dataclass
class FrequencyResponse:
    freqs: np.ndarray
    H: np.ndarray               # (n_freq, 6, 6) complex, displacement / load
    failed: np.ndarray          # bool per frequency

    def magnitude_db(self, i, j):
        return 20.0 * np.log10(np.abs(self.H[:, i, j]))

    def diagonal_magnitudes(self):
        return np.abs(np.einsum("fii->fi", self.H))

    def at_exit_point(self, p_ok):
        """Frequency response from a force applied at ``p_ok`` -> (n, 6, 3)."""
        p = np.asarray(p_ok, dtype=float)
        skew = np.array([[0, -p[2], p[1]], [p[2], 0, -p[0]], [-p[1], p[0], 0]])
        T = np.vstack([np.eye(3), skew])
        return self.H @ T


def frequency_response(h, ss, freq_grid):
    freqs = np.asarray(freq_grid, dtype=float)
    if freqs.ndim != 1 or np.any(freqs <= 0) or np.any(np.diff(freqs) <= 0):
        raise ValueError("frequency grid must be strictly positive and increasing")
    m, k, b = h.total_mass, h.total_stiffness, h.mooring_damping
    H = np.full((len(freqs), 6, 6), np.nan, dtype=complex)
    failed = np.zeros(len(freqs), dtype=bool)
    for n, f in enumerate(freqs):
        w = 2.0 * np.pi * f
        z = -w * w * m + 1j * w * (b + ss.transfer(1j * w)) + k
        try:
            H[n] = np.linalg.solve(z, np.eye(6))
        except np.linalg.LinAlgError:
            failed[n] = True
    return FrequencyResponse(freqs, H, failed)


@dataclass(frozen=True)
class Resonance:
    dof: int
    freq: float
    gain: float

    @property
    def dof_name(self):
        return DOF_NAMES[self.dof]


def _refine_peak(f, y, i):
    """Vertex of the parabola through three neighbouring samples."""
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom >= 0:
        return f[i], y1
    p = 0.5 * (y0 - y2) / denom
    step = f[i + 1] - f[i] if p > 0 else f[i] - f[i - 1]
    return f[i] + p * step, y1 - 0.25 * (y0 - y2) * p


def find_resonances(frf_magnitudes, freq_grid, dofs=None, rel_prominence=1e-3):
    """Local maxima of the diagonal gains, strongest first.

    ``frf_magnitudes`` is either a :class:`FrequencyResponse` or an
    ``(n_freq, n_dof)`` array of |H_ii|.
    """
    if isinstance(frf_magnitudes, FrequencyResponse):
        mags = frf_magnitudes.diagonal_magnitudes()
    else:
        mags = np.asarray(frf_magnitudes, dtype=float)
        if mags.ndim == 1:
            mags = mags[:, None]
    f = np.asarray(freq_grid, dtype=float)
    if len(f) < 3:
        raise ValueError("need at least 3 grid points")
    dofs = range(mags.shape[1]) if dofs is None else dofs
    found = []
    for d in dofs:
        y = mags[:, d]
        if not np.all(np.isfinite(y)) or y.max() <= 0:
            continue
        for i in range(1, len(f) - 1):
            if y[i] > y[i - 1] and y[i] >= y[i + 1]:
                lo = min(y[: i].min(), y[i + 1:].min())
                if y[i] - lo < rel_prominence * y[i]:
                    continue
                fr, g = _refine_peak(f, y, i)
                found.append(Resonance(int(d), float(fr), float(g)))
    if not found:
        raise EmptyResult("frequency response is monotone; no resonance found")
    return sorted(found, key=lambda r: r.gain, reverse=True)
