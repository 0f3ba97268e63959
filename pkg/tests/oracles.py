"""Independent reference implementations used by the tests.

Nothing here calls into the package's numerical routines; each oracle is a
separate derivation (finite differences, quadrature, brute-force formulas,
dense convolution) of a quantity the package computes another way.
"""

import math

import numpy as np
from scipy import integrate, linalg, signal

G = 9.81


def tether_force(L, span, breaking_load=490e3, elongation=0.03):
    """Piecewise spring law written directly from its definition."""
    if span <= L:
        return 0.0
    strain = (span - L) / L
    return breaking_load * strain / elongation


def spherical_position(theta, phi, r):
    return np.array([r * math.cos(theta) * math.cos(phi),
                     r * math.cos(theta) * math.sin(phi),
                     r * math.sin(theta)])


def unit_vectors(theta, phi):
    """Unit vectors from partial derivatives of the position (not the package basis)."""
    h = 1e-7
    p = lambda a, b: spherical_position(a, b, 1.0)  # noqa: E731
    e_r = p(theta, phi)
    d_theta = (p(theta + h, phi) - p(theta - h, phi)) / (2 * h)
    d_phi = (p(theta, phi + h) - p(theta, phi - h)) / (2 * h)
    # package convention: e_theta points towards decreasing elevation
    return -d_theta / np.linalg.norm(d_theta), d_phi / np.linalg.norm(d_phi), e_r


def fd_acceleration(q, qd, qdd, h=1e-3):
    """d2p/dt2 along q(t) = q + qd t + qdd t^2/2 by a 5-point stencil."""
    def pos(t):
        qq = np.asarray(q) + np.asarray(qd) * t + 0.5 * np.asarray(qdd) * t * t
        return spherical_position(*qq)
    return (-pos(2 * h) + 16 * pos(h) - 30 * pos(0) + 16 * pos(-h) - pos(-2 * h)) / (12 * h * h)


def jonswap_density(f, hs, te, gamma_j):
    """JONSWAP written in angular-frequency textbook form, then normalized by quad."""
    wp = 2 * math.pi / te

    def raw(fr):
        w = 2 * math.pi * fr
        if w <= 0:
            return 0.0
        s = 0.07 if w <= wp else 0.09
        r = math.exp(-((w - wp) ** 2) / (2 * s * s * wp * wp))
        return 2 * math.pi * w ** -5 * math.exp(-1.25 * (wp / w) ** 4) * gamma_j ** r

    fp = 1.0 / te
    total = sum(integrate.quad(raw, a, b, limit=400)[0]
                for a, b in [(1e-9, 0.8 * fp), (0.8 * fp, fp), (fp, 1.2 * fp),
                             (1.2 * fp, 5 * fp), (5 * fp, 200 * fp)])
    m0 = (hs / 4) ** 2
    return np.array([raw(x) for x in np.atleast_1d(f)]) * m0 / total


def kernel_expm(A, B, C, t):
    """Impulse response C expm(A t) B via scipy's matrix exponential.

    Uniform grids reuse one step propagator.
    """
    t = np.asarray(t, dtype=float)
    steps = np.diff(t)
    if len(t) > 2 and np.allclose(steps, steps[0]):
        step = linalg.expm(A * steps[0])
        e = linalg.expm(A * t[0])
        out = np.empty((len(t), C.shape[0], B.shape[1]))
        for i in range(len(t)):
            out[i] = C @ e @ B
            e = step @ e
        return out
    return np.array([C @ linalg.expm(A * tk) @ B for tk in t])


def trapezoid_convolution(kernel, v, dt):
    """mu(t_n) = integral_0^t_n K(t_n - s) v(s) ds with the trapezoidal rule.

    ``kernel`` is (n, 6, 6) on the same grid as ``v`` (n, 6).  Channels are
    convolved with FFTs; the endpoint halves are removed explicitly.
    """
    n = len(v)
    out = np.zeros((n, 6))
    for a in range(6):
        for b in range(6):
            k = kernel[:, a, b]
            if not np.any(k):
                continue
            full = signal.fftconvolve(k, v[:, b])[:n]
            out[:, a] += dt * (full - 0.5 * k[0] * v[:, b] - 0.5 * k * v[0, b])
    out[0] = 0.0
    return out


def single_dof_resonance(m, c, k):
    """Peak of |1 / (k - m w^2 + i c w)| in Hz (displacement response)."""
    wn2 = k / m
    z2 = c * c / (2 * m * m)
    return math.sqrt(max(wn2 - z2, 0.0)) / (2 * math.pi)


def rk4_scalar_exp(x0, dt, steps):
    """Closed-form RK4 amplification for x' = -x."""
    g = 1 - dt + dt ** 2 / 2 - dt ** 3 / 6 + dt ** 4 / 24
    return x0 * g ** steps
