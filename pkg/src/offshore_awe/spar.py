"""Synthetic spar buoy standing in for the unpublished BEM/mooring data set.

Geometry: 10 m diameter, 10 m tall cylinder, 1 m freeboard, centre of gravity
7 m below the deck, 760 t. Hydrostatics and long-wave added mass follow
from the cylinder; mooring stiffness is then tuned so that the diagonal
frequency responses peak at the requested surge/sway and heave frequencies.

Run ``python -m offshore_awe.spar out.txt`` to regenerate the shipped
matrix file.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .hydro import HydroMatrices, RadiationStateSpace, find_resonances, frequency_response

RHO_WATER = 1025.0
G = 9.81


@dataclass(frozen=True)
class SparGeometry:
    mass: float = 760e3
    radius: float = 5.0
    height: float = 10.0
    freeboard: float = 1.0
    cog_below_deck: float = 7.0
    heave_added_mass: float = 2.2e5
    mooring_mass: float = 5e4
    sway_damping_ratio: float = 0.02
    drag_damping_ratio: float = 0.28
    drag_washout: float = 0.2
    heave_damping_ratio: float = 0.1
    radiation_peak_hz: float = 0.25
    radiation_damping: float = 2.0e4

    @property
    def draft(self):
        return self.height - self.freeboard

    @property
    def waterline_above_cog(self):
        return self.cog_below_deck - self.freeboard

    @property
    def keel_below_cog(self):
        return self.height - self.cog_below_deck


def _base_matrices(geo, k_horizontal, k_heave):
    a, rho = geo.radius, RHO_WATER
    area = math.pi * a * a
    h = geo.height
    m = geo.mass
    i_tilt = m * (3 * a * a + h * h) / 12.0
    i_yaw = 0.5 * m * a * a
    mass = np.diag([m, m, m, i_tilt, i_tilt, i_yaw])

    # strip-theory added mass of the submerged cylinder, z measured from CoG
    z_top, z_bot = geo.waterline_above_cog, -geo.keel_below_cog
    s0 = rho * area * (z_top - z_bot)
    s1 = rho * area * (z_top ** 2 - z_bot ** 2) / 2.0
    s2 = rho * area * (z_top ** 3 - z_bot ** 3) / 3.0
    minf = np.zeros((6, 6))
    minf[0, 0] = minf[1, 1] = s0
    minf[2, 2] = geo.heave_added_mass
    minf[3, 3] = minf[4, 4] = s2
    minf[0, 4] = minf[4, 0] = s1
    minf[1, 3] = minf[3, 1] = -s1

    volume = area * geo.draft
    z_b = z_top - 0.5 * geo.draft
    kh = np.zeros((6, 6))
    kh[2, 2] = rho * G * area
    kh[3, 3] = kh[4, 4] = rho * G * (math.pi * a ** 4 / 4.0 + volume * z_b)

    mm = np.diag([geo.mooring_mass] * 3 + [0.0] * 3)
    km = np.zeros((6, 6))
    km[0, 0] = km[1, 1] = k_horizontal
    km[2, 2] = k_heave
    km[5, 5] = 1e6

    mt = mass + minf + mm
    bm = np.zeros((6, 6))
    bm[0, 0] = bm[1, 1] = 2 * geo.sway_damping_ratio * math.sqrt(k_horizontal * mt[1, 1])
    bm[2, 2] = 2 * geo.heave_damping_ratio * math.sqrt((kh[2, 2] + k_heave) * mt[2, 2])
    for i in (3, 4):
        bm[i, i] = 2 * 0.1 * math.sqrt(kh[i, i] * mt[i, i])
    bm[5, 5] = 2 * 0.1 * math.sqrt(km[5, 5] * mt[5, 5])
    return HydroMatrices(mass, minf, kh, mm, bm, km)


def radiation_model(geo, horizontal_hz=0.0185, horizontal_mass=None):
    """Passive memory kernels on surge, sway and heave.

    Each of the three DOFs has a wave-radiation impedance
    ``b s / (s^2 + 2 zeta w0 s + w0^2)`` that peaks at
    ``geo.radiation_peak_hz``.  Surge and sway add a washed-out drag
    ``d s / (s + a)``: close to linear damping ``d`` (ratio
    ``geo.drag_damping_ratio`` at ``horizontal_hz``) above the corner
    ``a = geo.drag_washout * w_n`` and vanishing for quasi-static offsets.
    """
    w0 = 2 * math.pi * geo.radiation_peak_hz
    zeta = 0.5
    gain = geo.radiation_damping * 2 * zeta * w0
    wn = 2 * math.pi * horizontal_hz
    drag = 0.0
    if horizontal_mass is not None and geo.drag_damping_ratio > 0:
        drag = 2 * geo.drag_damping_ratio * wn * horizontal_mass
    corner = geo.drag_washout * wn
    dofs = (0, 1, 2)
    washed = (0, 1) if drag else ()
    n = 2 * len(dofs) + len(washed)
    A = np.zeros((n, n))
    B = np.zeros((n, 6))
    C = np.zeros((6, n))
    D = np.zeros((6, 6))
    for k, d in enumerate(dofs):
        i = 2 * k
        A[i, i + 1] = 1.0
        A[i + 1, i] = -w0 * w0
        A[i + 1, i + 1] = -2 * zeta * w0
        B[i + 1, d] = 1.0
        C[d, i + 1] = gain
    for k, d in enumerate(washed):
        i = 2 * len(dofs) + k
        A[i, i] = -corner
        B[i, d] = 1.0
        C[d, i] = -drag * corner
        D[d, d] = drag
    return RadiationStateSpace(A, B, C, D)


def excitation_coefficients(freqs, geo=None):
    """Flat, zero-phase force per unit wave amplitude (heave dominant)."""
    geo = geo or SparGeometry()
    area = math.pi * geo.radius ** 2
    coeff = np.zeros((len(freqs), 6), dtype=complex)
    coeff[:, 2] = RHO_WATER * G * area
    coeff[:, 0] = 0.25 * RHO_WATER * G * area
    coeff[:, 4] = coeff[:, 0] * 0.5 * geo.draft
    return coeff


def _peak(h, ss, dof, guess):
    freqs = np.linspace(0.4 * guess, 2.0 * guess, 1601)
    frf = frequency_response(h, ss, freqs)
    res = find_resonances(frf, freqs, dofs=[dof])
    return min(res, key=lambda r: abs(r.freq - guess)).freq


def calibrate(geo=None, horizontal_hz=0.0185, heave_hz=0.14):
    """Tune mooring stiffness until FRF peaks sit at the target frequencies."""
    geo = geo or SparGeometry()
    probe = _base_matrices(geo, 1.0, 0.0)
    mt = probe.total_mass
    ss = radiation_model(geo, horizontal_hz, mt[1, 1])

    def k_h(target):
        return (2 * math.pi * target) ** 2 * mt[1, 1]

    def horiz(k):
        return _peak(_base_matrices(geo, k, 0.0), ss, 1, horizontal_hz) - horizontal_hz

    k0 = k_h(horizontal_hz)
    kx = optimize.brentq(horiz, 0.6 * k0, 1.8 * k0, xtol=1e-6 * k0)

    kh33 = probe.hydrostatic[2, 2]

    def heave(k):
        return _peak(_base_matrices(geo, kx, k), ss, 2, heave_hz) - heave_hz

    kz0 = (2 * math.pi * heave_hz) ** 2 * mt[2, 2] - kh33
    lo, hi = kz0 - 0.3 * kh33, kz0 + 0.3 * kh33
    kz = optimize.brentq(heave, lo, hi, xtol=1e-6 * kh33)
    if kz < 0:
        raise ValueError("heave target needs negative mooring stiffness; "
                         "increase heave_added_mass")
    return _base_matrices(geo, kx, kz), ss


def main(argv=None):
    from .matfile import write_matrix_file
    from .waves import WaveScenario

    argv = sys.argv[1:] if argv is None else argv
    out = argv[0] if argv else "paper_like_spar.txt"
    geo = SparGeometry()
    h, ss = calibrate(geo)
    freqs = WaveScenario(hs=0.0, te=1.0).frequencies()
    write_matrix_file(out, h, ss, freqs, excitation_coefficients(freqs, geo),
                      header="synthetic paper-like spar; regenerate with "
                             "python -m offshore_awe.spar")
    print(f"wrote {out}: Km_xx={h.mooring_stiffness[0, 0]:.6g} "
          f"Km_zz={h.mooring_stiffness[2, 2]:.6g}")


if __name__ == "__main__":
    main()
