"""Emission of standalone matplotlib scripts plus their CSV data files.

Nothing here imports matplotlib; the emitted scripts do, when run by the
user (``python <script>.py`` writes ``<script>.png`` next to itself).
"""

from __future__ import annotations

import os

import numpy as np

_HEADER = '''"""Generated plot script; renders {png} from {data}."""
import os
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

here = os.path.dirname(os.path.abspath(__file__))
data = np.genfromtxt(os.path.join(here, "{data}"), delimiter=",", names=True)
'''

_FOOTER = '''fig.tight_layout()
fig.savefig(os.path.join(here, "{png}"), dpi=120)
'''


def _write(out_dir, name, columns, body):
    os.makedirs(out_dir, exist_ok=True)
    data_name, png = f"{name}.csv", f"{name}.png"
    cols = list(columns)
    arr = np.column_stack([np.asarray(columns[c], dtype=float) for c in cols])
    np.savetxt(os.path.join(out_dir, data_name), arr, delimiter=",",
               header=",".join(cols), comments="", fmt="%.10g")
    script = os.path.join(out_dir, f"{name}.py")
    with open(script, "w") as fh:
        fh.write(_HEADER.format(png=png, data=data_name) + body + _FOOTER.format(png=png))
    return [script, os.path.join(out_dir, data_name)]


def spectrum_plot(out_dir, name, freqs, spectra, title="Tether force spectrum"):
    """``spectra`` maps a label (valid identifier) to a PSD array on ``freqs``."""
    cols = {"freq": freqs, **spectra}
    lines = "\n".join(f'ax.semilogy(data["freq"], data["{k}"], label="{k}")' for k in spectra)
    body = (f'fig, ax = plt.subplots(figsize=(7, 4))\n{lines}\n'
            f'ax.set_xlabel("frequency [Hz]")\nax.set_ylabel("PSD [kN^2/Hz]")\n'
            f'ax.set_xlim(0, 0.3)\nax.set_title("{title}")\nax.legend()\nax.grid(True)\n')
    return _write(out_dir, name, cols, body)


def bode_overlay(out_dir, name, frf, dof, force_freqs, force_psd, label="force"):
    """|H_dof,dof| in dB with a force spectrum on a twin axis."""
    mag = frf.diagonal_magnitudes()[:, dof]
    f = np.asarray(force_freqs)
    psd = np.interp(frf.freqs, f, force_psd, left=np.nan, right=np.nan)
    cols = {"freq": frf.freqs, "gain_db": 20 * np.log10(mag), "force_psd": psd}
    body = ('fig, ax = plt.subplots(figsize=(7, 4))\n'
            'ax.semilogx(data["freq"], data["gain_db"], "k", label="FRF")\n'
            'ax.set_xlabel("frequency [Hz]")\nax.set_ylabel("gain [dB re m/N]")\n'
            'ax2 = ax.twinx()\n'
            f'ax2.semilogx(data["freq"], data["force_psd"], "r", label="{label}")\n'
            'ax2.set_ylabel("force PSD [kN^2/Hz]")\nax.grid(True, which="both")\n')
    return _write(out_dir, name, cols, body)


def path_comparison(out_dir, name, rec_a, rec_b, labels=("A", "B")):
    """Kite paths of two records in the (phi, theta) plane, degrees."""
    n = min(len(rec_a.t), len(rec_b.t))
    cols = {"phi_a": np.degrees(rec_a.kite[:n, 1]), "theta_a": np.degrees(rec_a.kite[:n, 0]),
            "phi_b": np.degrees(rec_b.kite[:n, 1]), "theta_b": np.degrees(rec_b.kite[:n, 0])}
    body = ('fig, ax = plt.subplots(figsize=(6, 4))\n'
            f'ax.plot(data["phi_a"], data["theta_a"], label="{labels[0]}")\n'
            f'ax.plot(data["phi_b"], data["theta_b"], "--", label="{labels[1]}")\n'
            'ax.set_xlabel("azimuth [deg]")\nax.set_ylabel("elevation [deg]")\n'
            'ax.legend()\nax.grid(True)\n')
    return _write(out_dir, name, cols, body)


def platform_timeseries(out_dir, name, rec):
    cols = {"t": rec.t, "surge": rec.nu[:, 0], "sway": rec.nu[:, 1], "heave": rec.nu[:, 2]}
    body = ('fig, axes = plt.subplots(3, 1, sharex=True, figsize=(7, 6))\n'
            'for ax, k in zip(axes, ("surge", "sway", "heave")):\n'
            '    ax.plot(data["t"], data[k])\n'
            '    ax.set_ylabel(k + " [m]")\n'
            '    ax.grid(True)\n'
            'axes[-1].set_xlabel("time [s]")\n')
    return _write(out_dir, name, cols, body)


def eta_vs_length(out_dir, name, summary):
    """Sweep summary rows (dicts with length, mode, eta) -> eta(L) per mode."""
    modes = sorted({r["mode"] for r in summary})
    lengths = sorted({r["length"] for r in summary})
    cols = {"length": lengths}
    for m in modes:
        by_l = {r["length"]: r["eta"] for r in summary if r["mode"] == m}
        cols[m] = [by_l.get(L, np.nan) for L in lengths]
    lines = "\n".join(f'ax.plot(data["length"], data["{m}"], "o-", label="{m}")' for m in modes)
    body = (f'fig, ax = plt.subplots(figsize=(6, 4))\n{lines}\n'
            'ax.set_xlabel("tether length [m]")\nax.set_ylabel("eta [m/kN]")\n'
            'ax.legend()\nax.grid(True)\n')
    return _write(out_dir, name, cols, body)


def emit_plots(out_dir, record=None, spectra=None, frf=None, summary=None, other=None):
    """Emit every plot the given inputs support; returns the written paths."""
    paths = []
    if spectra is not None:
        freqs, psds = spectra
        paths += spectrum_plot(out_dir, "force_spectrum", freqs, psds)
        if frf is not None and "fy" in psds:
            paths += bode_overlay(out_dir, "sway_bode_overlay", frf, 1, freqs, psds["fy"], "F_y")
    if record is not None and not np.all(record.nu == 0):
        paths += platform_timeseries(out_dir, "platform_motion", record)
    if record is not None and other is not None:
        paths += path_comparison(out_dir, "path_comparison", record, other)
    if summary:
        paths += eta_vs_length(out_dir, "eta_vs_length", summary)
    return paths
