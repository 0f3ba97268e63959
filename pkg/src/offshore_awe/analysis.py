"""Post-processing: force spectra, force statistics, eta and resonance overlap."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .errors import EmptyResult, NoPeaks, TooShort
from .hydro import DOF_NAMES, find_resonances

MIN_SEGMENTS = 8
MIN_PEAKS = 10
PROMINENCE = 0.01


@dataclass(frozen=True)
class ForceStats:
    """Tether-force statistics in kN."""

    f_mean: float
    peaks_mean: float
    delta_f: float
    std_peaks: float
    n_peaks: int = 0


@dataclass(frozen=True)
class EtaReport:
    length: float
    f_traj: float
    fy_peak: float      # kN
    yp_peak: float      # m
    eta: float          # m/kN

    def as_row(self):
        return {"length": self.length, "f_traj": self.f_traj, "fy_peak": self.fy_peak,
                "yp_peak": self.yp_peak, "eta": self.eta}


def spectrum(series, dt, nperseg=None):
    """One-sided Welch PSD (Hann, 50 % overlap, mean removed).

    The default segment length gives eight half-overlapping segments.
    """
    x = np.asarray(series, dtype=float)
    n = len(x)
    if nperseg is None:
        nperseg = (2 * n) // (MIN_SEGMENTS + 1)
    if nperseg < 2 or n < nperseg * (MIN_SEGMENTS + 1) // 2:
        raise TooShort(f"{n} samples, need {MIN_SEGMENTS} segments of {nperseg}")
    return signal.welch(x, fs=1.0 / dt, window="hann", nperseg=nperseg,
                        noverlap=nperseg // 2, detrend="constant",
                        return_onesided=True, scaling="density")


def dominant_frequency(freqs, psd, f_min=0.0):
    """Frequency of the largest PSD bin above ``f_min`` (DC excluded)."""
    mask = freqs > max(f_min, 0.0)
    if not np.any(mask):
        raise TooShort("no frequency bins above f_min")
    i = np.argmax(np.where(mask, psd, -np.inf))
    return float(freqs[i])


def find_force_peaks(series, dt, min_distance=None):
    """Indices of local maxima at least half a dominant period apart.

    ``min_distance`` (seconds) overrides the spectral estimate.
    """
    x = np.asarray(series, dtype=float)
    if min_distance is None:
        f, p = spectrum(x, dt)
        min_distance = 0.5 / dominant_frequency(f, p)
    rng = float(np.ptp(x)) if len(x) else 0.0
    idx, _ = signal.find_peaks(x, distance=max(1, int(min_distance / dt)),
                               prominence=PROMINENCE * rng if rng > 0 else None)
    return idx


def force_stats(series_kn, dt, min_distance=None):
    x = np.asarray(series_kn, dtype=float)
    idx = find_force_peaks(x, dt, min_distance)
    if len(idx) < MIN_PEAKS:
        raise NoPeaks(f"{len(idx)} peaks found, need {MIN_PEAKS}")
    peaks = x[idx]
    f_mean = float(np.mean(x))
    pm = float(np.mean(peaks))
    return ForceStats(f_mean, pm, pm - f_mean, float(np.std(peaks)), len(idx))


def eta(y_series, fy_series_kn, dt=None, length=math.nan, f_traj=math.nan):
    """Sway-peak to lateral-force-peak ratio over an already steady window."""
    y = np.asarray(y_series, dtype=float)
    fy = np.asarray(fy_series_kn, dtype=float)
    yp = float(np.max(np.abs(y)))
    fp = float(np.max(np.abs(fy)))
    if fp == 0.0:
        raise ZeroDivisionError("lateral force peak is zero")
    return EtaReport(float(length), float(f_traj), fp, yp, yp / fp)


def summarize(record, n_eights=None):
    """EtaReport of a SimRecord over its steady window."""
    mask = record.steady_mask(n_eights)
    f = record.traj_frequency(n_eights)
    fy = record.tether_force[mask, 1] / 1e3
    y = record.nu[mask, 1]
    return eta(y, fy, record.dt, float(record.length[0]), f)


def steady_force_stats(record, n_eights=None):
    mask = record.steady_mask(n_eights)
    f = record.traj_frequency(n_eights)
    return force_stats(record.tether_magnitude[mask] / 1e3, record.dt,
                       min_distance=0.25 / f)


@dataclass
class OverlapEntry:
    dof: int
    resonance_hz: float
    resonance_gain: float
    force_peak_hz: float
    force_psd: float
    gain_at_peak: float

    @property
    def dof_name(self):
        return DOF_NAMES[self.dof]

    @property
    def separation(self):
        return abs(self.force_peak_hz - self.resonance_hz) / self.resonance_hz


@dataclass
class OverlapReport:
    band: float
    entries: list = field(default_factory=list)

    def flagged(self, dof=None):
        return [e for e in self.entries if dof is None or e.dof == dof]

    def __len__(self):
        return len(self.entries)


def spectral_peaks(freqs, psd, rel_height=0.05):
    """Local PSD maxima above ``rel_height`` of the global maximum."""
    psd = np.asarray(psd, dtype=float)
    if len(psd) < 3 or not np.any(psd > 0):
        return []
    idx, _ = signal.find_peaks(psd, height=rel_height * psd.max())
    return [(float(freqs[i]), float(psd[i])) for i in idx]


def resonance_overlap_report(frf, freqs_psd, psd, band=0.25, dofs=None, peaks=None):
    """Force spectral peaks within ``band`` (relative) of each FRF resonance.

    ``frf`` is a :class:`~offshore_awe.hydro.FrequencyResponse`.  Pass
    ``peaks`` as ``[(f, psd), ...]`` to bypass peak picking.
    """
    report = OverlapReport(band)
    if peaks is None:
        peaks = spectral_peaks(freqs_psd, psd) if len(freqs_psd) else []
    if not peaks:
        return report
    mags = frf.diagonal_magnitudes()
    try:
        res = find_resonances(mags, frf.freqs, dofs=dofs)
    except EmptyResult:
        return report
    for r in res:
        for fpk, ppk in peaks:
            if abs(fpk - r.freq) <= band * r.freq:
                gain = float(np.interp(fpk, frf.freqs, mags[:, r.dof]))
                report.entries.append(OverlapEntry(r.dof, r.freq, r.gain, fpk, ppk, gain))
    return report


def write_table(path, rows, columns):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        w.writeheader()
        for row in rows:
            w.writerow(row)
