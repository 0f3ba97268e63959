"""Command-line entry point: ``offshore-awe <command> ...``.

Exit codes: 0 success, 1 invalid input (parse/validation/usage), 2 runtime
abort.  Output goes to ``--out`` or, if absent, to a per-command directory
under ``$OFFSHORE_AWE_OUTPUT`` (default ``./runs``).
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import math
import os
import sys
from dataclasses import replace
from datetime import datetime, timezone
from importlib import metadata

import numpy as np

from . import analysis, plots
from .config import dump_config, load_config
from .engine import SimRecord, run, sweep
from .errors import AWEError, ParseError, ValidationError
from .hydro import DOF_NAMES, find_resonances, frequency_response

OUTPUT_ENV = "OFFSHORE_AWE_OUTPUT"
EXIT_OK, EXIT_INVALID, EXIT_ABORT = 0, 1, 2
ETA_COLUMNS = ["length", "f_traj", "fy_peak_kN", "yp_peak_m", "eta", "error"]
FORCE_COLUMNS = ["mode", "length", "f_mean_kN", "peaks_mean_kN", "delta_f_kN",
                 "std_peaks_kN"]

log = logging.getLogger("offshore_awe")


def version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _now():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def output_dir(args, name):
    if args.out:
        out = args.out
    else:
        out = os.path.join(os.environ.get(OUTPUT_ENV, "runs"), name)
    os.makedirs(out, exist_ok=True)
    return out


def sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir, argv, started, files, rc=None, extra=None):
    """Config echo, seed, version, timestamps and a hashed file inventory."""
    path = os.path.join(out_dir, "manifest.txt")
    lines = [f"version = {version()}", f"command = {' '.join(argv)}",
             f"started = {started}", f"finished = {_now()}"]
    if rc is not None:
        lines.append(f"seed = {rc.seed}")
    for k, v in (extra or {}).items():
        lines.append(f"{k} = {v}")
    lines.append("")
    lines.append("[files]")
    for f in sorted(set(files)):
        lines.append(f"{os.path.relpath(f, out_dir)} = sha256:{sha256(f)} "
                     f"bytes:{os.path.getsize(f)}")
    if rc is not None:
        lines += ["", "# configuration echo", dump_config(rc)]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _apply_overrides(rc, args):
    sim = rc.sim
    if getattr(args, "length", None) is not None:
        sim.length = args.length
    if getattr(args, "mode", None) is not None:
        sim.control = replace(sim.control, mode=args.mode)
    if getattr(args, "duration", None) is not None:
        sim.duration = args.duration
    if getattr(args, "seed", None) is not None:
        sim.seed = args.seed
        if sim.waves is not None:
            sim.waves = replace(sim.waves, seed=args.seed)
    problems = sim.problems()
    if problems:
        raise ValidationError(problems)
    return rc


def _save_record(out_dir, stem, rec):
    csv_path = os.path.join(out_dir, f"{stem}.csv")
    ev_path = os.path.join(out_dir, f"{stem}.events.csv")
    rec.to_csv(csv_path)
    rec.events_to_csv(ev_path)
    return [csv_path, ev_path]


def _fmt(v):
    return "nan" if isinstance(v, float) and math.isnan(v) else f"{v:.6g}" \
        if isinstance(v, float) else str(v)


def cmd_simulate(args, argv):
    started = _now()
    rc = _apply_overrides(load_config(args.config), args)
    rec = run(rc.sim)
    out = output_dir(args, "simulate")
    files = _save_record(out, "record", rec)
    extra = {"aborted": rec.aborted or "no"}
    try:
        rep = analysis.summarize(rec)
        extra.update(f_traj=_fmt(rep.f_traj), eta=_fmt(rep.eta))
        print(f"f_traj = {rep.f_traj:.5f} Hz  fy_peak = {rep.fy_peak:.2f} kN  "
              f"yp_peak = {rep.yp_peak:.4f} m  eta = {rep.eta:.5f}")
    except AWEError as exc:
        print(f"summary unavailable: {exc}")
    write_manifest(out, argv, started, files, rc, extra)
    print(f"wrote {out}")
    if rec.aborted:
        print(f"run aborted: {rec.aborted}", file=sys.stderr)
        return EXIT_ABORT
    return EXIT_OK


def cmd_sweep(args, argv):
    started = _now()
    rc = _apply_overrides(load_config(args.config), args)
    records, summary = sweep(rc.sim, args.lengths, args.modes, workers=args.workers)
    out = output_dir(args, "sweep")
    files = []
    for (L, mode), rec in records.items():
        if rec is not None:
            files += _save_record(out, f"record_{mode}_L{L:g}", rec)
    force_rows = []
    for (L, mode), rec in records.items():
        row = {"mode": mode, "length": L}
        try:
            st = analysis.steady_force_stats(rec)
            row.update(f_mean_kN=st.f_mean, peaks_mean_kN=st.peaks_mean,
                       delta_f_kN=st.delta_f, std_peaks_kN=st.std_peaks)
        except (AWEError, AttributeError):
            pass
        force_rows.append(row)
    for mode in args.modes:
        rows = [{"length": r["length"], "f_traj": r["f_traj"], "fy_peak_kN": r["fy_peak"],
                 "yp_peak_m": r["yp_peak"], "eta": r["eta"], "error": r["error"]}
                for r in summary if r["mode"] == mode]
        path = os.path.join(out, f"eta_{mode}.csv")
        analysis.write_table(path, rows, ETA_COLUMNS)
        files.append(path)
        print(f"mode {mode}")
        print("  " + "  ".join(f"{c:>10s}" for c in ETA_COLUMNS[:-1]))
        for r in rows:
            print("  " + "  ".join(f"{_fmt(r[c]):>10s}" for c in ETA_COLUMNS[:-1])
                  + (f"  {r['error']}" if r["error"] else ""))
    path = os.path.join(out, "force_stats.csv")
    analysis.write_table(path, force_rows, FORCE_COLUMNS)
    files.append(path)
    files += plots.emit_plots(out, summary=summary)
    write_manifest(out, argv, started, files, rc)
    print(f"wrote {out}")
    return EXIT_ABORT if any(r["error"] for r in summary) else EXIT_OK


def cmd_analyze(args, argv):
    started = _now()
    events = args.record[:-4] + ".events.csv" if args.record.endswith(".csv") else None
    if events and not os.path.exists(events):
        events = None
    rec = SimRecord.from_csv(args.record, events)
    out = output_dir(args, "analyze")
    mask = rec.steady_mask()
    dt = rec.dt
    f_traj = rec.traj_frequency()
    comps = {"fx": rec.tether_force[mask, 0] / 1e3, "fy": rec.tether_force[mask, 1] / 1e3,
             "fmag": rec.tether_magnitude[mask] / 1e3}
    psds = {}
    for k, series in comps.items():
        freqs, psds[k] = analysis.spectrum(series, dt)
    st = analysis.force_stats(comps["fmag"], dt, min_distance=0.25 / f_traj)
    rep = analysis.summarize(rec)
    fx_dom = analysis.dominant_frequency(freqs, psds["fx"])
    fy_dom = analysis.dominant_frequency(freqs, psds["fy"])
    lines = [f"f_traj = {f_traj:.6g} Hz",
             f"F_mean = {st.f_mean:.6g} kN", f"Peaks_mean = {st.peaks_mean:.6g} kN",
             f"delta_F = {st.delta_f:.6g} kN", f"std_peaks = {st.std_peaks:.6g} kN",
             f"fy_peak = {rep.fy_peak:.6g} kN", f"yp_peak = {rep.yp_peak:.6g} m",
             f"eta = {rep.eta:.6g} m/kN",
             f"dominant_fx = {fx_dom:.6g} Hz", f"dominant_fy = {fy_dom:.6g} Hz"]
    stats_path = os.path.join(out, "analysis.txt")
    with open(stats_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print("\n".join(lines))
    files = [stats_path] + plots.emit_plots(out, record=rec, spectra=(freqs, psds))
    write_manifest(out, argv, started, files, extra={"record": os.path.abspath(args.record)})
    return EXIT_OK


def cmd_freq_response(args, argv):
    started = _now()
    rc = load_config(args.config)
    sim = rc.sim
    if sim.hydro is None:
        raise ValidationError("freq-response needs an offshore config with platform.matrix_file")
    freqs = np.geomspace(args.f_min, args.f_max, args.n)
    frf = frequency_response(sim.hydro, sim.radiation, freqs)
    out = output_dir(args, "freq_response")
    mags = frf.diagonal_magnitudes()
    frf_path = os.path.join(out, "frf.csv")
    np.savetxt(frf_path, np.column_stack([freqs, mags]), delimiter=",", fmt="%.10g",
               header="freq," + ",".join(f"H_{n}" for n in DOF_NAMES), comments="")
    res = find_resonances(frf, freqs)
    res_path = os.path.join(out, "resonances.csv")
    analysis.write_table(res_path, [{"dof": r.dof_name, "freq_hz": f"{r.freq:.6g}",
                                     "gain": f"{r.gain:.6g}"} for r in res],
                         ["dof", "freq_hz", "gain"])
    for r in sorted(res, key=lambda r: r.dof):
        print(f"{r.dof_name:>6s}  {r.freq:.5f} Hz  |H| = {r.gain:.4g}")
    files = [frf_path, res_path]
    write_manifest(out, argv, started, files, rc)
    return EXIT_OK


def cmd_compare(args, argv):
    started = _now()
    recs = []
    for p in (args.record_a, args.record_b):
        ev = p[:-4] + ".events.csv"
        recs.append(SimRecord.from_csv(p, ev if os.path.exists(ev) else None))
    a, b = recs
    n = min(len(a.t), len(b.t))
    pa, pb = a.kite_positions()[:n], b.kite_positions()[:n]
    rms = float(np.sqrt(np.mean(np.sum((pa - pb) ** 2, axis=1))))
    ref = float(np.sqrt(np.mean(np.sum(pa ** 2, axis=1))))
    lines = [f"samples = {n}", f"path_rms_difference = {rms:.6g} m",
             f"relative = {rms / ref:.6g}",
             f"identical = {'yes' if a.identical_to(b) else 'no'}"]
    for label, rec in (("a", a), ("b", b)):
        try:
            rep = analysis.summarize(rec)
            lines.append(f"{label}: f_traj = {rep.f_traj:.6g} Hz  yp_peak = {rep.yp_peak:.6g} m"
                         f"  eta = {rep.eta:.6g}")
        except AWEError as exc:
            lines.append(f"{label}: summary unavailable ({exc})")
    out = output_dir(args, "compare")
    path = os.path.join(out, "compare.txt")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print("\n".join(lines))
    files = [path] + plots.emit_plots(out, record=a, other=b)
    write_manifest(out, argv, started, files)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser():
    p = _Parser(prog="offshore-awe", description="Offshore kite/spar simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--out", help="output directory")

    s = sub.add_parser("simulate", parents=[common], help="run one configuration")
    s.add_argument("config")
    s.add_argument("--length", type=float)
    s.add_argument("--mode", choices=("baseline", "resonance_avoid"))
    s.add_argument("--duration", type=float)
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("sweep", parents=[common], help="tether-length sweep")
    s.add_argument("config")
    s.add_argument("--lengths", type=float, nargs="+",
                   default=[600, 700, 800, 900, 1000, 1100, 1200, 1300])
    s.add_argument("--modes", nargs="+", choices=("baseline", "resonance_avoid"),
                   default=["baseline", "resonance_avoid"])
    s.add_argument("--duration", type=float)
    s.add_argument("--seed", type=int)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("analyze", parents=[common], help="spectra and statistics of a record")
    s.add_argument("record")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("freq-response", parents=[common], help="platform FRF and resonances")
    s.add_argument("config")
    s.add_argument("--f-min", type=float, default=1e-3)
    s.add_argument("--f-max", type=float, default=1.0)
    s.add_argument("-n", type=int, default=4000)
    s.set_defaults(func=cmd_freq_response)

    s = sub.add_parser("compare", parents=[common], help="compare two records")
    s.add_argument("record_a")
    s.add_argument("record_b")
    s.set_defaults(func=cmd_compare)
    return p


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError:
        return EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args, ["offshore-awe"] + argv)
    except ValidationError as exc:
        print("invalid configuration:", file=sys.stderr)
        for p in exc.problems:
            print(f"  - {p}", file=sys.stderr)
        return EXIT_INVALID
    except (ParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except AWEError as exc:
        print(f"aborted: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
