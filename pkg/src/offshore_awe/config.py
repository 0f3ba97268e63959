"""Experiment configuration files (INI-style ``key = value`` in sections).

Unknown sections or keys are rejected so that typos do not silently fall
back to defaults.  All values are SI; angles in radians.
"""

from __future__ import annotations

import configparser
import os
import re
from dataclasses import dataclass, fields, replace
from importlib import resources

from . import kite as kd
from . import tether as td
from .control import ControlConfig, PlannerConfig, Target, TargetPoints
from .engine import SimConfig
from .errors import ParseError, ValidationError
from .matfile import read_matrix_file
from .waves import WaveScenario

BUILTIN_PREFIX = "builtin:"

_SIM = {"dt": float, "duration": float, "control_period": float, "wind": "vec3",
        "seed": int, "transient_eights": int, "settle_constants": float,
        "platform": ("offshore", "onshore")}
_KITE = {"area": float, "mass": float, "lift_coeff": float, "drag_coeff": float,
         "air_density": float, "steering_gain": float, "wingspan": float,
         "tether_drag_coeff": float, "initial_state": "vec6?"}
_TETHER = {"length": float, "mode": ("fixed", "reel_out"), "reel_rate": float,
           "diameter": float, "density": float, "breaking_load": float,
           "breaking_elongation": float, "exit_point": "vec3", "radial_only": bool}
_CONTROL = {"mode": ("baseline", "resonance_avoid"), "k_p": float, "delta_limit": float,
            "target_minus": "vec2", "target_plus": "vec2", "initial_target": ("plus", "minus")}
_PLANNER = {"f_star": float, "turn_radius": float, "theta_min": float,
            "theta_minus": float, "v_bar_window": int}
_PLATFORM = {"matrix_file": str}
_WAVES = {"hs": float, "te": float, "gamma_j": float, "f_min": float, "f_max": float,
          "n_bins": int}
SCHEMA = {"simulation": _SIM, "kite": _KITE, "tether": _TETHER, "control": _CONTROL,
          "planner": _PLANNER, "platform": _PLATFORM, "waves": _WAVES}


@dataclass
class RunConfig:
    """A loaded experiment: the simulation config plus where it came from."""

    sim: SimConfig
    matrix_file: str | None = None
    source: str | None = None

    @property
    def seed(self):
        return self.sim.seed


def builtin_path(name):
    """Filesystem path of a package data file (``configs/...`` or ``data/...``)."""
    return str(resources.files("offshore_awe").joinpath(name))


def resolve_matrix_path(spec, base_dir):
    if spec.startswith(BUILTIN_PREFIX):
        return builtin_path(f"data/{spec[len(BUILTIN_PREFIX):]}.txt")
    if os.path.isabs(spec):
        return spec
    return os.path.normpath(os.path.join(base_dir, spec))


def _line_of(text, section, key=None):
    current = None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        m = re.match(r"\[(.+)\]$", line)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return n
            continue
        if current == section and key is not None and re.match(rf"{re.escape(key)}\s*[=:]", line):
            return n
    return 0


def _convert(kind, raw):
    raw = raw.strip()
    if kind is float:
        return float(raw)
    if kind is int:
        return int(raw)
    if kind is str:
        return raw
    if kind is bool:
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if isinstance(kind, tuple):
        if raw not in kind:
            raise ValueError(f"expected one of {', '.join(kind)}, got {raw!r}")
        return raw
    optional = kind.endswith("?")
    if optional and raw.lower() in ("", "none", "default"):
        return None
    n = int(kind.strip("vec?"))
    vals = tuple(float(v) for v in raw.replace(",", " ").split())
    if len(vals) != n:
        raise ValueError(f"expected {n} numbers, got {len(vals)}")
    return vals


def parse_config_text(text, path="<string>"):
    """Raw typed values ``{section: {key: value}}`` (no defaults applied)."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"),
                                   interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text, source=path)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", 0)
        raise ParseError(f"{path}:{line}: {exc.message if hasattr(exc, 'message') else exc}") from None
    out = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ParseError(f"{path}:{_line_of(text, section)}: unknown section [{section}]")
        schema = SCHEMA[section]
        out[section] = {}
        for key, raw in cp.items(section):
            if key not in schema:
                raise ParseError(f"{path}:{_line_of(text, section, key)}: "
                                 f"unknown key {section}.{key}")
            try:
                out[section][key] = _convert(schema[key], raw)
            except ValueError as exc:
                raise ParseError(f"{path}:{_line_of(text, section, key)}: "
                                 f"{section}.{key}: {exc}") from None
    return out


def build_config(values, base_dir=".", source=None):
    """Apply defaults, load the matrix file and validate every invariant."""
    problems = []
    sim_v = values.get("simulation", {})
    kite_v = values.get("kite", {})
    teth_v = values.get("tether", {})
    ctrl_v = values.get("control", {})
    plan_v = values.get("planner", {})
    wave_v = values.get("waves", {})
    plat_v = values.get("platform", {})

    aero_keys = {f.name for f in fields(kd.AeroParams)}
    aero = replace(kd.AeroParams(), **{k: v for k, v in kite_v.items() if k in aero_keys})
    tkeys = {"diameter", "density", "breaking_load", "breaking_elongation", "radial_only"}
    tether = replace(td.TetherConfig(), **{k: v for k, v in teth_v.items() if k in tkeys})
    if "exit_point" in teth_v:
        tether = replace(tether, exit_point_body=teth_v["exit_point"])
    dflt = ControlConfig()
    targets = TargetPoints(ctrl_v.get("target_minus", dflt.targets.p_minus),
                           ctrl_v.get("target_plus", dflt.targets.p_plus))
    planner = replace(PlannerConfig(), **plan_v)
    control = ControlConfig(
        targets=targets, k_p=ctrl_v.get("k_p", dflt.k_p),
        delta_limit=ctrl_v.get("delta_limit", dflt.delta_limit),
        mode=ctrl_v.get("mode", dflt.mode), planner=planner,
        initial_target=Target.MINUS if ctrl_v.get("initial_target") == "minus" else Target.PLUS)

    init = kite_v.get("initial_state")
    sim = SimConfig(
        length=teth_v.get("length", SimConfig.length),
        dt=sim_v.get("dt", SimConfig.dt), duration=sim_v.get("duration", SimConfig.duration),
        control_period=sim_v.get("control_period", SimConfig.control_period),
        wind=sim_v.get("wind", SimConfig.wind),
        tether_mode=teth_v.get("mode", "fixed"), reel_rate=teth_v.get("reel_rate", 0.0),
        kite_mass=kite_v.get("mass", SimConfig.kite_mass), aero=aero, tether=tether,
        control=control, platform_frozen=sim_v.get("platform", "offshore") == "onshore",
        initial_kite=kd.KiteState(*init) if init else None,
        seed=sim_v.get("seed", 0), transient_eights=sim_v.get("transient_eights", 5),
        settle_constants=sim_v.get("settle_constants", SimConfig.settle_constants))

    for name in ("area", "lift_coeff", "air_density", "wingspan"):
        if getattr(aero, name) <= 0:
            problems.append(f"kite.{name} must be > 0")
    if aero.drag_coeff < 0:
        problems.append("kite.drag_coeff must be >= 0")
    if sim.kite_mass <= 0:
        problems.append("kite.mass must be > 0")
    for name in ("diameter", "density", "breaking_load", "breaking_elongation"):
        if getattr(tether, name) <= 0:
            problems.append(f"tether.{name} must be > 0")
    if control.k_p <= 0 or control.delta_limit <= 0:
        problems.append("control.k_p and control.delta_limit must be > 0")
    if planner.f_star <= 0 or planner.turn_radius <= 0 or planner.v_bar_window < 1:
        problems.append("planner.f_star, turn_radius must be > 0 and v_bar_window >= 1")

    matrix_file = plat_v.get("matrix_file")
    if not sim.platform_frozen:
        if matrix_file is None:
            problems.append("platform.matrix_file is required for offshore runs")
        else:
            resolved = resolve_matrix_path(matrix_file, base_dir)
            if not matrix_file.startswith(BUILTIN_PREFIX):
                matrix_file = resolved
            mf = read_matrix_file(resolved)
            sim.hydro, sim.radiation = mf.hydro, mf.radiation
            try:
                probe = WaveScenario(hs=0.0, te=1.0, **{k: v for k, v in wave_v.items()
                                                        if k in ("f_min", "f_max", "n_bins")})
                coeffs = mf.excitation_on(probe.frequencies())
                sim.waves = WaveScenario(
                    hs=wave_v.get("hs", 0.0), te=wave_v.get("te", 3.7),
                    gamma_j=wave_v.get("gamma_j", 3.1), seed=sim.seed or 0,
                    f_min=probe.f_min, f_max=probe.f_max, n_bins=probe.n_bins,
                    exc_coeffs=coeffs)
            except ValueError as exc:
                problems += [f"waves: {p}" for p in str(exc).split("; ")]
    problems += sim.problems()
    if problems:
        raise ValidationError(problems)
    return RunConfig(sim, matrix_file, source)


def load_config(path):
    path = str(path)
    if path.startswith(BUILTIN_PREFIX):
        path = builtin_path(f"configs/{path[len(BUILTIN_PREFIX):]}.cfg")
    with open(path) as fh:
        text = fh.read()
    values = parse_config_text(text, path)
    return build_config(values, os.path.dirname(os.path.abspath(path)), path)


def load_config_text(text, base_dir=".", path="<string>"):
    return build_config(parse_config_text(text, path), base_dir, path)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (tuple, list)):
        return " ".join(_fmt(float(x)) for x in v)
    return str(v)


def config_values(rc):
    """Inverse of :func:`build_config` as ``{section: {key: value}}``."""
    s = rc.sim
    a, t, c, p = s.aero, s.tether, s.control, s.control.planner
    vals = {
        "simulation": {"dt": s.dt, "duration": s.duration, "control_period": s.control_period,
                       "wind": s.wind, "seed": s.seed or 0,
                       "transient_eights": s.transient_eights,
                       "settle_constants": s.settle_constants,
                       "platform": "onshore" if s.platform_frozen else "offshore"},
        "kite": {"area": a.area, "mass": s.kite_mass, "lift_coeff": a.lift_coeff,
                 "drag_coeff": a.drag_coeff, "air_density": a.air_density,
                 "steering_gain": a.steering_gain, "wingspan": a.wingspan,
                 "tether_drag_coeff": a.tether_drag_coeff,
                 "initial_state": tuple(s.initial_kite.as_array()) if s.initial_kite else "default"},
        "tether": {"length": s.length, "mode": s.tether_mode, "reel_rate": s.reel_rate,
                   "diameter": t.diameter, "density": t.density,
                   "breaking_load": t.breaking_load,
                   "breaking_elongation": t.breaking_elongation,
                   "exit_point": t.exit_point_body, "radial_only": t.radial_only},
        "control": {"mode": c.mode, "k_p": c.k_p, "delta_limit": c.delta_limit,
                    "target_minus": c.targets.p_minus, "target_plus": c.targets.p_plus,
                    "initial_target": c.initial_target.name.lower()},
        "planner": {"f_star": p.f_star, "turn_radius": p.turn_radius,
                    "theta_min": p.theta_min, "theta_minus": p.theta_minus,
                    "v_bar_window": p.v_bar_window},
    }
    if rc.matrix_file is not None:
        vals["platform"] = {"matrix_file": rc.matrix_file}
    if s.waves is not None:
        w = s.waves
        vals["waves"] = {"hs": w.hs, "te": w.te, "gamma_j": w.gamma_j, "f_min": w.f_min,
                         "f_max": w.f_max, "n_bins": w.n_bins}
    return vals


def dump_config(rc):
    lines = []
    for section, kv in config_values(rc).items():
        lines.append(f"[{section}]")
        lines += [f"{k} = {_fmt(v)}" for k, v in kv.items()]
        lines.append("")
    return "\n".join(lines)
