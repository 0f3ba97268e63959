"""Coupled kite/tether/platform simulation with fixed-step RK4.

State layout (length 18 + n_rad)::

    [theta, phi, r, theta_dot, phi_dot, r_dot,   kite
     nu(6), nu_dot(6),                           platform
     z(n_rad)]                                   radiation memory
"""

from __future__ import annotations

import copy
import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import kite as kd
from . import tether as td
from .control import ControlConfig, Target
from .errors import (AWEError, InsufficientHistory, NonFiniteState, ParseError,
                     SingularityError, StallError, ValidationError)
from .hydro import HydroMatrices, PlatformState, RadiationStateSpace
from .waves import ExcitationSeries, WaveScenario, synthesize

log = logging.getLogger(__name__)

ROTATION_WARNING = 0.5
KITE = slice(0, 6)
RECORD_COLUMNS = (("t", "theta", "phi", "r", "theta_dot", "phi_dot", "r_dot")
                  + tuple(f"nu{i}" for i in range(1, 7))
                  + tuple(f"nu_dot{i}" for i in range(1, 7))
                  + ("ft_x", "ft_y", "ft_z", "delta", "target", "length"))


def _num(v):
    return repr(float(v))
PLATFORM = slice(6, None)


@dataclass
class SimConfig:
    length: float = 900.0
    dt: float = 0.01
    duration: float = 600.0
    control_period: float = 0.1
    wind: tuple = (8.5, 0.0, 0.0)
    tether_mode: str = "fixed"          # "fixed" | "reel_out"
    reel_rate: float = 0.0
    kite_mass: float = 90.0
    aero: kd.AeroParams = field(default_factory=kd.AeroParams)
    tether: td.TetherConfig = field(default_factory=td.TetherConfig)
    control: ControlConfig = field(default_factory=ControlConfig)
    hydro: HydroMatrices | None = None
    radiation: RadiationStateSpace | None = None
    waves: WaveScenario | None = None
    platform_frozen: bool = False
    initial_kite: kd.KiteState | None = None
    initial_platform: PlatformState | None = None
    seed: int | None = None
    transient_eights: int = 5
    settle_constants: float = 5.0       # platform decay times added to the transient

    @property
    def onshore(self):
        return self.platform_frozen or self.hydro is None

    @property
    def steps_per_control(self):
        return int(round(self.control_period / self.dt))

    def problems(self):
        out = []
        if self.dt <= 0:
            out.append("dt must be > 0")
        if self.duration <= 0:
            out.append("duration must be > 0")
        if self.length <= 0:
            out.append("tether length must be > 0")
        if self.settle_constants < 0:
            out.append("settle_constants must be >= 0")
        if self.dt > 0:
            ratio = self.control_period / self.dt
            if self.control_period < self.dt or abs(ratio - round(ratio)) > 1e-9:
                out.append("control_period must be an integer multiple of dt")
        if self.tether_mode not in ("fixed", "reel_out"):
            out.append(f"unknown tether mode {self.tether_mode!r}")
        tp = self.control.targets
        if not tp.phi_minus < tp.phi_plus:
            out.append("target points need phi_minus < phi_plus")
        if self.hydro is not None:
            out += self.hydro.problems()
        if self.radiation is not None and not self.radiation.is_stable():
            out.append("radiation state-space matrix A is not strictly stable")
        return out


def default_initial_kite(length, theta=0.5, speed=40.0):
    return kd.KiteState(theta, 0.0, length + 5.0, 0.0,
                        speed / (length * math.cos(theta)), 0.0)


class CoupledSystem:
    """Right-hand side of the coupled model for one configuration.

    Kite and tether forces are evaluated in a fused scalar routine equivalent
    to :mod:`offshore_awe.kite` / :mod:`offshore_awe.tether` (checked by the
    test suite); the linear platform block is a single precomputed matrix.
    """

    def __init__(self, cfg, excitation=None):
        self.cfg = cfg
        self.aero = cfg.aero
        self.tc = cfg.tether
        self.wind = tuple(float(w) for w in cfg.wind)
        self.p_ok = tuple(float(v) for v in self.tc.exit_point())
        self.excitation = excitation
        self.frozen = cfg.onshore
        ss = cfg.radiation if cfg.radiation is not None else RadiationStateSpace.empty()
        self.n_rad = 0 if self.frozen else ss.order
        self.size = 18 + self.n_rad
        if not self.frozen:
            h = cfg.hydro
            minv = h.mass_inverse
            n = self.n_rad
            S = np.zeros((12 + n, 12 + n))
            S[0:6, 6:12] = np.eye(6)
            S[6:12, 0:6] = -minv @ h.total_stiffness
            S[6:12, 6:12] = -minv @ (h.mooring_damping + ss.D)
            if n:
                S[6:12, 12:] = -minv @ ss.C
                S[12:, 6:12] = ss.B
                S[12:, 12:] = ss.A
            self.S = S
            self.minv = minv
        self.settle_time = self._settle_time()
        self._rho_a2 = 0.5 * self.aero.air_density * self.aero.area

    def _settle_time(self):
        """Seconds for the slowest platform mode to decay by ``settle_constants`` e-folds."""
        if self.frozen or self.cfg.settle_constants <= 0:
            return 0.0
        rate = -np.linalg.eigvals(self.S).real.max()
        if rate <= 0:
            return math.inf
        return self.cfg.settle_constants / rate

    def length_at(self, t):
        if self.cfg.tether_mode == "reel_out":
            return self.cfg.length + self.cfg.reel_rate * t
        return self.cfg.length

    def kite_and_tether(self, x, t, delta):
        """Kite state derivative and tether force on the platform (inertial)."""
        th, ph, r, thd, phd, rd = x[0], x[1], x[2], x[3], x[4], x[5]
        L = self.length_at(t)
        a, tc = self.aero, self.tc
        m = td.effective_mass(self.cfg.kite_mass, tc, L)
        st, ct, sp, cp = math.sin(th), math.cos(th), math.sin(ph), math.cos(ph)
        if abs(ct) < 1e-6:
            raise SingularityError(f"kite at zenith at t={t:.3f} s")
        etx, ety, etz = st * cp, st * sp, -ct
        epx, epy = -sp, cp
        erx, ery, erz = ct * cp, ct * sp, st
        vt, vp = -r * thd, r * ct * phd
        vx = etx * vt + epx * vp + erx * rd
        vy = ety * vt + epy * vp + ery * rd
        vz = etz * vt + erz * rd
        wx, wy, wz = self.wind[0] - vx, self.wind[1] - vy, self.wind[2] - vz
        w2 = wx * wx + wy * wy + wz * wz
        speed = math.sqrt(w2)
        if speed <= kd.STALL_SPEED:
            raise StallError(f"apparent wind {speed:.3g} m/s at t={t:.3f} s")
        wx, wy, wz = wx / speed, wy / speed, wz / speed
        d = erx * wx + ery * wy + erz * wz
        lx, ly, lz = erx - d * wx, ery - d * wy, erz - d * wz
        n = math.sqrt(lx * lx + ly * ly + lz * lz)
        lx, ly, lz = lx / n, ly / n, lz / n
        psi = a.steering_gain * delta
        c, s = math.cos(psi), math.sin(psi)
        cx, cy, cz = wy * lz - wz * ly, wz * lx - wx * lz, wx * ly - wy * lx
        lx, ly, lz = c * lx - s * cx, c * ly - s * cy, c * lz - s * cz
        q = self._rho_a2 * w2
        cd = kd.effective_drag_coeff(a, L, tc.diameter)
        fx = q * (a.lift_coeff * lx + cd * wx)
        fy = q * (a.lift_coeff * ly + cd * wy)
        fz = q * (a.lift_coeff * lz + cd * wz)

        if self.frozen:
            ox, oy, oz = self.p_ok
        else:
            ox, oy, oz = x[6] + self.p_ok[0], x[7] + self.p_ok[1], x[8] + self.p_ok[2]
        px, py, pz = r * erx - ox, r * ery - oy, r * erz - oz
        span = math.sqrt(px * px + py * py + pz * pz)
        tension = td.traction_magnitude(tc, L, span)
        k = tension / span
        tx, ty, tz = k * px, k * py, k * pz        # on platform, towards kite

        mg = m * kd.G
        Ft = etx * fx + ety * fy + etz * fz + mg * ct + m * (2 * rd * thd + r * phd * phd * st * ct)
        Fp = epx * fx + epy * fy + m * (-2 * rd * phd * ct + 2 * r * thd * phd * st)
        Fr = erx * fx + ery * fy + erz * fz - mg * st + m * (r * thd * thd + r * phd * phd * ct * ct)
        if tc.radial_only:
            Fr -= tension
        else:
            Ft -= etx * tx + ety * ty + etz * tz
            Fp -= epx * tx + epy * ty
            Fr -= erx * tx + ery * ty + erz * tz
        mr = m * r
        dk = (thd, phd, rd, -Ft / mr, Fp / (mr * ct), Fr / m)
        return dk, (tx, ty, tz), tension

    def platform_wrench(self, force):
        fx, fy, fz = force
        ox, oy, oz = self.p_ok
        return np.array([fx, fy, fz, oy * fz - oz * fy, oz * fx - ox * fz, ox * fy - oy * fx])

    def derivative(self, x, t, delta, f_exc=None):
        """Full state derivative with the steering input held at ``delta``."""
        xs = x.tolist()
        dk, force, _ = self.kite_and_tether(xs, t, delta)
        out = np.empty(self.size)
        out[KITE] = dk
        if self.frozen:
            out[PLATFORM] = 0.0
            return out
        u = self.platform_wrench(force)
        if f_exc is None and self.excitation is not None:
            f_exc = self.excitation.at(t)
        if f_exc is not None:
            u = u + f_exc
        plat = self.S @ x[PLATFORM]
        plat[6:12] += self.minv @ u
        out[PLATFORM] = plat
        return out

    def initial_state(self):
        cfg = self.cfg
        ks = cfg.initial_kite or default_initial_kite(cfg.length)
        x = np.zeros(self.size)
        x[KITE] = ks.as_array()
        ps = cfg.initial_platform
        if ps is not None and not self.frozen:
            x[6:12] = ps.nu
            x[12:18] = ps.nu_dot
            if self.n_rad and len(ps.radiation_state):
                x[18:] = ps.radiation_state
        return x


def derivative(system, x, t, delta, f_exc=None):
    return system.derivative(x, t, delta, f_exc)


def rk4_step(f, x, t, dt):
    """One classical Runge-Kutta step of ``x' = f(x, t)``."""
    k1 = f(x, t)
    k2 = f(x + 0.5 * dt * k1, t + 0.5 * dt)
    k3 = f(x + 0.5 * dt * k2, t + 0.5 * dt)
    k4 = f(x + dt * k3, t + dt)
    out = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise NonFiniteState(f"non-finite state after step at t={t:.4f} s", t=t, state=x)
    return out


@dataclass
class SimRecord:
    """Control-rate samples of one run plus its event log."""

    t: np.ndarray
    kite: np.ndarray            # (n, 6) theta, phi, r and rates
    nu: np.ndarray              # (n, 6)
    nu_dot: np.ndarray          # (n, 6)
    tether_force: np.ndarray    # (n, 3) force on the platform, inertial frame
    delta: np.ndarray
    target: np.ndarray          # +1 PLUS / -1 MINUS
    length: np.ndarray
    events: list = field(default_factory=list)
    aborted: str | None = None
    transient_eights: int = 5
    settle_time: float = 0.0
    label: str = ""

    @property
    def dt(self):
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else 0.0

    @property
    def tether_magnitude(self):
        return np.linalg.norm(self.tether_force, axis=1)

    def kite_positions(self):
        th, ph, r = self.kite[:, 0], self.kite[:, 1], self.kite[:, 2]
        return np.column_stack([r * np.cos(th) * np.cos(ph), r * np.cos(th) * np.sin(ph),
                                r * np.sin(th)])

    def eight_boundaries(self):
        """Times of MINUS -> PLUS switches, i.e. completed figure-eights."""
        tg = self.target
        idx = np.nonzero((tg[1:] == Target.PLUS) & (tg[:-1] == Target.MINUS))[0] + 1
        return self.t[idx]

    def alternations(self):
        return int(np.count_nonzero(np.diff(self.target) != 0))

    def steady_start(self, n_eights=None):
        """First eight boundary after ``n_eights`` eights and after the platform settle time."""
        n = self.transient_eights if n_eights is None else n_eights
        b = self.eight_boundaries()
        if len(b) <= n:
            raise InsufficientHistory(f"{len(b)} eight boundaries, need more than {n}")
        start = float(b[n]) if n > 0 else float(self.t[0])
        if self.settle_time > start:
            later = b[b >= self.settle_time]
            if not len(later):
                raise InsufficientHistory(
                    f"no eight boundary after the platform settle time {self.settle_time:.0f} s")
            start = float(later[0])
        return start

    def steady_mask(self, n_eights=None):
        return self.t >= self.steady_start(n_eights)

    def traj_frequency(self, n_eights=None, min_cycles=3):
        b = self.eight_boundaries()
        t0 = self.steady_start(n_eights)
        b = b[b >= t0]
        if len(b) < min_cycles + 1:
            raise InsufficientHistory(f"only {max(len(b) - 1, 0)} steady eights")
        return (len(b) - 1) / (b[-1] - b[0])

    def to_csv(self, path):
        """One row per control step; metadata in leading ``# key = value`` lines."""
        data = np.column_stack([self.t, self.kite, self.nu, self.nu_dot, self.tether_force,
                                self.delta, self.target, self.length])
        with open(path, "w") as fh:
            fh.write(f"# label = {self.label}\n# transient_eights = {self.transient_eights}\n"
                     f"# settle_time = {_num(self.settle_time)}\n")
            if self.aborted:
                fh.write(f"# aborted = {self.aborted}\n")
            fh.write(",".join(RECORD_COLUMNS) + "\n")
            for row in data:
                fh.write(",".join(_num(v) for v in row) + "\n")

    def events_to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "kind", "detail"])
            for t, kind, detail in self.events:
                w.writerow([_num(t), kind, detail])

    @classmethod
    def from_csv(cls, path, events_path=None):
        meta = {}
        with open(path) as fh:
            lines = fh.read().splitlines()
        body = []
        for ln in lines:
            if ln.startswith("#"):
                k, _, v = ln[1:].partition("=")
                meta[k.strip()] = v.strip()
            elif ln.strip():
                body.append(ln)
        if not body or body[0].split(",") != list(RECORD_COLUMNS):
            raise ParseError(f"{path}: header must be {','.join(RECORD_COLUMNS)}")
        try:
            data = np.array([[float(v) for v in ln.split(",")] for ln in body[1:]])
        except ValueError as exc:
            raise ParseError(f"{path}: {exc}") from None
        data = data.reshape(-1, len(RECORD_COLUMNS))
        events = []
        if events_path is not None:
            with open(events_path, newline="") as fh:
                rows = list(csv.reader(fh))[1:]
            events = [(float(t), kind, detail) for t, kind, detail in rows]
        return cls(t=data[:, 0], kite=data[:, 1:7], nu=data[:, 7:13], nu_dot=data[:, 13:19],
                   tether_force=data[:, 19:22], delta=data[:, 22],
                   target=data[:, 23].astype(int), length=data[:, 24], events=events,
                   aborted=meta.get("aborted"),
                   transient_eights=int(meta.get("transient_eights", 5)),
                   settle_time=float(meta.get("settle_time", 0.0)),
                   label=meta.get("label", ""))

    def identical_to(self, other):
        return (all(np.array_equal(getattr(self, k), getattr(other, k))
                    for k in ("t", "kite", "nu", "nu_dot", "tether_force", "delta",
                              "target", "length"))
                and self.events == other.events)


def excitation_for(cfg):
    if cfg.onshore or cfg.waves is None:
        return None
    sc = cfg.waves
    if cfg.seed is not None and cfg.seed != sc.seed:
        sc = replace(sc, seed=cfg.seed)
    if sc.hs == 0:
        return None
    duration = max(cfg.duration + 2 * cfg.dt, 10.0 * sc.te)
    return synthesize(sc, duration, cfg.dt)


def run(cfg, excitation=None):
    """Integrate one configuration; returns a :class:`SimRecord`.

    Module errors end the run early and are logged in ``record.events``;
    only :class:`NonFiniteState` propagates.
    """
    problems = cfg.problems()
    if problems:
        raise ValidationError(problems)
    if excitation is None:
        excitation = excitation_for(cfg)
    system = CoupledSystem(cfg, excitation)
    controller = cfg.control.build()
    dt = cfg.dt
    n_sub = cfg.steps_per_control
    n_ctrl = int(round(cfg.duration / cfg.control_period))
    x = system.initial_state()
    events = []
    rows = []
    aborted = None
    delta = 0.0
    broken = False
    rot_warned = False

    def rec(t, x, delta, force):
        rows.append((t, x[KITE].copy(), x[6:12].copy(), x[12:18].copy(), force,
                     delta, int(controller.state.active_target), system.length_at(t)))

    step = 0
    try:
        for _ in range(n_ctrl):
            t = step * dt
            L = system.length_at(t)
            ks = kd.KiteState.from_array(x)
            _, force, tension = system.kite_and_tether(x.tolist(), t, delta)
            if tension > cfg.tether.breaking_load and not broken:
                events.append((t, "tether_break", f"{tension:.4g} N"))
            broken = tension > cfg.tether.breaking_load
            if not rot_warned and np.any(np.abs(x[9:12]) > ROTATION_WARNING):
                events.append((t, "warning", "platform rotation above 0.5 rad"))
                rot_warned = True
            delta = controller.update(t, ks, kd.position(ks), L, events)
            rec(t, x, delta, force)
            for _ in range(n_sub):
                ts = step * dt
                x = rk4_step(lambda y, tt: system.derivative(y, tt, delta), x, ts, dt)
                step += 1
    except NonFiniteState:
        raise
    except AWEError as exc:
        aborted = f"{type(exc).__name__}: {exc}"
        events.append((step * dt, "abort", aborted))
        log.warning("run aborted at t=%.2f s: %s", step * dt, aborted)

    return SimRecord(
        t=np.array([r[0] for r in rows]),
        kite=np.array([r[1] for r in rows]).reshape(-1, 6),
        nu=np.array([r[2] for r in rows]).reshape(-1, 6),
        nu_dot=np.array([r[3] for r in rows]).reshape(-1, 6),
        tether_force=np.array([r[4] for r in rows], dtype=float).reshape(-1, 3),
        delta=np.array([r[5] for r in rows]),
        target=np.array([r[6] for r in rows], dtype=int),
        length=np.array([r[7] for r in rows]),
        events=events, aborted=aborted, transient_eights=cfg.transient_eights,
        settle_time=system.settle_time,
        label=f"L={cfg.length:g} mode={cfg.control.mode}")


def case_config(base, length, mode):
    cfg = copy.copy(base)
    cfg.length = float(length)
    cfg.control = replace(base.control, mode=mode)
    cfg.initial_kite = None if base.initial_kite is None else base.initial_kite
    return cfg


def _run_case(args):
    cfg, = args
    try:
        return run(cfg), None
    except AWEError as exc:
        return None, f"{type(exc).__name__}: {exc}"


def sweep(base, lengths, modes, workers=1):
    """Independent runs over ``lengths x modes`` sharing the wave seed.

    Returns ``(records, summary)`` where ``records`` maps ``(L, mode)`` to a
    :class:`SimRecord` (or None on failure) and ``summary`` is a list of
    rows ``{length, mode, f_traj, fy_peak, yp_peak, eta, error}``.
    """
    from .analysis import summarize

    lengths, modes = list(lengths), list(modes)
    if not lengths or not modes:
        raise ValueError("sweep needs at least one length and one mode")
    keys = [(float(L), m) for m in modes for L in lengths]
    cfgs = [case_config(base, L, m) for L, m in keys]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_case, [(c,) for c in cfgs]))
    else:
        results = [_run_case((c,)) for c in cfgs]
    records, summary = {}, []
    for (L, m), (record, err) in zip(keys, results):
        records[(L, m)] = record
        row = {"length": L, "mode": m, "f_traj": math.nan, "fy_peak": math.nan,
               "yp_peak": math.nan, "eta": math.nan, "error": err or ""}
        if record is not None:
            try:
                rep = summarize(record)
                row.update(f_traj=rep.f_traj, fy_peak=rep.fy_peak, yp_peak=rep.yp_peak,
                           eta=rep.eta)
            except AWEError as exc:
                row["error"] = f"{type(exc).__name__}: {exc}"
            if record.aborted:
                row["error"] = record.aborted
        summary.append(row)
    return records, summary
