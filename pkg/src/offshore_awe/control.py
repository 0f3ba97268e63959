"""Two-target-point flight controller and resonance-avoiding path planner."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, InsufficientHistory, PathTooNarrow, UndefinedCourse

COURSE_EPS = 1e-9
MIN_DELTA_PHI = 0.02


class Target(enum.IntEnum):
    MINUS = -1
    PLUS = 1


@dataclass(frozen=True)
class TargetPoints:
    p_minus: tuple = (0.6, -0.4)
    p_plus: tuple = (0.6, 0.4)

    def point(self, which):
        return self.p_plus if which == Target.PLUS else self.p_minus

    @property
    def phi_minus(self):
        return self.p_minus[1]

    @property
    def phi_plus(self):
        return self.p_plus[1]


@dataclass
class ControllerState:
    active_target: Target = Target.PLUS
    k_p: float = 2.0
    delta_limit: float = 1.0


@dataclass(frozen=True)
class PlannerConfig:
    f_star: float = 0.0305
    turn_radius: float = 3.0
    theta_min: float = 0.6
    theta_minus: float = 0.6
    v_bar_window: int = 1


def wrap_angle(a):
    """Wrap an angle into (-pi, pi]."""
    w = math.fmod(a + math.pi, 2.0 * math.pi)
    if w <= 0.0:
        w += 2.0 * math.pi
    return w - math.pi


def velocity_angle(state):
    """Course of the kite in the (theta, phi) plane; 0 means climbing."""
    east = state.phi_dot * math.cos(state.theta)
    north = state.theta_dot
    if abs(east) < COURSE_EPS and abs(north) < COURSE_EPS:
        raise UndefinedCourse("kite has no angular velocity")
    return math.atan2(east, north)


def select_target(phi, tp, prev):
    """Algorithm-1 switching with hysteresis inside ``[phi_-, phi_+]``."""
    if phi < tp.phi_minus:
        return Target.PLUS
    if phi > tp.phi_plus:
        return Target.MINUS
    return prev


def gamma_ref(state, active):
    """Course pointing from the kite towards ``active = (theta_a, phi_a)``."""
    east = (active[1] - state.phi) * math.cos(state.theta)
    north = active[0] - state.theta
    if abs(east) < COURSE_EPS and abs(north) < COURSE_EPS:
        raise UndefinedCourse("kite is at the active target point")
    return math.atan2(east, north)


def steering(gamma, gamma_reference, cs):
    delta = cs.k_p * wrap_angle(gamma_reference - gamma)
    return min(max(delta, -cs.delta_limit), cs.delta_limit)


def delta_theta(length, cfg):
    """Elevation span of an up-loop eight with turn radius ``cfg.turn_radius``."""
    arg = 2.0 * cfg.turn_radius / length + math.sin(cfg.theta_minus)
    if arg > 1.0:
        raise GeometryError(f"arcsin argument {arg:.4f} > 1 at L={length:g} m")
    return math.asin(arg) - cfg.theta_min


def delta_phi_star(v_bar, cfg, length, theta_minus=None):
    """Azimuth span giving figure-eights at frequency ``cfg.f_star``."""
    if theta_minus is not None and theta_minus != cfg.theta_minus:
        cfg = PlannerConfig(cfg.f_star, cfg.turn_radius, cfg.theta_min,
                            theta_minus, cfg.v_bar_window)
    dphi = v_bar / (2.0 * cfg.f_star * length) - delta_theta(length, cfg)
    if dphi < MIN_DELTA_PHI:
        raise PathTooNarrow(f"delta_phi*={dphi:.4f} rad below {MIN_DELTA_PHI}")
    return dphi


def predicted_frequency(v_bar, length, d_theta, d_phi):
    """Eight frequency for a path of length ``2 (d_theta + d_phi) L``."""
    return v_bar / (2.0 * (d_theta + d_phi) * length)


def plan_targets(delta_phi, theta_min):
    half = 0.5 * delta_phi
    return TargetPoints(p_minus=(theta_min, -half), p_plus=(theta_min, half))


def estimate_v_bar(positions, times):
    """Mean speed along a sampled inertial path (arc length / elapsed time)."""
    p = np.asarray(positions, dtype=float)
    t = np.asarray(times, dtype=float)
    if p.ndim != 2 or len(p) < 2 or t[-1] <= t[0]:
        raise InsufficientHistory("need a sampled path over a positive time span")
    arc = np.sum(np.linalg.norm(np.diff(p, axis=0), axis=1))
    return float(arc / (t[-1] - t[0]))


def switch_times(phi, dt, tp=None, thresholds=None):
    """Times at which Algorithm 1 would switch to PLUS (MINUS->PLUS events)."""
    if thresholds is None:
        tp = tp or TargetPoints()
        thresholds = (tp.phi_minus, tp.phi_plus)
    lo, hi = thresholds
    state = None
    events = []
    for i, p in enumerate(phi):
        if p < lo and state != Target.PLUS:
            if state is not None:
                events.append(i * dt)
            state = Target.PLUS
        elif p > hi:
            state = Target.MINUS
    return events


def measure_traj_frequency(phi, dt, thresholds=None, min_cycles=3):
    """Figure-eight frequency from complete MINUS->PLUS->MINUS switch cycles.

    ``thresholds`` defaults to the band covering 90 % of the observed azimuth
    range, so that planner-narrowed eights are counted with the same rule.
    """
    phi = np.asarray(phi, dtype=float)
    if thresholds is None:
        span = float(phi.max() - phi.min()) if len(phi) else 0.0
        if span < 1e-9:
            raise InsufficientHistory("azimuth is constant")
        mid = 0.5 * (phi.max() + phi.min())
        thresholds = (mid - 0.45 * span, mid + 0.45 * span)
    events = switch_times(phi, dt, thresholds=thresholds)
    if len(events) < min_cycles + 1:
        raise InsufficientHistory(f"only {max(len(events) - 1, 0)} complete cycles")
    return (len(events) - 1) / (events[-1] - events[0])


@dataclass
class FlightController:
    """Digital navigation loop: target switching, course tracking, planning.

    ``mode`` is ``"baseline"`` (fixed targets) or ``"resonance_avoid"``
    (targets re-planned once per completed figure-eight).
    """

    targets: TargetPoints = field(default_factory=TargetPoints)
    state: ControllerState = field(default_factory=ControllerState)
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    mode: str = "baseline"
    delta: float = 0.0
    _eight_start: float | None = None
    _path: list = field(default_factory=list)
    _times: list = field(default_factory=list)
    _speeds: list = field(default_factory=list)

    def update(self, t, kite_state, kite_pos, length, events=None):
        """Advance one control period; returns the steering input."""
        prev = self.state.active_target
        active = select_target(kite_state.phi, self.targets, prev)
        self._path.append(kite_pos)
        self._times.append(t)
        if active != prev:
            self.state.active_target = active
            if events is not None:
                events.append((t, "switch", active.name))
            if active == Target.PLUS:
                self._complete_eight(t, length, events)
        try:
            gam = velocity_angle(kite_state)
            gref = gamma_ref(kite_state, self.targets.point(active))
            self.delta = steering(gam, gref, self.state)
        except UndefinedCourse:
            self.delta = 0.0
        return self.delta

    def _complete_eight(self, t, length, events):
        if self._eight_start is not None and len(self._path) > 1:
            self._speeds.append(estimate_v_bar(self._path, self._times))
            self._speeds = self._speeds[-self.planner.v_bar_window:]
            if self.mode == "resonance_avoid":
                self._replan(t, length, events)
        self._eight_start = t
        self._path = self._path[-1:]
        self._times = self._times[-1:]

    def _replan(self, t, length, events):
        v_bar = sum(self._speeds) / len(self._speeds)
        try:
            dphi = delta_phi_star(v_bar, self.planner, length)
        except (GeometryError, PathTooNarrow) as exc:
            if events is not None:
                events.append((t, "planner_error", str(exc)))
            return
        self.targets = plan_targets(dphi, self.planner.theta_min)
        if events is not None:
            events.append((t, "replan", f"v_bar={v_bar:.3f} dphi={dphi:.5f}"))

    @property
    def v_bar_history(self):
        return list(self._speeds)


@dataclass(frozen=True)
class ControlConfig:
    """Everything needed to build a :class:`FlightController`."""

    targets: TargetPoints = field(default_factory=TargetPoints)
    k_p: float = 2.0
    delta_limit: float = 1.0
    mode: str = "baseline"
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    initial_target: Target = Target.PLUS

    def build(self):
        if self.mode not in ("baseline", "resonance_avoid"):
            raise ValueError(f"unknown controller mode {self.mode!r}")
        return FlightController(
            targets=self.targets,
            state=ControllerState(self.initial_target, self.k_p, self.delta_limit),
            planner=self.planner, mode=self.mode)
