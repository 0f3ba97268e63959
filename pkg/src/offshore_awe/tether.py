"""Elastic tether: lumped mass, length-dependent stiffness and traction wrench."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BreakError, DegenerateGeometry


@dataclass(frozen=True)
class TetherConfig:
    diameter: float = 0.035
    density: float = 980.0
    breaking_load: float = 490e3
    breaking_elongation: float = 0.03
    exit_point_body: tuple = (0.0, 0.0, 7.8475)
    radial_only: bool = False

    def exit_point(self):
        return np.asarray(self.exit_point_body, dtype=float)


@dataclass
class TetherWrench:
    """Traction acting on the platform and its counterpart on the kite.

    ``force_on_kite`` is the inertial-frame vector; its projection on the
    kite's local basis is left to the caller, which owns the basis.
    """

    force_on_platform: np.ndarray
    moment_on_platform: np.ndarray
    force_on_kite: np.ndarray
    magnitude: float = 0.0
    broken: bool = False
    span: float = 0.0
    direction: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def as_wrench(self):
        return np.concatenate([self.force_on_platform, self.moment_on_platform])


def effective_mass(kite_mass, cfg, length):
    """Kite mass plus half the tether mass."""
    return kite_mass + cfg.density * math.pi * cfg.diameter ** 2 * length / 8.0


def spring_coefficient(cfg, length):
    return cfg.breaking_load / (cfg.breaking_elongation * length)


def traction_magnitude(cfg, length, span_distance, *, strict=False):
    """Pulling force of the tether spring, zero when slack.

    Exceeding the breaking load is a diagnostic: with ``strict=True`` a
    :class:`BreakError` is raised, otherwise the force is returned as is and
    the caller checks it against ``cfg.breaking_load``.
    """
    if span_distance <= length:
        force = 0.0
    else:
        force = cfg.breaking_load * ((span_distance - length) / length) / cfg.breaking_elongation
    if strict and force > cfg.breaking_load:
        raise BreakError(f"tether traction {force:.4g} N above breaking load",
                         force=force)
    return force


def traction_wrench(kite_pos_inertial, platform_displacement, cfg, length):
    """Tether force/moment on the platform and the opposite pull on the kite.

    The exit-point offset is kept fixed in the inertial frame; the moment is
    taken about the platform centre of gravity as ``P_OK x F``.
    """
    p_ok = cfg.exit_point()
    exit_point = np.asarray(platform_displacement, dtype=float)[:3] + p_ok
    p_k_kl = np.asarray(kite_pos_inertial, dtype=float) - exit_point
    span = math.sqrt(float(p_k_kl @ p_k_kl))
    if span <= 0.0:
        raise DegenerateGeometry("kite coincides with the tether exit point")
    direction = p_k_kl / span
    mag = traction_magnitude(cfg, length, span)
    force = mag * direction
    moment = np.cross(p_ok, force)
    return TetherWrench(force_on_platform=force, moment_on_platform=moment,
                        force_on_kite=-force, magnitude=mag,
                        broken=mag > cfg.breaking_load, span=span,
                        direction=direction)
