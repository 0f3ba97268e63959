"""Point-mass kite: local frame, force contributions and equations of motion.

Angles follow the convention of the position vector

    p = r (cos(theta) cos(phi), cos(theta) sin(phi), sin(theta))

with ``theta`` the elevation above the sea plane and ``phi`` the azimuth from
the downwind x-axis. The local basis ``(e_theta, e_phi, e_r)`` is the one
built on the colatitude ``pi/2 - theta``: ``e_theta`` points towards
*decreasing* elevation, ``e_phi`` towards increasing azimuth and ``e_r``
radially outwards. Consequently a positive ``F_theta`` lowers the kite, and
the azimuth equation carries ``cos(theta)``, degenerating at the zenith.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularityError, StallError

G = 9.81
STALL_SPEED = 0.1
TETHER_DRAG_COEFF = 1.2


@dataclass(frozen=True)
class KiteState:
    theta: float
    phi: float
    r: float
    theta_dot: float = 0.0
    phi_dot: float = 0.0
    r_dot: float = 0.0

    def as_array(self):
        return np.array([self.theta, self.phi, self.r,
                         self.theta_dot, self.phi_dot, self.r_dot])

    @classmethod
    def from_array(cls, x):
        return cls(*(float(v) for v in x[:6]))


@dataclass(frozen=True)
class AeroParams:
    area: float = 360.0
    lift_coeff: float = 0.72
    drag_coeff: float = 0.108
    air_density: float = 1.225
    steering_gain: float = 0.075
    wingspan: float = 16.0
    tether_drag_coeff: float = TETHER_DRAG_COEFF


@dataclass(frozen=True)
class LocalForces:
    """Force resultant expressed in ``(e_theta, e_phi, e_r)``, in N."""

    f_theta: float
    f_phi: float
    f_r: float

    def __add__(self, other):
        return LocalForces(self.f_theta + other.f_theta,
                           self.f_phi + other.f_phi,
                           self.f_r + other.f_r)

    def __neg__(self):
        return LocalForces(-self.f_theta, -self.f_phi, -self.f_r)

    def as_array(self):
        return np.array([self.f_theta, self.f_phi, self.f_r])

    @classmethod
    def from_array(cls, v):
        return cls(float(v[0]), float(v[1]), float(v[2]))


ZERO_FORCES = LocalForces(0.0, 0.0, 0.0)


def local_basis(theta, phi):
    """Return the 3x3 matrix whose columns are ``e_theta, e_phi, e_r``."""
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    return np.array([
        [st * cp, -sp, ct * cp],
        [st * sp, cp, ct * sp],
        [-ct, 0.0, st],
    ])


def position(state):
    """Cartesian kite position in the inertial frame, measured from O_W."""
    ct = math.cos(state.theta)
    return state.r * np.array([ct * math.cos(state.phi),
                               ct * math.sin(state.phi),
                               math.sin(state.theta)])


def local_velocity(state):
    """Kite velocity components along ``(e_theta, e_phi, e_r)``."""
    return np.array([-state.r * state.theta_dot,
                     state.r * math.cos(state.theta) * state.phi_dot,
                     state.r_dot])


def velocity(state):
    return local_basis(state.theta, state.phi) @ local_velocity(state)


def gravity_local(mass, theta):
    """Weight ``(0, 0, -m g)`` projected on the local basis."""
    return LocalForces(mass * G * math.cos(theta), 0.0,
                       -mass * G * math.sin(theta))


def apparent_local(state, mass):
    """Fictitious forces of the rotating spherical frame.

    Together with :func:`kite_accelerations` these reproduce ``m * d2p/dt2`` in
    Cartesian coordinates, so only physical forces need to be summed besides.
    """
    th, r = state.theta, state.r
    thd, phd, rd = state.theta_dot, state.phi_dot, state.r_dot
    st, ct = math.sin(th), math.cos(th)
    return LocalForces(
        mass * (2.0 * rd * thd + r * phd * phd * st * ct),
        mass * (-2.0 * rd * phd * ct + 2.0 * r * thd * phd * st),
        mass * (r * thd * thd + r * phd * phd * ct * ct),
    )


def effective_drag_coeff(params, tether_length, tether_diameter):
    """Kite drag coefficient augmented by the lumped tether drag."""
    return (params.drag_coeff
            + params.tether_drag_coeff * tether_diameter * tether_length
            / (4.0 * params.area))


def aero_force_inertial(state, wind, params, delta, tether_length,
                        tether_diameter, platform_exit_velocity=None):
    """Aerodynamic force in the inertial frame (N).

    Lift is perpendicular to the apparent wind ``W_e``, lying in the plane of
    ``W_e`` and ``e_r`` before being rolled by ``psi = steering_gain * delta``
    about the airspeed axis ``-W_e``. A positive roll turns the course angle
    towards positive values.
    """
    basis = local_basis(state.theta, state.phi)
    e_r = basis[:, 2]
    v_kite = basis @ local_velocity(state)
    if platform_exit_velocity is not None:
        v_kite = v_kite + np.asarray(platform_exit_velocity, dtype=float)
    w_e = np.asarray(wind, dtype=float) - v_kite
    speed = math.sqrt(float(w_e @ w_e))
    if speed <= STALL_SPEED:
        raise StallError(f"apparent wind speed {speed:.3g} m/s at kite")
    w_hat = w_e / speed
    lift_dir = e_r - (e_r @ w_hat) * w_hat
    norm = math.sqrt(float(lift_dir @ lift_dir))
    if norm < 1e-12:
        raise StallError("apparent wind aligned with tether; lift undefined")
    lift_dir /= norm
    psi = params.steering_gain * delta
    # rotation about x_w = -w_hat; lift_dir is orthogonal to the axis
    lift_dir = math.cos(psi) * lift_dir - math.sin(psi) * np.cross(w_hat, lift_dir)
    q = 0.5 * params.air_density * params.area * speed * speed
    cd = effective_drag_coeff(params, tether_length, tether_diameter)
    return q * (params.lift_coeff * lift_dir + cd * w_hat)


def aero_local(state, wind, platform_exit_velocity, params, delta,
               tether_length, tether_diameter):
    f = aero_force_inertial(state, wind, params, delta, tether_length,
                            tether_diameter, platform_exit_velocity)
    return LocalForces.from_array(local_basis(state.theta, state.phi).T @ f)


def kite_accelerations(forces, mass, r, theta):
    """Angular and radial accelerations from the local force resultant.

    ``forces`` must include the apparent terms of :func:`apparent_local`.
    """
    ct = math.cos(theta)
    if abs(ct) < 1e-6:
        raise SingularityError(f"kite at zenith (theta={theta:.6g})")
    mr = mass * r
    return (-forces.f_theta / mr, forces.f_phi / (mr * ct), forces.f_r / mass)


def cartesian_acceleration(state, accels):
    """Map ``(theta_dd, phi_dd, r_dd)`` back to the inertial acceleration."""
    th, ph, r = state.theta, state.phi, state.r
    thd, phd, rd = state.theta_dot, state.phi_dot, state.r_dot
    thdd, phdd, rdd = accels
    st, ct, sp, cp = math.sin(th), math.cos(th), math.sin(ph), math.cos(ph)
    # second derivatives of r*cos(th)*cos(ph), r*cos(th)*sin(ph), r*sin(th)
    rho = r * ct
    rho_d = rd * ct - r * st * thd
    rho_dd = rdd * ct - 2 * rd * st * thd - r * ct * thd * thd - r * st * thdd
    ax = rho_dd * cp - 2 * rho_d * sp * phd - rho * (cp * phd * phd + sp * phdd)
    ay = rho_dd * sp + 2 * rho_d * cp * phd + rho * (-sp * phd * phd + cp * phdd)
    az = rdd * st + 2 * rd * ct * thd - r * st * thd * thd + r * ct * thdd
    return np.array([ax, ay, az])
