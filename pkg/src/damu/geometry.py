"""Cruise-circle geometry, elevation angles and line-of-sight spreads.

Flat-Earth Cartesian frame: x/y horizontal, z is altitude above ground,
all in metres.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .atmosphere import feet_from_m, knots_from_mps, m_from_feet
from .errors import DegenerateGeometryError, DomainError

TURN_CONSTANT = 11.26  # ft * kn^-2, banked-turn rule of thumb
SPREAD_SAMPLES = 3600


@dataclass(frozen=True)
class Position3D:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if self.z < 0:
            raise DomainError(f"altitude must be >= 0, got {self.z}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


def turn_radius_ft(speed: float, bank_angle_deg: float) -> float:
    if not speed > 0:
        raise DomainError("speed must be positive")
    if bank_angle_deg == 0:
        raise DomainError("zero bank angle gives an infinite turn radius")
    if not 0 < bank_angle_deg < 90:
        raise DomainError("bank angle must lie strictly between 0 and 90 degrees")
    v_kn = knots_from_mps(speed)
    return v_kn * v_kn / (TURN_CONSTANT * math.tan(math.radians(bank_angle_deg)))


def turn_radius(speed: float, bank_angle_deg: float) -> float:
    """Level-turn radius in metres for a speed in m/s and bank in degrees.

    Evaluated in imperial units (knots in, feet out) and converted back.
    """
    return m_from_feet(turn_radius_ft(speed, bank_angle_deg))


@dataclass(frozen=True)
class CircularCruise:
    """Fixed-wing loiter circle flown at constant speed and bank.

    Phase convention: at ``t = 0`` the aircraft is at ``center + (R, 0)``
    and it flies counter-clockwise seen from above.
    """

    center_xy: tuple[float, float]
    altitude_m: float
    speed_mps: float
    bank_angle_deg: float
    radius_m: float = field(init=False)
    period_s: float = field(init=False)

    def __post_init__(self):
        if self.altitude_m < 0:
            raise DomainError("cruise altitude must be >= 0")
        r = turn_radius(self.speed_mps, self.bank_angle_deg)
        object.__setattr__(self, "center_xy", (float(self.center_xy[0]), float(self.center_xy[1])))
        object.__setattr__(self, "radius_m", r)
        object.__setattr__(self, "period_s", 2.0 * math.pi * r / self.speed_mps)

    @property
    def center(self) -> Position3D:
        return Position3D(self.center_xy[0], self.center_xy[1], self.altitude_m)

    def points(self, n: int = SPREAD_SAMPLES) -> np.ndarray:
        """``n`` evenly spaced points around the circle, shape ``(n, 3)``."""
        phase = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        return _circle_points(self.center_xy, self.altitude_m, self.radius_m, phase)


def _circle_points(center_xy, altitude, radius, phase):
    phase = np.asarray(phase, dtype=float)
    return np.stack(
        [center_xy[0] + radius * np.cos(phase),
         center_xy[1] + radius * np.sin(phase),
         np.full_like(phase, altitude)],
        axis=-1,
    )


def cruise_position(cruise: CircularCruise, t: float) -> Position3D:
    phase = 2.0 * math.pi * (t / cruise.period_s)
    x, y, z = _circle_points(cruise.center_xy, cruise.altitude_m, cruise.radius_m, phase)
    return Position3D(float(x), float(y), float(z))


def slant_distance(a: Position3D, b: Position3D) -> float:
    return math.sqrt((b.x - a.x) ** 2 + (b.y - a.y) ** 2 + (b.z - a.z) ** 2)


def elevation_angle(observer: Position3D, target: Position3D) -> float:
    """Signed elevation of ``target`` seen from ``observer``, in degrees."""
    horiz = math.hypot(target.x - observer.x, target.y - observer.y)
    dz = target.z - observer.z
    if horiz == 0 and dz == 0:
        raise DegenerateGeometryError("observer and target coincide")
    return math.degrees(math.atan2(dz, horiz))


def angle_between(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Angle in radians between vectors along the last axis.

    Uses atan2(|u x v|, u.v), which stays accurate for sub-degree angles.
    """
    cross = np.linalg.norm(np.cross(u, v), axis=-1)
    dot = np.sum(u * v, axis=-1)
    return np.arctan2(cross, dot)


def max_pairwise_angle(directions: np.ndarray, chunk: int = 512) -> float:
    """Largest angle (radians) between any two rows of ``directions``."""
    d = np.asarray(directions, dtype=float)
    d = d / np.linalg.norm(d, axis=1, keepdims=True)
    # the widest pair has the smallest dot product; locate it by matrix
    # product, then evaluate that pair with the well-conditioned formula
    best_dot, best_pair = np.inf, (0, 0)
    for start in range(0, len(d), chunk):
        dots = d[start:start + chunk] @ d.T
        i, j = np.unravel_index(np.argmin(dots), dots.shape)
        if dots[i, j] < best_dot:
            best_dot, best_pair = dots[i, j], (start + i, j)
    return float(angle_between(d[best_pair[0]], d[best_pair[1]]))


def angular_spread(observer: Position3D, cruise: CircularCruise,
                   mode: Literal["full_span", "half_angle"] = "full_span",
                   samples: int = SPREAD_SAMPLES) -> float:
    """Spread of line-of-sight directions from ``observer`` to the circle, degrees.

    ``half_angle``: largest angle between the sight line to the circle
    centre and the sight line to any point on the circle.
    ``full_span``: largest angle between sight lines to any two points.
    """
    if mode not in ("full_span", "half_angle"):
        raise ValueError(f"unknown mode {mode!r}")
    if cruise.radius_m == 0:
        return 0.0
    obs = observer.as_array()
    offset = np.hypot(obs[0] - cruise.center_xy[0], obs[1] - cruise.center_xy[1])
    if obs[2] == cruise.altitude_m and offset <= cruise.radius_m:
        raise DegenerateGeometryError("observer lies on the cruise circle's disk")

    los = cruise.points(samples) - obs
    if mode == "half_angle":
        to_center = cruise.center.as_array() - obs
        return math.degrees(float(angle_between(los, to_center[None, :]).max()))
    return math.degrees(max_pairwise_angle(los))


def los_deviation(observer_track: np.ndarray, target_track: np.ndarray) -> float:
    """Full span (degrees) of the sight-line directions between two tracks.

    Each track is an ``(n, 3)`` array of positions sampled at the same times.
    """
    los = np.asarray(target_track, dtype=float) - np.asarray(observer_track, dtype=float)
    if len(los) < 2:
        return 0.0
    return math.degrees(max_pairwise_angle(los))


__all__ = [
    "CircularCruise", "Position3D", "angular_spread", "cruise_position",
    "elevation_angle", "feet_from_m", "los_deviation", "slant_distance",
    "turn_radius", "turn_radius_ft",
]
