"""International Standard Atmosphere and unit conversions.

Altitudes are treated as geopotential metres, which is how the standard
layer table is defined. All computation is SI; imperial units only exist
for the turn-radius formula and for display.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RangeError

G0 = 9.80665  # m/s^2
R_AIR = 287.05  # J/(kg K), dry air
T0 = 288.15  # K
P0 = 101325.0  # Pa

MAX_ALTITUDE_M = 32_000.0
WATER_VAPOR_SCALE_HEIGHT_M = 2_000.0
STANDARD_SURFACE_WATER_VAPOR = 7.5  # g/m^3

# base altitude (m), lapse rate (K/m); the full seven-layer table, though
# only the first three are reachable below MAX_ALTITUDE_M
ISA_LAYERS = (
    (0.0, -0.0065),
    (11_000.0, 0.0),
    (20_000.0, 0.0010),
    (32_000.0, 0.0028),
    (47_000.0, 0.0),
    (51_000.0, -0.0028),
    (71_000.0, -0.0020),
)

MPS_PER_KNOT = 1852.0 / 3600.0  # 0.514444...
M_PER_FT = 0.3048


def _layer_bases():
    """Temperature and pressure at the base of each layer."""
    bases = [(T0, P0)]
    for (h0, lapse), (h1, _) in zip(ISA_LAYERS, ISA_LAYERS[1:]):
        t_b, p_b = bases[-1]
        t_top = t_b + lapse * (h1 - h0)
        if lapse == 0.0:
            p_top = p_b * np.exp(-G0 * (h1 - h0) / (R_AIR * t_b))
        else:
            p_top = p_b * (t_top / t_b) ** (-G0 / (lapse * R_AIR))
        bases.append((t_top, p_top))
    return tuple(bases)


_BASES = _layer_bases()


@dataclass(frozen=True)
class AtmosphereSample:
    altitude_m: float
    temperature_K: float
    pressure_Pa: float
    density_kg_m3: float
    water_vapor_density_g_m3: float

    @property
    def pressure_hPa(self) -> float:
        return self.pressure_Pa / 100.0


def isa_profile(altitude_m, surface_water_vapor_g_m3=STANDARD_SURFACE_WATER_VAPOR):
    """Vectorised ISA state for an array of altitudes.

    Returns ``(temperature_K, pressure_Pa, density_kg_m3, vapor_g_m3)`` as
    arrays broadcast to the shape of ``altitude_m``.
    """
    h = np.asarray(altitude_m, dtype=float)
    if np.any(~np.isfinite(h)) or np.any(h < 0.0) or np.any(h > MAX_ALTITUDE_M):
        raise RangeError(f"altitude must lie in [0, {MAX_ALTITUDE_M:.0f}] m")
    if surface_water_vapor_g_m3 < 0:
        raise RangeError("surface water vapour density must be >= 0")

    temp = np.empty_like(h)
    pres = np.empty_like(h)
    for i, (h0, lapse) in enumerate(ISA_LAYERS):
        upper = ISA_LAYERS[i + 1][0] if i + 1 < len(ISA_LAYERS) else np.inf
        mask = (h >= h0) & (h < upper) if i > 0 else (h < upper)
        if not np.any(mask):
            continue
        t_b, p_b = _BASES[i]
        dh = h[mask] - h0
        if lapse == 0.0:
            temp[mask] = t_b
            pres[mask] = p_b * np.exp(-G0 * dh / (R_AIR * t_b))
        else:
            t = t_b + lapse * dh
            temp[mask] = t
            pres[mask] = p_b * (t / t_b) ** (-G0 / (lapse * R_AIR))
    dens = pres / (R_AIR * temp)
    vapor = surface_water_vapor_g_m3 * np.exp(-h / WATER_VAPOR_SCALE_HEIGHT_M)
    return temp, pres, dens, vapor


def isa_sample(altitude_m: float,
               surface_water_vapor_g_m3: float = STANDARD_SURFACE_WATER_VAPOR) -> AtmosphereSample:
    """Standard atmosphere at a single altitude.

    Water vapour decays exponentially from the surface value with a 2 km
    scale height.

    >>> round(isa_sample(0.0).density_kg_m3, 4)
    1.225
    """
    t, p, d, v = isa_profile(float(altitude_m), surface_water_vapor_g_m3)
    return AtmosphereSample(float(altitude_m), float(t), float(p), float(d), float(v))


def knots_from_mps(v):
    return v / MPS_PER_KNOT


def mps_from_knots(v):
    return v * MPS_PER_KNOT


def feet_from_m(d):
    return d / M_PER_FT


def m_from_feet(d):
    return d * M_PER_FT
