"""Atmospheric attenuation: gases, rain, cloud/fog liquid water, and laser.

* gaseous: ITU-R P.676 Annex 1 line-by-line summation (oxygen + water vapour)
* rain: ITU-R P.838 power law with coefficients interpolated from a table
* cloud/fog: ITU-R P.840 Rayleigh model with double-Debye water permittivity
* laser: fixed 1550 nm losses per visibility class
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import data
from .atmosphere import (MAX_ALTITUDE_M, STANDARD_SURFACE_WATER_VAPOR,
                         AtmosphereSample, isa_profile)
from .errors import DomainError, OutOfValidityError, RangeError
from .geometry import Position3D, elevation_angle, slant_distance

F_MIN_GHZ = 1.0
F_MAX_GHZ = 100.0
T_WATER_MIN_K = 233.0
T_WATER_MAX_K = 313.0
MIN_ELEVATION_DEG = 5.0
DEFAULT_LIQUID_TEMP_K = 273.15
DEFAULT_RAIN_TOP_M = 1700.0
PATH_STEP_M = 100.0


class VisibilityClass(str, Enum):
    CLEAR = "clear"
    HAZE = "haze"
    HEAVY_FOG = "heavy_fog"


# 1550 nm specific loss, dB/km
LASER_LOSS_DB_KM = {
    VisibilityClass.CLEAR: 0.2,
    VisibilityClass.HAZE: 4.0,
    VisibilityClass.HEAVY_FOG: 272.0,
}


@dataclass(frozen=True)
class WeatherProfile:
    """Horizontally uniform, vertically layered weather.

    Rain fills ``[0, rain_top_m]``, fog fills ``[0, fog_top_m]`` and cloud
    fills ``[cloud_base_m, cloud_top_m]``. Altitudes are above ground.
    """

    rain_rate_mm_h: float = 0.0
    rain_top_m: float = DEFAULT_RAIN_TOP_M
    rain_polarization: str = "H"
    fog_lwd_g_m3: float = 0.0
    fog_top_m: float = 0.0
    cloud_lwd_g_m3: float = 0.0
    cloud_base_m: float = 0.0
    cloud_top_m: float = 0.0
    liquid_water_temp_K: float = DEFAULT_LIQUID_TEMP_K
    surface_water_vapor_g_m3: float = STANDARD_SURFACE_WATER_VAPOR
    visibility_class: VisibilityClass = VisibilityClass.CLEAR

    def __post_init__(self):
        object.__setattr__(self, "visibility_class", VisibilityClass(self.visibility_class))
        _polarization_tau(self.rain_polarization)
        for name in ("rain_rate_mm_h", "rain_top_m", "fog_lwd_g_m3", "fog_top_m",
                     "cloud_lwd_g_m3", "cloud_base_m", "cloud_top_m",
                     "surface_water_vapor_g_m3"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise DomainError(f"{name} must be a finite value >= 0, got {value}")
        if self.fog_lwd_g_m3 > 1.0:
            raise DomainError("fog liquid water density above 1 g/m^3 is not plausible")
        if self.cloud_lwd_g_m3 > 5.0:
            raise DomainError("cloud liquid water density above 5 g/m^3 is not plausible")
        if self.cloud_lwd_g_m3 > 0 and not self.cloud_top_m > self.cloud_base_m:
            raise DomainError("cloud_top_m must exceed cloud_base_m")
        if not T_WATER_MIN_K <= self.liquid_water_temp_K <= T_WATER_MAX_K:
            raise RangeError("liquid water temperature outside 233-313 K")


@dataclass(frozen=True)
class AttenuationBreakdown:
    gaseous_dB: float
    rain_dB: float
    cloud_dB: float
    fog_dB: float

    @property
    def total_dB(self) -> float:
        return self.gaseous_dB + self.rain_dB + self.cloud_dB + self.fog_dB


def _check_frequency(f):
    f = np.asarray(f, dtype=float)
    if np.any(~np.isfinite(f)) or np.any(f < F_MIN_GHZ) or np.any(f > F_MAX_GHZ):
        raise RangeError(f"frequency must lie in [{F_MIN_GHZ:g}, {F_MAX_GHZ:g}] GHz")
    return f


# --- gaseous ---------------------------------------------------------------

def _line_shape(f, f0, width, delta):
    return f / f0 * ((width - delta * (f0 - f)) / ((f0 - f) ** 2 + width ** 2)
                     + (width - delta * (f0 + f)) / ((f0 + f) ** 2 + width ** 2))


def gaseous_components(f, pressure_hPa, temperature_K, vapor_g_m3):
    """Oxygen and water-vapour specific attenuation (dB/km), unvalidated.

    Arguments broadcast against each other; ``pressure_hPa`` is total
    pressure. Returns ``(oxygen, water)``.
    """
    f = np.asarray(f, dtype=float)[..., None]
    temp = np.asarray(temperature_K, dtype=float)[..., None]
    rho = np.asarray(vapor_g_m3, dtype=float)[..., None]
    theta = 300.0 / temp
    e = rho * temp / 216.7  # water vapour partial pressure, hPa
    p = np.asarray(pressure_hPa, dtype=float)[..., None] - e  # dry air

    ox = data.oxygen_lines()
    a1, a2, a3, a4, a5, a6 = ox.c
    strength = a1 * 1e-7 * p * theta ** 3 * np.exp(a2 * (1.0 - theta))
    width = a3 * 1e-4 * (p * theta ** (0.8 - a4) + 1.1 * e * theta)
    width = np.sqrt(width ** 2 + 2.25e-6)
    delta = (a5 + a6 * theta) * 1e-4 * (p + e) * theta ** 0.8
    lines_o = np.sum(strength * _line_shape(f, ox.f0, width, delta), axis=-1)

    # dry-air continuum: Debye spectrum of oxygen + pressure-induced nitrogen
    f_ = f[..., 0]
    p_ = p[..., 0]
    th = theta[..., 0]
    d = 5.6e-4 * (p_ + e[..., 0]) * th ** 0.8
    continuum = f_ * p_ * th ** 2 * (
        6.14e-5 / (d * (1.0 + (f_ / d) ** 2))
        + 1.4e-12 * p_ * th ** 1.5 / (1.0 + 1.9e-5 * f_ ** 1.5)
    )
    gamma_o = 0.182 * f_ * (lines_o + continuum)

    wv = data.water_lines()
    b1, b2, b3, b4, b5, b6 = wv.c
    strength = b1 * 1e-1 * e * theta ** 3.5 * np.exp(b2 * (1.0 - theta))
    width = b3 * 1e-4 * (p * theta ** b4 + b5 * e * theta ** b6)
    width = 0.535 * width + np.sqrt(0.217 * width ** 2 + 2.1316e-12 * wv.f0 ** 2 / theta)
    lines_w = np.sum(strength * _line_shape(f, wv.f0, width, 0.0), axis=-1)
    gamma_w = 0.182 * f_ * lines_w
    return gamma_o, gamma_w


def gaseous_specific_attenuation(frequency_GHz: float, sample: AtmosphereSample) -> float:
    """Total (dry air + water vapour) specific attenuation in dB/km."""
    f = _check_frequency(frequency_GHz)
    g_o, g_w = gaseous_components(f, sample.pressure_hPa, sample.temperature_K,
                                  sample.water_vapor_density_g_m3)
    return float(g_o + g_w)


# --- rain ------------------------------------------------------------------

@dataclass(frozen=True)
class RainCoefficients:
    frequency_GHz: float
    k: float
    alpha: float


def _polarization_tau(polarization: str) -> float:
    pol = str(polarization).lower()
    if pol in ("h", "horizontal"):
        return 0.0
    if pol in ("v", "vertical"):
        return 90.0
    if pol in ("c", "circular"):
        return 45.0
    raise DomainError(f"unknown polarization {polarization!r}")


def rain_coefficients(frequency_GHz: float, polarization: str = "H") -> RainCoefficients:
    """k and alpha at ``frequency_GHz``.

    k is interpolated linearly in log(f)/log(k), alpha linearly in log(f).
    Circular polarisation combines the H and V values with tau = 45 deg.
    """
    f = float(_check_frequency(frequency_GHz))
    tau = _polarization_tau(polarization)
    table = data.rain_table()
    lf = math.log10(f)
    lfs = np.log10(table[:, 0])
    kh = 10 ** float(np.interp(lf, lfs, np.log10(table[:, 1])))
    ah = float(np.interp(lf, lfs, table[:, 2]))
    kv = 10 ** float(np.interp(lf, lfs, np.log10(table[:, 3])))
    av = float(np.interp(lf, lfs, table[:, 4]))
    if tau == 0.0:
        return RainCoefficients(f, kh, ah)
    if tau == 90.0:
        return RainCoefficients(f, kv, av)
    k = (kh + kv) / 2.0
    return RainCoefficients(f, k, (kh * ah + kv * av) / (2.0 * k))


def rain_specific_attenuation(frequency_GHz: float, rain_rate_mm_h: float,
                              polarization: str = "H") -> float:
    """``k * R**alpha`` in dB/km."""
    if not rain_rate_mm_h >= 0:
        raise DomainError("rain rate must be >= 0")
    c = rain_coefficients(frequency_GHz, polarization)
    if rain_rate_mm_h == 0:
        return 0.0
    return c.k * rain_rate_mm_h ** c.alpha


# --- cloud and fog ---------------------------------------------------------

def water_permittivity(frequency_GHz, temperature_K):
    """Complex permittivity of liquid water, double-Debye model.

    Returns ``(eps_real, eps_imag)`` with ``eps_imag`` positive.
    """
    f = np.asarray(frequency_GHz, dtype=float)
    theta = 300.0 / np.asarray(temperature_K, dtype=float)
    eps0 = 77.66 + 103.3 * (theta - 1.0)
    eps1 = 0.0671 * eps0
    eps2 = 3.52
    fp = 20.20 - 146.0 * (theta - 1.0) + 316.0 * (theta - 1.0) ** 2  # principal relaxation, GHz
    fs = 39.8 * fp  # secondary relaxation, GHz
    eps_imag = (f * (eps0 - eps1) / (fp * (1.0 + (f / fp) ** 2))
                + f * (eps1 - eps2) / (fs * (1.0 + (f / fs) ** 2)))
    eps_real = ((eps0 - eps1) / (1.0 + (f / fp) ** 2)
                + (eps1 - eps2) / (1.0 + (f / fs) ** 2) + eps2)
    return eps_real, eps_imag


def liquid_water_coefficient(frequency_GHz, temperature_K=DEFAULT_LIQUID_TEMP_K):
    """K_l in (dB/km)/(g/m^3)."""
    f = _check_frequency(frequency_GHz)
    t = np.asarray(temperature_K, dtype=float)
    if np.any(t < T_WATER_MIN_K) or np.any(t > T_WATER_MAX_K):
        raise RangeError("liquid water temperature outside 233-313 K")
    eps_r, eps_i = water_permittivity(f, t)
    eta = (2.0 + eps_r) / eps_i
    kl = 0.819 * f / (eps_i * (1.0 + eta ** 2))
    return float(kl) if np.ndim(kl) == 0 else kl


def cloud_fog_specific_attenuation(frequency_GHz: float, lwd_g_m3: float,
                                   liquid_temp_K: float = DEFAULT_LIQUID_TEMP_K) -> float:
    if not lwd_g_m3 >= 0:
        raise DomainError("liquid water density must be >= 0")
    return liquid_water_coefficient(frequency_GHz, liquid_temp_K) * lwd_g_m3


def columnar_cloud_attenuation(L_kg_m2: float, frequency_GHz: float, elevation_deg: float,
                               liquid_temp_K: float = DEFAULT_LIQUID_TEMP_K) -> float:
    """Slant attenuation (dB) through a column holding ``L_kg_m2`` of liquid water."""
    if not 5.0 <= elevation_deg <= 90.0:
        raise OutOfValidityError("columnar cloud model is valid for elevations of 5-90 deg")
    if not L_kg_m2 >= 0:
        raise DomainError("columnar liquid water must be >= 0")
    kl = liquid_water_coefficient(frequency_GHz, liquid_temp_K)
    return L_kg_m2 * kl / math.sin(math.radians(elevation_deg))


# --- slant paths -----------------------------------------------------------

def _path_layers(profile: WeatherProfile, z_low: float, z_high: float, step: float):
    """Segment altitude boundaries between ``z_low`` and ``z_high``.

    A uniform grid no coarser than ``step`` refined at every weather-layer
    boundary, so no segment straddles the edge of a layer.
    """
    n = max(1, math.ceil((z_high - z_low) / step - 1e-9))
    edges = set(np.linspace(z_low, z_high, n + 1).tolist())
    for z in (profile.rain_top_m, profile.fog_top_m, profile.cloud_base_m, profile.cloud_top_m):
        if z_low < z < z_high:
            edges.add(float(z))
    return np.array(sorted(edges))


def path_attenuation_sweep(profile: WeatherProfile, a: Position3D, b: Position3D,
                           frequencies_GHz, step_m: float = PATH_STEP_M):
    """Component attenuations (dB) along a straight path for many frequencies.

    Returns a dict of arrays keyed ``gaseous_dB``, ``rain_dB``, ``cloud_dB``,
    ``fog_dB``, each shaped like ``frequencies_GHz``.
    """
    f = _check_frequency(frequencies_GHz)
    if not step_m > 0:
        raise DomainError("integration step must be positive")
    for p in (a, b):
        if not 0 <= p.z <= MAX_ALTITUDE_M:
            raise RangeError("path endpoints must lie within 0-32 km altitude")
    if a.z == b.z:
        raise OutOfValidityError("horizontal path: elevation below 5 deg")
    elevation = abs(elevation_angle(a, b))
    if elevation < MIN_ELEVATION_DEG:
        raise OutOfValidityError(f"path elevation {elevation:.2f} deg is below 5 deg")

    z_low, z_high = sorted((a.z, b.z))
    edges = _path_layers(profile, z_low, z_high, step_m)
    mids = 0.5 * (edges[1:] + edges[:-1])
    # slant length of each segment, in km
    seg_km = np.diff(edges) * (slant_distance(a, b) / (z_high - z_low)) / 1000.0

    temp, pres, _, vapor = isa_profile(mids, profile.surface_water_vapor_g_m3)
    g_o, g_w = gaseous_components(f[..., None], pres / 100.0, temp, vapor)
    gaseous = np.sum((g_o + g_w) * seg_km, axis=-1)

    zeros = np.zeros_like(f)
    rain = zeros
    if profile.rain_rate_mm_h > 0:
        in_rain = np.sum(seg_km[mids < profile.rain_top_m])
        gamma = np.array([rain_specific_attenuation(fi, profile.rain_rate_mm_h,
                                                    profile.rain_polarization)
                          for fi in np.ravel(f)]).reshape(f.shape)
        rain = gamma * in_rain

    kl = None
    fog = zeros
    if profile.fog_lwd_g_m3 > 0:
        kl = liquid_water_coefficient(f, profile.liquid_water_temp_K)
        fog = kl * profile.fog_lwd_g_m3 * np.sum(seg_km[mids < profile.fog_top_m])
    cloud = zeros
    if profile.cloud_lwd_g_m3 > 0:
        if kl is None:
            kl = liquid_water_coefficient(f, profile.liquid_water_temp_K)
        inside = (mids >= profile.cloud_base_m) & (mids <= profile.cloud_top_m)
        cloud = kl * profile.cloud_lwd_g_m3 * np.sum(seg_km[inside])

    return {"gaseous_dB": gaseous, "rain_dB": rain, "cloud_dB": cloud, "fog_dB": fog}


def path_attenuation(profile: WeatherProfile, a: Position3D, b: Position3D,
                     frequency_GHz: float, step_m: float = PATH_STEP_M) -> AttenuationBreakdown:
    parts = path_attenuation_sweep(profile, a, b, float(frequency_GHz), step_m)
    return AttenuationBreakdown(**{k: float(v) for k, v in parts.items()})


def laser_specific_loss(visibility_class) -> float:
    """Specific loss of a 1550 nm beam in dB/km."""
    return LASER_LOSS_DB_KM[VisibilityClass(visibility_class)]
