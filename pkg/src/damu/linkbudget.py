"""RF link budgets and laser power-beaming budgets."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .attenuation import (F_MAX_GHZ, F_MIN_GHZ, WeatherProfile, laser_specific_loss,
                          path_attenuation)
from .errors import DomainError
from .geometry import Position3D, elevation_angle, slant_distance

C_LIGHT = 299_792_458.0  # m/s


@dataclass(frozen=True)
class RadioConfig:
    tx_power_dBm: float
    tx_gain_dBi: float
    rx_gain_dBi: float
    frequency_GHz: float
    rx_sensitivity_dBm: float

    def __post_init__(self):
        if not F_MIN_GHZ <= self.frequency_GHz <= F_MAX_GHZ:
            raise DomainError(f"frequency {self.frequency_GHz} GHz outside [1, 100] GHz")
        for name in ("tx_gain_dBi", "rx_gain_dBi"):
            if not -10.0 <= getattr(self, name) <= 60.0:
                raise DomainError(f"{name} must lie in [-10, 60] dBi")

    @property
    def eirp_dBm(self) -> float:
        return self.tx_power_dBm + self.tx_gain_dBi


@dataclass(frozen=True)
class LinkReport:
    distance_m: float
    elevation_deg: float
    fspl_dB: float
    gaseous_dB: float
    rain_dB: float
    cloud_dB: float
    fog_dB: float
    rx_power_dBm: float
    margin_dB: float
    viable: bool
    reason: str | None = None

    @property
    def attenuation_dB(self) -> float:
        return self.gaseous_dB + self.rain_dB + self.cloud_dB + self.fog_dB


def fspl(distance_m: float, frequency_GHz: float) -> float:
    """Free-space path loss, ``20 log10(4 pi d f / c)`` in dB."""
    if not distance_m > 0:
        raise DomainError("distance must be positive")
    if not frequency_GHz > 0:
        raise DomainError("frequency must be positive")
    return 20.0 * math.log10(4.0 * math.pi * distance_m * frequency_GHz * 1e9 / C_LIGHT)


def rf_link_between(a: Position3D, b: Position3D, radio: RadioConfig,
                    profile: WeatherProfile) -> LinkReport:
    """Budget for a link between two fixed points."""
    distance = slant_distance(a, b)
    elevation = abs(elevation_angle(a, b))
    loss_fs = fspl(distance, radio.frequency_GHz)
    att = path_attenuation(profile, a, b, radio.frequency_GHz)
    rx = (radio.tx_power_dBm + radio.tx_gain_dBi + radio.rx_gain_dBi - loss_fs
          - (att.gaseous_dB + att.rain_dB + att.cloud_dB + att.fog_dB))
    margin = rx - radio.rx_sensitivity_dBm
    return LinkReport(distance, elevation, loss_fs, att.gaseous_dB, att.rain_dB,
                      att.cloud_dB, att.fog_dB, rx, margin, margin >= 0)


def rf_link(a, b, radio: RadioConfig, profile: WeatherProfile, t: float = 0.0) -> LinkReport:
    """Budget for a link between two nodes (or positions) at time ``t``."""
    pa = a if isinstance(a, Position3D) else a.position_at(t)
    pb = b if isinstance(b, Position3D) else b.position_at(t)
    return rf_link_between(pa, pb, radio, profile)


def laser_delivery(tx_power_W: float, distance_m: float, visibility_class,
                   rx_efficiency: float = 1.0) -> float:
    """Power (W) left after a 1550 nm beam crosses ``distance_m`` of air."""
    if not tx_power_W >= 0:
        raise DomainError("transmit power must be >= 0")
    if not distance_m >= 0:
        raise DomainError("distance must be >= 0")
    if not 0 < rx_efficiency <= 1:
        raise DomainError("receiver efficiency must lie in (0, 1]")
    loss_dB = laser_specific_loss(visibility_class) * distance_m / 1000.0
    return tx_power_W * 10.0 ** (-loss_dB / 10.0) * rx_efficiency
