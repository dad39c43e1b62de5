"""Fixed-wing lift, minimum sustaining speed and payload class limits."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .atmosphere import G0
from .errors import DomainError, InfeasibleError

# Lift coefficient that reproduces the 11 800 N medium FW-UAV example
# (11 m^2 wing, 50 m/s, ISA 5 km) when L = C_L rho V^2 A / 2 is inverted.
WORKED_EXAMPLE_CL = 1.165


class NodeClass(str, Enum):
    BALLOON = "balloon"
    FIXED_WING = "fixed_wing"
    ROTARY_WING = "rotary_wing"
    GROUND = "ground"


# Maximum payload per class (kg, exclusive). None means no upper bound.
PAYLOAD_LIMIT_KG = {
    NodeClass.BALLOON: None,
    NodeClass.FIXED_WING: 1000.0,
    NodeClass.ROTARY_WING: 100.0,
    NodeClass.GROUND: None,
}


@dataclass(frozen=True)
class Airframe:
    wing_area_m2: float
    lift_coefficient: float
    empty_mass_kg: float = 0.0
    payload_mass_kg: float = 0.0

    def __post_init__(self):
        if not self.wing_area_m2 > 0:
            raise DomainError("wing area must be positive")
        if not 0 < self.lift_coefficient <= 3:
            raise DomainError(f"lift coefficient {self.lift_coefficient} is not physical")
        if self.empty_mass_kg < 0 or self.payload_mass_kg < 0:
            raise DomainError("masses must be >= 0")

    @property
    def total_mass_kg(self) -> float:
        return self.empty_mass_kg + self.payload_mass_kg

    @property
    def weight_N(self) -> float:
        return self.total_mass_kg * G0


def lift_force(cl: float, density: float, speed: float, area: float) -> float:
    """Lift in newtons, ``cl * density * speed**2 * area / 2``."""
    for name, value in (("cl", cl), ("density", density), ("speed", speed), ("area", area)):
        if not value >= 0:
            raise DomainError(f"{name} must be >= 0, got {value}")
    return cl * density * speed * speed * area / 2.0


def min_sustaining_speed(airframe: Airframe, density: float) -> float:
    """Airspeed at which lift exactly balances the airframe's weight."""
    if not density > 0:
        raise DomainError("density must be positive")
    denom = airframe.lift_coefficient * density * airframe.wing_area_m2
    if denom == 0:
        raise InfeasibleError("zero wing area or lift coefficient cannot carry weight")
    return math.sqrt(2.0 * airframe.weight_N / denom)


def lift_coefficient_for(lift_N: float, density: float, speed: float, area: float) -> float:
    """Inverse of :func:`lift_force` for the coefficient."""
    if density <= 0 or speed <= 0 or area <= 0:
        raise DomainError("density, speed and area must be positive")
    return 2.0 * lift_N / (density * speed * speed * area)


def payload_feasible(node_class, payload_kg: float) -> bool:
    if payload_kg < 0:
        raise DomainError("payload must be >= 0")
    limit = PAYLOAD_LIMIT_KG[NodeClass(node_class)]
    return limit is None or payload_kg < limit
