"""Feasibility and link-budget engine for distributed multi-layer UAV networks."""

from .aero import Airframe, NodeClass, lift_force, min_sustaining_speed, payload_feasible
from .atmosphere import AtmosphereSample, isa_sample
from .attenuation import (AttenuationBreakdown, VisibilityClass, WeatherProfile,
                          cloud_fog_specific_attenuation, columnar_cloud_attenuation,
                          gaseous_specific_attenuation, laser_specific_loss,
                          path_attenuation, rain_specific_attenuation)
from .geometry import (CircularCruise, Position3D, angular_spread, cruise_position,
                       elevation_angle, slant_distance, turn_radius)
from .linkbudget import LinkReport, RadioConfig, fspl, laser_delivery, rf_link
from .scenario import Scenario, UavNode, endurance, load_scenario, simulate, validate

__version__ = "0.1.0"
