"""Command-line front end.

Exit codes: 0 success, 2 usage or input error, 3 strict validation failure.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys

import numpy as np

from . import aero, geometry
from .atmosphere import feet_from_m, isa_sample, knots_from_mps
from .attenuation import VisibilityClass, laser_specific_loss, path_attenuation_sweep
from .errors import DamuError
from .geometry import Position3D
from .linkbudget import laser_delivery
from .scenario import PRESETS, endurance, load_scenario, load_weather, simulate, validate, write_csv

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_STRICT = 3

N_PER_LBF = 4.4482216152605


class UsageError(Exception):
    pass


def _frequencies(fmin: float, fmax: float, step: float) -> np.ndarray:
    if not step > 0:
        raise UsageError("--step must be positive")
    if fmax < fmin:
        raise UsageError("--freq-max must not be below --freq-min")
    n = int(math.floor((fmax - fmin) / step + 1e-9)) + 1
    return np.round(fmin + step * np.arange(n), 9)


def _path(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--path expects two altitudes 'alt1,alt2', got {text!r}") from None
    return lo, hi


def cmd_atten(args) -> int:
    freqs = _frequencies(args.freq_min, args.freq_max, args.step)
    z1, z2 = _path(args.path)
    weather = load_weather(args.weather)
    a, b = Position3D(0.0, 0.0, z1), Position3D(0.0, 0.0, z2)
    parts = path_attenuation_sweep(weather, a, b, freqs)
    scale = 1.0
    if args.per_km:
        scale = 1000.0 / geometry.slant_distance(a, b)
    unit = "dB_km" if args.per_km else "dB"
    names = ("gaseous", "rain", "cloud", "fog")
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["freq_GHz"] + [f"{n}_{unit}" for n in names] + [f"total_{unit}"])
        for i, f in enumerate(freqs):
            values = [float(parts[f"{n}_dB"][i]) * scale for n in names]
            writer.writerow([f"{f:.3f}"] + [f"{v:.4f}" for v in values] + [f"{sum(values):.4f}"])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _density(args) -> float:
    if args.density is not None:
        return args.density
    return isa_sample(args.alt_m).density_kg_m3


def cmd_lift(args) -> int:
    rho = _density(args)
    lift = aero.lift_force(args.cl, rho, args.speed_mps, args.area_m2)
    print(f"lift: {lift:.1f} N / {lift / N_PER_LBF:.1f} lbf "
          f"({lift / aero.G0:.1f} kg) at rho = {rho:.4f} kg/m^3")
    return EXIT_OK


def cmd_minspeed(args) -> int:
    rho = _density(args)
    frame = aero.Airframe(args.area_m2, args.cl, args.mass_kg, args.payload_kg)
    v = aero.min_sustaining_speed(frame, rho)
    print(f"minimum speed: {v:.2f} m/s / {knots_from_mps(v):.2f} kn at rho = {rho:.4f} kg/m^3")
    return EXIT_OK


def cmd_turn_radius(args) -> int:
    r_m = geometry.turn_radius(args.speed_mps, args.bank_deg)
    print(f"turn radius: {feet_from_m(r_m):.2f} ft / {r_m:.2f} m "
          f"(speed {knots_from_mps(args.speed_mps):.1f} kn, bank {args.bank_deg:g} deg)")
    return EXIT_OK


def cmd_laser(args) -> int:
    p = laser_delivery(args.power_w, args.distance_m, args.visibility, args.efficiency)
    loss = laser_specific_loss(args.visibility)
    print(f"delivered: {p:.6g} W (specific loss {loss:g} dB/km over {args.distance_m / 1000:g} km)")
    return EXIT_OK


def cmd_scenario_run(args) -> int:
    scenario = load_scenario(args.file)
    violations = validate(scenario)
    for v in violations:
        print(f"violation: {v}", file=sys.stderr)
    if violations and args.strict:
        return EXIT_STRICT
    result = simulate(scenario, force=True)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_csv(result, fh)
        for link in result.links:
            print(f"{link.id}: max line-of-sight deviation {result.los_deviation(link.id):.3f} deg")
        for node in scenario.nodes:
            t = endurance(node)
            shown = "unbounded" if math.isinf(t) else f"{t:.0f} s"
            print(f"{node.id}: endurance {shown}")
    else:
        write_csv(result, sys.stdout)
    return EXIT_OK


def cmd_scenario_validate(args) -> int:
    violations = validate(load_scenario(args.file))
    for v in violations:
        print(f"violation: {v}", file=sys.stderr)
    if violations and args.strict:
        return EXIT_STRICT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="damu", description="Multi-layer UAV network link and feasibility calculator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("atten", help="sweep attenuation over frequency along a vertical path")
    p.add_argument("--freq-min", type=float, default=1.0)
    p.add_argument("--freq-max", type=float, default=100.0)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--weather", default="clear", help=f"weather JSON file or preset ({', '.join(PRESETS)})")
    p.add_argument("--path", default="0,20000", help="endpoint altitudes in metres, 'alt1,alt2'")
    p.add_argument("--per-km", action="store_true", help="report mean specific attenuation (dB/km)")
    p.add_argument("--out", help="output CSV (default: stdout)")
    p.set_defaults(func=cmd_atten)

    p = sub.add_parser("aero", help="lift, minimum speed and turn radius")
    aero_sub = p.add_subparsers(dest="aero_command", required=True)

    q = aero_sub.add_parser("lift")
    q.add_argument("--cl", type=float, required=True)
    q.add_argument("--speed-mps", type=float, required=True)
    q.add_argument("--area-m2", type=float, required=True)
    q.add_argument("--alt-m", type=float, default=0.0)
    q.add_argument("--density", type=float, help="air density, overrides --alt-m")
    q.set_defaults(func=cmd_lift)

    q = aero_sub.add_parser("minspeed")
    q.add_argument("--cl", type=float, required=True)
    q.add_argument("--area-m2", type=float, required=True)
    q.add_argument("--mass-kg", type=float, required=True, help="empty mass")
    q.add_argument("--payload-kg", type=float, default=0.0)
    q.add_argument("--alt-m", type=float, default=0.0)
    q.add_argument("--density", type=float)
    q.set_defaults(func=cmd_minspeed)

    q = aero_sub.add_parser("turn-radius")
    q.add_argument("--speed-mps", type=float, required=True)
    q.add_argument("--bank-deg", type=float, required=True)
    q.set_defaults(func=cmd_turn_radius)

    p = sub.add_parser("laser", help="laser power delivered over a distance")
    p.add_argument("--power-w", type=float, required=True)
    p.add_argument("--distance-m", type=float, required=True)
    p.add_argument("--visibility", choices=[v.value for v in VisibilityClass], default="clear")
    p.add_argument("--efficiency", type=float, default=1.0)
    p.set_defaults(func=cmd_laser)

    p = sub.add_parser("scenario", help="validate and simulate a scenario file")
    sc_sub = p.add_subparsers(dest="scenario_command", required=True)
    q = sc_sub.add_parser("run")
    q.add_argument("file")
    q.add_argument("--out", help="output CSV (default: stdout)")
    q.add_argument("--strict", action="store_true", help="exit 3 on any validation violation")
    q.set_defaults(func=cmd_scenario_run)
    q = sc_sub.add_parser("validate")
    q.add_argument("file")
    q.add_argument("--strict", action="store_true")
    q.set_defaults(func=cmd_scenario_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (DamuError, OSError) as exc:
        print(f"damu: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
