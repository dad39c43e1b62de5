import csv
import math
import shutil
from importlib import resources

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from damu import data
from damu.atmosphere import isa_sample
from damu.attenuation import (LASER_LOSS_DB_KM, VisibilityClass, WeatherProfile,
                              cloud_fog_specific_attenuation, columnar_cloud_attenuation,
                              gaseous_specific_attenuation, laser_specific_loss,
                              liquid_water_coefficient, path_attenuation,
                              path_attenuation_sweep, rain_coefficients,
                              rain_specific_attenuation)
from damu.errors import DataFileError, DomainError, OutOfValidityError, RangeError
from damu.geometry import Position3D

SEA_LEVEL = isa_sample(0.0, 7.5)
GROUND = Position3D(0, 0, 0)


def vertical(z1, z2):
    return Position3D(0, 0, z1), Position3D(0, 0, z2)


# --- oracles ----------------------------------------------------------------

def kl_oracle(f, t):
    """Rayleigh absorption of small water drops from the complex permittivity.

    K_l = 0.819 f / 3 * Im(-(eps - 1)/(eps + 2)) with eps = eps' - j eps''
    built directly from the two Debye relaxation terms.
    """
    theta = 300.0 / t
    e0 = 77.66 + 103.3 * (theta - 1)
    e1 = 0.0671 * e0
    e2 = 3.52
    fp = 20.20 - 146 * (theta - 1) + 316 * (theta - 1) ** 2
    fs = 39.8 * fp
    eps = e2 + (e0 - e1) / (1 + 1j * f / fp) + (e1 - e2) / (1 + 1j * f / fs)
    return 0.819 * f / 3.0 * -((eps - 1) / (eps + 2)).imag


def rain_row_oracle(freq):
    """k and alpha read straight from the shipped CSV with the csv module."""
    path = resources.files("damu").joinpath("data", "p838_rain_coeffs.csv")
    with path.open() as fh:
        for row in csv.DictReader(fh):
            if float(row["f_GHz"]) == freq:
                return {k: float(v) for k, v in row.items()}
    raise KeyError(freq)


def p838_fit(f, pol):
    """Closed-form P.838-3 regression, an independent route to the table."""
    coeffs = {
        "kH": ([-5.3398, -0.35351, -0.23789, -0.94158], [-0.10008, 1.2697, 0.86036, 0.64552],
               [1.13098, 0.454, 0.15354, 0.16817], -0.18961, 0.71147),
        "kV": ([-3.80595, -3.44965, -0.39902, 0.50167], [0.56934, -0.22911, 0.73042, 1.07319],
               [0.81061, 0.51059, 0.11899, 0.27195], -0.16398, 0.63297),
        "aH": ([-0.14318, 0.29591, 0.32177, -5.3761, 16.1721], [1.82442, 0.77564, 0.63773, -0.9623, -3.2998],
               [-0.55187, 0.19822, 0.13164, 1.47828, 3.4399], 0.67849, -1.95537),
        "aV": ([-0.07771, 0.56727, -0.20238, -48.2991, 48.5833], [2.3384, 0.95545, 1.1452, 0.791669, 0.791459],
               [-0.76284, 0.54039, 0.26809, 0.116226, 0.116479], -0.053739, 0.83433),
    }

    def g(name):
        a, b, c, m, cc = coeffs[name]
        lf = math.log10(f)
        return sum(aj * math.exp(-((lf - bj) / cj) ** 2) for aj, bj, cj in zip(a, b, c)) + m * lf + cc

    if pol == "H":
        return 10 ** g("kH"), g("aH")
    return 10 ** g("kV"), g("aV")


# --- data tables --------------------------------------------------------------

def test_tables_load():
    assert len(data.oxygen_lines()) == 44
    assert len(data.water_lines()) == 35
    assert data.rain_table().shape == (105, 5)
    assert np.all(np.diff(data.oxygen_lines().f0) > 0)
    assert not data.rain_table().flags.writeable


def test_shipped_checksums():
    d = data.data_dir()
    sums = data.recorded_checksums(d)
    assert set(sums) == {data.OXYGEN_FILE, data.WATER_FILE, data.RAIN_FILE}
    for name, digest in sums.items():
        assert data.sha256(d / name) == digest


def _copy_data(tmp_path):
    for name in (data.OXYGEN_FILE, data.WATER_FILE, data.RAIN_FILE):
        shutil.copy(data.data_dir() / name, tmp_path / name)
    return tmp_path


@pytest.mark.parametrize("bad_line, message", [
    ("40,0.44,0.86,0.42\n", "expected 5 fields"),
    ("40.5,abc,0.86,0.42,0.84\n", "40.5"),
    ("40.5,nan,0.86,0.42,0.84\n", "non-finite"),
])
def test_loader_rejects_malformed_rows(tmp_path, monkeypatch, bad_line, message):
    _copy_data(tmp_path)
    rain = tmp_path / data.RAIN_FILE
    lines = rain.read_text().splitlines(keepends=True)
    lines.insert(3, bad_line)
    rain.write_text("".join(lines))
    with pytest.raises(DataFileError, match=r"p838_rain_coeffs.csv:4"):
        data.read_table(rain, data.RAIN_COLUMNS)
    monkeypatch.setenv("DAMU_DATA_DIR", str(tmp_path))
    with pytest.raises(DataFileError):
        data.rain_table()


def test_loader_rejects_bad_header(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("f,k\n1,2\n")
    with pytest.raises(DataFileError, match="header"):
        data.read_table(path, data.RAIN_COLUMNS)


def test_loader_rejects_unsorted(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("f_GHz,kH,alphaH,kV,alphaV\n2,1,1,1,1\n1,1,1,1,1\n")
    with pytest.raises(DataFileError, match="increasing"):
        data.read_table(path, data.RAIN_COLUMNS)


def test_checksum_mismatch(tmp_path, monkeypatch):
    _copy_data(tmp_path)
    (tmp_path / data.CHECKSUM_FILE).write_text(f"{'0' * 64}  {data.RAIN_FILE}\n")
    monkeypatch.setenv("DAMU_DATA_DIR", str(tmp_path))
    with pytest.raises(DataFileError, match="checksum"):
        data.rain_table()


def test_data_dir_override(tmp_path, monkeypatch):
    _copy_data(tmp_path)
    rain = tmp_path / data.RAIN_FILE
    text = rain.read_text().replace("\n40,0.44306,", "\n40,0.88612,")
    rain.write_text(text)
    monkeypatch.setenv("DAMU_DATA_DIR", str(tmp_path))
    assert rain_coefficients(40.0).k == pytest.approx(0.88612)


# --- gaseous ------------------------------------------------------------------

def test_gaseous_peak_near_60ghz():
    assert gaseous_specific_attenuation(61.0, SEA_LEVEL) == pytest.approx(15.0, rel=0.20)


def test_gaseous_oxygen_band_above_1db():
    for f in np.arange(53.0, 67.0001, 0.25):
        assert gaseous_specific_attenuation(f, SEA_LEVEL) > 1.0


def test_gaseous_oxygen_dominated_at_60ghz():
    dry = gaseous_specific_attenuation(60.0, isa_sample(0.0, 0.0))
    damp = gaseous_specific_attenuation(60.0, isa_sample(0.0, 1e-3))
    moist = gaseous_specific_attenuation(60.0, SEA_LEVEL)
    assert abs(damp - dry) / dry < 0.05
    assert abs(moist - dry) / dry < 0.05


def test_gaseous_single_maximum_50_70():
    freqs = np.arange(50.0, 70.0001, 0.05)
    g = np.array([gaseous_specific_attenuation(f, SEA_LEVEL) for f in freqs])
    interior = (g[1:-1] > g[:-2]) & (g[1:-1] > g[2:])
    assert interior.sum() == 1
    assert 57.0 <= freqs[1:-1][interior][0] <= 63.0


def test_water_vapor_line_visible():
    # 22.2 GHz water line stands above its shoulders
    g = [gaseous_specific_attenuation(f, SEA_LEVEL) for f in (15.0, 22.235, 30.0)]
    assert g[1] > g[0] and g[1] > g[2]


@pytest.mark.parametrize("f", [0.5, 100.5, float("nan")])
def test_gaseous_frequency_range(f):
    with pytest.raises(RangeError):
        gaseous_specific_attenuation(f, SEA_LEVEL)


@given(st.floats(1, 100), st.floats(0, 32000), st.floats(0, 30))
def test_gaseous_non_negative(f, h, rho):
    assert gaseous_specific_attenuation(f, isa_sample(h, rho)) >= 0


# --- rain ---------------------------------------------------------------------

def test_rain_matches_table_oracle_40ghz():
    row = rain_row_oracle(40.0)
    oracle = row["kH"] * 100.0 ** row["alphaH"]
    assert rain_specific_attenuation(40.0, 100.0, "H") == pytest.approx(oracle, rel=0.01)
    assert oracle == pytest.approx(24.05, abs=0.01)
    oracle_v = row["kV"] * 100.0 ** row["alphaV"]
    assert rain_specific_attenuation(40.0, 100.0, "V") == pytest.approx(oracle_v, rel=0.01)


@pytest.mark.parametrize("f, k_tol", [
    (1.0, 1e-4), (12.0, 1e-4), (28.0, 1e-4), (40.0, 1e-4), (99.0, 1e-4),  # table rows
    (6.5, 0.02), (28.5, 0.02), (39.3, 0.02), (61.7, 0.02),  # interpolated
])
@pytest.mark.parametrize("pol", ["H", "V"])
def test_rain_coefficients_follow_regression(f, k_tol, pol):
    k, alpha = p838_fit(f, pol)
    c = rain_coefficients(f, pol)
    assert c.k == pytest.approx(k, rel=k_tol)
    assert c.alpha == pytest.approx(alpha, abs=0.005)


def test_rain_circular_combines_h_and_v():
    h, v, c = (rain_coefficients(30.0, p) for p in ("H", "V", "circular"))
    assert c.k == pytest.approx((h.k + v.k) / 2)
    assert c.alpha == pytest.approx((h.k * h.alpha + v.k * v.alpha) / (h.k + v.k))


def test_rain_zero_rate():
    assert rain_specific_attenuation(28.0, 0.0) == 0.0


def test_rain_bad_inputs():
    with pytest.raises(DomainError):
        rain_specific_attenuation(28.0, -1.0)
    with pytest.raises(DomainError):
        rain_specific_attenuation(28.0, 5.0, "diagonal")
    with pytest.raises(RangeError):
        rain_specific_attenuation(120.0, 5.0)


@given(st.floats(1, 100), st.floats(0.01, 300), st.floats(0.01, 300))
def test_rain_monotone_in_rate(f, r1, r2):
    if r1 < r2:
        assert rain_specific_attenuation(f, r1) < rain_specific_attenuation(f, r2)


@given(st.floats(1, 100), st.sampled_from(["H", "V", "circular"]))
def test_rain_coefficient_ranges(f, pol):
    c = rain_coefficients(f, pol)
    assert c.k > 0
    assert 0.4 < c.alpha < 1.8


# --- cloud and fog ------------------------------------------------------------

@pytest.mark.parametrize("f", [1.0, 10.0, 28.0, 40.0, 60.0, 100.0])
@pytest.mark.parametrize("t", [233.0, 273.15, 293.15, 313.0])
def test_kl_matches_complex_permittivity_oracle(f, t):
    assert liquid_water_coefficient(f, t) == pytest.approx(kl_oracle(f, t), rel=1e-10)


def test_fog_28ghz():
    assert cloud_fog_specific_attenuation(28.0, 0.5, 273.15) == pytest.approx(0.34, rel=0.15)
    assert 2.0 * cloud_fog_specific_attenuation(28.0, 0.5) == pytest.approx(0.68, rel=0.15)


def test_kl_ratio_40_over_28():
    ratio = kl_oracle(40.0, 273.15) / kl_oracle(28.0, 273.15)
    assert 1.7 <= ratio <= 2.2
    assert liquid_water_coefficient(40.0) / liquid_water_coefficient(28.0) == pytest.approx(ratio)


def test_cloud_zero_water():
    assert cloud_fog_specific_attenuation(50.0, 0.0, 280.0) == 0.0


@pytest.mark.parametrize("t", [232.9, 313.1])
def test_kl_temperature_range(t):
    with pytest.raises(RangeError):
        liquid_water_coefficient(28.0, t)


def test_columnar():
    kl = kl_oracle(28.0, 273.15)
    assert columnar_cloud_attenuation(2.0, 28.0, 90.0) == pytest.approx(2.0 * kl)
    assert columnar_cloud_attenuation(0.7, 40.0, 90.0, 280.0) == pytest.approx(0.7 * kl_oracle(40.0, 280.0))
    # sin 30 = 1/2 of sin 90
    assert columnar_cloud_attenuation(1.0, 35.0, 30.0) == pytest.approx(2 * columnar_cloud_attenuation(1.0, 35.0, 90.0))
    with pytest.raises(OutOfValidityError):
        columnar_cloud_attenuation(1.0, 35.0, 4.9)


@given(st.floats(1, 100), st.floats(0, 5), st.floats(233, 313))
def test_cloud_non_negative(f, m, t):
    assert cloud_fog_specific_attenuation(f, m, t) >= 0


# --- weather profile ----------------------------------------------------------

@pytest.mark.parametrize("kwargs", [
    dict(rain_rate_mm_h=-1),
    dict(fog_lwd_g_m3=1.5),
    dict(cloud_lwd_g_m3=6),
    dict(cloud_lwd_g_m3=1, cloud_base_m=3000, cloud_top_m=2000),
    dict(rain_polarization="X"),
    dict(visibility_class="smog"),
])
def test_profile_invariants(kwargs):
    with pytest.raises(ValueError):
        WeatherProfile(**kwargs)


def test_profile_temperature_range():
    with pytest.raises(RangeError):
        WeatherProfile(liquid_water_temp_K=200)


# --- slant path integration ---------------------------------------------------

CUMULONIMBUS = WeatherProfile(cloud_lwd_g_m3=3.0, cloud_base_m=1000, cloud_top_m=13000)
FOG = WeatherProfile(fog_lwd_g_m3=0.5, fog_top_m=2000)
VIOLENT = WeatherProfile(rain_rate_mm_h=100.0)
CLEAR_DRY = WeatherProfile(surface_water_vapor_g_m3=0.0)


def test_cumulonimbus_column():
    att = path_attenuation(CUMULONIMBUS, *vertical(1000, 20000), 40.0)
    assert att.cloud_dB == pytest.approx(12.0 * 3.0 * kl_oracle(40.0, 273.15), rel=1e-9)
    assert att.cloud_dB == pytest.approx(46.0, abs=1.0)
    rain = path_attenuation(VIOLENT, *vertical(0, 20000), 40.0)
    assert att.total_dB > rain.total_dB


def test_fog_column():
    att = path_attenuation(FOG, *vertical(0, 20000), 28.0)
    assert att.fog_dB == pytest.approx(2.0 * 0.5 * kl_oracle(28.0, 273.15), rel=1e-9)
    assert att.fog_dB == pytest.approx(0.68, rel=0.15)


def test_rain_column():
    att = path_attenuation(VIOLENT, *vertical(0, 5000), 40.0)
    row = rain_row_oracle(40.0)
    assert att.rain_dB == pytest.approx(1.7 * row["kH"] * 100 ** row["alphaH"], rel=1e-9)


def test_clear_profile_is_gaseous_only():
    att = path_attenuation(WeatherProfile(), *vertical(100, 18000), 38.0)
    assert att.rain_dB == att.cloud_dB == att.fog_dB == 0.0
    assert att.total_dB == att.gaseous_dB > 0


def test_total_is_sum():
    weather = WeatherProfile(rain_rate_mm_h=20, fog_lwd_g_m3=0.05, fog_top_m=300,
                             cloud_lwd_g_m3=1.0, cloud_base_m=2000, cloud_top_m=6000)
    att = path_attenuation(weather, Position3D(0, 0, 50), Position3D(3000, 1000, 15000), 33.0)
    assert att.total_dB == att.gaseous_dB + att.rain_dB + att.cloud_dB + att.fog_dB


def test_slant_scales_by_cosecant():
    a, b = Position3D(0, 0, 0), Position3D(0, 0, 2000)
    c = Position3D(2000 / math.tan(math.radians(30)), 0, 2000)
    vert = path_attenuation(FOG, a, b, 28.0).fog_dB
    slant = path_attenuation(FOG, a, c, 28.0).fog_dB
    assert slant == pytest.approx(2 * vert, rel=1e-9)


@pytest.mark.parametrize("f", [10.0, 22.0, 40.0, 60.0, 90.0])
def test_uniform_layer_consistency(f):
    """Through a uniform liquid-water or rain layer the integral is gamma * length."""
    a, b = Position3D(0, 0, 200), Position3D(800, 300, 1200)
    length_km = math.dist((0, 0, 200), (800, 300, 1200)) / 1000
    fog = WeatherProfile(fog_lwd_g_m3=0.3, fog_top_m=5000)
    assert path_attenuation(fog, a, b, f).fog_dB == \
        pytest.approx(cloud_fog_specific_attenuation(f, 0.3) * length_km, rel=1e-3)
    rain = WeatherProfile(rain_rate_mm_h=12.0, rain_top_m=5000)
    assert path_attenuation(rain, a, b, f).rain_dB == \
        pytest.approx(rain_specific_attenuation(f, 12.0) * length_km, rel=1e-3)


@settings(max_examples=25, deadline=None)
@given(st.floats(1, 100), st.floats(0, 5000), st.floats(6000, 30000),
       st.sampled_from([CUMULONIMBUS, FOG, VIOLENT, WeatherProfile()]))
def test_grid_convergence(f, z1, z2, weather):
    a, b = vertical(z1, z2)
    coarse = path_attenuation(weather, a, b, f, step_m=100.0).total_dB
    fine = path_attenuation(weather, a, b, f, step_m=50.0).total_dB
    assert abs(coarse - fine) <= 0.005 * fine


def test_sweep_matches_single_frequency():
    a, b = vertical(500, 9000)
    freqs = np.array([5.0, 28.0, 61.0])
    sweep = path_attenuation_sweep(CUMULONIMBUS, a, b, freqs)
    for i, f in enumerate(freqs):
        one = path_attenuation(CUMULONIMBUS, a, b, f)
        assert sweep["gaseous_dB"][i] == pytest.approx(one.gaseous_dB, rel=1e-12)
        assert sweep["cloud_dB"][i] == pytest.approx(one.cloud_dB, rel=1e-12)


def test_grazing_path_rejected():
    with pytest.raises(OutOfValidityError):
        path_attenuation(FOG, Position3D(0, 0, 1000), Position3D(20000, 0, 2000), 28.0)
    with pytest.raises(OutOfValidityError):
        path_attenuation(FOG, Position3D(0, 0, 1000), Position3D(20000, 0, 1000), 28.0)


def test_endpoint_altitude_range():
    with pytest.raises(RangeError):
        path_attenuation(FOG, Position3D(0, 0, 0), Position3D(0, 0, 33000), 28.0)


def test_path_symmetric():
    a, b = Position3D(0, 0, 100), Position3D(4000, 0, 20000)
    assert path_attenuation(VIOLENT, a, b, 30.0) == path_attenuation(VIOLENT, b, a, 30.0)


# --- laser --------------------------------------------------------------------

def test_laser_table():
    assert laser_specific_loss("clear") == 0.2
    assert laser_specific_loss("haze") == 4.0
    assert laser_specific_loss(VisibilityClass.HEAVY_FOG) == 272.0
    assert len(LASER_LOSS_DB_KM) == 3
    with pytest.raises(ValueError):
        laser_specific_loss("drizzle")
