import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foakit import (
    ChannelConvention,
    FoaBuffer,
    MonoBuffer,
    SphericalPosition,
    ValidationError,
    convert_convention,
    decode_virtual_mic,
    encode_foa,
    encode_foa_trajectory,
    wrap_azimuth,
)
from foakit.foa import direction_gains

INV_SQRT2 = 0.7071067811865476

azimuths = st.floats(-math.pi, math.pi, exclude_min=True)
elevations = st.floats(-math.pi / 2, math.pi / 2, exclude_min=True)


def unit(n=4, sr=48000):
    return MonoBuffer(np.ones(n), sr)


@pytest.mark.parametrize(
    "az, el, expected",
    [
        (0.0, 0.0, (INV_SQRT2, 1.0, 0.0, 0.0)),
        (math.pi / 2, 0.0, (INV_SQRT2, 0.0, 1.0, 0.0)),
        (1.234, math.pi / 2, (INV_SQRT2, 0.0, 0.0, 1.0)),
        (math.pi / 4, 0.0, (INV_SQRT2, INV_SQRT2, INV_SQRT2, 0.0)),
    ],
)
def test_encode_unit_pressure(az, el, expected):
    foa = encode_foa(unit(), SphericalPosition(az, el))
    np.testing.assert_allclose(foa.data[:, 0], expected, atol=1e-15)
    assert foa.sample_rate == 48000


def test_encode_rejects_empty_and_nonfinite():
    with pytest.raises(ValidationError):
        encode_foa(MonoBuffer(np.array([]), 48000), SphericalPosition(0, 0))
    with pytest.raises(ValidationError):
        encode_foa(MonoBuffer(np.array([0.0, np.nan]), 48000), SphericalPosition(0, 0))
    with pytest.raises(ValidationError):
        MonoBuffer(np.array([np.inf]), 48000)


@pytest.mark.parametrize(
    "az, el, d",
    [(-math.pi, 0, 1), (0, -math.pi / 2, 1), (0, 0, 0), (0, 0, -1), (4.0, 0, 1), (0, 2.0, 1)],
)
def test_position_invariants(az, el, d):
    with pytest.raises(ValidationError):
        SphericalPosition(az, el, d)


def test_position_upper_bounds_are_inclusive():
    SphericalPosition(math.pi, math.pi / 2, 1.0)


def test_buffer_immutable():
    foa = FoaBuffer.zeros(8, 48000)
    with pytest.raises(ValueError):
        foa.data[0, 0] = 1.0


@settings(max_examples=200)
@given(azimuths, elevations, st.floats(-4, 4).filter(lambda p: abs(p) > 1e-3))
def test_directional_energy_equals_pressure_squared(az, el, p):
    foa = encode_foa(MonoBuffer(np.array([p]), 48000), SphericalPosition(az, el))
    xyz = foa.data[1:, 0]
    assert math.isclose(float(xyz @ xyz), p * p, rel_tol=1e-12)
    assert foa.w[0] == p * INV_SQRT2


@settings(max_examples=200)
@given(azimuths, elevations)
def test_aligned_figure_eight_recovers_pressure(az, el):
    rng = np.random.default_rng(0)
    p = rng.standard_normal(64)
    pos = SphericalPosition(az, el)
    out = decode_virtual_mic(encode_foa(MonoBuffer(p, 48000), pos), pos, 0.0)
    np.testing.assert_allclose(out.samples, p, rtol=1e-12, atol=1e-12 * np.abs(p).max())


def test_virtual_mic_examples(noise):
    foa = encode_foa(noise, SphericalPosition(0.0, 0.0))
    omni = decode_virtual_mic(foa, SphericalPosition(2.0, 0.3), 1.0)
    np.testing.assert_allclose(omni.samples, noise.samples, rtol=1e-15, atol=1e-16)
    aligned = decode_virtual_mic(foa, SphericalPosition(0.0, 0.0), 0.0)
    np.testing.assert_array_equal(aligned.samples, noise.samples)
    null = decode_virtual_mic(foa, SphericalPosition(math.pi / 2, 0.0), 0.0)
    np.testing.assert_allclose(null.samples, 0.0, atol=1e-16)
    assert len(null) == len(noise) and null.sample_rate == noise.sample_rate
    with pytest.raises(ValidationError):
        decode_virtual_mic(foa, SphericalPosition(0, 0), 1.5)


def test_convention_round_trip(rng):
    foa = FoaBuffer(rng.standard_normal((4, 4096)), 48000)
    ambix = convert_convention(foa, ChannelConvention.FUMA_EQ1, ChannelConvention.AMBIX)
    back = convert_convention(ambix, ChannelConvention.AMBIX, ChannelConvention.FUMA_EQ1)
    np.testing.assert_array_equal(back.data[1:], foa.data[1:])
    np.testing.assert_array_max_ulp(back.data[0], foa.data[0], maxulp=1)
    # ACN order W, Y, Z, X
    np.testing.assert_array_equal(ambix.data[1], foa.y)
    np.testing.assert_array_equal(ambix.data[2], foa.z)
    np.testing.assert_array_equal(ambix.data[3], foa.x)


def test_convention_w_scaling_and_identity():
    foa = encode_foa(unit(1), SphericalPosition(0.3, 0.1))
    ambix = convert_convention(foa, ChannelConvention.FUMA_EQ1, ChannelConvention.AMBIX)
    assert math.isclose(ambix.data[0, 0], 1.0, rel_tol=1e-15)
    same = convert_convention(foa, ChannelConvention.FUMA_EQ1, ChannelConvention.FUMA_EQ1)
    np.testing.assert_array_equal(same.data, foa.data)
    assert same is not foa


def test_trajectory_single_waypoint_matches_static(noise):
    pos = SphericalPosition(0.7, -0.2)
    moving = encode_foa_trajectory(noise, [(0.25, pos)])
    # vectorized and scalar trig may differ in the last bit
    np.testing.assert_allclose(moving.data, encode_foa(noise, pos).data, rtol=0, atol=1e-15)


def test_trajectory_linear_midpoint():
    src = MonoBuffer(np.ones(48001), 48000)
    foa = encode_foa_trajectory(src, [(0.0, SphericalPosition(0.0, 0.0)), (1.0, SphericalPosition(math.pi / 2, 0.0))])
    expected = direction_gains(math.pi / 4, 0.0)
    np.testing.assert_allclose(foa.data[1:, 24000], expected, atol=1e-12)


def _shorter_arc_oracle(a, b, frac, n=200001):
    """Brute force: the grid angle whose circular distances to a and b split the shorter arc."""
    grid = np.linspace(-math.pi, math.pi, n)

    def circ(u, v):
        d = np.abs(u - v) % (2 * math.pi)
        return np.minimum(d, 2 * math.pi - d)

    total = circ(np.array(a), np.array(b))
    score = np.abs(circ(grid, a) - frac * total) + np.abs(circ(grid, b) - (1 - frac) * total)
    return grid[np.argmin(score)]


@pytest.mark.parametrize("frac", [0.25, 0.5, 0.75])
def test_trajectory_takes_shorter_arc(frac):
    sr = 1000
    src = MonoBuffer(np.ones(sr + 1), sr)
    foa = encode_foa_trajectory(src, [(0.0, SphericalPosition(3.0, 0.0)), (1.0, SphericalPosition(-3.0, 0.0))])
    i = int(frac * sr)
    az = math.atan2(foa.y[i], foa.x[i])
    oracle = _shorter_arc_oracle(3.0, -3.0, frac)
    diff = abs(wrap_azimuth(az - oracle))
    assert diff < 1e-4
    if frac == 0.5:
        assert abs(abs(az) - math.pi) < 1e-12


def test_trajectory_holds_boundary_positions():
    src = MonoBuffer(np.ones(1001), 1000)
    a, b = SphericalPosition(0.5, 0.1), SphericalPosition(1.5, -0.1)
    foa = encode_foa_trajectory(src, [(0.2, a), (0.8, b)])
    np.testing.assert_allclose(foa.data[1:, 0], a.unit_vector, atol=1e-15)
    np.testing.assert_allclose(foa.data[1:, 100], a.unit_vector, atol=1e-15)
    np.testing.assert_allclose(foa.data[1:, 1000], b.unit_vector, atol=1e-15)


def test_trajectory_errors():
    src = MonoBuffer(np.ones(100), 100)
    p = SphericalPosition(0, 0)
    with pytest.raises(ValidationError):
        encode_foa_trajectory(src, [(0.5, p), (0.2, p)])
    with pytest.raises(ValidationError):
        encode_foa_trajectory(src, [(0.0, p), (2.0, p)])
    with pytest.raises(ValidationError):
        encode_foa_trajectory(src, [])


@given(st.floats(-50, 50))
def test_wrap_azimuth_range(a):
    w = wrap_azimuth(a)
    assert -math.pi < w <= math.pi
    assert math.isclose(math.cos(w), math.cos(a), abs_tol=1e-9)
    assert math.isclose(math.sin(w), math.sin(a), abs_tol=1e-9)
