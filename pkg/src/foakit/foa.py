"""First-order ambisonics signal model, encoder and virtual-microphone decoder.

The canonical layout throughout the toolkit is W, X, Y, Z with the
omnidirectional channel scaled by 1/sqrt(2) (FuMa-style).  Conversion to the
AmbiX layout (ACN order W, Y, Z, X with SN3D weighting) is available for
interop with other tools.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from foakit.errors import ValidationError

SQRT2 = math.sqrt(2.0)
W_GAIN = math.sqrt(0.5)  # correctly rounded 1/sqrt(2)


def wrap_azimuth(angle: ArrayLike) -> NDArray[np.float64] | float:
    """Wrap angles into the half-open interval (-pi, pi]."""
    a = np.asarray(angle, dtype=np.float64)
    wrapped = np.pi - np.mod(np.pi - a, 2.0 * np.pi)
    return float(wrapped) if wrapped.ndim == 0 else wrapped


def _frozen(values: ArrayLike, ndim: int) -> NDArray[np.float64]:
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.ndim != ndim:
        raise ValidationError(f"expected a {ndim}-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("samples must be finite")
    arr.setflags(write=False)
    return arr


def _check_rate(sample_rate: int) -> int:
    if int(sample_rate) != sample_rate or sample_rate <= 0:
        raise ValidationError(f"sample_rate must be a positive integer, got {sample_rate!r}")
    return int(sample_rate)


@dataclass(frozen=True, eq=False)
class MonoBuffer:
    """A single channel of sound pressure samples."""

    samples: NDArray[np.float64]
    sample_rate: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", _frozen(self.samples, 1))
        object.__setattr__(self, "sample_rate", _check_rate(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate


@dataclass(frozen=True, eq=False)
class FoaBuffer:
    """Four-channel B-format audio stored as a ``(4, n)`` array in W, X, Y, Z order."""

    data: NDArray[np.float64]
    sample_rate: int

    def __post_init__(self) -> None:
        data = _frozen(self.data, 2)
        if data.shape[0] != 4:
            raise ValidationError(f"FOA data must have 4 channels, got {data.shape[0]}")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "sample_rate", _check_rate(self.sample_rate))

    @classmethod
    def from_channels(cls, w, x, y, z, sample_rate: int) -> FoaBuffer:
        lengths = {len(w), len(x), len(y), len(z)}
        if len(lengths) != 1:
            raise ValidationError(f"channel lengths differ: {sorted(lengths)}")
        return cls(np.stack([w, x, y, z]), sample_rate)

    @classmethod
    def zeros(cls, n: int, sample_rate: int) -> FoaBuffer:
        return cls(np.zeros((4, n)), sample_rate)

    def __len__(self) -> int:
        return self.data.shape[1]

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate

    @property
    def w(self) -> NDArray[np.float64]:
        return self.data[0]

    @property
    def x(self) -> NDArray[np.float64]:
        return self.data[1]

    @property
    def y(self) -> NDArray[np.float64]:
        return self.data[2]

    @property
    def z(self) -> NDArray[np.float64]:
        return self.data[3]

    @property
    def peak(self) -> float:
        return float(np.max(np.abs(self.data))) if self.data.size else 0.0

    def scaled(self, k: float) -> FoaBuffer:
        return FoaBuffer(self.data * k, self.sample_rate)


@dataclass(frozen=True)
class SphericalPosition:
    """Source direction and distance.

    Azimuth lies in (-pi, pi] with 0 straight ahead and +pi/2 to the left,
    elevation in (-pi/2, pi/2], distance in meters.
    """

    azimuth: float
    elevation: float
    distance: float = 1.0

    def __post_init__(self) -> None:
        az, el, d = float(self.azimuth), float(self.elevation), float(self.distance)
        if not all(map(math.isfinite, (az, el, d))):
            raise ValidationError("position components must be finite")
        if not -math.pi < az <= math.pi:
            raise ValidationError(f"azimuth {az} outside (-pi, pi]")
        if not -math.pi / 2 < el <= math.pi / 2:
            raise ValidationError(f"elevation {el} outside (-pi/2, pi/2]")
        if d <= 0:
            raise ValidationError(f"distance must be positive, got {d}")
        object.__setattr__(self, "azimuth", az)
        object.__setattr__(self, "elevation", el)
        object.__setattr__(self, "distance", d)

    @property
    def unit_vector(self) -> NDArray[np.float64]:
        return direction_gains(self.azimuth, self.elevation)


class ChannelConvention(enum.Enum):
    FUMA_EQ1 = "fuma_eq1"
    AMBIX = "ambix"


def direction_gains(azimuth: ArrayLike, elevation: ArrayLike) -> NDArray[np.float64]:
    """Directional X/Y/Z gains for the given angles; shape ``(3, ...)``."""
    az, el = np.broadcast_arrays(
        np.asarray(azimuth, dtype=np.float64), np.asarray(elevation, dtype=np.float64)
    )
    cos_el = np.cos(el)
    return np.stack([np.cos(az) * cos_el, np.sin(az) * cos_el, np.sin(el)])


def _check_source(source: MonoBuffer) -> None:
    if len(source) == 0:
        raise ValidationError("cannot encode an empty buffer")


def encode_foa(source: MonoBuffer, position: SphericalPosition) -> FoaBuffer:
    """Encode a mono pressure signal as a plane wave from ``position``.

    No distance attenuation is applied here; the pressure is encoded as given.
    """
    _check_source(source)
    p = source.samples
    gains = position.unit_vector
    data = np.empty((4, p.shape[0]))
    data[0] = p * W_GAIN
    data[1:] = gains[:, None] * p
    return FoaBuffer(data, source.sample_rate)


def interpolate_waypoints(
    waypoints: Sequence[tuple[float, SphericalPosition]],
    times: ArrayLike,
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """Piecewise-linear azimuth, elevation and distance at ``times``.

    Azimuth follows the shorter arc between consecutive waypoints.  Outside the
    waypoint span the boundary position holds.
    """
    if len(waypoints) == 0:
        raise ValidationError("trajectory needs at least one waypoint")
    t_knots = np.array([float(t) for t, _ in waypoints])
    if np.any(np.diff(t_knots) <= 0):
        raise ValidationError("waypoint times must be strictly increasing")
    az = np.array([pos.azimuth for _, pos in waypoints])
    el = np.array([pos.elevation for _, pos in waypoints])
    dist = np.array([pos.distance for _, pos in waypoints])
    # unwrap so that each segment takes the shorter arc
    steps = wrap_azimuth(np.diff(az)) if len(az) > 1 else np.empty(0)
    az_unwrapped = np.concatenate([az[:1], az[0] + np.cumsum(steps)])
    t = np.asarray(times, dtype=np.float64)
    return (
        wrap_azimuth(np.interp(t, t_knots, az_unwrapped)),
        np.interp(t, t_knots, el),
        np.interp(t, t_knots, dist),
    )


def _check_trajectory(waypoints, duration: float) -> None:
    for i, (t, _) in enumerate(waypoints):
        if not 0.0 <= t <= duration:
            raise ValidationError(f"waypoint {i} at {t} s lies outside [0, {duration}] s")


def encode_foa_trajectory(
    source: MonoBuffer,
    waypoints: Sequence[tuple[float, SphericalPosition]],
) -> FoaBuffer:
    """Encode a moving source with per-sample interpolated direction gains."""
    _check_source(source)
    _check_trajectory(waypoints, source.duration)
    times = np.arange(len(source)) / source.sample_rate
    az, el, _ = interpolate_waypoints(waypoints, times)
    p = source.samples
    data = np.empty((4, p.shape[0]))
    data[0] = p * W_GAIN
    data[1:] = direction_gains(az, el) * p
    return FoaBuffer(data, source.sample_rate)


def decode_virtual_mic(foa: FoaBuffer, look: SphericalPosition, pattern: float) -> MonoBuffer:
    """First-order virtual microphone pointed at ``look``.

    ``pattern`` blends omni (1) and figure-of-eight (0); 0.5 is a cardioid.
    """
    if not 0.0 <= pattern <= 1.0:
        raise ValidationError(f"pattern must lie in [0, 1], got {pattern}")
    gains = look.unit_vector
    out = pattern * SQRT2 * foa.w + (1.0 - pattern) * (gains @ foa.data[1:])
    return MonoBuffer(out, foa.sample_rate)


def convert_convention(
    foa: FoaBuffer,
    source: ChannelConvention,
    target: ChannelConvention,
) -> FoaBuffer:
    """Re-express a buffer in another channel convention.

    The returned buffer always carries ``data`` in the *target* layout; for
    AmbiX that means rows W, Y, Z, X.
    """
    if source is target:
        return FoaBuffer(foa.data.copy(), foa.sample_rate)
    d = foa.data
    if source is ChannelConvention.FUMA_EQ1:
        out = np.stack([d[0] * SQRT2, d[2], d[3], d[1]])
    else:
        out = np.stack([d[0] / SQRT2, d[3], d[1], d[2]])
    return FoaBuffer(out, foa.sample_rate)
