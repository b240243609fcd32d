"""Direction-of-arrival estimation from FOA intensity vectors.

The intensity components are the products of the omnidirectional channel with
each directional channel, averaged per frame.  Frames are aggregated by an
energy-weighted mean of their vectors before converting to angles, which
sidesteps circular averaging of azimuths entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from numpy.typing import NDArray

from foakit.errors import NoEstimateError, ValidationError
from foakit.foa import FoaBuffer, wrap_azimuth

DEFAULT_FRAME = 1024
DEFAULT_HOP = 512
SILENCE_THRESHOLD = 1e-10


@dataclass(frozen=True, eq=False)
class IntensityTrack:
    """Per-frame mean intensity vectors and W energies.

    ``vectors`` has shape ``(n_frames, 3)`` holding (ix, iy, iz).
    """

    vectors: NDArray[np.float64]
    energy: NDArray[np.float64]
    frame_len: int
    hop: int
    sample_rate: int

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def active(self) -> NDArray[np.bool_]:
        return self.energy >= SILENCE_THRESHOLD

    def frame_times(self) -> NDArray[np.float64]:
        """Centre time of each frame in seconds."""
        return (np.arange(len(self)) * self.hop + self.frame_len / 2) / self.sample_rate


@dataclass(frozen=True)
class DoaEstimate:
    azimuth: float
    elevation: float
    distance_proxy: float

    def to_dict(self) -> dict:
        return {
            "azimuth": self.azimuth,
            "elevation": self.elevation,
            "distance_proxy": self.distance_proxy,
        }


def _frame_means(signal: NDArray[np.float64], frame_len: int, hop: int) -> NDArray[np.float64]:
    return sliding_window_view(signal, frame_len)[::hop].mean(axis=-1)


def intensity_vectors(
    foa: FoaBuffer,
    frame_len: int = DEFAULT_FRAME,
    hop: int = DEFAULT_HOP,
) -> IntensityTrack:
    """Frame-averaged intensity vectors (W*X, W*Y, W*Z) and W energy.

    Trailing samples that do not fill a whole frame are ignored.
    """
    if frame_len < 1 or hop < 1:
        raise ValidationError("frame_len and hop must be >= 1")
    if hop > frame_len:
        raise ValidationError(f"hop ({hop}) must not exceed frame_len ({frame_len})")
    if len(foa) < frame_len:
        raise ValidationError(f"buffer of {len(foa)} samples is shorter than one frame ({frame_len})")
    w = foa.w
    products = foa.data[1:] * w
    vectors = np.stack([_frame_means(ch, frame_len, hop) for ch in products], axis=1)
    energy = _frame_means(w * w, frame_len, hop)
    return IntensityTrack(vectors, energy, frame_len, hop, foa.sample_rate)


def doa_from_vector(vector) -> DoaEstimate:
    """Azimuth, elevation and magnitude of a single intensity vector."""
    ix, iy, iz = (float(c) for c in vector)
    horizontal = math.hypot(ix, iy)
    return DoaEstimate(
        azimuth=float(wrap_azimuth(math.atan2(iy, ix))),
        elevation=math.atan2(iz, horizontal),
        distance_proxy=math.sqrt(ix * ix + iy * iy + iz * iz),
    )


def aggregate_intensity(track: IntensityTrack) -> NDArray[np.float64]:
    """Energy-weighted mean intensity vector over non-silent frames."""
    mask = track.active
    if not mask.any():
        raise NoEstimateError("no frame rises above the silence threshold")
    weights = track.energy[mask]
    return weights @ track.vectors[mask] / weights.sum()


def estimate_doa(track: IntensityTrack) -> DoaEstimate:
    return doa_from_vector(aggregate_intensity(track))


def estimate_doa_timeline(track: IntensityTrack) -> list[Optional[DoaEstimate]]:
    """One estimate per frame; silent frames are ``None``."""
    return [
        doa_from_vector(vec) if active else None
        for vec, active in zip(track.vectors, track.active)
    ]


def localize(
    foa: FoaBuffer,
    frame_len: int = DEFAULT_FRAME,
    hop: int = DEFAULT_HOP,
) -> DoaEstimate:
    """Convenience wrapper: intensity track then aggregated estimate."""
    return estimate_doa(intensity_vectors(foa, frame_len, hop))


def distance_heuristic(distance_proxy: float) -> float:
    """Uncalibrated meters-like value ``1 / sqrt(proxy)``.

    Only meaningful for sources of comparable level; the proxy scales with
    source power as well as with distance.
    """
    if distance_proxy <= 0:
        return math.inf
    return 1.0 / math.sqrt(distance_proxy)
