"""Render declarative scenes of positioned sound events into FOA buffers.

A scene is a list of events (mono source, start time, static position or
waypoint trajectory, gain) plus a room described by two numbers: a
characteristic size in meters and the 30 dB decay time.  Each event is
attenuated with a clamped 1/d law, encoded, given a diffuse reverberant tail
and mixed by plain summation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from numpy.typing import NDArray
from scipy.signal import fftconvolve

from foakit import schemas
from foakit.errors import ValidationError
from foakit.foa import (
    W_GAIN,
    FoaBuffer,
    MonoBuffer,
    SphericalPosition,
    direction_gains,
    interpolate_waypoints,
)
from foakit.io import read_mono_wav

SPEED_OF_SOUND = 343.0
REFERENCE_DISTANCE = 1.0
# amplitude envelope extends to -90 dB before truncation
TAIL_LENGTH_RT30 = 3.0

Trajectory = Sequence[tuple[float, SphericalPosition]]
Placement = Union[SphericalPosition, Trajectory]


@dataclass(frozen=True)
class RoomSpec:
    size_m: float = 0.0
    rt30_s: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.size_m) and math.isfinite(self.rt30_s)):
            raise ValidationError("room parameters must be finite")
        if self.size_m < 0 or self.rt30_s < 0:
            raise ValidationError("room size and rt30 must be non-negative")
        if self.rt30_s > 0 and self.size_m == 0:
            raise ValidationError("a reverberant room (rt30_s > 0) needs size_m > 0")

    @property
    def anechoic(self) -> bool:
        return self.rt30_s == 0


@dataclass(frozen=True)
class EventSpec:
    """One sound event.  ``source`` is a WAV path or an in-memory buffer."""

    source: Union[str, Path, MonoBuffer]
    start_time_s: float
    position: Placement
    gain_db: float = 0.0

    @property
    def is_moving(self) -> bool:
        return not isinstance(self.position, SphericalPosition)


@dataclass(frozen=True)
class SceneSpec:
    total_time_s: float
    sample_rate: int
    room: RoomSpec = field(default_factory=RoomSpec)
    events: tuple[EventSpec, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(self.events))
        if not self.total_time_s > 0:
            raise ValidationError("total_time_s must be positive")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise ValidationError("sample_rate must be a positive integer")
        if not self.events:
            raise ValidationError("a scene needs at least one event")
        for i, ev in enumerate(self.events):
            if ev.start_time_s < 0:
                raise ValidationError(f"event {i}: start_time_s must be >= 0")
            if ev.start_time_s >= self.total_time_s:
                raise ValidationError(f"event {i}: starts after total_time_s")

    @property
    def n_samples(self) -> int:
        return int(round(self.total_time_s * self.sample_rate))


def apply_distance_attenuation(p: MonoBuffer, distance: float) -> MonoBuffer:
    """Scale by ``min(1, d_ref / d)`` with ``d_ref = 1 m``."""
    if not distance > 0:
        raise ValidationError(f"distance must be positive, got {distance}")
    return MonoBuffer(p.samples * _distance_gain(distance), p.sample_rate)


def _distance_gain(distance):
    return np.minimum(1.0, REFERENCE_DISTANCE / np.asarray(distance, dtype=np.float64))


def reverb_gain(room: RoomSpec) -> float:
    """Reverberant-to-direct amplitude ratio at the reference distance.

    Uses the diffuse-field energy ratio 16*pi*r^2*T60 / (0.161*V) with the
    room volume taken as ``size_m**3`` and T60 extrapolated as 2 * RT30.
    """
    if room.anechoic:
        return 0.0
    volume = room.size_m**3
    t60 = 2.0 * room.rt30_s
    ratio = 16.0 * math.pi * REFERENCE_DISTANCE**2 * t60 / (0.161 * volume)
    return math.sqrt(ratio)


def reverb_impulse_responses(room: RoomSpec, sample_rate: int, seed: int) -> NDArray[np.float64]:
    """Diffuse-tail filters, shape ``(4, L)``, to be driven by the direct W channel.

    Each channel is an independent random-sign sequence under an exponential
    envelope that falls 30 dB over ``rt30_s``.  The directional channels carry
    one third of the pressure energy each, as in an isotropic diffuse field.
    """
    if room.anechoic:
        return np.zeros((4, 0))
    pre = int(round(room.size_m / SPEED_OF_SOUND * sample_rate))
    n_tail = int(math.ceil(TAIL_LENGTH_RT30 * room.rt30_s * sample_rate)) + 1
    tau = room.rt30_s / (1.5 * math.log(10.0))
    envelope = np.exp(-np.arange(n_tail) / (tau * sample_rate))
    rng = np.random.default_rng(seed)
    signs = rng.integers(0, 2, size=(4, n_tail)) * 2.0 - 1.0
    # pressure tail energy equals reverb_gain**2
    amp = reverb_gain(room) / math.sqrt(np.sum(envelope**2))
    tail = signs * envelope * amp
    tail[1:] *= math.sqrt(2.0 / 3.0)
    irs = np.zeros((4, pre + n_tail))
    irs[:, pre:] = tail
    return irs


def synth_reverb_tail(direct: FoaBuffer, room: RoomSpec, seed: int = 0) -> FoaBuffer:
    """Add a diffuse reverberant tail to ``direct``; output keeps the input length."""
    if room.anechoic:
        return direct
    irs = reverb_impulse_responses(room, direct.sample_rate, seed)
    n = len(direct)
    tail = np.stack([fftconvolve(direct.w, ir)[:n] for ir in irs])
    return FoaBuffer(direct.data + tail, direct.sample_rate)


def _resolve_source(ev: EventSpec, index: int, sample_rate: int) -> MonoBuffer:
    src = ev.source if isinstance(ev.source, MonoBuffer) else read_mono_wav(ev.source)
    if src.sample_rate != sample_rate:
        raise ValidationError(
            f"event {index}: source rate {src.sample_rate} Hz differs from scene rate "
            f"{sample_rate} Hz (resampling is not supported)"
        )
    if len(src) == 0:
        raise ValidationError(f"event {index}: source is empty")
    return src


def _encode_event(ev: EventSpec, src: MonoBuffer) -> FoaBuffer:
    p = src.samples * 10.0 ** (ev.gain_db / 20.0)
    if not ev.is_moving:
        gains = ev.position.unit_vector[:, None]
        p = p * _distance_gain(ev.position.distance)
    else:
        for j, (t, _) in enumerate(ev.position):
            if not 0.0 <= t <= src.duration:
                raise ValidationError(f"waypoint {j} at {t} s lies outside the source duration")
        times = np.arange(len(src)) / src.sample_rate
        az, el, dist = interpolate_waypoints(ev.position, times)
        gains = direction_gains(az, el)
        p = p * _distance_gain(dist)
    data = np.empty((4, p.shape[0]))
    data[0] = p * W_GAIN
    data[1:] = gains * p
    return FoaBuffer(data, src.sample_rate)


def render_event(scene: SceneSpec, index: int, seed: int = 0) -> FoaBuffer:
    """Render one event of ``scene`` onto the full scene timeline."""
    ev = scene.events[index]
    src = _resolve_source(ev, index, scene.sample_rate)
    start = int(round(ev.start_time_s * scene.sample_rate))
    n_total = scene.n_samples
    if start + len(src) > n_total:
        raise ValidationError(
            f"event {index}: ends at {(start + len(src)) / scene.sample_rate:.6f} s, "
            f"beyond total_time_s={scene.total_time_s}"
        )
    try:
        encoded = _encode_event(ev, src)
    except ValidationError as exc:
        raise ValidationError(f"event {index}: {exc}") from None
    placed = np.zeros((4, n_total))
    placed[:, start : start + len(src)] = encoded.data
    return synth_reverb_tail(FoaBuffer(placed, scene.sample_rate), scene.room, seed)


def render_scene(scene: SceneSpec, seed: int = 0) -> FoaBuffer:
    """Render every event and mix by summation (no limiting).

    All events share the room's tail filters for the given seed, so the
    rendering is linear in the event set.
    """
    mix = np.zeros((4, scene.n_samples))
    for i in range(len(scene.events)):
        mix += render_event(scene, i, seed).data
    return FoaBuffer(mix, scene.sample_rate)


def _position_from_json(obj: dict) -> SphericalPosition:
    return SphericalPosition(obj["azimuth"], obj["elevation"], obj["distance"])


def scene_from_dict(obj: dict, base_dir: str | Path = ".") -> SceneSpec:
    """Build a :class:`SceneSpec` from a parsed manifest; source paths resolve against ``base_dir``."""
    schemas.validate(obj, "scene", label="scene manifest")
    base = Path(base_dir)
    events = []
    for i, ev in enumerate(obj["events"]):
        try:
            pos = ev["position"]
            if isinstance(pos, dict):
                placement: Placement = _position_from_json(pos)
            else:
                placement = tuple((float(wp["time_s"]), _position_from_json(wp)) for wp in pos)
                if any(b[0] <= a[0] for a, b in zip(placement, placement[1:])):
                    raise ValidationError("waypoint times must be strictly increasing")
        except ValidationError as exc:
            raise ValidationError(f"event {i}: {exc}") from None
        events.append(
            EventSpec(
                source=base / ev["source"],
                start_time_s=float(ev["start_time_s"]),
                position=placement,
                gain_db=float(ev.get("gain_db", 0.0)),
            )
        )
    room = RoomSpec(float(obj["room"]["size_m"]), float(obj["room"]["rt30_s"]))
    return SceneSpec(float(obj["total_time_s"]), obj["sample_rate"], room, tuple(events))


def load_scene(path: str | Path) -> SceneSpec:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    return scene_from_dict(obj, base_dir=path.parent)


def _position_to_json(pos: SphericalPosition) -> dict:
    return {"azimuth": pos.azimuth, "elevation": pos.elevation, "distance": pos.distance}


def scene_to_dict(scene: SceneSpec) -> dict:
    """Inverse of :func:`scene_from_dict` for scenes whose sources are paths."""
    events = []
    for i, ev in enumerate(scene.events):
        if isinstance(ev.source, MonoBuffer):
            raise ValidationError(f"event {i}: in-memory sources cannot be serialized")
        if ev.is_moving:
            pos = [{"time_s": t, **_position_to_json(p)} for t, p in ev.position]
        else:
            pos = _position_to_json(ev.position)
        events.append(
            {
                "source": str(ev.source),
                "start_time_s": ev.start_time_s,
                "position": pos,
                "gain_db": ev.gain_db,
            }
        )
    return {
        "total_time_s": scene.total_time_s,
        "sample_rate": scene.sample_rate,
        "room": {"size_m": scene.room.size_m, "rt30_s": scene.room.rt30_s},
        "events": events,
    }
