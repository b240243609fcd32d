"""File formats: float32 FOA WAV with a JSON sidecar, mono source WAV, embeddings."""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np
from numpy.typing import NDArray
from scipy.io import wavfile

from foakit.errors import ValidationError
from foakit.foa import ChannelConvention, FoaBuffer, MonoBuffer

EMBEDDING_MAGIC = b"EMB1"
_EMB_HEADER = struct.Struct("<4sII")


def sidecar_path(wav_path: str | Path) -> Path:
    path = Path(wav_path)
    return path.with_name(path.name + ".json")


def _to_float(data: NDArray) -> NDArray[np.float64]:
    if data.dtype.kind == "f":
        return data.astype(np.float64)
    if data.dtype == np.uint8:
        return (data.astype(np.float64) - 128.0) / 128.0
    return data.astype(np.float64) / float(-np.iinfo(data.dtype).min)


def write_foa_wav(path: str | Path, foa: FoaBuffer, metadata: dict | None = None) -> Path:
    """Write a 32-bit float, 4-channel WAV in W, X, Y, Z order plus its sidecar.

    Returns the sidecar path.  The sidecar always carries the channel
    convention tag; ``metadata`` entries are merged in after it.
    """
    path = Path(path)
    wavfile.write(path, foa.sample_rate, np.ascontiguousarray(foa.data.T, dtype="<f4"))
    tag = {"convention": ChannelConvention.FUMA_EQ1.value, "peak": foa.peak}
    tag.update(metadata or {})
    side = sidecar_path(path)
    side.write_text(json.dumps(tag, indent=2, sort_keys=True) + "\n")
    return side


def read_foa_wav(path: str | Path) -> FoaBuffer:
    """Read a 4-channel FOA WAV.  A sidecar, if present, must declare ``fuma_eq1``."""
    path = Path(path)
    side = sidecar_path(path)
    if side.exists():
        convention = json.loads(side.read_text()).get("convention", ChannelConvention.FUMA_EQ1.value)
        if convention != ChannelConvention.FUMA_EQ1.value:
            raise ValidationError(f"{path}: unsupported channel convention {convention!r}")
    rate, data = wavfile.read(path)
    if data.ndim != 2 or data.shape[1] != 4:
        channels = 1 if data.ndim == 1 else data.shape[1]
        raise ValidationError(f"{path}: expected 4 channels, found {channels}")
    return FoaBuffer(_to_float(data).T, rate)


def read_mono_wav(path: str | Path) -> MonoBuffer:
    rate, data = wavfile.read(Path(path))
    if data.ndim == 2:
        if data.shape[1] != 1:
            raise ValidationError(f"{path}: expected a mono file, found {data.shape[1]} channels")
        data = data[:, 0]
    return MonoBuffer(_to_float(data), rate)


def write_mono_wav(path: str | Path, buf: MonoBuffer) -> None:
    wavfile.write(Path(path), buf.sample_rate, buf.samples.astype("<f4"))


def write_embeddings(path: str | Path, vectors) -> None:
    """Write an ``N x D`` matrix in the binary ``EMB1`` format (little-endian f32)."""
    arr = np.asarray(vectors, dtype=np.float64)
    if arr.ndim != 2:
        raise ValidationError(f"embeddings must be 2-D, got shape {arr.shape}")
    n, d = arr.shape
    with open(path, "wb") as fh:
        fh.write(_EMB_HEADER.pack(EMBEDDING_MAGIC, n, d))
        fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def read_embeddings(path: str | Path) -> NDArray[np.float64]:
    """Read an embedding matrix from ``EMB1`` binary or a JSON array of arrays."""
    raw = Path(path).read_bytes()
    if raw[:4] == EMBEDDING_MAGIC:
        if len(raw) < _EMB_HEADER.size:
            raise ValidationError(f"{path}: truncated header")
        _, n, d = _EMB_HEADER.unpack_from(raw)
        expected = _EMB_HEADER.size + 4 * n * d
        if len(raw) != expected:
            raise ValidationError(f"{path}: expected {expected} bytes for {n}x{d}, found {len(raw)}")
        arr = np.frombuffer(raw, dtype="<f4", offset=_EMB_HEADER.size).reshape(n, d)
        return arr.astype(np.float64)
    try:
        rows = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ValidationError(f"{path}: neither EMB1 binary nor JSON") from exc
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ValidationError(f"{path}: JSON embeddings must be a non-empty array of arrays")
    if len({len(r) for r in rows}) != 1:
        raise ValidationError(f"{path}: rows have differing lengths")
    return np.array(rows, dtype=np.float64)
