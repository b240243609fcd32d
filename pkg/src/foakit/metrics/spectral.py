"""Per-channel multi-resolution STFT and mel distances between FOA buffers.

Each resolution contributes a spectral-convergence term and a mean absolute
log-magnitude difference; the channel distance is the sum over resolutions.
Framing is circular (frames start every ``hop`` samples and wrap around the
end of the signal), so a common circular shift by a multiple of every hop
only permutes frames and leaves the distance unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray
from scipy.signal import get_window

from foakit.errors import ValidationError
from foakit.foa import FoaBuffer

CHANNELS = ("w", "x", "y", "z")


@dataclass(frozen=True)
class StftConfig:
    fft_sizes: tuple[int, ...] = (2048, 1024, 512, 256, 128, 64)
    hop_ratio: float = 0.25
    window: str = "hann"
    log_eps: float = 1e-7
    n_mels: int = 128
    mel_fmin: float = 20.0
    mel_fmax: float | None = None
    mel_log_eps: float = 1e-5
    # mel bands at a resolution: min(n_mels, fft_size // mel_bins_divisor)
    mel_bins_divisor: int = 16

    def __post_init__(self) -> None:
        object.__setattr__(self, "fft_sizes", tuple(int(n) for n in self.fft_sizes))
        if not self.fft_sizes:
            raise ValidationError("fft_sizes must not be empty")
        for n in self.fft_sizes:
            if n < 2 or n & (n - 1):
                raise ValidationError(f"fft size {n} is not a power of two")
        if not 0 < self.hop_ratio <= 1:
            raise ValidationError("hop_ratio must lie in (0, 1]")
        if self.log_eps <= 0 or self.mel_log_eps <= 0:
            raise ValidationError("log epsilons must be positive")

    def hop(self, fft_size: int) -> int:
        return max(1, int(fft_size * self.hop_ratio))

    def mel_bands(self, fft_size: int) -> int:
        return max(1, min(self.n_mels, fft_size // self.mel_bins_divisor))


@dataclass
class ChannelDistance:
    """Distance per FOA channel plus their unweighted mean."""

    per_channel: dict[str, float] = field(default_factory=dict)

    @property
    def mean(self) -> float:
        return float(np.mean(list(self.per_channel.values())))

    def to_dict(self) -> dict:
        return {**self.per_channel, "mean": self.mean}


def circular_frames(signal: NDArray[np.float64], fft_size: int, hop: int) -> NDArray[np.float64]:
    n = signal.shape[-1]
    starts = np.arange(0, n, hop)
    idx = (starts[:, None] + np.arange(fft_size)[None, :]) % n
    return signal[..., idx]


def stft_magnitude(signal: NDArray[np.float64], fft_size: int, hop: int, window: str = "hann"):
    """Magnitude STFT with circular framing; shape ``(..., frames, fft_size // 2 + 1)``."""
    win = get_window(window, fft_size, fftbins=True)
    return np.abs(np.fft.rfft(circular_frames(signal, fft_size, hop) * win, axis=-1))


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@lru_cache(maxsize=64)
def mel_filterbank(n_mels: int, fft_size: int, sample_rate: int, fmin: float, fmax: float) -> NDArray:
    """Triangular, peak-normalized filters on rfft bins; shape ``(n_mels, fft_size // 2 + 1)``."""
    edges = mel_to_hz(np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2))
    freqs = np.arange(fft_size // 2 + 1) * sample_rate / fft_size
    lower, centre, upper = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rising = (freqs - lower) / (centre - lower)
    falling = (upper - freqs) / (upper - centre)
    fb = np.maximum(0.0, np.minimum(rising, falling))
    fb.setflags(write=False)
    return fb


def _resolution_terms(mag_a: NDArray, mag_b: NDArray, eps: float) -> float:
    num = np.linalg.norm(mag_a - mag_b)
    den = max(np.linalg.norm(mag_a), np.linalg.norm(mag_b))
    convergence = num / den if den > 0 else 0.0
    log_l1 = np.mean(np.abs(np.log(mag_a + eps) - np.log(mag_b + eps)))
    return float(convergence + log_l1)


def _check_pair(a: FoaBuffer, b: FoaBuffer) -> None:
    if len(a) != len(b):
        raise ValidationError(f"length mismatch: {len(a)} vs {len(b)} samples")
    if a.sample_rate != b.sample_rate:
        raise ValidationError(f"sample rate mismatch: {a.sample_rate} vs {b.sample_rate}")
    if len(a) == 0:
        raise ValidationError("cannot compare empty buffers")


def mrstft_distance(a: FoaBuffer, b: FoaBuffer, cfg: StftConfig = StftConfig()) -> ChannelDistance:
    """Multi-resolution STFT distance per channel.

    The spectral-convergence denominator is the larger of the two magnitude
    norms, which keeps the distance symmetric and finite against silence.
    """
    _check_pair(a, b)
    totals = np.zeros(4)
    for n_fft in cfg.fft_sizes:
        hop = cfg.hop(n_fft)
        mag_a = stft_magnitude(a.data, n_fft, hop, cfg.window)
        mag_b = stft_magnitude(b.data, n_fft, hop, cfg.window)
        for ch in range(4):
            totals[ch] += _resolution_terms(mag_a[ch], mag_b[ch], cfg.log_eps)
    return ChannelDistance(dict(zip(CHANNELS, map(float, totals))))


def mel_distance(a: FoaBuffer, b: FoaBuffer, cfg: StftConfig = StftConfig()) -> ChannelDistance:
    """Same construction as :func:`mrstft_distance` on mel-projected magnitudes."""
    _check_pair(a, b)
    fmax = cfg.mel_fmax if cfg.mel_fmax is not None else a.sample_rate / 2
    totals = np.zeros(4)
    for n_fft in cfg.fft_sizes:
        hop = cfg.hop(n_fft)
        fb = mel_filterbank(cfg.mel_bands(n_fft), n_fft, a.sample_rate, cfg.mel_fmin, fmax)
        mel_a = stft_magnitude(a.data, n_fft, hop, cfg.window) @ fb.T
        mel_b = stft_magnitude(b.data, n_fft, hop, cfg.window) @ fb.T
        for ch in range(4):
            totals[ch] += _resolution_terms(mel_a[ch], mel_b[ch], cfg.mel_log_eps)
    return ChannelDistance(dict(zip(CHANNELS, map(float, totals))))
