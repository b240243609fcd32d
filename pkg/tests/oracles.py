"""Independent reference implementations: explicit loops and textbook formulas."""

import math

import numpy as np

from foakit.metrics import StftConfig

SR = 48000

def naive_magnitudes(x, n_fft, hop):
    """Circularly framed, Hann-windowed magnitude DFT computed as an O(n^2) sum."""
    n = len(x)
    win = np.array([0.5 - 0.5 * math.cos(2 * math.pi * i / n_fft) for i in range(n_fft)])
    k = np.arange(n_fft // 2 + 1)[:, None]
    m = np.arange(n_fft)[None, :]
    basis = np.exp(-2j * np.pi * k * m / n_fft)
    rows = []
    for start in range(0, n, hop):
        frame = np.array([x[(start + i) % n] for i in range(n_fft)]) * win
        rows.append(np.abs(basis @ frame))
    return np.array(rows)


def naive_mel_bank(n_mels, n_fft, sr, fmin, fmax):
    def to_mel(f):
        return 2595.0 * math.log10(1.0 + f / 700.0)

    def to_hz(m):
        return 700.0 * (10.0 ** (m / 2595.0) - 1.0)

    lo, hi = to_mel(fmin), to_mel(fmax)
    edges = [to_hz(lo + (hi - lo) * i / (n_mels + 1)) for i in range(n_mels + 2)]
    bank = np.zeros((n_mels, n_fft // 2 + 1))
    for b in range(n_mels):
        left, centre, right = edges[b], edges[b + 1], edges[b + 2]
        for j in range(n_fft // 2 + 1):
            f = j * sr / n_fft
            if left < f <= centre:
                bank[b, j] = (f - left) / (centre - left)
            elif centre < f < right:
                bank[b, j] = (right - f) / (right - centre)
    return bank


def naive_terms(ma, mb, eps):
    diff = math.sqrt(float(np.sum((ma - mb) ** 2)))
    den = max(math.sqrt(float(np.sum(ma**2))), math.sqrt(float(np.sum(mb**2))))
    sc = diff / den if den > 0 else 0.0
    return sc + float(np.sum(np.abs(np.log(ma + eps) - np.log(mb + eps)))) / ma.size


def naive_distance(a, b, mel=False, sr=SR):
    cfg = StftConfig()
    out = []
    for ch in range(4):
        total = 0.0
        for n_fft in cfg.fft_sizes:
            ma = naive_magnitudes(a[ch], n_fft, n_fft // 4)
            mb = naive_magnitudes(b[ch], n_fft, n_fft // 4)
            if mel:
                bank = naive_mel_bank(min(128, n_fft // 16), n_fft, sr, 20.0, sr / 2)
                total += naive_terms(ma @ bank.T, mb @ bank.T, 1e-5)
            else:
                total += naive_terms(ma, mb, 1e-7)
        out.append(total)
    return np.array(out)
