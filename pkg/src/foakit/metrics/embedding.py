"""Embedding-space scores computed over externally produced vectors.

The encoders that produce the embeddings are not part of this toolkit; these
functions consume their outputs (see :mod:`foakit.io` for the file format).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import kl_div

from foakit.errors import NotPositiveSemidefiniteError, ValidationError

EIGEN_TOLERANCE = 1e-8
KL_SMOOTHING = 1e-10
KL_SUM_TOLERANCE = 1e-6


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    vectors: NDArray[np.float64]
    labels: Optional[Sequence[str]] = None

    def __post_init__(self) -> None:
        v = np.array(self.vectors, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] == 0 or v.shape[1] == 0:
            raise ValidationError(f"embeddings must be a non-empty N x D matrix, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("embeddings must be finite")
        if self.labels is not None and len(self.labels) != v.shape[0]:
            raise ValidationError("labels and vectors differ in length")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def _as_set(x) -> EmbeddingSet:
    return x if isinstance(x, EmbeddingSet) else EmbeddingSet(x)


def _psd_sqrt(matrix: NDArray[np.float64]) -> NDArray[np.float64]:
    vals, vecs = np.linalg.eigh(matrix)
    vals = _clamp_eigenvalues(vals)
    return (vecs * np.sqrt(vals)) @ vecs.T


def _clamp_eigenvalues(vals: NDArray[np.float64]) -> NDArray[np.float64]:
    if vals.min() < -EIGEN_TOLERANCE:
        raise NotPositiveSemidefiniteError(f"eigenvalue {vals.min():.3e} below -{EIGEN_TOLERANCE}")
    return np.maximum(vals, 0.0)


def gaussian_stats(emb: EmbeddingSet) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Sample mean and unbiased covariance."""
    if emb.n < 2:
        raise ValidationError("at least two embeddings are needed for a covariance")
    mu = emb.vectors.mean(axis=0)
    centred = emb.vectors - mu
    return mu, centred.T @ centred / (emb.n - 1)


def frechet_distance_from_stats(mu1, sigma1, mu2, sigma2) -> float:
    """Fréchet distance between N(mu1, sigma1) and N(mu2, sigma2).

    The trace of sqrt(sigma1 @ sigma2) is taken from the eigenvalues of the
    symmetric matrix sqrt(sigma1) @ sigma2 @ sqrt(sigma1), which shares them.
    """
    root1 = _psd_sqrt(sigma1)
    inner = root1 @ sigma2 @ root1
    inner = (inner + inner.T) / 2
    trace_sqrt = np.sqrt(_clamp_eigenvalues(np.linalg.eigvalsh(inner))).sum()
    diff = mu1 - mu2
    value = diff @ diff + np.trace(sigma1) + np.trace(sigma2) - 2.0 * trace_sqrt
    return float(max(value, 0.0))


def frechet_distance(ref: EmbeddingSet | ArrayLike, gen: EmbeddingSet | ArrayLike) -> float:
    ref, gen = _as_set(ref), _as_set(gen)
    if ref.dim != gen.dim:
        raise ValidationError(f"dimension mismatch: {ref.dim} vs {gen.dim}")
    return frechet_distance_from_stats(*gaussian_stats(ref), *gaussian_stats(gen))


def _distribution(v: ArrayLike, name: str) -> NDArray[np.float64]:
    arr = np.asarray(v, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must be finite")
    if np.any(arr < 0):
        raise ValidationError(f"{name} has negative entries")
    total = arr.sum(axis=-1, keepdims=True)
    if np.any(np.abs(total - 1.0) > KL_SUM_TOLERANCE):
        raise ValidationError(f"{name} does not sum to 1 (within {KL_SUM_TOLERANCE})")
    return arr / total


def kl_divergence(p: ArrayLike, q: ArrayLike):
    """KL(p || q) in nats with additive smoothing of ``q``.

    ``q`` is smoothed by 1e-10 and renormalized.  Rows of 2-D inputs are
    treated as separate pairs and a vector of divergences is returned.
    """
    p_arr = _distribution(p, "p")
    q_arr = _distribution(q, "q")
    if p_arr.shape != q_arr.shape:
        raise ValidationError(f"shape mismatch: {p_arr.shape} vs {q_arr.shape}")
    q_s = (q_arr + KL_SMOOTHING) / (1.0 + KL_SMOOTHING * q_arr.shape[-1])
    # kl_div(x, y) = x log(x/y) - x + y is elementwise non-negative
    out = kl_div(p_arr, q_s).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def cosine_similarities(text_emb: EmbeddingSet | ArrayLike, audio_emb: EmbeddingSet | ArrayLike):
    a, b = _as_set(text_emb).vectors, _as_set(audio_emb).vectors
    if a.shape != b.shape:
        raise ValidationError(f"shape mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    if np.any(na == 0) or np.any(nb == 0):
        raise ValidationError("zero-norm embedding")
    return np.clip(np.einsum("ij,ij->i", a, b) / (na * nb), -1.0, 1.0)


def clap_score(text_emb: EmbeddingSet | ArrayLike, audio_emb: EmbeddingSet | ArrayLike) -> float:
    """Mean cosine similarity over index-paired text and audio embeddings."""
    return float(np.mean(cosine_similarities(text_emb, audio_emb)))
