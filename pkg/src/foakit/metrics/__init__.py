"""Spatial, spectral and embedding-space evaluation metrics."""

from foakit.metrics.embedding import (
    EmbeddingSet,
    clap_score,
    cosine_similarities,
    frechet_distance,
    frechet_distance_from_stats,
    gaussian_stats,
    kl_divergence,
)
from foakit.metrics.report import EvalReport, summarize
from foakit.metrics.spatial import (
    circular_difference,
    l1_azimuth,
    l1_distance,
    l1_elevation,
    spatial_angle,
)
from foakit.metrics.spectral import (
    ChannelDistance,
    StftConfig,
    mel_distance,
    mel_filterbank,
    mrstft_distance,
    stft_magnitude,
)

__all__ = [
    "ChannelDistance",
    "EmbeddingSet",
    "EvalReport",
    "StftConfig",
    "circular_difference",
    "clap_score",
    "cosine_similarities",
    "frechet_distance",
    "frechet_distance_from_stats",
    "gaussian_stats",
    "kl_divergence",
    "l1_azimuth",
    "l1_distance",
    "l1_elevation",
    "mel_distance",
    "mel_filterbank",
    "mrstft_distance",
    "spatial_angle",
    "stft_magnitude",
    "summarize",
]
