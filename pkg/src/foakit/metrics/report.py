"""Batch evaluation report: per-item rows plus mean/median summaries."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from foakit.errors import ValidationError

REPORT_FORMAT_VERSION = 1

ITEM_METRICS = (
    "l1_azimuth",
    "l1_elevation",
    "l1_distance",
    "spatial_angle",
    "stft_distance",
    "mel_distance",
    "kl",
    "clap",
)


def summarize(values: Sequence[float]) -> dict[str, float]:
    """Mean, median and count of the finite values given."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ValidationError("nothing to summarize")
    return {"mean": float(arr.mean()), "median": float(np.median(arr)), "count": int(arr.size)}


@dataclass
class EvalReport:
    """Scalar fields hold batch means; ``None`` means the metric had no inputs."""

    l1_azimuth: Optional[float] = None
    l1_elevation: Optional[float] = None
    l1_distance: Optional[float] = None
    spatial_angle: Optional[float] = None
    stft_distance: Optional[float] = None
    mel_distance: Optional[float] = None
    fad: Optional[float] = None
    kl: Optional[float] = None
    clap: Optional[float] = None
    medians: dict[str, float] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)
    items: list[dict[str, Any]] = field(default_factory=list)
    toolkit_version: str = ""

    def __post_init__(self) -> None:
        for name in (*ITEM_METRICS, "fad"):
            value = getattr(self, name)
            if value is None:
                continue
            if not math.isfinite(value):
                raise ValidationError(f"{name} is not finite")
            if name == "clap":
                if not -1.0 <= value <= 1.0:
                    raise ValidationError("clap must lie in [-1, 1]")
            elif value < 0:
                raise ValidationError(f"{name} must be non-negative")

    @classmethod
    def from_items(cls, items: list[dict[str, Any]], fad: Optional[float] = None, **kwargs) -> EvalReport:
        means, medians, counts = {}, {}, {}
        for name in ITEM_METRICS:
            values = [row[name] for row in items if row.get(name) is not None]
            if values:
                stats = summarize(values)
                means[name] = stats["mean"]
                medians[name] = stats["median"]
                counts[name] = stats["count"]
        return cls(fad=fad, medians=medians, counts=counts, items=items, **means, **kwargs)

    def to_dict(self) -> dict[str, Any]:
        metrics: dict[str, Any] = {}
        for name in ITEM_METRICS:
            mean = getattr(self, name)
            if mean is not None:
                metrics[name] = {
                    "mean": mean,
                    "median": self.medians.get(name, mean),
                    "count": self.counts.get(name, 0),
                }
        if self.fad is not None:
            metrics["fad"] = {"value": self.fad}
        return {
            "format_version": REPORT_FORMAT_VERSION,
            "toolkit_version": self.toolkit_version,
            "n_items": len(self.items),
            "metrics": metrics,
            "items": self.items,
        }

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> EvalReport:
        metrics = obj.get("metrics", {})
        means = {k: v["mean"] for k, v in metrics.items() if k in ITEM_METRICS}
        return cls(
            fad=metrics.get("fad", {}).get("value"),
            medians={k: v["median"] for k, v in metrics.items() if k in ITEM_METRICS},
            counts={k: v["count"] for k, v in metrics.items() if k in ITEM_METRICS},
            items=list(obj.get("items", [])),
            toolkit_version=obj.get("toolkit_version", ""),
            **means,
        )
