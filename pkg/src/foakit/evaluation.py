"""Batch evaluation of generated FOA files against ground-truth positions."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import numpy as np
from numpy.typing import NDArray

from foakit import __version__, schemas
from foakit.errors import NumericalError, ValidationError
from foakit.foa import SphericalPosition
from foakit.io import read_embeddings, read_foa_wav
from foakit.localization import DEFAULT_FRAME, DEFAULT_HOP, distance_heuristic, localize
from foakit.metrics import (
    EvalReport,
    StftConfig,
    frechet_distance,
    l1_azimuth,
    l1_distance,
    l1_elevation,
    mel_distance,
    mrstft_distance,
    spatial_angle,
)
from foakit.metrics.embedding import cosine_similarities, kl_divergence


@dataclass(frozen=True)
class ManifestItem:
    generated: Path
    position: SphericalPosition
    reference: Optional[Path] = None
    caption: Optional[str] = None


def load_manifest(path: str | Path, pred_dir: str | Path | None = None) -> list[ManifestItem]:
    """Parse and validate an evaluation manifest.

    ``reference`` paths resolve against the manifest's directory; ``generated``
    paths against ``pred_dir`` when given, else the manifest's directory.
    """
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    schemas.validate(obj, "manifest", label="evaluation manifest")
    base = path.parent
    gen_base = Path(pred_dir) if pred_dir is not None else base
    items = []
    for i, row in enumerate(obj["items"]):
        try:
            pos = SphericalPosition(**row["position"])
        except ValidationError as exc:
            raise ValidationError(f"item {i}: {exc}") from None
        generated = gen_base / row["generated"]
        reference = base / row["reference"] if "reference" in row else None
        for p in (generated, reference):
            if p is not None and not p.is_file():
                raise ValidationError(f"item {i}: file not found: {p}")
        items.append(ManifestItem(generated, pos, reference, row.get("caption")))
    return items


def _paired_rows(matrix: Optional[NDArray], n_items: int, label: str) -> Optional[NDArray]:
    if matrix is not None and matrix.shape[0] != n_items:
        raise ValidationError(f"{label} has {matrix.shape[0]} rows for {n_items} manifest items")
    return matrix


def _evaluate_item(
    index: int,
    item: ManifestItem,
    *,
    frame_len: int,
    hop: int,
    with_distance: bool,
    cfg: StftConfig,
    dist_ref: Optional[NDArray],
    dist_gen: Optional[NDArray],
    emb_text: Optional[NDArray],
    emb_gen: Optional[NDArray],
) -> dict[str, Any]:
    row: dict[str, Any] = {"index": index, "generated": str(item.generated), "errors": {}}
    if item.reference is not None:
        row["reference"] = str(item.reference)
    if item.caption is not None:
        row["caption"] = item.caption
    truth = item.position
    row["truth"] = {"azimuth": truth.azimuth, "elevation": truth.elevation, "distance": truth.distance}
    errors = row["errors"]

    try:
        generated = read_foa_wav(item.generated)
    except (OSError, ValidationError) as exc:
        errors["read"] = str(exc)
        return row

    try:
        est = localize(generated, frame_len, hop)
        row["estimate"] = est.to_dict()
        row["l1_azimuth"] = l1_azimuth(truth.azimuth, est.azimuth)
        row["l1_elevation"] = l1_elevation(truth.elevation, est.elevation)
        row["spatial_angle"] = spatial_angle((truth.azimuth, truth.elevation), (est.azimuth, est.elevation))
        if with_distance:
            meters = distance_heuristic(est.distance_proxy)
            if math.isfinite(meters):
                row["estimate"]["distance_heuristic_m"] = meters
                row["l1_distance"] = l1_distance(truth.distance, meters)
            else:
                errors["distance"] = "zero intensity proxy; distance heuristic undefined"
    except (ValidationError, NumericalError) as exc:
        errors["localization"] = str(exc)

    if item.reference is not None:
        try:
            reference = read_foa_wav(item.reference)
            stft = mrstft_distance(reference, generated, cfg)
            mel = mel_distance(reference, generated, cfg)
            row["stft_distance"] = stft.mean
            row["mel_distance"] = mel.mean
            row["stft_per_channel"] = stft.per_channel
            row["mel_per_channel"] = mel.per_channel
        except (OSError, ValidationError, NumericalError) as exc:
            errors["spectral"] = str(exc)

    if dist_ref is not None and dist_gen is not None:
        try:
            row["kl"] = kl_divergence(dist_ref[index], dist_gen[index])
        except (ValidationError, NumericalError) as exc:
            errors["kl"] = str(exc)
    if emb_text is not None and emb_gen is not None:
        try:
            row["clap"] = float(cosine_similarities(emb_text[index : index + 1], emb_gen[index : index + 1])[0])
        except (ValidationError, NumericalError) as exc:
            errors["clap"] = str(exc)
    return row


def evaluate(
    items: list[ManifestItem],
    *,
    emb_ref: Optional[NDArray] = None,
    emb_gen: Optional[NDArray] = None,
    emb_text: Optional[NDArray] = None,
    dist_ref: Optional[NDArray] = None,
    dist_gen: Optional[NDArray] = None,
    frame_len: int = DEFAULT_FRAME,
    hop: int = DEFAULT_HOP,
    with_distance: bool = False,
    cfg: StftConfig = StftConfig(),
    jobs: int = 1,
) -> EvalReport:
    """Evaluate every manifest item; per-item failures land in the item's ``errors``.

    FAD uses ``emb_ref`` against ``emb_gen`` as whole sets.  KL pairs rows of
    ``dist_ref``/``dist_gen`` with manifest items by index, CLAP likewise pairs
    ``emb_text`` with ``emb_gen``.
    """
    n = len(items)
    if (dist_ref is None) != (dist_gen is None):
        raise ValidationError("KL needs both reference and generated distributions")
    dist_ref = _paired_rows(dist_ref, n, "reference distributions")
    dist_gen = _paired_rows(dist_gen, n, "generated distributions")
    if emb_text is not None:
        if emb_gen is None:
            raise ValidationError("CLAP needs generated audio embeddings")
        _paired_rows(emb_text, n, "text embeddings")
        _paired_rows(emb_gen, n, "generated embeddings")

    def work(args):
        index, item = args
        return _evaluate_item(
            index,
            item,
            frame_len=frame_len,
            hop=hop,
            with_distance=with_distance,
            cfg=cfg,
            dist_ref=dist_ref,
            dist_gen=dist_gen,
            emb_text=emb_text,
            emb_gen=emb_gen,
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(work, enumerate(items)))
    else:
        rows = [work(pair) for pair in enumerate(items)]

    fad = None
    if emb_ref is not None and emb_gen is not None:
        fad = frechet_distance(emb_ref, emb_gen)
    return EvalReport.from_items(rows, fad=fad, toolkit_version=__version__)


def load_matrix(path: str | Path | None) -> Optional[NDArray[np.float64]]:
    return None if path is None else read_embeddings(path)
