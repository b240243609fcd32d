"""Command-line entry point: ``foakit <subcommand>``.

Exit codes: 0 success, 2 validation failure, 3 I/O failure, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from foakit import EMBEDDING_FORMAT, SCENE_FORMAT_VERSION, WAV_CONVENTION, __version__, schemas
from foakit.errors import NumericalError, ValidationError
from foakit.io import read_embeddings, read_foa_wav, write_foa_wav
from foakit.localization import (
    DEFAULT_FRAME,
    DEFAULT_HOP,
    distance_heuristic,
    estimate_doa,
    estimate_doa_timeline,
    intensity_vectors,
)
from foakit.metrics.report import REPORT_FORMAT_VERSION

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4


def _dump(obj: Any, path: str | None) -> None:
    text = json.dumps(obj, indent=2, allow_nan=False) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_spatialize(args: argparse.Namespace) -> int:
    from foakit.spatializer import load_scene, render_scene

    scene = load_scene(args.scene)
    foa = render_scene(scene, seed=args.seed)
    write_foa_wav(args.out, foa, {"seed": args.seed, "sample_rate": foa.sample_rate})
    return EXIT_OK


def cmd_localize(args: argparse.Namespace) -> int:
    foa = read_foa_wav(args.input)
    track = intensity_vectors(foa, args.frame, args.hop)
    est = estimate_doa(track)
    out: dict[str, Any] = est.to_dict()
    if args.distance_heuristic:
        meters = distance_heuristic(est.distance_proxy)
        # a zero proxy (no directional energy) has no finite distance
        out["distance_heuristic_m"] = meters if math.isfinite(meters) else None
    frames = []
    if args.timeline:
        times = track.frame_times()
        for i, (frame_est, t) in enumerate(zip(estimate_doa_timeline(track), times)):
            entry: dict[str, Any] = {"index": i, "time_s": float(t)}
            if frame_est is None:
                entry["silent"] = True
            else:
                entry.update(frame_est.to_dict())
            frames.append(entry)
    out["frames"] = frames
    _dump(out, args.out)
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    from foakit.evaluation import evaluate, load_manifest, load_matrix

    items = load_manifest(args.truth, args.pred)
    report = evaluate(
        items,
        emb_ref=load_matrix(args.emb_ref),
        emb_gen=load_matrix(args.emb_gen),
        emb_text=load_matrix(args.emb_text),
        dist_ref=load_matrix(args.dist_ref),
        dist_gen=load_matrix(args.dist_gen),
        frame_len=args.frame,
        hop=args.hop,
        with_distance=args.distance_heuristic,
        jobs=args.jobs,
    )
    doc = report.to_dict()
    schemas.validate(doc, "report", label="report")
    _dump(doc, args.report)
    return EXIT_OK


def cmd_fad(args: argparse.Namespace) -> int:
    from foakit.metrics import frechet_distance

    ref = read_embeddings(args.ref)
    gen = read_embeddings(args.gen)
    _dump({"fad": frechet_distance(ref, gen), "n_ref": len(ref), "n_gen": len(gen)}, args.out)
    return EXIT_OK


def cmd_diffusion_demo(args: argparse.Namespace) -> int:
    from foakit import diffusion as dm

    if args.dim < 1:
        raise ValidationError("--dim must be >= 1")
    rng = np.random.default_rng(args.seed)
    if args.target == "gaussian":
        mean, cov = dm.gaussian_target(args.dim)
        data = rng.multivariate_normal(mean, cov, size=args.train_size)
    else:
        mean, cov = np.zeros(args.dim), np.zeros((args.dim, args.dim))
        data = np.zeros((args.train_size, args.dim))
    denoiser = None
    if args.model == "mlp":
        denoiser = dm.MLPDenoiser(args.dim, hidden=args.hidden, seed=args.seed)
    result = dm.train_toy_denoiser(
        data, steps=args.train_iters, lr=args.lr, seed=args.seed, denoiser=denoiser
    )
    samples = dm.sample(result.denoiser, steps=args.steps, seed=args.seed + 1, shape=(args.n_samples, args.dim))
    sample_mean = samples.mean(axis=0)
    sample_cov = np.atleast_2d(np.cov(samples, rowvar=False))
    scale = np.sqrt(np.outer(np.diag(cov), np.diag(cov)))
    with np.errstate(divide="ignore", invalid="ignore"):
        rel_cov = np.where(scale > 0, np.abs(sample_cov - cov) / scale, np.nan)
    moments = {
        "sample_mean": sample_mean.tolist(),
        "sample_cov": sample_cov.tolist(),
        "target_mean": mean.tolist(),
        "target_cov": cov.tolist(),
        "max_abs_mean_error": float(np.max(np.abs(sample_mean - mean))),
        "max_abs_cov_error": float(np.max(np.abs(sample_cov - cov))),
    }
    if np.any(np.isfinite(rel_cov)):
        moments["max_rel_cov_error"] = float(np.nanmax(rel_cov))
    _dump(
        {
            "target": args.target,
            "dim": args.dim,
            "model": args.model,
            "seed": args.seed,
            "steps": args.steps,
            "train_iters": args.train_iters,
            "heldout_loss": result.heldout_loss,
            "moments": moments,
            "samples": samples.tolist(),
        },
        args.out,
    )
    return EXIT_OK


def _version_string() -> str:
    return (
        f"foakit {__version__} (scene format {SCENE_FORMAT_VERSION}, report format "
        f"{REPORT_FORMAT_VERSION}, embeddings {EMBEDDING_FORMAT}, wav {WAV_CONVENTION})"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="foakit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=_version_string())
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spatialize", help="render a scene manifest to a 4-channel FOA WAV")
    p.add_argument("--scene", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_spatialize)

    p = sub.add_parser("localize", help="estimate direction of arrival from an FOA WAV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--frame", type=int, default=DEFAULT_FRAME)
    p.add_argument("--hop", type=int, default=DEFAULT_HOP)
    p.add_argument("--timeline", action="store_true", help="include per-frame estimates")
    p.add_argument("--distance-heuristic", action="store_true", help="also report 1/sqrt(proxy)")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("evaluate", help="batch spatial/spectral/embedding evaluation")
    p.add_argument("--truth", required=True, help="evaluation manifest JSON")
    p.add_argument("--pred", help="directory holding generated files (default: manifest directory)")
    p.add_argument("--emb-ref", help="reference embeddings for FAD")
    p.add_argument("--emb-gen", help="generated-audio embeddings (FAD and CLAP)")
    p.add_argument("--emb-text", help="text embeddings paired with items (CLAP)")
    p.add_argument("--dist-ref", help="reference distributions paired with items (KL)")
    p.add_argument("--dist-gen", help="generated distributions paired with items (KL)")
    p.add_argument("--report", help="write report JSON here instead of stdout")
    p.add_argument("--frame", type=int, default=DEFAULT_FRAME)
    p.add_argument("--hop", type=int, default=DEFAULT_HOP)
    p.add_argument("--distance-heuristic", action="store_true", help="report l1_distance via 1/sqrt(proxy)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("fad", help="Fréchet distance between two embedding files")
    p.add_argument("--ref", required=True)
    p.add_argument("--gen", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fad)

    p = sub.add_parser("diffusion-demo", help="train and sample the toy v-objective denoiser")
    p.add_argument("--target", choices=("gaussian", "zeros"), default="gaussian")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--steps", type=int, default=50, help="sampler steps")
    p.add_argument("--train-iters", type=int, default=20000)
    p.add_argument("--train-size", type=int, default=20000)
    p.add_argument("--n-samples", type=int, default=10000)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--model", choices=("affine", "mlp"), default="affine")
    p.add_argument("--hidden", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_diffusion_demo)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"foakit {args.command}: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"foakit {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericalError as exc:
        print(f"foakit {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
