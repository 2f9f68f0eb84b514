"""Command-line entry point: gen / train / predict / evaluate / fuse / augment.

Every subcommand is reproducible from its flags and seed alone. Exit codes:
0 success, 2 usage error, 1 runtime error (message on stderr).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .augment import MODES, STREAM_AUG, AugmentConfig, apply_mode, mixup_pair, rng_stream
from .errors import MlcError
from .fusion import fuse
from .io import (
    DatasetManifest,
    read_csv_matrix,
    read_manifest,
    write_csv_matrix,
    write_manifest,
    write_ppm,
)
from .metrics import evaluate, format_report, machine_line
from .model import load_params, save_params
from .synthgen import SynthConfig, generate
from .trainer import TrainConfig, load_dataset, predict, train
from .types import Sample


def _size(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--size", nargs=2, type=int, default=[64, 64], metavar=("H", "W"),
        help="input image size",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlc", description="Multi-label image classification toolkit."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("gen", help="generate a synthetic shapes dataset", formatter_class=fmt)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--num", required=True, type=int, help="number of images")
    _size(p)
    p.add_argument("--classes", type=int, default=6, help="number of classes")
    p.add_argument("--min-concepts", type=int, default=1, help="min labels per image")
    p.add_argument("--max-concepts", type=int, default=3, help="max labels per image")
    p.add_argument("--seed", type=int, default=0, help="generator seed")

    p = sub.add_parser("train", help="train a model on a manifest", formatter_class=fmt)
    p.add_argument("--manifest", required=True, help="manifest.tsv path")
    p.add_argument("--mode", required=True, choices=MODES, help="augmentation mode")
    _size(p)
    p.add_argument("--seed", type=int, default=0, help="training seed")
    p.add_argument("--out", required=True, help="checkpoint output path")
    p.add_argument("--epochs", type=int, default=40, help="training epochs")
    p.add_argument("--batch-size", type=int, default=16, help="mini-batch size")
    p.add_argument("--lr-head", type=float, default=0.1, help="head (output layer) learning rate")
    p.add_argument("--lr-body", type=float, default=0.01, help="body (hidden layer) learning rate")
    p.add_argument("--decay-factor", type=float, default=0.1, help="learning-rate decay factor")
    p.add_argument("--decay-epoch", type=int, default=20, help="epoch at which the decay applies")
    p.add_argument("--mixup-phase", choices=("even", "odd"), default="even",
                   help="epochs on which M3 mixup is active")
    p.add_argument("--pool-grid", nargs=2, type=int, default=[16, 16], metavar=("GH", "GW"),
                   help="adaptive pooling grid")
    p.add_argument("--hidden", type=int, default=4096, help="hidden layer width")
    p.add_argument("--log", default=None, help="training log path (epoch lr loss per line)")

    p = sub.add_parser("predict", help="score a manifest with a checkpoint", formatter_class=fmt)
    p.add_argument("--params", required=True, help="checkpoint path")
    p.add_argument("--manifest", required=True, help="manifest.tsv path")
    _size(p)
    p.add_argument("--out", required=True, help="scores CSV output path")

    p = sub.add_parser("evaluate", help="print the metric panel for scores vs labels",
                       formatter_class=fmt)
    p.add_argument("--scores", required=True, help="scores CSV path")
    p.add_argument("--labels", required=True, help="labels CSV path")
    p.add_argument("--k", type=int, default=3, help="top-k cutoff")

    p = sub.add_parser("fuse", help="average score matrices elementwise", formatter_class=fmt)
    p.add_argument("inputs", nargs="+", help="member score CSV paths")
    p.add_argument("--out", required=True, help="fused CSV output path")
    p.add_argument("--sigmoid-first", action="store_true",
                   help="map scores through sigmoid before averaging")

    p = sub.add_parser("augment", help="materialize augmented samples for inspection",
                       formatter_class=fmt)
    p.add_argument("--manifest", required=True, help="manifest.tsv path")
    p.add_argument("--mode", required=True, choices=MODES, help="augmentation mode")
    p.add_argument("--seed", type=int, default=0, help="augmentation seed")
    p.add_argument("--out-dir", required=True, help="output directory")
    _size(p)

    return parser


def _cmd_gen(args) -> None:
    cfg = SynthConfig(
        num_images=args.num,
        image_size=(args.size[0], args.size[1]),
        num_classes=args.classes,
        min_concepts=args.min_concepts,
        max_concepts=args.max_concepts,
        seed=args.seed,
    )
    manifest = generate(cfg, args.out)
    print(f"wrote {len(manifest)} images and manifest.tsv to {args.out}")


def _cmd_train(args) -> None:
    manifest = read_manifest(Path(args.manifest).read_text(encoding="ascii"))
    cfg = TrainConfig(
        epochs=args.epochs,
        batch_size=args.batch_size,
        lr_head=args.lr_head,
        lr_body=args.lr_body,
        lr_decay_factor=args.decay_factor,
        lr_decay_epoch=args.decay_epoch,
        mode=args.mode,
        mixup_phase=args.mixup_phase,
        input_size=(args.size[0], args.size[1]),
        seed=args.seed,
        pool_grid=(args.pool_grid[0], args.pool_grid[1]),
        hidden=args.hidden,
    )
    report = train(manifest, cfg, root=Path(args.manifest).parent, log_path=args.log)
    Path(args.out).write_text(save_params(report.params), encoding="ascii")
    print(
        f"trained {args.mode} for {cfg.epochs} epochs in {report.wall_time_s:.1f}s; "
        f"first/last epoch loss {report.epoch_losses[0]:.4f}/{report.epoch_losses[-1]:.4f}; "
        f"checkpoint {args.out}"
    )


def _cmd_predict(args) -> None:
    params = load_params(Path(args.params).read_text(encoding="ascii"))
    manifest = read_manifest(Path(args.manifest).read_text(encoding="ascii"))
    scores = predict(params, manifest, (args.size[0], args.size[1]),
                     root=Path(args.manifest).parent)
    Path(args.out).write_text(write_csv_matrix(scores), encoding="ascii")
    print(f"wrote {scores.num_rows}x{scores.num_classes} scores to {args.out}")


def _cmd_evaluate(args) -> None:
    scores = read_csv_matrix(Path(args.scores).read_text(encoding="ascii"), kind="scores")
    labels = read_csv_matrix(Path(args.labels).read_text(encoding="ascii"), kind="labels")
    report = evaluate(scores, labels, k=args.k)
    print(format_report(report))
    print(machine_line(report))


def _cmd_fuse(args) -> None:
    members = [
        read_csv_matrix(Path(path).read_text(encoding="ascii"), kind="scores")
        for path in args.inputs
    ]
    fused = fuse(members, sigmoid_first=args.sigmoid_first)
    Path(args.out).write_text(write_csv_matrix(fused), encoding="ascii")
    print(f"fused {len(members)} matrices into {args.out}")


def _cmd_augment(args) -> None:
    manifest = read_manifest(Path(args.manifest).read_text(encoding="ascii"))
    samples = load_dataset(manifest, Path(args.manifest).parent)
    aug_cfg = AugmentConfig(target_size=(args.size[0], args.size[1]))
    augmented = []
    for i, sample in enumerate(samples):
        rng = rng_stream(args.seed, STREAM_AUG, 0, i)
        augmented.append(Sample(apply_mode(sample.image, args.mode, aug_cfg, rng), sample.labels))
    if args.mode == "M3":
        mixed = [
            mixup_pair(augmented[2 * p], augmented[2 * p + 1])
            for p in range(len(augmented) // 2)
        ]
        if len(augmented) % 2 == 1:
            mixed.append(augmented[-1])
        augmented = mixed

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, sample in enumerate(augmented):
        name = f"aug_{i:05d}.ppm"
        (out_dir / name).write_bytes(write_ppm(sample.image))
        entries.append((name, tuple(int(j) for j in np.flatnonzero(sample.labels.data))))
    out_manifest = DatasetManifest(tuple(entries), manifest.num_classes)
    (out_dir / "manifest.tsv").write_text(write_manifest(out_manifest), encoding="ascii")
    print(f"wrote {len(augmented)} augmented samples to {out_dir}")


_COMMANDS = {
    "gen": _cmd_gen,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "evaluate": _cmd_evaluate,
    "fuse": _cmd_fuse,
    "augment": _cmd_augment,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except MlcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
