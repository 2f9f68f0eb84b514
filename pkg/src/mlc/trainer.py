"""Mini-batch SGD training with mode-specific augmentation and test scoring.

Modes: M1 = random flip only, M2 = flip + random-resized-crop, M3 = the M2
pipeline plus mixup on alternating epochs (random disjoint pairs within
each batch; an odd leftover passes through unmixed). The learning rate of
each parameter group is multiplied by lr_decay_factor from lr_decay_epoch
on; W2/b2 form the head group, W1/b1 the body group.

Everything random is keyed off (seed, stream, epoch, index) Philox
streams, and batches reduce in a fixed order, so a (seed, config) pair
replays to bitwise-identical parameters.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .augment import (
    MODES,
    STREAM_AUG,
    STREAM_MIX,
    STREAM_SHUFFLE,
    AugmentConfig,
    apply_mode,
    mixup_pair,
    resize_bilinear,
    rng_stream,
)
from .errors import DataLoadError, DivergedLoss, MlcError
from .io import DatasetManifest, read_ppm
from .model import (
    ModelParams,
    backward_features,
    forward_features,
    init_params,
    pooled_features,
)
from .types import Sample, ScoreMatrix

ScheduleObserver = Callable[[int, float, float], None]


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 40
    batch_size: int = 16
    lr_head: float = 0.1
    lr_body: float = 0.01
    lr_decay_factor: float = 0.1
    lr_decay_epoch: int = 20
    mode: str = "M1"
    mixup_phase: str = "even"
    input_size: tuple[int, int] = (64, 64)
    seed: int = 0
    pool_grid: tuple[int, int] = (16, 16)
    hidden: int = 4096

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.lr_head <= 0 or self.lr_body <= 0 or self.lr_decay_factor <= 0:
            raise ValueError("learning rates and decay factor must be > 0")
        if not 0 <= self.lr_decay_epoch < self.epochs:
            raise ValueError(f"lr_decay_epoch must be in [0, epochs), got {self.lr_decay_epoch}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mixup_phase not in ("even", "odd"):
            raise ValueError(f"mixup_phase must be 'even' or 'odd', got {self.mixup_phase!r}")
        if min(self.input_size) < 1 or min(self.pool_grid) < 1 or self.hidden < 1:
            raise ValueError("input_size, pool_grid and hidden must be positive")


@dataclass(frozen=True)
class TrainReport:
    epoch_losses: tuple[float, ...]
    epoch_lrs: tuple[tuple[float, float], ...]  # (head, body) per epoch
    params: ModelParams
    wall_time_s: float


def effective_lrs(cfg: TrainConfig, epoch: int) -> tuple[float, float]:
    factor = cfg.lr_decay_factor if epoch >= cfg.lr_decay_epoch else 1.0
    return cfg.lr_head * factor, cfg.lr_body * factor


def mixup_active(cfg: TrainConfig, epoch: int) -> bool:
    if cfg.mode != "M3":
        return False
    return epoch % 2 == (0 if cfg.mixup_phase == "even" else 1)


def load_dataset(manifest: DatasetManifest, root: str | Path) -> list[Sample]:
    """Read every manifest image; row order is manifest order."""
    root = Path(root)
    labels = manifest.label_matrix()
    samples = []
    for i, (rel_path, _) in enumerate(manifest.entries):
        try:
            blob = (root / rel_path).read_bytes()
        except OSError as exc:
            raise DataLoadError(f"cannot read {root / rel_path}: {exc}") from exc
        try:
            image = read_ppm(blob)
        except MlcError as exc:
            raise DataLoadError(f"{root / rel_path}: {exc}") from exc
        samples.append(Sample(image, labels.row(i)))
    return samples


def _augmented_batch(
    samples: list[Sample],
    indices: np.ndarray,
    cfg: TrainConfig,
    aug_cfg: AugmentConfig,
    epoch: int,
    batch_no: int,
) -> list[Sample]:
    batch = []
    for i in indices:
        rng = rng_stream(cfg.seed, STREAM_AUG, epoch, int(i))
        image = apply_mode(samples[i].image, cfg.mode, aug_cfg, rng)
        batch.append(Sample(image, samples[i].labels))
    if mixup_active(cfg, epoch):
        mix_rng = rng_stream(cfg.seed, STREAM_MIX, epoch, batch_no)
        perm = mix_rng.permutation(len(batch))
        mixed = [
            mixup_pair(batch[perm[2 * p]], batch[perm[2 * p + 1]])
            for p in range(len(batch) // 2)
        ]
        if len(batch) % 2 == 1:
            mixed.append(batch[perm[-1]])
        batch = mixed
    return batch


def train(
    manifest: DatasetManifest,
    cfg: TrainConfig,
    root: str | Path = ".",
    log_path: str | Path | None = None,
    schedule_observer: ScheduleObserver | None = None,
) -> TrainReport:
    """Run the full SGD schedule and return losses plus final parameters."""
    start = time.perf_counter()
    samples = load_dataset(manifest, root)
    n = len(samples)
    aug_cfg = AugmentConfig(target_size=cfg.input_size)
    init = init_params(manifest.num_classes, cfg.pool_grid, cfg.hidden, cfg.seed)
    w1, b1 = init.W1.copy(), init.b1.copy()
    w2, b2 = init.W2.copy(), init.b2.copy()

    log_lines = []
    epoch_losses = []
    epoch_lrs = []
    for epoch in range(cfg.epochs):
        lr_head, lr_body = effective_lrs(cfg, epoch)
        if schedule_observer is not None:
            schedule_observer(epoch, lr_head, lr_body)
        order = rng_stream(cfg.seed, STREAM_SHUFFLE, epoch).permutation(n)

        loss_sum = 0.0
        row_count = 0
        for batch_no, lo in enumerate(range(0, n, cfg.batch_size)):
            batch = _augmented_batch(
                samples, order[lo : lo + cfg.batch_size], cfg, aug_cfg, epoch, batch_no
            )
            features = np.stack([pooled_features(s.image, cfg.pool_grid) for s in batch])
            targets = np.stack([s.labels.data for s in batch])
            params = ModelParams(cfg.pool_grid, w1, b1, w2, b2)
            batch_loss, grads = backward_features(params, features, targets)
            rows = len(batch)
            w1 -= (lr_body / rows) * grads.W1
            b1 -= (lr_body / rows) * grads.b1
            w2 -= (lr_head / rows) * grads.W2
            b2 -= (lr_head / rows) * grads.b2
            loss_sum += batch_loss
            row_count += rows

        mean_loss = loss_sum / row_count
        if not np.isfinite(mean_loss):
            raise DivergedLoss(f"epoch {epoch} mean loss is {mean_loss}")
        epoch_losses.append(mean_loss)
        epoch_lrs.append((lr_head, lr_body))
        log_lines.append(f"{epoch} {lr_head:g} {mean_loss:.9g}")

    if log_path is not None:
        Path(log_path).write_text("\n".join(log_lines) + "\n", encoding="ascii")
    return TrainReport(
        epoch_losses=tuple(epoch_losses),
        epoch_lrs=tuple(epoch_lrs),
        params=ModelParams(cfg.pool_grid, w1, b1, w2, b2),
        wall_time_s=time.perf_counter() - start,
    )


def predict(
    params: ModelParams,
    manifest: DatasetManifest,
    input_size: tuple[int, int],
    root: str | Path = ".",
) -> ScoreMatrix:
    """Raw logits per image: plain resize to input_size, no augmentation."""
    samples = load_dataset(manifest, root)
    features = np.stack(
        [
            pooled_features(resize_bilinear(s.image, *input_size), params.pool_grid)
            for s in samples
        ]
    )
    return ScoreMatrix(forward_features(params, features))
