"""Deterministic synthetic multi-label dataset: colored shapes on noisy gray.

Each class owns one palette color (byte-exact through PPM quantization) and
a shape kind (class index mod 3: square, disk, triangle). An image carries
class j iff a shape of class j's color is visible, so labels are correct by
construction and independently checkable by counting exact-color pixels
(`census`). Shapes may overlap in random z-order; a draw that would fully
occlude a labeled shape is rejected and resampled from the next substream,
keeping generation a pure function of (config, image index).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .augment import STREAM_GEN, rng_stream
from .errors import IoError
from .io import DatasetManifest, write_manifest, write_ppm
from .types import Image

# saturated RGB corners, then half-intensity corners; all byte-exact
_BASE_COLORS = [
    (1.0, 0.0, 0.0),
    (0.0, 1.0, 0.0),
    (0.0, 0.0, 1.0),
    (1.0, 1.0, 0.0),
    (1.0, 0.0, 1.0),
    (0.0, 1.0, 1.0),
]
_HALF = 128.0 / 255.0
MAX_CLASSES = 12

# shape half-extent as a fraction of the short image side; sized so pooled
# bins saturate and random crops rarely lose a shape entirely
_MIN_EXTENT = 0.20
_MAX_EXTENT = 0.38
_BACKGROUND = 0.5
_NOISE_AMPLITUDE = 0.04
_MIN_VISIBLE_PIXELS = 6
_MAX_DRAW_ATTEMPTS = 100


def palette(num_classes: int) -> np.ndarray:
    """Maximally separated class colors, exactly representable as PPM bytes."""
    if not 1 <= num_classes <= MAX_CLASSES:
        raise ValueError(f"palette supports 1..{MAX_CLASSES} classes, got {num_classes}")
    colors = [c for c in _BASE_COLORS]
    colors += [tuple(_HALF * v for v in c) for c in _BASE_COLORS]
    return np.asarray(colors[:num_classes], dtype=np.float64)


@dataclass(frozen=True)
class SynthConfig:
    num_images: int
    image_size: tuple[int, int] = (64, 64)
    num_classes: int = 6
    min_concepts: int = 1
    max_concepts: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.num_images < 1:
            raise ValueError("num_images must be >= 1")
        if not 1 <= self.min_concepts <= self.max_concepts <= self.num_classes:
            raise ValueError(
                f"need 1 <= min <= max <= C, got min={self.min_concepts} "
                f"max={self.max_concepts} C={self.num_classes}"
            )
        if min(self.image_size) < 16:
            raise ValueError(f"image sides must be >= 16, got {self.image_size}")
        palette(self.num_classes)


def census(image: Image, num_classes: int) -> np.ndarray:
    """Per-class count of pixels exactly matching the class color.

    Palette colors survive PPM quantization bit-exactly, so this works on
    freshly rendered and on decoded images alike.
    """
    colors = palette(num_classes)
    counts = np.empty(num_classes, dtype=np.int64)
    for j in range(num_classes):
        counts[j] = np.all(image.data == colors[j], axis=2).sum()
    return counts


def render(cfg: SynthConfig, index: int) -> tuple[Image, tuple[int, ...]]:
    """Render image `index` of the dataset; returns (image, label indices)."""
    height, width = cfg.image_size
    colors = palette(cfg.num_classes)
    short_side = min(height, width)
    for attempt in range(_MAX_DRAW_ATTEMPTS):
        rng = rng_stream(cfg.seed, STREAM_GEN, index, attempt)
        count = int(rng.integers(cfg.min_concepts, cfg.max_concepts + 1))
        classes = np.sort(rng.choice(cfg.num_classes, size=count, replace=False))
        z_order = rng.permutation(classes)
        canvas = _BACKGROUND + rng.uniform(-_NOISE_AMPLITUDE, _NOISE_AMPLITUDE, size=(height, width, 3))

        halves = rng.uniform(_MIN_EXTENT, _MAX_EXTENT, size=count) * short_side
        cys = np.empty(count)
        cxs = np.empty(count)
        for s in range(count):
            cys[s] = rng.uniform(halves[s], height - 1 - halves[s])
            cxs[s] = rng.uniform(halves[s], width - 1 - halves[s])
        kinds = z_order % 3
        kernels.paint_shapes(canvas, kinds, cys, cxs, halves, colors[z_order])

        image = Image(canvas)
        visible = census(image, cfg.num_classes)
        if all(visible[j] >= _MIN_VISIBLE_PIXELS for j in classes):
            return image, tuple(int(j) for j in classes)
    raise RuntimeError(f"image {index}: no visible arrangement in {_MAX_DRAW_ATTEMPTS} attempts")


def generate(cfg: SynthConfig, out_dir: str | Path) -> DatasetManifest:
    """Write num_images PPMs plus manifest.tsv into out_dir."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {out_dir}: {exc}") from exc
    entries = []
    for index in range(cfg.num_images):
        image, labels = render(cfg, index)
        name = f"img_{index:05d}.ppm"
        try:
            (out_dir / name).write_bytes(write_ppm(image))
        except OSError as exc:
            raise IoError(f"cannot write {out_dir / name}: {exc}") from exc
        entries.append((name, labels))
    manifest = DatasetManifest(tuple(entries), cfg.num_classes)
    try:
        (out_dir / "manifest.tsv").write_text(write_manifest(manifest), encoding="ascii")
    except OSError as exc:
        raise IoError(f"cannot write manifest: {exc}") from exc
    return manifest
