"""The classifier: adaptive average pooling, a one-hidden-layer MLP head,
the stable multi-label cross-entropy loss, and its analytic gradients.

Forward pass: logits = W2.T @ relu(W1.T @ flatten(pool(image)) + b1) + b2.
The loss over C classes is the sum of per-class binary cross-entropies on
sigmoid(logit), evaluated in the log-sum form max(s,0) - s*y +
log(1 + exp(-|s|)) so large |s| never hits log(0).

Batch helpers operate on a feature matrix (rows = pooled, flattened
images); the per-sample operations wrap them. relu'(0) is taken as 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .augment import STREAM_INIT, rng_stream
from .errors import GridTooLarge, ParseError, ShapeMismatch
from .types import Image, LabelVector

CHECKPOINT_HEADER = "mlc-params v1"


@dataclass(frozen=True)
class ModelParams:
    """Learnable weights. W1: (gh*gw*3, H); b1: (H,); W2: (H, C); b2: (C,)."""

    pool_grid: tuple[int, int]
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    def __post_init__(self):
        gh, gw = self.pool_grid
        d = gh * gw * 3
        hidden = self.b1.shape[0]
        classes = self.b2.shape[0]
        if self.W1.shape != (d, hidden) or self.W2.shape != (hidden, classes):
            raise ShapeMismatch(
                f"inconsistent parameter shapes: W1 {self.W1.shape} b1 {self.b1.shape} "
                f"W2 {self.W2.shape} b2 {self.b2.shape} for pool grid {self.pool_grid}"
            )
        for arr in (self.W1, self.b1, self.W2, self.b2):
            if not np.all(np.isfinite(arr)):
                raise ShapeMismatch("parameters contain non-finite values")

    @property
    def num_classes(self) -> int:
        return self.b2.shape[0]

    @property
    def hidden(self) -> int:
        return self.b1.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.W1.shape[0]


@dataclass(frozen=True)
class Gradients:
    """Loss gradients, shape-congruent with ModelParams arrays."""

    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray


def init_params(
    num_classes: int,
    pool_grid: tuple[int, int] = (16, 16),
    hidden: int = 4096,
    seed: int = 0,
) -> ModelParams:
    """Seeded uniform init in +/- 1/sqrt(fan_in) per layer."""
    rng = rng_stream(seed, STREAM_INIT)
    d = pool_grid[0] * pool_grid[1] * 3
    bound1 = 1.0 / np.sqrt(d)
    bound2 = 1.0 / np.sqrt(hidden)
    return ModelParams(
        pool_grid=pool_grid,
        W1=rng.uniform(-bound1, bound1, size=(d, hidden)),
        b1=rng.uniform(-bound1, bound1, size=hidden),
        W2=rng.uniform(-bound2, bound2, size=(hidden, num_classes)),
        b2=rng.uniform(-bound2, bound2, size=num_classes),
    )


def adaptive_avg_pool(image: Image, gh: int, gw: int) -> np.ndarray:
    """Average-pool to a gh x gw x 3 grid whose bins scale with input size.

    Bin (i, j) covers rows [floor(i*H/gh), ceil((i+1)*H/gh)) and columns
    analogously, so every pixel lands in at least one bin.
    """
    if gh < 1 or gw < 1 or gh > image.height or gw > image.width:
        raise GridTooLarge(
            f"pool grid {gh}x{gw} invalid for {image.height}x{image.width} image"
        )
    return kernels.adaptive_pool(image.data, gh, gw)


def pooled_features(image: Image, pool_grid: tuple[int, int]) -> np.ndarray:
    return adaptive_avg_pool(image, *pool_grid).ravel()


def sigmoid(x):
    """Numerically stable logistic function, elementwise."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out if out.ndim else float(out)


def bce_loss(scores, labels) -> float:
    """Sum over classes of binary cross-entropy on sigmoid(score)."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels.data if isinstance(labels, LabelVector) else labels, dtype=np.float64)
    if s.shape != y.shape:
        raise ShapeMismatch(f"scores {s.shape} vs labels {y.shape}")
    return float(np.sum(np.maximum(s, 0.0) - s * y + np.log1p(np.exp(-np.abs(s)))))


def forward_features(params: ModelParams, features: np.ndarray) -> np.ndarray:
    """Logits for a (n, D) feature batch; returns (n, C)."""
    if features.shape[-1] != params.feature_dim:
        raise ShapeMismatch(
            f"feature dim {features.shape[-1]} != expected {params.feature_dim}"
        )
    z1 = features @ params.W1 + params.b1
    hidden = np.maximum(z1, 0.0)
    return hidden @ params.W2 + params.b2


def forward(params: ModelParams, image: Image) -> np.ndarray:
    """Logits (C,) for one image; deterministic."""
    return forward_features(params, pooled_features(image, params.pool_grid)[None, :])[0]


def backward_features(
    params: ModelParams, features: np.ndarray, labels: np.ndarray
) -> tuple[float, Gradients]:
    """Summed loss and summed gradients over a (n, D) feature batch.

    dL/ds = sigmoid(s) - y at the output, chained through the affine/relu
    stack. Callers divide by n for mean-gradient SGD.
    """
    y = np.asarray(labels, dtype=np.float64)
    if y.ndim != 2 or y.shape[0] != features.shape[0] or y.shape[1] != params.num_classes:
        raise ShapeMismatch(f"labels {y.shape} incompatible with features {features.shape}")
    z1 = features @ params.W1 + params.b1
    hidden = np.maximum(z1, 0.0)
    scores = hidden @ params.W2 + params.b2

    loss = float(np.sum(np.maximum(scores, 0.0) - scores * y + np.log1p(np.exp(-np.abs(scores)))))
    d_scores = sigmoid(scores) - y
    d_hidden = d_scores @ params.W2.T
    d_z1 = np.where(z1 > 0.0, d_hidden, 0.0)
    grads = Gradients(
        W1=features.T @ d_z1,
        b1=d_z1.sum(axis=0),
        W2=hidden.T @ d_scores,
        b2=d_scores.sum(axis=0),
    )
    return loss, grads


def backward(params: ModelParams, image: Image, labels: LabelVector) -> tuple[float, Gradients]:
    """Loss and gradients for a single (image, labels) example."""
    features = pooled_features(image, params.pool_grid)[None, :]
    return backward_features(params, features, labels.data[None, :])


# -- checkpoint format ---------------------------------------------------------
# line 1: "mlc-params v1"; line 2: "gh gw hidden classes"; then b1, b2, the
# rows of W1 and the rows of W2 as comma-separated repr() floats.


def save_params(params: ModelParams) -> str:
    gh, gw = params.pool_grid
    lines = [CHECKPOINT_HEADER, f"{gh} {gw} {params.hidden} {params.num_classes}"]
    lines.append(",".join(repr(float(v)) for v in params.b1))
    lines.append(",".join(repr(float(v)) for v in params.b2))
    for row in params.W1:
        lines.append(",".join(repr(float(v)) for v in row))
    for row in params.W2:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def load_params(text: str) -> ModelParams:
    lines = [ln for ln in text.replace("\r\n", "\n").split("\n") if ln != ""]
    if not lines or lines[0] != CHECKPOINT_HEADER:
        raise ParseError(f"missing checkpoint header {CHECKPOINT_HEADER!r}")
    try:
        gh, gw, hidden, classes = (int(tok) for tok in lines[1].split())
    except (IndexError, ValueError):
        raise ParseError("bad checkpoint dimension line") from None
    d = gh * gw * 3
    expected = 2 + 2 + d + hidden
    if len(lines) != expected:
        raise ParseError(f"checkpoint has {len(lines)} lines, expected {expected}")

    def row(line: str, width: int) -> np.ndarray:
        cells = line.split(",")
        if len(cells) != width:
            raise ParseError(f"checkpoint row has {len(cells)} cells, expected {width}")
        try:
            return np.array([float(c) for c in cells], dtype=np.float64)
        except ValueError as exc:
            raise ParseError(f"bad checkpoint value: {exc}") from None

    b1 = row(lines[2], hidden)
    b2 = row(lines[3], classes)
    w1 = np.stack([row(lines[4 + i], hidden) for i in range(d)])
    w2 = np.stack([row(lines[4 + d + i], classes) for i in range(hidden)])
    return ModelParams(pool_grid=(gh, gw), W1=w1, b1=b1, W2=w2, b2=b2)
