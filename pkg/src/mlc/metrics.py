"""Top-k evaluation panel: mAP plus label-centric and overall P/R/F1.

Predictions are the k highest-scoring classes per image, no threshold.
Tie rules are fixed for cross-platform determinism: equal scores break
toward the lower class index in top-k and toward the lower image index in
AP ranking. Per-class 0/0 precision, recall or F1 terms count as 0; classes
without a single positive are excluded from mAP (their AP is reported as
NaN) since AP is undefined there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AllClassesEmpty, KTooLarge, NoPositives, ShapeMismatch
from .types import LabelMatrix, ScoreMatrix, validate_pair

PANEL_FIELDS = ("map", "lp", "lr", "lf1", "op", "or_", "of1")


@dataclass(frozen=True)
class MetricsReport:
    """One evaluation row; every value is a fraction in [0, 1]."""

    map: float
    lp: float
    lr: float
    lf1: float
    op: float
    or_: float
    of1: float
    k: int
    per_class_ap: np.ndarray  # NaN for classes with no positives

    def panel(self) -> tuple[float, ...]:
        return (self.map, self.lp, self.lr, self.lf1, self.op, self.or_, self.of1)


def top_k_binarize(scores: ScoreMatrix | np.ndarray, k: int) -> np.ndarray:
    """Per row, set exactly the k largest scores to 1 (ties: lower index wins)."""
    s = scores.data if isinstance(scores, ScoreMatrix) else np.asarray(scores, dtype=np.float64)
    if s.ndim != 2:
        raise ShapeMismatch(f"expected (n, C) scores, got shape {s.shape}")
    if not 1 <= k <= s.shape[1]:
        raise KTooLarge(f"k={k} outside [1, {s.shape[1]}]")
    # stable argsort on -s keeps ascending original index among equal scores
    order = np.argsort(-s, axis=1, kind="stable")
    pred = np.zeros(s.shape, dtype=np.int8)
    np.put_along_axis(pred, order[:, :k], 1, axis=1)
    return pred


def confusion_counts(pred: np.ndarray, truth: LabelMatrix | np.ndarray) -> np.ndarray:
    """Per-class (TP, FP, FN) stacked as a (C, 3) array."""
    p = np.asarray(pred)
    y = truth.data if isinstance(truth, LabelMatrix) else np.asarray(truth)
    if p.shape != y.shape:
        raise ShapeMismatch(f"pred {p.shape} vs truth {y.shape}")
    p = p.astype(np.int64)
    y = y.astype(np.int64)
    tp = (p * y).sum(axis=0)
    fp = (p * (1 - y)).sum(axis=0)
    fn = ((1 - p) * y).sum(axis=0)
    return np.stack([tp, fp, fn], axis=1)


def _safe_div(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    # 0/0 counts as 0: never-predicted / never-present classes score zero
    out = np.zeros(num.shape, dtype=np.float64)
    np.divide(num, den, out=out, where=den > 0)
    return out


def label_centric_prf(counts: np.ndarray) -> tuple[float, float, float]:
    """Macro metrics: per-class P, R and F1 averaged uniformly over classes.

    The F1 is the mean of per-class F1 values, not the harmonic mean of the
    averaged P and R.
    """
    tp = counts[:, 0].astype(np.float64)
    fp = counts[:, 1].astype(np.float64)
    fn = counts[:, 2].astype(np.float64)
    lp = float(_safe_div(tp, tp + fp).mean())
    lr = float(_safe_div(tp, tp + fn).mean())
    lf1 = float(_safe_div(2.0 * tp, 2.0 * tp + fp + fn).mean())
    return lp, lr, lf1


def harmonic_f1(p: float, r: float) -> float:
    return 2.0 * p * r / (p + r) if p + r > 0 else 0.0


def overall_prf(counts: np.ndarray, n: int, k: int) -> tuple[float, float, float]:
    """Micro metrics from pooled counts; O-P uses n*k predicted positives."""
    tp = float(counts[:, 0].sum())
    positives = float((counts[:, 0] + counts[:, 2]).sum())
    op = tp / (n * k) if n * k > 0 else 0.0
    or_ = tp / positives if positives > 0 else 0.0
    return op, or_, harmonic_f1(op, or_)


def average_precision(scores: np.ndarray, truth: np.ndarray) -> float:
    """AP of one class: mean precision at each rank that retrieves a positive.

    Images sort by descending score, equal scores by ascending image index.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(truth)
    if s.shape != y.shape or s.ndim != 1:
        raise ShapeMismatch(f"scores {s.shape} vs truth {y.shape}")
    positives = int(y.sum())
    if positives == 0:
        raise NoPositives("average precision needs at least one positive")
    order = np.argsort(-s, kind="stable")
    hits = y[order].astype(np.float64)
    ranks = np.arange(1, len(hits) + 1, dtype=np.float64)
    precision_at_rank = np.cumsum(hits) / ranks
    return float(precision_at_rank[hits == 1].sum() / positives)


def mean_ap(scores: ScoreMatrix | np.ndarray, truth: LabelMatrix | np.ndarray) -> tuple[float, np.ndarray]:
    """mAP over classes with at least one positive; absent classes get NaN."""
    s = scores.data if isinstance(scores, ScoreMatrix) else np.asarray(scores, dtype=np.float64)
    y = truth.data if isinstance(truth, LabelMatrix) else np.asarray(truth)
    if s.shape != y.shape:
        raise ShapeMismatch(f"scores {s.shape} vs truth {y.shape}")
    per_class = np.full(s.shape[1], np.nan)
    for j in range(s.shape[1]):
        if y[:, j].sum() > 0:
            per_class[j] = average_precision(s[:, j], y[:, j])
    present = ~np.isnan(per_class)
    if not present.any():
        raise AllClassesEmpty("every class is empty; mAP undefined")
    return float(per_class[present].mean()), per_class


def evaluate(scores: ScoreMatrix, truth: LabelMatrix, k: int = 3) -> MetricsReport:
    """Full panel: validate, binarize at top-k, pool counts, average APs."""
    validate_pair(scores, truth)
    pred = top_k_binarize(scores, k)
    counts = confusion_counts(pred, truth)
    lp, lr, lf1 = label_centric_prf(counts)
    op, or_, of1 = overall_prf(counts, n=scores.num_rows, k=k)
    map_, per_class = mean_ap(scores, truth)
    return MetricsReport(
        map=map_, lp=lp, lr=lr, lf1=lf1, op=op, or_=or_, of1=of1,
        k=k, per_class_ap=per_class,
    )


def format_report(report: MetricsReport) -> str:
    """Human panel (values x100, two decimals, like published tables)."""
    names = ("mAP", "L-P", "L-R", "L-F1", "O-P", "O-R", "O-F1")
    lines = [f"top-k: {report.k}"]
    for name, value in zip(names, report.panel()):
        lines.append(f"{name:>5}: {100.0 * value:6.2f}")
    return "\n".join(lines)


def machine_line(report: MetricsReport) -> str:
    """Machine-readable "map,lp,lr,lf1,op,or,of1" with 4 decimal places."""
    return ",".join(f"{value:.4f}" for value in report.panel())
