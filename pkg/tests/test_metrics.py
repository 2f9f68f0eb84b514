import numpy as np
import pytest

from mlc.errors import AllClassesEmpty, KTooLarge, NoPositives, ShapeMismatch
from mlc.metrics import (
    MetricsReport,
    average_precision,
    confusion_counts,
    evaluate,
    format_report,
    harmonic_f1,
    label_centric_prf,
    machine_line,
    mean_ap,
    overall_prf,
    top_k_binarize,
)
from mlc.types import LabelMatrix, ScoreMatrix

# -- independent definition-level oracle (plain python, no shared code) --------


def oracle_ap(scores, truth):
    ranked = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    positives = sum(truth)
    hits = 0
    acc = 0.0
    for rank, i in enumerate(ranked, start=1):
        if truth[i]:
            hits += 1
            acc += hits / rank
    return acc / positives


def oracle_panel(scores, truth, k):
    n, c = len(scores), len(scores[0])
    pred = []
    for i in range(n):
        order = sorted(range(c), key=lambda j: (-scores[i][j], j))
        row = [0] * c
        for j in order[:k]:
            row[j] = 1
        pred.append(row)
    tp = [sum(pred[i][j] * truth[i][j] for i in range(n)) for j in range(c)]
    fp = [sum(pred[i][j] * (1 - truth[i][j]) for i in range(n)) for j in range(c)]
    fn = [sum((1 - pred[i][j]) * truth[i][j] for i in range(n)) for j in range(c)]
    lp = sum(tp[j] / (tp[j] + fp[j]) if tp[j] + fp[j] else 0.0 for j in range(c)) / c
    lr = sum(tp[j] / (tp[j] + fn[j]) if tp[j] + fn[j] else 0.0 for j in range(c)) / c
    lf1 = sum(
        2 * tp[j] / (2 * tp[j] + fp[j] + fn[j]) if 2 * tp[j] + fp[j] + fn[j] else 0.0
        for j in range(c)
    ) / c
    op = sum(tp) / (n * k)
    total_pos = sum(tp) + sum(fn)
    or_ = sum(tp) / total_pos if total_pos else 0.0
    of1 = 2 * op * or_ / (op + or_) if op + or_ > 0 else 0.0
    aps = [
        oracle_ap([scores[i][j] for i in range(n)], [truth[i][j] for i in range(n)])
        for j in range(c)
        if any(truth[i][j] for i in range(n))
    ]
    return {"map": sum(aps) / len(aps), "lp": lp, "lr": lr, "lf1": lf1,
            "op": op, "or_": or_, "of1": of1}


class TestTopK:
    def test_largest_three(self):
        pred = top_k_binarize(np.array([[0.9, 0.1, 0.8, 0.7, 0.2]]), 3)
        np.testing.assert_array_equal(pred[0], [1, 0, 1, 1, 0])

    def test_k_equals_c_all_ones(self, rng):
        pred = top_k_binarize(rng.random((4, 5)), 5)
        np.testing.assert_array_equal(pred, np.ones((4, 5), dtype=np.int8))

    def test_tie_breaks_toward_lower_index(self):
        pred = top_k_binarize(np.array([[0.5, 0.5, 0.1]]), 1)
        np.testing.assert_array_equal(pred[0], [1, 0, 0])

    def test_k_too_large(self):
        with pytest.raises(KTooLarge):
            top_k_binarize(np.zeros((1, 2)), 3)

    def test_every_row_sums_to_k(self, rng):
        for k in (1, 2, 4):
            pred = top_k_binarize(rng.standard_normal((10, 6)), k)
            np.testing.assert_array_equal(pred.sum(axis=1), k)

    def test_row_wise_monotone_transform_invariance(self, rng):
        # a different strictly increasing map per row never changes the top-k
        scores = rng.standard_normal((8, 5))
        transformed = scores.copy()
        for i in range(8):
            transformed[i] = float(rng.uniform(0.1, 4.0)) * transformed[i] + float(
                rng.uniform(-3.0, 3.0)
            )
            if i % 2:
                transformed[i] = np.exp(transformed[i])
        np.testing.assert_array_equal(
            top_k_binarize(scores, 2), top_k_binarize(transformed, 2)
        )


class TestConfusionCounts:
    def test_hand_derived(self):
        pred = np.array([[1, 0, 0], [0, 1, 0]])
        truth = np.array([[1, 0, 1], [0, 1, 0]])
        counts = confusion_counts(pred, truth)
        np.testing.assert_array_equal(counts[:, 0], [1, 1, 0])  # TP
        np.testing.assert_array_equal(counts[:, 1], [0, 0, 0])  # FP
        np.testing.assert_array_equal(counts[:, 2], [0, 0, 1])  # FN

    def test_perfect_prediction(self, rng):
        truth = (rng.random((5, 4)) < 0.5).astype(int)
        counts = confusion_counts(truth, truth)
        np.testing.assert_array_equal(counts[:, 1], 0)
        np.testing.assert_array_equal(counts[:, 2], 0)

    def test_complement_prediction_no_tp(self, rng):
        truth = (rng.random((5, 4)) < 0.5).astype(int)
        counts = confusion_counts(1 - truth, truth)
        np.testing.assert_array_equal(counts[:, 0], 0)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            confusion_counts(np.zeros((2, 3)), np.zeros((3, 3)))


class TestLabelCentric:
    def test_hand_derived_two_thirds(self):
        counts = confusion_counts(
            np.array([[1, 0, 0], [0, 1, 0]]), np.array([[1, 0, 1], [0, 1, 0]])
        )
        lp, lr, lf1 = label_centric_prf(counts)
        assert (lp, lr, lf1) == pytest.approx((2 / 3, 2 / 3, 2 / 3), abs=1e-12)

    def test_perfect(self, rng):
        truth = np.eye(4, dtype=int)
        lp, lr, lf1 = label_centric_prf(confusion_counts(truth, truth))
        assert (lp, lr, lf1) == (1.0, 1.0, 1.0)

    def test_no_true_positives(self):
        truth = np.array([[1, 0], [0, 1]])
        lp, lr, lf1 = label_centric_prf(confusion_counts(1 - truth, truth))
        assert (lp, lr, lf1) == (0.0, 0.0, 0.0)


class TestOverall:
    def test_hand_derived_k1(self):
        counts = confusion_counts(
            np.array([[1, 0, 0], [0, 1, 0]]), np.array([[1, 0, 1], [0, 1, 0]])
        )
        op, or_, of1 = overall_prf(counts, n=2, k=1)
        assert (op, or_, of1) == pytest.approx((1.0, 2 / 3, 0.8), abs=1e-12)

    def test_published_triples_consistency(self):
        # published (O-P, O-R, O-F1) operating points in percent; the stored
        # F1 must match the harmonic mean of P and R to 0.1
        triples = [(54.0, 66.5, 59.6), (45.5, 96.3, 61.8), (55.9, 68.9, 61.7)]
        for p, r, f1 in triples:
            assert harmonic_f1(p, r) == pytest.approx(f1, abs=0.1)

    def test_zero_counts(self):
        counts = np.zeros((3, 3), dtype=int)
        assert overall_prf(counts, n=2, k=1) == (0.0, 0.0, 0.0)


class TestAveragePrecision:
    def test_positive_ranked_first(self):
        assert average_precision(np.array([0.9, 0.3]), np.array([1, 0])) == 1.0

    def test_positive_ranked_second(self):
        assert average_precision(np.array([0.1, 0.5]), np.array([1, 0])) == 0.5

    def test_hand_derived_three(self):
        ap = average_precision(np.array([0.9, 0.8, 0.7]), np.array([1, 0, 1]))
        assert ap == pytest.approx((1.0 + 2 / 3) / 2, abs=1e-12)

    def test_no_positives(self):
        with pytest.raises(NoPositives):
            average_precision(np.array([0.1, 0.2]), np.array([0, 0]))

    def test_tie_breaks_by_image_index(self):
        # equal scores: image 0 ranks first, so a positive at index 0 wins
        assert average_precision(np.array([0.5, 0.5]), np.array([1, 0])) == 1.0
        assert average_precision(np.array([0.5, 0.5]), np.array([0, 1])) == 0.5

    def test_matches_oracle_exhaustive_small(self, rng):
        for n in range(1, 6):
            for mask in range(1, 2**n):
                truth = np.array([(mask >> i) & 1 for i in range(n)])
                for _ in range(5):
                    scores = rng.standard_normal(n)
                    assert average_precision(scores, truth) == oracle_ap(
                        list(scores), list(truth)
                    )

    def test_monotone_transform_invariance(self, rng):
        scores = rng.standard_normal(12)
        truth = (rng.random(12) < 0.4).astype(int)
        truth[0] = 1
        base = average_precision(scores, truth)
        assert average_precision(3.0 * scores + 2.0, truth) == base
        assert average_precision(np.exp(scores), truth) == base


class TestMeanAp:
    def test_hand_derived_construction(self):
        scores = np.array([[0.9, 0.1, 0.2], [0.3, 0.8, 0.5]])
        truth = np.array([[1, 0, 1], [0, 1, 0]])
        map_, per_class = mean_ap(scores, truth)
        np.testing.assert_allclose(per_class, [1.0, 1.0, 0.5])
        assert map_ == pytest.approx(2.5 / 3, abs=1e-12)

    def test_all_ones_truth(self, rng):
        truth = np.ones((4, 3), dtype=int)
        map_, _ = mean_ap(rng.standard_normal((4, 3)), truth)
        assert map_ == 1.0

    def test_single_positive_ranked_last(self):
        n = 5
        scores = np.arange(n, dtype=float)[::-1].reshape(n, 1)
        truth = np.zeros((n, 1), dtype=int)
        truth[-1, 0] = 1
        map_, _ = mean_ap(scores, truth)
        assert map_ == pytest.approx(1.0 / n, abs=1e-15)

    def test_empty_class_excluded(self):
        scores = np.array([[0.9, 0.4], [0.2, 0.6]])
        truth = np.array([[1, 0], [0, 0]])
        map_, per_class = mean_ap(scores, truth)
        assert map_ == 1.0
        assert np.isnan(per_class[1])

    def test_all_classes_empty(self):
        with pytest.raises(AllClassesEmpty):
            mean_ap(np.zeros((2, 2)), np.zeros((2, 2), dtype=int))


class TestEvaluate:
    def test_matches_oracle_random_instances(self, rng):
        for _ in range(20):
            scores = rng.standard_normal((10, 5))
            truth = (rng.random((10, 5)) < 0.4).astype(int)
            truth[0] = 1  # ensure no empty class edge for the oracle's mAP
            report = evaluate(ScoreMatrix(scores), LabelMatrix(truth), k=3)
            want = oracle_panel(scores.tolist(), truth.tolist(), 3)
            for field, value in want.items():
                assert getattr(report, field) == pytest.approx(value, abs=1e-12), field

    def test_k_too_large(self):
        with pytest.raises(KTooLarge):
            evaluate(ScoreMatrix(np.zeros((2, 2))), LabelMatrix(np.ones((2, 2), dtype=int)), k=3)

    def test_permutation_invariance(self, rng):
        scores = rng.standard_normal((12, 4))
        truth = (rng.random((12, 4)) < 0.5).astype(int)
        truth[0] = 1
        perm = rng.permutation(12)
        a = evaluate(ScoreMatrix(scores), LabelMatrix(truth), k=2)
        b = evaluate(ScoreMatrix(scores[perm]), LabelMatrix(truth[perm]), k=2)
        assert a.panel() == pytest.approx(b.panel(), abs=1e-12)

    def test_of1_identity(self, rng):
        scores = rng.standard_normal((9, 5))
        truth = (rng.random((9, 5)) < 0.5).astype(int)
        truth[0] = 1
        report = evaluate(ScoreMatrix(scores), LabelMatrix(truth), k=3)
        assert report.of1 == pytest.approx(harmonic_f1(report.op, report.or_), abs=1e-12)

    def test_all_fields_in_unit_interval(self, rng):
        scores = rng.standard_normal((8, 6))
        truth = (rng.random((8, 6)) < 0.5).astype(int)
        truth[0] = 1
        report = evaluate(ScoreMatrix(scores), LabelMatrix(truth), k=3)
        for value in report.panel():
            assert 0.0 <= value <= 1.0

    def test_perfect_scores_give_full_recall_and_map(self, rng):
        # large positive at every positive, large negative elsewhere; rows
        # with fewer than k positives force extra (false) predictions, which
        # costs precision but neither recall nor AP
        truth = np.zeros((8, 5), dtype=int)
        for i in range(8):
            truth[i, rng.choice(5, size=int(rng.integers(1, 4)), replace=False)] = 1
        scores = np.where(truth == 1, 100.0, -100.0) + rng.standard_normal((8, 5))
        report = evaluate(ScoreMatrix(scores), LabelMatrix(truth), k=3)
        assert report.or_ == 1.0
        assert report.map == 1.0


class TestFormatting:
    def _report(self):
        return MetricsReport(
            map=0.83333, lp=0.5, lr=0.25, lf1=1 / 3, op=0.54, or_=0.665,
            of1=harmonic_f1(0.54, 0.665), k=3, per_class_ap=np.array([0.8, 0.9]),
        )

    def test_machine_line_four_decimals(self):
        line = machine_line(self._report())
        assert line.startswith("0.8333,0.5000,0.2500,")
        assert len(line.split(",")) == 7

    def test_human_panel_mentions_every_metric(self):
        text = format_report(self._report())
        for name in ("mAP", "L-P", "L-R", "L-F1", "O-P", "O-R", "O-F1"):
            assert name in text
