import numpy as np
import pytest

from mlc.errors import DataLoadError
from mlc.io import DatasetManifest
from mlc.model import ModelParams, save_params
from mlc.synthgen import SynthConfig, generate
from mlc.trainer import (
    TrainConfig,
    effective_lrs,
    load_dataset,
    mixup_active,
    predict,
    train,
)


@pytest.fixture(scope="module")
def small_dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("data")
    cfg = SynthConfig(num_images=24, image_size=(24, 24), seed=11)
    manifest = generate(cfg, root)
    return manifest, root


def small_cfg(**overrides):
    base = dict(
        epochs=3, batch_size=8, lr_decay_epoch=2, mode="M1", seed=5,
        input_size=(24, 24), pool_grid=(4, 4), hidden=16,
    )
    base.update(overrides)
    return TrainConfig(**base)


class TestConfig:
    def test_zero_epochs_rejected(self):
        with pytest.raises(ValueError):
            small_cfg(epochs=0)

    def test_decay_epoch_must_precede_end(self):
        with pytest.raises(ValueError):
            small_cfg(epochs=3, lr_decay_epoch=3)

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            small_cfg(mode="M4")

    def test_bad_phase(self):
        with pytest.raises(ValueError):
            small_cfg(mixup_phase="never")

    def test_nonpositive_rates(self):
        with pytest.raises(ValueError):
            small_cfg(lr_head=0.0)


class TestSchedule:
    def test_effective_lrs_formula(self):
        cfg = small_cfg(epochs=5, lr_decay_epoch=3)
        for epoch in range(5):
            head, body = effective_lrs(cfg, epoch)
            factor = 0.1 if epoch >= 3 else 1.0
            assert head == pytest.approx(cfg.lr_head * factor)
            assert body == pytest.approx(cfg.lr_body * factor)

    def test_observer_sees_decay(self, small_dataset):
        manifest, root = small_dataset
        seen = []
        cfg = small_cfg(epochs=3, lr_decay_epoch=1)
        train(manifest, cfg, root=root, schedule_observer=lambda e, h, b: seen.append((e, h, b)))
        assert [e for e, _, _ in seen] == [0, 1, 2]
        assert seen[0][1] == pytest.approx(0.1)
        assert seen[1][1] == pytest.approx(0.01)
        assert seen[2][2] == pytest.approx(0.001)

    def test_mixup_phase(self):
        cfg = small_cfg(mode="M3", mixup_phase="even")
        assert [mixup_active(cfg, e) for e in range(4)] == [True, False, True, False]
        cfg = small_cfg(mode="M3", mixup_phase="odd")
        assert [mixup_active(cfg, e) for e in range(4)] == [False, True, False, True]
        cfg = small_cfg(mode="M2")
        assert not any(mixup_active(cfg, e) for e in range(4))


class TestTrain:
    def test_replay_is_bitwise_identical(self, small_dataset):
        manifest, root = small_dataset
        a = train(manifest, small_cfg(mode="M3"), root=root)
        b = train(manifest, small_cfg(mode="M3"), root=root)
        assert save_params(a.params) == save_params(b.params)
        assert a.epoch_losses == b.epoch_losses

    def test_m3_without_active_mixup_equals_m2(self, small_dataset):
        # single epoch with odd phase: mixup never fires, so M3 == M2 exactly
        manifest, root = small_dataset
        m2 = train(manifest, small_cfg(epochs=1, lr_decay_epoch=0, mode="M2"), root=root)
        m3 = train(
            manifest,
            small_cfg(epochs=1, lr_decay_epoch=0, mode="M3", mixup_phase="odd"),
            root=root,
        )
        assert save_params(m2.params) == save_params(m3.params)

    def test_m3_with_active_mixup_differs_from_m2(self, small_dataset):
        manifest, root = small_dataset
        m2 = train(manifest, small_cfg(mode="M2"), root=root)
        m3 = train(manifest, small_cfg(mode="M3", mixup_phase="even"), root=root)
        assert save_params(m2.params) != save_params(m3.params)

    def test_loss_decreases_on_learnable_data(self, small_dataset):
        manifest, root = small_dataset
        report = train(manifest, small_cfg(epochs=8, lr_decay_epoch=6), root=root)
        assert report.epoch_losses[-1] < report.epoch_losses[0]

    def test_report_shape(self, small_dataset):
        manifest, root = small_dataset
        report = train(manifest, small_cfg(), root=root)
        assert len(report.epoch_losses) == 3
        assert len(report.epoch_lrs) == 3
        assert all(np.isfinite(v) for v in report.epoch_losses)
        assert report.wall_time_s > 0

    def test_log_file_lines(self, small_dataset, tmp_path):
        manifest, root = small_dataset
        log = tmp_path / "train.log"
        train(manifest, small_cfg(), root=root, log_path=log)
        lines = log.read_text().splitlines()
        assert len(lines) == 3
        epoch, lr, loss = lines[0].split()
        assert epoch == "0" and float(lr) == 0.1 and float(loss) > 0

    def test_missing_image_raises_data_load_error(self, tmp_path):
        manifest = DatasetManifest((("missing.ppm", (0,)),), 2)
        with pytest.raises(DataLoadError):
            load_dataset(manifest, tmp_path)


class TestPredict:
    def test_shape_and_determinism(self, small_dataset):
        manifest, root = small_dataset
        report = train(manifest, small_cfg(), root=root)
        a = predict(report.params, manifest, (24, 24), root=root)
        b = predict(report.params, manifest, (24, 24), root=root)
        assert a.data.shape == (len(manifest), manifest.num_classes)
        np.testing.assert_array_equal(a.data, b.data)

    def test_duplicate_rows_for_duplicate_images(self, small_dataset, tmp_path):
        manifest, root = small_dataset
        name = manifest.entries[0][0]
        (tmp_path / name).write_bytes((root / name).read_bytes())
        dup = DatasetManifest(((name, (0,)), (name, (1,))), manifest.num_classes)
        report = train(manifest, small_cfg(), root=root)
        scores = predict(report.params, dup, (24, 24), root=tmp_path)
        np.testing.assert_array_equal(scores.data[0], scores.data[1])

    def test_zero_weights_give_bias_rows(self, small_dataset):
        manifest, root = small_dataset
        params = ModelParams(
            (2, 2), np.zeros((12, 4)), np.zeros(4), np.zeros((4, 6)), np.arange(6.0)
        )
        scores = predict(params, manifest, (24, 24), root=root)
        np.testing.assert_array_equal(scores.data, np.tile(np.arange(6.0), (len(manifest), 1)))
