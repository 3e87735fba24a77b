from __future__ import annotations

import numpy as np
import pytest
import torch
import torch.nn as nn
import torch.nn.functional as F
from sklearn.metrics import precision_recall_fscore_support

from skypatrol.model import (EarlyStopper, MetricsReport, ModelConfig,
                             TrafficConditionNet, TrainConfig, build, classify,
                             classify_batch, evaluate, load_checkpoint,
                             save_checkpoint, train)
from skypatrol.model.metrics import _argmax_high
from skypatrol.model.net import (ChannelAttention, Cbam, MultiscaleConv,
                                 SpatialAttention, SpatialPyramidPool)

SMALL = ModelConfig(block_widths=(8, 16, 32), dense_widths=(32, 16))


def toy_dataset(n_per_class=16, size=32, seed=0):
    """Linearly separable three-pattern images: left band, right band, both."""
    rng = np.random.default_rng(seed)
    xs, ys = [], []
    for c in range(3):
        for _ in range(n_per_class):
            img = rng.random((size, size)).astype(np.float32) * 0.05
            if c in (0, 2):
                img[:, : size // 4] += 0.9
            if c in (1, 2):
                img[:, -size // 4:] += 0.9
            xs.append(img[None])
            ys.append(c)
    x = torch.from_numpy(np.stack(xs))
    y = torch.tensor(ys)
    return x, y


class TestArchitecture:
    def test_softmax_probabilities(self):
        model = build(SMALL)
        x = torch.rand(4, 1, 32, 32)
        probs = model.predict_proba(x)
        assert probs.shape == (4, 3)
        assert torch.allclose(probs.sum(dim=1), torch.ones(4), atol=1e-6)
        assert (probs >= 0).all()

    def test_feature_length_independent_of_input_size(self):
        cfg = ModelConfig()
        assert cfg.feature_length == 2688
        model = build(cfg)
        outs = []
        for h, w in ((32, 32), (64, 48), (128, 160)):
            feats = model.spp(_through_blocks(model, torch.rand(2, 1, h, w)))
            assert feats.shape == (2, 2688)
            outs.append(model(torch.rand(2, 1, h, w)))
        assert all(o.shape == (2, 3) for o in outs)

    def test_rejects_undersized_input(self):
        model = build(SMALL)
        with pytest.raises(ValueError, match="below minimum"):
            model(torch.rand(1, 1, 16, 16))

    def test_rejects_wrong_channel_count(self):
        model = build(SMALL)
        with pytest.raises(ValueError, match="channels"):
            model(torch.rand(1, 3, 64, 64))

    def test_color_variant(self):
        model = build(ModelConfig(input_channels=3, block_widths=(8, 16, 32),
                                  dense_widths=(32, 16)))
        assert model(torch.rand(2, 3, 48, 48)).shape == (2, 3)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ModelConfig(block_widths=(30, 64, 128)).validate()
        with pytest.raises(ValueError):
            ModelConfig(input_channels=2).validate()

    def test_multiscale_branch_widths(self):
        block = MultiscaleConv(1, 16, (1, 3, 5, 7))
        out = block(torch.rand(1, 1, 20, 20))
        assert out.shape == (1, 16, 20, 20)
        assert (out >= 0).all()  # post-activation


def _through_blocks(model, x):
    for b in model.blocks:
        x = b(x)
    return x


class TestAttention:
    def test_channel_gate_open_interval_and_per_channel_constant(self):
        att = ChannelAttention(16)
        x = torch.rand(2, 16, 9, 9) + 0.1
        out = att(x)
        gate = out / x
        assert (gate > 0).all() and (gate < 1).all()
        per_channel = gate.flatten(2)
        assert torch.allclose(per_channel, per_channel[:, :, :1].expand_as(
            per_channel), atol=1e-6)

    def test_spatial_gate_constant_across_channels(self):
        att = SpatialAttention()
        x = torch.rand(2, 8, 9, 9) + 0.1
        out = att(x)
        gate = out / x
        assert (gate > 0).all() and (gate < 1).all()
        assert torch.allclose(gate, gate[:, :1].expand_as(gate), atol=1e-6)

    def test_zero_input_passes_through_as_zero(self):
        cbam = Cbam(8)
        out = cbam(torch.zeros(1, 8, 10, 10))
        assert torch.count_nonzero(out) == 0

    def test_channel_attention_analytic_on_constant_input(self):
        """With a spatially constant tensor the average and max descriptors
        coincide, so the gate reduces to sigmoid(2 * mlp(d))."""
        torch.manual_seed(3)
        att = ChannelAttention(8)
        d = torch.rand(1, 8)
        x = d[:, :, None, None].expand(1, 8, 6, 6)
        w1, b1 = att.mlp[0].weight, att.mlp[0].bias
        w2, b2 = att.mlp[2].weight, att.mlp[2].bias
        hidden = torch.relu(d @ w1.T + b1)
        gate = torch.sigmoid(2.0 * (hidden @ w2.T + b2))
        expect = x * gate[:, :, None, None]
        assert torch.allclose(att(x), expect, atol=1e-6)

    def test_spatial_attention_analytic_on_constant_input(self):
        torch.manual_seed(4)
        att = SpatialAttention()
        x = torch.full((1, 4, 9, 9), 0.7)
        # constant input: both pooled maps equal 0.7; interior of the conv
        # output is bias + 0.7 * sum of both kernel planes
        with torch.no_grad():
            center = float(att.conv.bias + 0.7 * att.conv.weight.sum())
            gate = torch.sigmoid(torch.tensor(center))
            got = float(att(x)[0, 0, 4, 4])
        assert got == pytest.approx(float(0.7 * gate), abs=1e-6)

    def test_spp_output_layout(self):
        spp = SpatialPyramidPool((1, 2, 4))
        x = torch.rand(3, 5, 17, 23)
        out = spp(x)
        assert out.shape == (3, 5 * 21)
        # the 1x1 grid slice is the global max per channel
        assert torch.allclose(out[:, :5], x.amax(dim=(2, 3)))


class TestGradients:
    def test_autograd_matches_finite_differences(self):
        """Independent oracle for backprop: central finite differences on a
        double-precision model."""
        torch.manual_seed(0)
        cfg = ModelConfig(block_widths=(4, 8, 8), dense_widths=(8, 4))
        model = build(cfg).double()
        x = torch.rand(2, 1, 32, 32, dtype=torch.float64)
        y = torch.tensor([0, 2])

        def loss_fn():
            return F.cross_entropy(model(x), y)

        loss = loss_fn()
        loss.backward()
        rng = np.random.default_rng(1)
        eps = 1e-6
        checked = 0
        for p in model.parameters():
            flat = p.detach().view(-1)
            grad = p.grad.view(-1)
            for idx in rng.choice(len(flat), size=min(3, len(flat)),
                                  replace=False):
                orig = float(flat[idx])
                with torch.no_grad():
                    flat[idx] = orig + eps
                    up = float(loss_fn())
                    flat[idx] = orig - eps
                    down = float(loss_fn())
                    flat[idx] = orig
                fd = (up - down) / (2 * eps)
                ag = float(grad[idx])
                denom = max(abs(fd), abs(ag), 1e-3)  # floor absorbs FD noise
                assert abs(fd - ag) / denom < 1e-4
                checked += 1
        assert checked >= 30


class TestEarlyStopping:
    def test_stops_after_patience_stale_epochs(self):
        s = EarlyStopper(patience=3)
        assert s.update(0, 1.0) is False
        assert s.update(1, 0.5) is False   # new best
        assert s.update(2, 0.6) is False
        assert s.update(3, 0.5) is False   # equal: not an improvement
        assert s.update(4, 0.7) is True
        assert s.best_epoch == 1
        assert s.best_loss == 0.5

    def test_improvement_resets_counter(self):
        s = EarlyStopper(patience=2)
        for epoch, loss in enumerate([1.0, 0.9, 1.1, 0.8, 1.2]):
            assert s.update(epoch, loss) is False
        assert s.best_epoch == 3

    def test_train_restores_best_epoch_weights(self):
        x, y = toy_dataset(n_per_class=8, seed=5)
        model = build(SMALL)
        tc = TrainConfig(max_epochs=15, patience=3, batch_size=16, seed=0)
        history = train(model, (x, y), (x, y), tc)
        best = min(h["val_loss"] for h in history)
        with torch.no_grad():
            final = float(F.cross_entropy(model(x), y))
        assert final == pytest.approx(best, abs=1e-5)

    def test_train_stops_early_on_plateau(self):
        # constant-zero images: no signal, loss plateaus quickly
        x = torch.zeros(12, 1, 32, 32)
        y = torch.tensor([0, 1, 2] * 4)
        model = build(SMALL)
        tc = TrainConfig(max_epochs=200, patience=5, batch_size=12, seed=1)
        history = train(model, (x, y), (x, y), tc)
        assert len(history) < 200


class TestTraining:
    def test_learns_separable_patterns(self):
        x, y = toy_dataset(seed=2)
        model = build(SMALL)
        tc = TrainConfig(max_epochs=60, patience=15, batch_size=16, seed=0)
        train(model, (x, y), (x, y), tc)
        report = evaluate(model, x, y)
        assert report.accuracy == 1.0
        assert report.f1 == 1.0
        assert report.auc_roc == 1.0

    def test_deterministic_for_fixed_seed(self):
        x, y = toy_dataset(n_per_class=6, seed=3)
        outs = []
        for _ in range(2):
            torch.manual_seed(7)
            model = build(SMALL)
            train(model, (x, y), (x, y),
                  TrainConfig(max_epochs=3, batch_size=8, seed=7))
            with torch.no_grad():
                outs.append(model(x))
        assert torch.equal(outs[0], outs[1])

    def test_divergence_raises(self):
        x, y = toy_dataset(n_per_class=6, seed=4)
        model = build(SMALL)
        with pytest.raises(RuntimeError, match="diverged"):
            train(model, (x, y), (x, y),
                  TrainConfig(max_epochs=30, batch_size=8,
                              learning_rate=1e6, seed=0))


class TestInference:
    def test_tie_breaks_toward_higher_label(self):
        assert _argmax_high(np.array([0.4, 0.2, 0.4])) == 2
        assert _argmax_high(np.array([0.5, 0.5, 0.0])) == 1
        assert _argmax_high(np.array([0.9, 0.05, 0.05])) == 0

    def test_classify_consistent_with_batch(self):
        torch.manual_seed(2)
        model = build(SMALL)
        model.eval()
        rng = np.random.default_rng(0)
        images = [rng.random((32, 32)).astype(np.float32) for _ in range(6)]
        single = [classify(model, im)[0] for im in images]
        batch = classify_batch(model, images)
        assert single == batch
        rev = classify_batch(model, images[::-1])
        assert rev == batch[::-1]

    def test_classify_accepts_hwc_color(self):
        model = build(ModelConfig(input_channels=3, block_widths=(8, 16, 32),
                                  dense_widths=(32, 16)))
        model.eval()
        img = np.random.default_rng(1).random((40, 40, 3)).astype(np.float32)
        label, probs = classify(model, img)
        assert label in (0, 1, 2)
        assert probs.sum() == pytest.approx(1.0, abs=1e-6)

    def test_classify_rejects_channel_mismatch(self):
        model = build(SMALL)
        with pytest.raises(ValueError):
            classify(model, np.zeros((40, 40, 3), dtype=np.float32))


class TestEvaluate:
    def test_metrics_against_sklearn_oracle(self):
        rng = np.random.default_rng(0)
        y = torch.tensor(rng.integers(0, 3, size=200))
        logits = torch.tensor(rng.normal(size=(200, 3)), dtype=torch.float32)
        report = evaluate(nn.Identity(), logits, y)
        probs = F.softmax(logits, dim=1).numpy()
        y_pred = np.array([_argmax_high(p) for p in probs])
        p, r, f1, _ = precision_recall_fscore_support(
            y.numpy(), y_pred, average="macro", zero_division=0)
        assert report.precision == pytest.approx(p, abs=1e-9)
        assert report.recall == pytest.approx(r, abs=1e-9)
        assert report.f1 == pytest.approx(f1, abs=1e-9)
        assert report.accuracy == pytest.approx((y_pred == y.numpy()).mean())
        assert 0.0 <= report.auc_roc <= 1.0

    def test_absent_class_warns_and_excludes(self):
        y = torch.tensor([0, 0, 1, 1])
        logits = torch.tensor([[5.0, 0, -5], [5, 0, -5], [0, 5, -5],
                               [0, 5, -5]])
        with pytest.warns(UserWarning, match="absent"):
            report = evaluate(nn.Identity(), logits, y)
        assert report.precision == 1.0
        assert report.recall == 1.0

    def test_report_row_keys(self):
        r = MetricsReport(0.1, 0.9, 0.8, 0.7, 0.75, 0.95)
        assert list(r.row()) == ["loss", "accuracy", "precision", "recall",
                                 "f1", "auc_roc"]


class TestCheckpoint:
    def test_round_trip_preserves_outputs(self, tmp_path):
        model = build(SMALL)
        model.eval()
        path = tmp_path / "model.pt"
        save_checkpoint(model, path)
        back = load_checkpoint(path)
        x = torch.rand(3, 1, 32, 32)
        with torch.no_grad():
            assert torch.equal(model(x), back(x))

    def test_version_mismatch_rejected(self, tmp_path):
        model = build(SMALL)
        path = tmp_path / "model.pt"
        save_checkpoint(model, path)
        payload = torch.load(path, weights_only=False)
        payload["version"] = 99
        torch.save(payload, path)
        with pytest.raises(ValueError, match="checkpoint version"):
            load_checkpoint(path)
