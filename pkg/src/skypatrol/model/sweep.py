"""Extraction-period x image-mode training sweep."""

from __future__ import annotations

from typing import Callable

from ..pipeline.dataset import DatasetSplit
from .metrics import evaluate
from .net import ModelConfig, TrafficConditionNet
from .train import TrainConfig, to_tensors, train

SWEEP_PERIODS = (3, 5, 10, 15, 20)
SWEEP_MODES = ("monochrome", "color")
REPORT_COLUMNS = ("image_mode", "period", "loss", "accuracy",
                  "precision", "recall", "f1", "auc_roc")


def sweep_configs(datasets: Callable[[str, int], DatasetSplit],
                  tc: TrainConfig) -> list[dict]:
    """Train one model per (period, mode) cell and report the metric rows.

    `datasets(mode, period)` supplies the split for one cell. The result is
    a finding, not an assertion: no ordering between cells is enforced.
    """
    rows: list[dict] = []
    for mode in SWEEP_MODES:
        for period in SWEEP_PERIODS:
            ds = datasets(mode, period)
            channels = 1 if mode == "monochrome" else 3
            model = TrafficConditionNet(ModelConfig(input_channels=channels))
            train(model, to_tensors(ds.train), to_tensors(ds.val), tc)
            x_te, y_te = to_tensors(ds.test)
            report = evaluate(model, x_te, y_te)
            rows.append({"image_mode": mode, "period": period, **report.row()})
    return rows


def format_table(rows: list[dict]) -> str:
    header = "Image Mode  Period  Loss    Accuracy  Precision  Recall  F1-Score  AUC-ROC"
    lines = [header]
    for r in rows:
        lines.append(
            f"{r['image_mode']:<11} {r['period']:>3}s  {r['loss']:.4f}  "
            f"{r['accuracy']:.4f}    {r['precision']:.4f}     {r['recall']:.4f}  "
            f"{r['f1']:.4f}    {r['auc_roc']:.4f}")
    return "\n".join(lines)
