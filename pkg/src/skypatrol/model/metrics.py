"""Evaluation metrics and inference helpers.

Precision/recall/F1 are computed per class and then macro-averaged
(F1 is the per-class harmonic mean before averaging); AUC-ROC is
one-vs-rest macro-averaged.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import torch
import torch.nn.functional as F
from sklearn.metrics import roc_auc_score

from .net import TrafficConditionNet
from .train import _batched


@dataclass(frozen=True)
class MetricsReport:
    loss: float
    accuracy: float
    precision: float
    recall: float
    f1: float
    auc_roc: float

    def row(self) -> dict:
        return {"loss": self.loss, "accuracy": self.accuracy,
                "precision": self.precision, "recall": self.recall,
                "f1": self.f1, "auc_roc": self.auc_roc}


def classify(model: TrafficConditionNet,
             image: np.ndarray | torch.Tensor) -> tuple[int, np.ndarray]:
    """Label and class probabilities for one image; ties break toward the
    higher (incident-sensitive) label."""
    x = _as_batch(image, model.config.input_channels)
    with torch.no_grad():
        probs = model.predict_proba(x)[0].numpy()
    return _argmax_high(probs), probs


def classify_batch(model: TrafficConditionNet, images: list[np.ndarray],
                   batch_size: int = 64) -> list[int]:
    xs = torch.cat([_as_batch(im, model.config.input_channels)
                    for im in images])
    with torch.no_grad():
        probs = F.softmax(_batched(model, xs, batch_size), dim=1).numpy()
    return [_argmax_high(p) for p in probs]


def _argmax_high(probs: np.ndarray) -> int:
    return int(len(probs) - 1 - np.argmax(probs[::-1]))


def _as_batch(image: np.ndarray | torch.Tensor, channels: int) -> torch.Tensor:
    arr = image.numpy() if isinstance(image, torch.Tensor) else image
    if arr.ndim == 2:
        arr = arr[None, :, :]
    elif arr.ndim == 3 and arr.shape[-1] in (1, 3) and arr.shape[0] not in (1, 3):
        arr = np.moveaxis(arr, -1, 0)
    if arr.shape[0] != channels:
        raise ValueError(f"expected {channels} channels, got {arr.shape[0]}")
    return torch.from_numpy(np.ascontiguousarray(arr, dtype=np.float32))[None]


def evaluate(model: TrafficConditionNet, x: torch.Tensor,
             y: torch.Tensor, n_classes: int = 3) -> MetricsReport:
    model.eval()
    with torch.no_grad():
        logits = _batched(model, x, 64)
        loss = float(F.cross_entropy(logits, y))
        probs = F.softmax(logits, dim=1).numpy()
    y_true = y.numpy()
    y_pred = np.array([_argmax_high(p) for p in probs])
    accuracy = float((y_pred == y_true).mean())

    present = sorted(set(y_true.tolist()))
    if len(present) < n_classes:
        warnings.warn(f"classes absent from test set excluded from macro "
                      f"average: {sorted(set(range(n_classes)) - set(present))}")
    precs, recs, f1s, aucs = [], [], [], []
    for c in present:
        tp = int(((y_pred == c) & (y_true == c)).sum())
        fp = int(((y_pred == c) & (y_true != c)).sum())
        fn = int(((y_pred != c) & (y_true == c)).sum())
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        precs.append(p)
        recs.append(r)
        f1s.append(2 * p * r / (p + r) if p + r else 0.0)
        binary = (y_true == c).astype(int)
        if 0 < binary.sum() < len(binary):
            aucs.append(float(roc_auc_score(binary, probs[:, c])))
    return MetricsReport(
        loss=loss, accuracy=accuracy,
        precision=float(np.mean(precs)), recall=float(np.mean(recs)),
        f1=float(np.mean(f1s)),
        auc_roc=float(np.mean(aucs)) if aucs else 1.0,
    )
