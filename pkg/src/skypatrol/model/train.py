"""Training loop with best-epoch early stopping."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np
import torch
import torch.nn.functional as F

from ..pipeline.render import TrajectoryImage
from .net import TrafficConditionNet


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 200
    patience: int = 20
    batch_size: int = 32
    learning_rate: float = 1e-3
    seed: int = 0


class EarlyStopper:
    """Stops after `patience` consecutive epochs without a new best loss."""

    def __init__(self, patience: int = 20):
        self.patience = patience
        self.best_loss = float("inf")
        self.best_epoch = -1
        self.stale = 0

    def update(self, epoch: int, loss: float) -> bool:
        """Record an epoch's validation loss; True means stop now."""
        if loss < self.best_loss:
            self.best_loss = loss
            self.best_epoch = epoch
            self.stale = 0
            return False
        self.stale += 1
        return self.stale >= self.patience


def to_tensors(images: list[TrajectoryImage]) -> tuple[torch.Tensor, torch.Tensor]:
    """Stack trajectory images into (N, C, H, W) float tensors + labels."""
    arrs = []
    for im in images:
        px = im.pixels
        if px.ndim == 2:
            px = px[None, :, :]
        else:
            px = np.moveaxis(px, -1, 0)
        arrs.append(px)
    x = torch.from_numpy(np.stack(arrs).astype(np.float32))
    y = torch.tensor([im.label for im in images], dtype=torch.long)
    return x, y


def train(model: TrafficConditionNet,
          train_data: tuple[torch.Tensor, torch.Tensor],
          val_data: tuple[torch.Tensor, torch.Tensor],
          tc: TrainConfig) -> list[dict]:
    """Minimize cross-entropy; keep the weights of the lowest-val-loss epoch.

    Returns the per-epoch history. Deterministic for a fixed seed.
    """
    torch.manual_seed(tc.seed)
    x_tr, y_tr = train_data
    x_va, y_va = val_data
    opt = torch.optim.Adam(model.parameters(), lr=tc.learning_rate)
    stopper = EarlyStopper(tc.patience)
    gen = torch.Generator().manual_seed(tc.seed)
    history: list[dict] = []
    best_state = copy.deepcopy(model.state_dict())

    for epoch in range(tc.max_epochs):
        model.train()
        perm = torch.randperm(len(x_tr), generator=gen)
        losses = []
        for i in range(0, len(perm), tc.batch_size):
            idx = perm[i:i + tc.batch_size]
            opt.zero_grad()
            loss = F.cross_entropy(model(x_tr[idx]), y_tr[idx])
            loss.backward()
            opt.step()
            losses.append(float(loss.detach()))
        train_loss = float(np.mean(losses))
        if not np.isfinite(train_loss):
            raise RuntimeError(f"training diverged at epoch {epoch} "
                               f"(loss={train_loss})")
        model.eval()
        with torch.no_grad():
            logits = _batched(model, x_va, tc.batch_size)
            val_loss = float(F.cross_entropy(logits, y_va))
            val_acc = float((logits.argmax(1) == y_va).float().mean())
        history.append({"epoch": epoch, "train_loss": train_loss,
                        "val_loss": val_loss, "val_acc": val_acc})
        improved = val_loss < stopper.best_loss
        stop = stopper.update(epoch, val_loss)
        if improved:
            best_state = copy.deepcopy(model.state_dict())
        if stop:
            break
    model.load_state_dict(best_state)
    model.eval()
    return history


def _batched(model: TrafficConditionNet, x: torch.Tensor,
             batch_size: int) -> torch.Tensor:
    outs = [model(x[i:i + batch_size]) for i in range(0, len(x), batch_size)]
    return torch.cat(outs, dim=0)
