"""CLI for training and evaluating the classifier."""

from __future__ import annotations

import json
from pathlib import Path

import click
import yaml

from ..pipeline.dataset import load_dataset
from .metrics import evaluate
from .net import ModelConfig, TrafficConditionNet, load_checkpoint, save_checkpoint
from .sweep import format_table, sweep_configs
from .train import TrainConfig, to_tensors, train


def _load_cfg(path: str) -> dict:
    return yaml.safe_load(Path(path).read_text()) or {}


def _train_config(cfg: dict) -> TrainConfig:
    return TrainConfig(**cfg.get("train", {}))


@click.group()
def main() -> None:
    """Trajectory-image classifier tooling."""


@main.command("train")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
def train_cmd(config_path: str) -> None:
    cfg = _load_cfg(config_path)
    ds = load_dataset(cfg["dataset_dir"])
    model = TrafficConditionNet(ModelConfig(**cfg.get("model", {})))
    history = train(model, to_tensors(ds.train), to_tensors(ds.val),
                    _train_config(cfg))
    save_checkpoint(model, cfg["checkpoint"])
    click.echo(f"trained {len(history)} epochs; best val loss "
               f"{min(h['val_loss'] for h in history):.4f}; "
               f"checkpoint -> {cfg['checkpoint']}")


@main.command("eval")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
def eval_cmd(config_path: str) -> None:
    cfg = _load_cfg(config_path)
    ds = load_dataset(cfg["dataset_dir"])
    model = load_checkpoint(cfg["checkpoint"])
    x, y = to_tensors(ds.test)
    report = evaluate(model, x, y)
    click.echo(json.dumps(report.row(), indent=1))


@main.command("sweep")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
def sweep_cmd(config_path: str) -> None:
    cfg = _load_cfg(config_path)
    root = Path(cfg["dataset_root"])  # expects <root>/<mode>_<period>s/

    def datasets(mode: str, period: int):
        return load_dataset(root / f"{mode}_{period}s")

    rows = sweep_configs(datasets, _train_config(cfg))
    click.echo(format_table(rows))
    if "report" in cfg:
        Path(cfg["report"]).write_text(json.dumps(rows, indent=1))
