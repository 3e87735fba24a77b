"""CLI for running patrol simulations and emitting feed directories."""

from __future__ import annotations

import dataclasses

import click

from .drone import NoiseModel, fly, truth_sidecar, write_feed
from .scenario import DronePlan, load_scenario
from .traffic import simulate


@click.group()
def main() -> None:
    """Freeway patrol simulator."""


@main.command()
@click.option("--scenario", "scenario_path", required=True,
              type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--seed", type=int, default=None,
              help="Overrides the scenario file's seed.")
@click.option("--duration", type=float, default=300.0, show_default=True)
@click.option("--start-time", type=float, default=0.0, show_default=True)
@click.option("--no-noise", is_flag=True, help="Disable detection noise.")
def run(scenario_path: str, out_dir: str, seed: int | None,
        duration: float, start_time: float, no_noise: bool) -> None:
    """Simulate a scenario and write the patrol feed to OUT."""
    spec = load_scenario(scenario_path)
    if seed is not None:
        spec = dataclasses.replace(spec, seed=seed)
    log = simulate(spec, duration=duration)
    plan = DronePlan(start_time=start_time)
    noise = NoiseModel.none() if no_noise else NoiseModel(seed=spec.seed + 1)
    frames, fixes = fly(log, plan, noise=noise)
    write_feed(out_dir, frames, fixes, truth=truth_sidecar(log))
    click.echo(f"wrote {len(frames)} frames, {len(fixes)} GPS fixes to {out_dir}")
