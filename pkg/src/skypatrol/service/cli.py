"""Service and feed-replayer entry points."""

from __future__ import annotations

import logging

import click

from .core import ServiceConfig


@click.group()
def service_main() -> None:
    """Detection service."""


@service_main.command("run")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
def run(config_path: str) -> None:
    """Run the detection service HTTP API."""
    import uvicorn

    from .app import create_app

    logging.basicConfig(level=logging.INFO)
    config = ServiceConfig.load(config_path)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port)


@click.group()
def feed_main() -> None:
    """Feed emulator."""


@feed_main.command("replay")
@click.option("--dir", "feed_dir", required=True, type=click.Path(exists=True))
@click.option("--speed", type=float, default=1.0, show_default=True)
@click.option("--target", required=True, help="Service base URL.")
@click.option("--username", default="operator", show_default=True)
@click.option("--password", default="change-me", show_default=True)
def replay_cmd(feed_dir: str, speed: float, target: str,
               username: str, password: str) -> None:
    """Replay a recorded feed directory against a running service."""
    from .replay import http_sink, login, replay

    logging.basicConfig(level=logging.INFO)
    token = login(target, username, password)
    sent = replay(feed_dir, http_sink(target, token), speed=speed)
    click.echo(f"replayed {sent} feed lines to {target}")
