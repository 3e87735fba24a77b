"""Feed emulator: replays a recorded feed directory as a live stream."""

from __future__ import annotations

import logging
import time
from pathlib import Path
from typing import Callable

import httpx

log = logging.getLogger("skypatrol.replay")

MALFORMED_ABORT_RATIO = 0.05


def iter_feed_lines(feed_dir: str | Path):
    """Time-ordered (timestamp, raw line) pairs from a feed directory.

    Malformed lines are skipped with a warning; more than 5% malformed
    aborts the replay.
    """
    import json

    d = Path(feed_dir)
    records: list[tuple[float, str]] = []
    total = bad = 0
    for name in ("frames.jsonl", "gps.jsonl"):
        path = d / name
        if not path.exists():
            continue
        for line in path.read_text().splitlines():
            if not line.strip():
                continue
            total += 1
            try:
                ts = float(json.loads(line)["timestamp"])
            except Exception:
                bad += 1
                log.warning("malformed feed line skipped: %.80s", line)
                continue
            records.append((ts, line))
    if total and bad / total > MALFORMED_ABORT_RATIO:
        raise ValueError(f"{bad}/{total} malformed feed lines; aborting replay")
    records.sort(key=lambda r: r[0])
    return records


def replay(feed_dir: str | Path, sink: Callable[[list[str]], None],
           speed: float = 1.0, batch_seconds: float = 1.0) -> int:
    """Push feed lines to `sink` at stream cadence divided by `speed`.

    Returns the number of lines delivered; a truncated feed simply ends
    the stream cleanly.
    """
    if speed < 1.0:
        raise ValueError("speed factor must be >= 1")
    records = iter_feed_lines(feed_dir)
    if not records:
        return 0
    sent = 0
    t_base = records[0][0]
    wall_base = time.monotonic()
    batch: list[str] = []
    batch_deadline = t_base + batch_seconds
    for ts, line in records:
        if ts >= batch_deadline and batch:
            _pace(ts, t_base, wall_base, speed)
            sink(batch)
            sent += len(batch)
            batch = []
            batch_deadline = ts + batch_seconds
        batch.append(line)
    if batch:
        _pace(records[-1][0], t_base, wall_base, speed)
        sink(batch)
        sent += len(batch)
    return sent


def _pace(ts: float, t_base: float, wall_base: float, speed: float) -> None:
    target = wall_base + (ts - t_base) / speed
    delay = target - time.monotonic()
    if delay > 0:
        time.sleep(delay)


def http_sink(target_url: str, token: str) -> Callable[[list[str]], None]:
    client = httpx.Client(base_url=target_url, timeout=30.0,
                          headers={"Authorization": f"Bearer {token}"})

    def sink(lines: list[str]) -> None:
        resp = client.post("/feed/ingest", content="\n".join(lines))
        resp.raise_for_status()

    return sink


def login(target_url: str, username: str, password: str) -> str:
    resp = httpx.post(f"{target_url}/auth/login",
                      json={"username": username, "password": password},
                      timeout=10.0)
    resp.raise_for_status()
    return resp.json()["token"]
