"""On-disk flight archive: append-only record log plus an index file."""

from __future__ import annotations

import json
import threading
from pathlib import Path

import numpy as np
from PIL import Image

from ..features import FlightReport, SegmentResult
from .core import flight_features


class FlightArchive:
    def __init__(self, base_dir: str | Path):
        self.base = Path(base_dir)
        self.base.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._index_path = self.base / "index.json"
        if not self._index_path.exists():
            self._index_path.write_text("{}")

    def store(self, flight: FlightReport, meta: dict) -> None:
        with self._lock:
            d = self.base / flight.flight_id
            d.mkdir(parents=True, exist_ok=True)
            with open(d / "segments.jsonl", "w") as fh:
                for seg in flight.segments:
                    fh.write(json.dumps(seg.to_json()) + "\n")
            (d / "features.json").write_text(
                json.dumps(flight_features(flight), indent=1))
            (d / "meta.json").write_text(json.dumps(
                {**meta, "start_time": flight.start_time}, indent=1))
            for seg in flight.segments:
                if seg.preview is not None:
                    Image.fromarray(np.asarray(seg.preview)).save(
                        d / f"{seg.segment_id}.png")
            index = json.loads(self._index_path.read_text())
            index[flight.flight_id] = {
                "freeway": meta.get("freeway", ""),
                "date": meta.get("date", ""),
                "start_time": flight.start_time,
            }
            self._index_path.write_text(json.dumps(index, indent=1))

    def query(self, freeway: str | None = None,
              date: str | None = None) -> list[dict]:
        index = json.loads(self._index_path.read_text())
        out = []
        for fid, meta in index.items():
            if freeway and meta.get("freeway") != freeway:
                continue
            if date and meta.get("date") != date:
                continue
            out.append({"flight_id": fid, **meta})
        return sorted(out, key=lambda m: m.get("start_time", 0))

    def load(self, flight_id: str) -> dict | None:
        d = self.base / flight_id
        if not d.exists():
            return None
        segments = [json.loads(ln) for ln in
                    (d / "segments.jsonl").read_text().splitlines() if ln]
        return {
            "flight_id": flight_id,
            "meta": json.loads((d / "meta.json").read_text()),
            "features": json.loads((d / "features.json").read_text()),
            "segments": segments,
        }

    def preview_path(self, flight_id: str, segment_id: str) -> Path | None:
        p = self.base / flight_id / f"{segment_id}.png"
        return p if p.exists() else None

    def count(self) -> int:
        return len(json.loads(self._index_path.read_text()))
