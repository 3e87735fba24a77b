"""Labeled trajectory-image dataset construction and stratified splitting."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from ..sim.drone import FrameDetections, GpsFix
from ..sim.labels import window_label
from .config import PipelineConfig
from .render import TrajectoryImage, render_windows
from .tracking import associate
from .transform import compensate, filter_direction

MANIFEST_VERSION = 1
MIN_CLASS_SIZE = 5
SPLIT_RATIOS = (0.6, 0.2, 0.2)


@dataclass
class DatasetSplit:
    train: list[TrajectoryImage] = field(default_factory=list)
    val: list[TrajectoryImage] = field(default_factory=list)
    test: list[TrajectoryImage] = field(default_factory=list)

    @property
    def sizes(self) -> tuple[int, int, int]:
        return len(self.train), len(self.val), len(self.test)

    def label_counts(self, split: str) -> dict[int, int]:
        out: dict[int, int] = {}
        for im in getattr(self, split):
            out[im.label] = out.get(im.label, 0) + 1
        return out


def _largest_remainder(weights: np.ndarray, total: int) -> np.ndarray:
    """Integer allocation of `total` proportional to weights; remainders
    resolved largest-first, ties broken by lower index."""
    quotas = weights / weights.sum() * total
    alloc = np.floor(quotas).astype(int)
    short = total - int(alloc.sum())
    order = sorted(range(len(weights)),
                   key=lambda i: (-(quotas[i] - alloc[i]), i))
    for i in order[:short]:
        alloc[i] += 1
    return alloc


def stratified_split(labels: list[int], seed: int = 0,
                     ratios: tuple[float, float, float] = SPLIT_RATIOS,
                     ) -> tuple[list[int], list[int], list[int]]:
    """Stratified 6:2:2 index split.

    Carried out as two sequential carve-outs (test first, then validation
    from the remainder), with each carve-out size taken as the ceiling of
    its fraction and per-class counts allocated by largest remainder.
    """
    labels_arr = np.asarray(labels)
    classes = sorted(set(labels))
    counts = np.array([(labels_arr == c).sum() for c in classes], dtype=float)
    if any(counts < MIN_CLASS_SIZE):
        raise ValueError(
            f"every label class needs >= {MIN_CLASS_SIZE} images; "
            f"got {dict(zip(classes, counts.astype(int)))}")
    rng = np.random.default_rng(seed)
    per_class = {c: list(np.flatnonzero(labels_arr == c)) for c in classes}
    for c in classes:
        rng.shuffle(per_class[c])

    n_total = len(labels)
    n_test = math.ceil(ratios[2] * n_total)
    test_alloc = _largest_remainder(counts, n_test)
    rem_counts = counts - test_alloc
    n_val = math.ceil(ratios[1] / (ratios[0] + ratios[1]) * rem_counts.sum())
    val_alloc = _largest_remainder(rem_counts, n_val)

    train_idx: list[int] = []
    val_idx: list[int] = []
    test_idx: list[int] = []
    for k, c in enumerate(classes):
        pool = per_class[c]
        t_n, v_n = int(test_alloc[k]), int(val_alloc[k])
        test_idx += pool[:t_n]
        val_idx += pool[t_n:t_n + v_n]
        train_idx += pool[t_n + v_n:]
    return sorted(train_idx), sorted(val_idx), sorted(test_idx)


def extract_labeled_images(frames: list[FrameDetections], gps: list[GpsFix],
                           intervals: list[tuple[float, float, int]],
                           config: PipelineConfig,
                           segment_id: str | None = None,
                           ) -> list[TrajectoryImage]:
    """Full pipeline for one feed: track, compensate, filter, render, label."""
    tracks = associate(frames, gate_px=config.gate_px,
                       min_track_frames=config.min_track_frames)
    trajs = filter_direction(compensate(tracks, gps, gsd=config.gsd))
    images = render_windows(trajs, config, gps)
    for im in images:
        im.label = window_label(intervals, im.window_start,
                                im.window_start + im.period)
        im.source_segment_id = segment_id
    return images


def build_dataset(videos: list[tuple[list[FrameDetections], list[GpsFix],
                                     list[tuple[float, float, int]]]],
                  config: PipelineConfig, seed: int = 0) -> DatasetSplit:
    """Stratified 6:2:2 dataset over all feeds' trajectory images."""
    images: list[TrajectoryImage] = []
    for i, (frames, gps, intervals) in enumerate(videos):
        images.extend(extract_labeled_images(frames, gps, intervals, config,
                                             segment_id=f"video-{i}"))
    return split_images(images, seed=seed)


def split_images(images: list[TrajectoryImage], seed: int = 0) -> DatasetSplit:
    tr, va, te = stratified_split([im.label for im in images], seed=seed)
    return DatasetSplit(train=[images[i] for i in tr],
                        val=[images[i] for i in va],
                        test=[images[i] for i in te])


def save_dataset(ds: DatasetSplit, out_dir: str | Path) -> None:
    out = Path(out_dir)
    manifest: dict = {"version": MANIFEST_VERSION, "splits": {}}
    for split in ("train", "val", "test"):
        d = out / split
        d.mkdir(parents=True, exist_ok=True)
        entries = []
        for i, im in enumerate(getattr(ds, split)):
            name = f"{i:06d}.png"
            arr = np.clip(im.pixels * 255.0, 0, 255).astype(np.uint8)
            Image.fromarray(arr).save(d / name)
            entries.append({"file": name, "window_start": im.window_start,
                            "period": im.period, "label": im.label,
                            "segment_id": im.source_segment_id})
        manifest["splits"][split] = entries
    (out / "manifest.json").write_text(json.dumps(manifest))


def load_dataset(in_dir: str | Path) -> DatasetSplit:
    root = Path(in_dir)
    manifest = json.loads((root / "manifest.json").read_text())
    if manifest.get("version") != MANIFEST_VERSION:
        raise ValueError(f"unsupported manifest version {manifest.get('version')}")
    ds = DatasetSplit()
    for split, entries in manifest["splits"].items():
        images = []
        for e in entries:
            arr = np.asarray(Image.open(root / split / e["file"]),
                             dtype=np.float32) / 255.0
            images.append(TrajectoryImage(e["window_start"], e["period"], arr,
                                          label=e["label"],
                                          source_segment_id=e["segment_id"]))
        setattr(ds, split, images)
    return ds
