"""Image-to-segment verdict aggregation by class-proportion thresholds."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

VERDICTS = ("normal", "recurrent", "incident")
SWEEP_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))
SWEEP_COLUMNS = ("Index", "Incident Threshold", "Normal Threshold",
                 "Accuracy", "Correctly Classified Videos")


@dataclass(frozen=True)
class AggregationPolicy:
    incident_threshold: float = 0.1
    normal_threshold: float = 0.6

    def validate(self) -> None:
        for v in (self.incident_threshold, self.normal_threshold):
            if not 0.0 < v < 1.0:
                raise ValueError("thresholds must lie in (0, 1)")


def aggregate(image_labels: list[int],
              policy: AggregationPolicy) -> tuple[str, tuple[float, float, float]]:
    """Segment verdict from image labels.

    tau_c = count(c)/total. Verdict: incident if tau_I strictly exceeds the
    incident threshold; else normal if tau_N strictly exceeds the normal
    threshold; else recurrent. tau_R is reported but never gates.
    """
    if not image_labels:
        raise ValueError("segment has no images; upstream pipeline failure")
    policy.validate()
    n = len(image_labels)
    tau_i = sum(1 for lab in image_labels if lab == 2) / n
    tau_r = sum(1 for lab in image_labels if lab == 1) / n
    tau_n = sum(1 for lab in image_labels if lab == 0) / n
    if tau_i > policy.incident_threshold:
        verdict = "incident"
    elif tau_n > policy.normal_threshold:
        verdict = "normal"
    else:
        verdict = "recurrent"
    return verdict, (tau_i, tau_r, tau_n)


def sweep(videos: list[tuple[list[int], str]]) -> list[dict]:
    """Video-level accuracy over the 81 threshold combinations."""
    rows = []
    for idx, (ti, tn) in enumerate(itertools.product(SWEEP_GRID, SWEEP_GRID),
                                   start=1):
        policy = AggregationPolicy(ti, tn)
        correct = sum(1 for labels, truth in videos
                      if aggregate(labels, policy)[0] == truth)
        acc = correct / len(videos) if videos else 0.0
        rows.append({"Index": idx, "Incident Threshold": ti,
                     "Normal Threshold": tn, "Accuracy": round(acc, 2),
                     "Correctly Classified Videos": correct})
    return rows


def select_policy(rows: list[dict]) -> AggregationPolicy:
    """Most incident-sensitive row among the maximal-accuracy rows:
    lexicographically minimal (incident threshold, normal threshold)."""
    if not rows:
        raise ValueError("empty sweep table")
    best_acc = max(r["Accuracy"] for r in rows)
    winners = [r for r in rows if r["Accuracy"] == best_acc]
    chosen = min(winners, key=lambda r: (r["Incident Threshold"],
                                         r["Normal Threshold"]))
    return AggregationPolicy(chosen["Incident Threshold"],
                             chosen["Normal Threshold"])


def format_sweep(rows: list[dict]) -> str:
    lines = ["\t".join(SWEEP_COLUMNS)]
    for r in rows:
        lines.append("\t".join(str(r[c]) for c in SWEEP_COLUMNS))
    return "\n".join(lines)
