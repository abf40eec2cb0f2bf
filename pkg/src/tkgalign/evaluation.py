"""Ranking metrics over an alignment result: MRR and Hits@k."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matching import AlignmentResult


@dataclass
class MetricsReport:
    """Scalar metrics plus run context, serializable for the CLI."""

    mrr: float
    hits: dict[int, float]
    num_evaluated: int
    wall_clock_seconds: float = 0.0
    config: dict = field(default_factory=dict)
    phase_seconds: dict = field(default_factory=dict)
    iterations: list = field(default_factory=list)

    def to_text(self) -> str:
        lines = [f"mrr = {self.mrr:.6f}"]
        for k in sorted(self.hits):
            lines.append(f"hits@{k} = {self.hits[k]:.6f}")
        lines.append(f"num_evaluated = {self.num_evaluated}")
        lines.append(f"wall_clock_seconds = {self.wall_clock_seconds:.3f}")
        return "\n".join(lines)

    def to_json_dict(self) -> dict:
        return {
            "config": dict(self.config),
            "metrics": {
                "mrr": self.mrr,
                "hits": {str(k): v for k, v in sorted(self.hits.items())},
                "num_evaluated": self.num_evaluated,
            },
            "timing": {
                "total_seconds": self.wall_clock_seconds,
                "phases": dict(self.phase_seconds),
            },
            "iterations": list(self.iterations),
        }


def evaluate(result: AlignmentResult, refs: np.ndarray,
             hits_at: tuple[int, ...] = (1, 10)) -> MetricsReport:
    """Score ranked candidate lists against reference pairs.

    The rank of the true target is its position in the row's candidate list
    (descending score, ties by ascending target id, already canonical in the
    result). A true target absent from the list contributes reciprocal rank
    0 and misses every cutoff.
    """
    refs = np.asarray(refs, dtype=np.int64)
    if len(refs) == 0:
        raise ValueError("reference set is empty")

    row_of = {int(s): i for i, s in enumerate(result.source_ids)}
    rows = np.array([row_of.get(int(e1), -1) for e1 in refs[:, 0]], dtype=np.int64)
    if (rows < 0).any():
        missing = refs[rows < 0, 0][:10].tolist()
        raise ValueError(f"reference sources without candidate rows: {missing}")

    hit_mat = result.ranked_target_ids[rows] == refs[:, 1:2]
    found = hit_mat.any(axis=1)
    ranks = np.where(found, hit_mat.argmax(axis=1) + 1, 0)

    rr = np.where(found, 1.0 / np.maximum(ranks, 1), 0.0)
    hits = {int(k): float(np.mean(found & (ranks <= k))) for k in hits_at}
    return MetricsReport(mrr=float(rr.mean()), hits=hits, num_evaluated=len(refs))
