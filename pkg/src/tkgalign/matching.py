"""Candidate retrieval, temporal score fusion, sparse assignment, extraction.

All scoring happens on a rectangular sparse table: one row per source
entity, a fixed number of candidate columns holding target entity ids and
scores. Retrieval is an exact blocked inner-product top-k; the assignment
step runs alternating row/column normalization restricted to the stored
cells; extraction reads the table greedily into one-to-one pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .timesim import TimeBags, batch_time_similarity

# matmul block budget: rows per block sized so a block of f32 scores stays
# around 128 MB even against ~50K targets
_BLOCK_ELEMENTS = 32 * 1024 * 1024


@dataclass
class CandidateTable:
    """Sparse score table: per source row, k candidate target ids + scores.

    Rows are created sorted by descending score (ties by ascending target
    id) and contain no duplicate targets. target_space is the size of the
    target id universe, needed for column-wise accumulation.
    """

    source_ids: np.ndarray    # (S,) source entity ids
    target_ids: np.ndarray    # (S, k) target entity ids
    scores: np.ndarray        # (S, k) float64
    target_space: int

    def __post_init__(self) -> None:
        self.source_ids = np.asarray(self.source_ids, dtype=np.int64)
        self.target_ids = np.asarray(self.target_ids, dtype=np.int64)
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.target_ids.shape != self.scores.shape:
            raise ValueError("target_ids and scores must have equal shapes")
        if len(self.source_ids) != len(self.target_ids):
            raise ValueError("one row of candidates per source entity")

    @property
    def k(self) -> int:
        return self.target_ids.shape[1]

    @classmethod
    def from_dense(cls, scores: np.ndarray,
                   source_ids: np.ndarray | None = None,
                   target_ids: np.ndarray | None = None) -> "CandidateTable":
        """Wrap a dense score matrix: every target is a candidate of every row."""
        scores = np.asarray(scores, dtype=np.float64)
        n_src, n_tgt = scores.shape
        if source_ids is None:
            source_ids = np.arange(n_src, dtype=np.int64)
        if target_ids is None:
            target_ids = np.arange(n_tgt, dtype=np.int64)
        ids = np.broadcast_to(np.asarray(target_ids, np.int64), scores.shape)
        ids, scores = _canonical_row_order(ids, scores)
        return cls(source_ids=np.asarray(source_ids, np.int64), target_ids=ids,
                   scores=scores, target_space=int(np.max(target_ids)) + 1)


def _canonical_row_order(ids: np.ndarray, scores: np.ndarray):
    """Sort each row by descending score, ties by ascending target id."""
    by_id = np.argsort(ids, axis=1, kind="stable")
    ids = np.take_along_axis(ids, by_id, axis=1)
    scores = np.take_along_axis(scores, by_id, axis=1)
    by_score = np.argsort(-scores, axis=1, kind="stable")
    return (np.take_along_axis(ids, by_score, axis=1),
            np.take_along_axis(scores, by_score, axis=1))


def topk_candidates(source_labels: np.ndarray, target_labels: np.ndarray,
                    k: int, source_ids: np.ndarray | None = None,
                    target_ids: np.ndarray | None = None,
                    target_space: int | None = None) -> CandidateTable:
    """Exact top-k inner-product retrieval, blocked over source rows.

    source_ids / target_ids translate matrix rows to entity ids (default:
    row position). Requested k is clamped to the number of targets.
    """
    if source_labels.ndim != 2 or target_labels.ndim != 2:
        raise ValueError("label matrices must be 2-D")
    if source_labels.shape[1] != target_labels.shape[1]:
        raise ValueError("label widths differ")
    if source_labels.shape[1] == 0:
        raise ValueError("label width must be positive")
    n_src, n_tgt = source_labels.shape[0], target_labels.shape[0]
    if n_tgt == 0:
        raise ValueError("no target entities to retrieve from")
    if k < 1:
        raise ValueError("k must be >= 1")
    k = min(k, n_tgt)

    if source_ids is None:
        source_ids = np.arange(n_src, dtype=np.int64)
    if target_ids is None:
        target_ids = np.arange(n_tgt, dtype=np.int64)
    source_ids = np.asarray(source_ids, dtype=np.int64)
    target_ids = np.asarray(target_ids, dtype=np.int64)
    if target_space is None:
        target_space = int(target_ids.max()) + 1

    tgt = np.ascontiguousarray(target_labels)
    block = max(1, _BLOCK_ELEMENTS // max(n_tgt, 1))
    out_ids = np.empty((n_src, k), dtype=np.int64)
    out_scores = np.empty((n_src, k), dtype=np.float64)
    for lo in range(0, n_src, block):
        hi = min(lo + block, n_src)
        sims = source_labels[lo:hi] @ tgt.T
        if k < n_tgt:
            part = np.argpartition(-sims, k - 1, axis=1)[:, :k]
        else:
            part = np.broadcast_to(np.arange(n_tgt), sims.shape).copy()
        picked = np.take_along_axis(sims, part, axis=1).astype(np.float64)
        ids = target_ids[part]
        ids, picked = _canonical_row_order(ids, picked)
        out_ids[lo:hi] = ids
        out_scores[lo:hi] = picked
    return CandidateTable(source_ids=source_ids, target_ids=out_ids,
                          scores=out_scores, target_space=int(target_space))


def apply_time_constraints(table: CandidateTable, bags: TimeBags,
                           beta: float) -> CandidateTable:
    """Blend label scores with bag overlap: (1-beta)*score + beta*overlap.

    Source ids index graph-1 bag rows directly; target ids are offset into
    the graph-2 half of the bag table. Only stored cells are touched.
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must be in [0, 1]")
    rows_a = np.repeat(table.source_ids, table.k)
    rows_b = (table.target_ids + bags.num_entities_g1).ravel()
    overlap = batch_time_similarity(bags, rows_a, rows_b).reshape(table.scores.shape)
    fused = (1.0 - beta) * table.scores + beta * overlap
    return CandidateTable(source_ids=table.source_ids,
                          target_ids=table.target_ids.copy(),
                          scores=fused, target_space=table.target_space)


def sinkhorn_sparse(table: CandidateTable, temperature: float,
                    iterations: int, final: str = "column") -> CandidateTable:
    """Alternating row/column mass normalization on the stored cells.

    Scores are shifted by their row maximum, exponentiated at the given
    temperature, then each pass L1-normalizes rows and afterwards columns
    (cells sharing a target id share one column, accumulated across all
    rows). The default schedule ends on the column pass; final="row" adds
    one more row normalization for callers that need row-stochastic output.
    """
    if temperature <= 0.0:
        raise ValueError("temperature must be > 0")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if final not in ("column", "row"):
        raise ValueError("final must be 'column' or 'row'")

    vals = table.scores.astype(np.float64)
    vals -= vals.max(axis=1, keepdims=True)
    np.exp(vals / temperature, out=vals)
    flat_targets = table.target_ids.ravel()
    for _ in range(iterations):
        vals /= vals.sum(axis=1, keepdims=True)
        col_mass = np.bincount(flat_targets, weights=vals.ravel(),
                               minlength=table.target_space)
        vals /= col_mass[table.target_ids]
    if final == "row":
        vals /= vals.sum(axis=1, keepdims=True)
    return CandidateTable(source_ids=table.source_ids,
                          target_ids=table.target_ids.copy(),
                          scores=vals, target_space=table.target_space)


@dataclass
class AlignmentResult:
    """Ranked candidates per source plus thresholded one-to-one pairs."""

    source_ids: np.ndarray          # (S,)
    ranked_target_ids: np.ndarray   # (S, k) best first
    ranked_scores: np.ndarray       # (S, k)
    pairs: np.ndarray               # (p, 2) extracted (source, target)
    pair_scores: np.ndarray         # (p,)


def rank_and_extract(table: CandidateTable, threshold: float,
                     one_to_one: bool = True) -> AlignmentResult:
    """Order candidates per row and extract pairs scoring above threshold.

    Extraction walks all qualifying cells by descending score (ties by
    source id then target id) and claims each source and target at most
    once; one_to_one=False skips the claiming and keeps each row's best
    qualifying candidate even if targets repeat.
    """
    ranked_ids, ranked_scores = _canonical_row_order(
        np.array(table.target_ids, copy=True), table.scores.astype(np.float64))

    src = np.repeat(table.source_ids, table.k)
    tgt = ranked_ids.ravel()
    sc = ranked_scores.ravel()
    keep = sc > threshold
    if not one_to_one:
        # only the per-row best can win, which is column 0 after ranking
        best = np.zeros(ranked_scores.shape, dtype=bool)
        best[:, 0] = True
        keep &= best.ravel()
    src, tgt, sc = src[keep], tgt[keep], sc[keep]
    order = np.lexsort((tgt, src, -sc))
    src, tgt, sc = src[order], tgt[order], sc[order]

    if one_to_one:
        keep_rows = []
        used_src, used_tgt = set(), set()
        for i in range(len(src)):
            if src[i] in used_src or tgt[i] in used_tgt:
                continue
            used_src.add(src[i])
            used_tgt.add(tgt[i])
            keep_rows.append(i)
        src, tgt, sc = src[keep_rows], tgt[keep_rows], sc[keep_rows]

    pairs = np.stack([src, tgt], axis=1) if len(src) else np.empty((0, 2), np.int64)
    return AlignmentResult(source_ids=table.source_ids.copy(),
                           ranked_target_ids=ranked_ids,
                           ranked_scores=ranked_scores,
                           pairs=pairs.astype(np.int64),
                           pair_scores=sc.astype(np.float64))


def dump_candidates(table: CandidateTable, path: str) -> None:
    """Write the table as 'source<TAB>target<TAB>score' lines."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, sid in enumerate(table.source_ids.tolist()):
            for j in range(table.k):
                fh.write(f"{sid}\t{table.target_ids[i, j]}\t"
                         f"{table.scores[i, j]:.10g}\n")
