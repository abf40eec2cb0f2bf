"""Per-entity timestamp bags and their overlap similarity.

An entity's bag collects every observed endpoint of every quadruple it
heads or tails: begin and end timestamps each insert one occurrence, so a
point event (tb == te) contributes two. Time id 0 means "unobserved" and is
never inserted. Similarity of two bags is the Dice overlap of multisets:
twice the elementwise-min intersection mass over the summed bag sizes.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

# the built-in layer is always linkable; tbb/omp probing warns on some boxes
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

from numba import njit, prange

from .graph import HEAD, T_BEGIN, T_END, TAIL, TkgPair


class TimeBag(NamedTuple):
    entity: int           # row in the union entity space
    counts: dict          # time id -> occurrences, never id 0, counts >= 1
    total: int


@dataclass
class TimeBags:
    """Bag table over the union entity space (graph-2 rows offset by |E1|)."""

    counts: sp.csr_matrix   # |E| x |T| occurrence counts
    totals: np.ndarray      # per-row bag sizes
    num_entities_g1: int

    def bag(self, row: int) -> TimeBag:
        lo, hi = self.counts.indptr[row], self.counts.indptr[row + 1]
        ids = self.counts.indices[lo:hi]
        vals = self.counts.data[lo:hi]
        return TimeBag(
            entity=int(row),
            counts={int(i): int(v) for i, v in zip(ids, vals)},
            total=int(self.totals[row]),
        )


def collect_time_bags(pair: TkgPair, dedup_point_events: bool = False) -> TimeBags:
    """Scan both graphs' quadruples into the bag table.

    dedup_point_events makes tb == te insert a single occurrence instead of
    two, for corpora that encode point events redundantly.
    """
    e1 = pair.g1.num_entities
    q1, q2 = pair.g1.quads, pair.g2.quads
    h = np.concatenate([q1[:, HEAD], q2[:, HEAD] + e1])
    t = np.concatenate([q1[:, TAIL], q2[:, TAIL] + e1])
    tb = np.concatenate([q1[:, T_BEGIN], q2[:, T_BEGIN]])
    te = np.concatenate([q1[:, T_END], q2[:, T_END]])

    begin = tb != 0
    end = te != 0
    if dedup_point_events:
        end &= te != tb

    rows = np.concatenate([h[begin], t[begin], h[end], t[end]])
    cols = np.concatenate([tb[begin], tb[begin], te[end], te[end]])
    counts = sp.coo_matrix(
        (np.ones(len(rows), dtype=np.int64), (rows, cols)),
        shape=(pair.num_entities, pair.num_times),
    ).tocsr()
    counts.sum_duplicates()
    counts.sort_indices()
    totals = np.asarray(counts.sum(axis=1)).ravel().astype(np.int64)
    return TimeBags(counts=counts, totals=totals, num_entities_g1=e1)


def time_similarity(a: TimeBag, b: TimeBag) -> float:
    """Dice overlap of two bags; 0 when both are empty."""
    if a.total + b.total == 0:
        return 0.0
    small, large = (a.counts, b.counts) if len(a.counts) <= len(b.counts) else (b.counts, a.counts)
    shared = sum(min(v, large[k]) for k, v in small.items() if k in large)
    return 2.0 * shared / (a.total + b.total)


@njit(cache=True, parallel=True)
def _overlap_kernel(indptr, indices, data, rows_a, rows_b, out):  # pragma: no cover
    for p in prange(rows_a.shape[0]):
        i, j = rows_a[p], rows_b[p]
        a, a_end = indptr[i], indptr[i + 1]
        b, b_end = indptr[j], indptr[j + 1]
        shared = 0
        while a < a_end and b < b_end:
            ca, cb = indices[a], indices[b]
            if ca == cb:
                da, db = data[a], data[b]
                shared += da if da < db else db
                a += 1
                b += 1
            elif ca < cb:
                a += 1
            else:
                b += 1
        out[p] = shared


def batch_time_similarity(bags: TimeBags, rows_a: np.ndarray,
                          rows_b: np.ndarray) -> np.ndarray:
    """Vector of Dice overlaps for aligned row-index arrays."""
    rows_a = np.ascontiguousarray(rows_a, dtype=np.int64)
    rows_b = np.ascontiguousarray(rows_b, dtype=np.int64)
    if rows_a.shape != rows_b.shape:
        raise ValueError("row index arrays must have equal length")
    shared = np.zeros(len(rows_a), dtype=np.int64)
    if len(rows_a):
        _overlap_kernel(bags.counts.indptr, bags.counts.indices,
                        bags.counts.data, rows_a, rows_b, shared)
    denom = bags.totals[rows_a] + bags.totals[rows_b]
    return np.divide(2.0 * shared, denom,
                     out=np.zeros(len(rows_a), dtype=np.float64),
                     where=denom > 0)
