"""Random-label propagation over relational and temporal graph views.

Entities of both graphs share one index space (graph-2 rows offset by
|E1|). Seed pairs start with a shared random unit vector; labels then
diffuse through three row-normalized views per aspect: entity-entity,
entity-companion and companion-entity, where the companion space is either
relations (with separate inverse-direction ids) or timestamps. Each round
updates entities and companions from the same pre-round state, L2-normalizes
both, and appends the entity snapshot to a history whose concatenation is
the aspect's output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graph import HEAD, REL, T_BEGIN, T_END, TAIL, TkgPair
from .sparse import build_csr, l2_normalize_rows, row_normalize_l1, spmm, transpose

RELATIONAL, TEMPORAL = "relational", "temporal"


@dataclass
class AdjacencyViews:
    """The five row-stochastic views shared by both propagation aspects."""

    ent_ent: sp.csr_matrix    # |E| x |E|, symmetric pattern, no self loops
    ent_rel: sp.csr_matrix    # |E| x 2(|R1|+|R2|), inverse ids in the top half
    rel_ent: sp.csr_matrix
    ent_time: sp.csr_matrix   # |E| x |T|, column 0 always empty
    time_ent: sp.csr_matrix
    num_entities_g1: int


def build_adjacency_views(pair: TkgPair, binarize: bool = False) -> AdjacencyViews:
    """Assemble the five views from both graphs' quadruples.

    Edge weights are co-occurrence counts (duplicate quadruples accumulate)
    unless binarize is set, and every view is L1 row-normalized at the end.
    Time id 0 marks an unobserved endpoint and produces no temporal edge;
    point events (tb == te) produce a single temporal edge per endpoint.
    """
    e1, r1 = pair.g1.num_entities, pair.g1.num_relations
    num_e = pair.num_entities
    base_r = r1 + pair.g2.num_relations
    num_r = 2 * base_r
    num_t = pair.num_times

    q1, q2 = pair.g1.quads, pair.g2.quads
    h = np.concatenate([q1[:, HEAD], q2[:, HEAD] + e1])
    t = np.concatenate([q1[:, TAIL], q2[:, TAIL] + e1])
    r = np.concatenate([q1[:, REL], q2[:, REL] + r1])
    tb = np.concatenate([q1[:, T_BEGIN], q2[:, T_BEGIN]])
    te = np.concatenate([q1[:, T_END], q2[:, T_END]])

    ones = np.ones(len(h), dtype=np.float64)
    two = np.concatenate([ones, ones])

    # self loops (h == t) would survive the symmetrized stack; drop them
    keep = h != t
    ee = build_csr(
        np.concatenate([h[keep], t[keep]]),
        np.concatenate([t[keep], h[keep]]),
        np.ones(2 * int(keep.sum())),
        (num_e, num_e),
    )
    er = build_csr(
        np.concatenate([h, t]),
        np.concatenate([r, r + base_r]),
        two,
        (num_e, num_r),
    )
    re = build_csr(
        np.concatenate([r, r + base_r]),
        np.concatenate([t, h]),
        two,
        (num_r, num_e),
    )

    begin = tb != 0
    end = (te != 0) & (te != tb)
    et = build_csr(
        np.concatenate([h[begin], t[begin], h[end], t[end]]),
        np.concatenate([tb[begin], tb[begin], te[end], te[end]]),
        np.ones(2 * (int(begin.sum()) + int(end.sum()))),
        (num_e, num_t),
    )
    te_view = transpose(et)

    views = [ee, er, re, et, te_view]
    if binarize:
        for v in views:
            v.data[:] = 1.0
    views = [row_normalize_l1(v) for v in views]
    return AdjacencyViews(*views, num_entities_g1=e1)


def init_entity_labels(pair: TkgPair, dim: int,
                       rng: np.random.Generator | int,
                       seeds: np.ndarray | None = None) -> np.ndarray:
    """Fresh label matrix: each seed pair shares one random unit vector.

    Non-seed entities start at zero. Pass seeds to override pair.seeds (the
    bootstrapping loop grows the set).
    """
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    if seeds is None:
        seeds = pair.seeds
    labels = np.zeros((pair.num_entities, dim), dtype=np.float32)
    if len(seeds) == 0:
        return labels
    vecs = rng.standard_normal((len(seeds), dim))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    vecs = vecs.astype(np.float32)
    labels[seeds[:, 0]] = vecs
    labels[pair.g1.num_entities + seeds[:, 1]] = vecs
    return labels


@dataclass
class LabelState:
    """Labels mid-propagation: entity rows, companion rows, entity history."""

    entity: np.ndarray
    companion: np.ndarray
    history: list

    @property
    def round(self) -> int:
        return len(self.history) - 1


def _start_state(views: AdjacencyViews, entity_labels: np.ndarray,
                 aspect: str) -> LabelState:
    if aspect == RELATIONAL:
        width = views.ent_rel.shape[1]
    elif aspect == TEMPORAL:
        width = views.ent_time.shape[1]
    else:
        raise ValueError(f"unknown aspect: {aspect!r}")
    companion = np.zeros((width, entity_labels.shape[1]), dtype=entity_labels.dtype)
    return LabelState(entity=entity_labels, companion=companion,
                      history=[entity_labels])


def _step(ent_ent: sp.csr_matrix, ent_x: sp.csr_matrix, x_ent: sp.csr_matrix,
          state: LabelState, normalize: bool) -> LabelState:
    # companion update reads the pre-round entity labels (joint update)
    new_e = spmm(ent_ent, state.entity) + spmm(ent_x, state.companion)
    new_x = spmm(x_ent, state.entity)
    if normalize:
        new_e = l2_normalize_rows(new_e)
        new_x = l2_normalize_rows(new_x)
    return LabelState(entity=new_e, companion=new_x,
                      history=state.history + [new_e])


def propagate_relational(views: AdjacencyViews, state: LabelState,
                         normalize: bool = True) -> LabelState:
    return _step(views.ent_ent, views.ent_rel, views.rel_ent, state, normalize)


def propagate_temporal(views: AdjacencyViews, state: LabelState,
                       normalize: bool = True) -> LabelState:
    return _step(views.ent_ent, views.ent_time, views.time_ent, state, normalize)


def run_aspect(views: AdjacencyViews, entity_labels: np.ndarray, rounds: int,
               aspect: str, normalize: bool = True) -> np.ndarray:
    """Propagate one aspect for the given rounds; return the concatenated
    entity history, shape |E| x dim*(rounds+1)."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    state = _start_state(views, entity_labels, aspect)
    step = propagate_relational if aspect == RELATIONAL else propagate_temporal
    for _ in range(rounds):
        state = step(views, state, normalize=normalize)
    return np.concatenate(state.history, axis=1)


def fuse_labels(l_rel: np.ndarray, l_temp: np.ndarray, alpha: float,
                out: np.ndarray | None = None) -> np.ndarray:
    """Blend aspect outputs: (1 - alpha) * relational + alpha * temporal."""
    if l_rel.shape != l_temp.shape:
        raise ValueError(f"shape mismatch: {l_rel.shape} vs {l_temp.shape}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    dt = l_rel.dtype.type
    if out is None:
        return dt(1.0 - alpha) * l_rel + dt(alpha) * l_temp
    np.multiply(l_rel, dt(1.0 - alpha), out=out)
    out += dt(alpha) * l_temp
    return out
