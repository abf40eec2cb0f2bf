"""End-to-end alignment runs: one-shot supervised and iterative bootstrapping.

One pass: seed random labels, propagate the relational and temporal aspects,
fuse, retrieve top-k candidates among reference entities, blend in bag
overlap, normalize with the sparse assignment step, rank and extract.
The bootstrapping mode repeats the pass, promoting extracted pairs whose
entities are still unclaimed into the seed set, with fresh random vectors
and a fully rebuilt label state each iteration. Metrics always cover the
full original reference set.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .config import Config
from .evaluation import MetricsReport, evaluate
from .graph import TkgPair
from .labelprop import (RELATIONAL, TEMPORAL, AdjacencyViews,
                        build_adjacency_views, fuse_labels, init_entity_labels,
                        run_aspect)
from .matching import (AlignmentResult, CandidateTable, apply_time_constraints,
                       rank_and_extract, sinkhorn_sparse, topk_candidates)
from .timesim import TimeBags, collect_time_bags

log = logging.getLogger(__name__)


@dataclass
class RunState:
    """Bootstrapping trace: growing seed set and per-iteration bookkeeping."""

    seeds: np.ndarray
    iteration: int = 0
    metrics_history: list = field(default_factory=list)
    accepted: list = field(default_factory=list)  # (source, target, score, iteration)


@dataclass
class _Fixtures:
    """Pieces that stay constant across bootstrapping iterations."""

    views: AdjacencyViews
    bags: TimeBags | None
    source_pool: np.ndarray   # graph-1 reference entities, sorted
    target_pool: np.ndarray   # graph-2 reference entities, sorted


def _prepare(pair: TkgPair, config: Config, timings: dict) -> _Fixtures:
    if len(pair.refs) == 0:
        raise ValueError("reference set is empty")
    t0 = time.perf_counter()
    views = build_adjacency_views(pair, binarize=config.binarize_views)
    timings["views"] = timings.get("views", 0.0) + time.perf_counter() - t0
    bags = None
    if config.time_constraints:
        t0 = time.perf_counter()
        bags = collect_time_bags(pair, dedup_point_events=config.dedup_point_events)
        timings["time_bags"] = timings.get("time_bags", 0.0) + time.perf_counter() - t0
    return _Fixtures(
        views=views,
        bags=bags,
        source_pool=np.unique(pair.refs[:, 0]),
        target_pool=np.unique(pair.refs[:, 1]),
    )


def _one_pass(pair: TkgPair, config: Config, seeds: np.ndarray,
              rng: np.random.Generator, fx: _Fixtures,
              timings: dict) -> AlignmentResult:
    def mark(name: str, t0: float) -> float:
        now = time.perf_counter()
        timings[name] = timings.get(name, 0.0) + now - t0
        return now

    t0 = time.perf_counter()
    init = init_entity_labels(pair, config.dim, rng, seeds=seeds)
    t0 = mark("init_labels", t0)

    fused = run_aspect(fx.views, init, config.rounds, RELATIONAL)
    if config.temporal_propagation:
        temporal = run_aspect(fx.views, init, config.rounds, TEMPORAL)
        fused = fuse_labels(fused, temporal, config.alpha, out=fused)
        del temporal
    t0 = mark("propagation", t0)

    e1 = pair.g1.num_entities
    src_labels = fused[fx.source_pool]
    tgt_labels = fused[e1 + fx.target_pool]
    del fused
    table = topk_candidates(src_labels, tgt_labels, config.topk,
                            source_ids=fx.source_pool, target_ids=fx.target_pool,
                            target_space=pair.g2.num_entities)
    t0 = mark("retrieval", t0)

    if config.time_constraints:
        table = apply_time_constraints(table, fx.bags, config.beta)
        t0 = mark("time_fusion", t0)

    raw = table
    if config.sinkhorn:
        table = sinkhorn_sparse(table, config.temperature, config.sinkhorn_iters)
        t0 = mark("sinkhorn", t0)

    result = rank_and_extract(table, config.threshold, one_to_one=config.one_to_one)
    if config.threshold_on_raw and config.sinkhorn:
        # keep post-assignment ranking, take accepted pairs from raw scores
        raw_pairs = rank_and_extract(raw, config.threshold,
                                     one_to_one=config.one_to_one)
        result = AlignmentResult(source_ids=result.source_ids,
                                 ranked_target_ids=result.ranked_target_ids,
                                 ranked_scores=result.ranked_scores,
                                 pairs=raw_pairs.pairs,
                                 pair_scores=raw_pairs.pair_scores)
    mark("extraction", t0)
    return result


def _finalize(report: MetricsReport, config: Config, started: float,
              timings: dict, iterations: list) -> MetricsReport:
    report.wall_clock_seconds = time.perf_counter() - started
    report.config = config.to_dict()
    report.phase_seconds = dict(timings)
    report.iterations = list(iterations)
    return report


def run_supervised(pair: TkgPair, config: Config
                   ) -> tuple[MetricsReport, AlignmentResult]:
    """One pass with the given seeds; metrics over the reference set."""
    started = time.perf_counter()
    rng = np.random.default_rng(config.rng_seed)
    timings: dict = {}
    fx = _prepare(pair, config, timings)
    result = _one_pass(pair, config, pair.seeds, rng, fx, timings)
    t0 = time.perf_counter()
    report = evaluate(result, pair.refs)
    timings["evaluation"] = time.perf_counter() - t0
    return _finalize(report, config, started, timings, []), result


def run_semi_supervised(pair: TkgPair, config: Config
                        ) -> tuple[MetricsReport, AlignmentResult, RunState]:
    """Bootstrapping loop: extracted pairs join the seeds between passes.

    A pair is promoted when its score clears the threshold and neither
    entity is already a seed or a previous promotion; promotions are never
    revoked. Stops after max_semi_iters passes or the first pass that adds
    nothing. Every pass is scored against the full original reference set.
    """
    started = time.perf_counter()
    rng = np.random.default_rng(config.rng_seed)
    timings: dict = {}
    fx = _prepare(pair, config, timings)

    state = RunState(seeds=pair.seeds.copy())
    used_src = set(pair.seeds[:, 0].tolist())
    used_tgt = set(pair.seeds[:, 1].tolist())
    report: MetricsReport | None = None
    result: AlignmentResult | None = None
    iterations: list = []

    for it in range(1, config.max_semi_iters + 1):
        iter_started = time.perf_counter()
        state.iteration = it
        result = _one_pass(pair, config, state.seeds, rng, fx, timings)
        report = evaluate(result, pair.refs)
        state.metrics_history.append(report)

        fresh = []
        for (src, tgt), score in zip(result.pairs.tolist(),
                                     result.pair_scores.tolist()):
            if src in used_src or tgt in used_tgt:
                continue
            used_src.add(src)
            used_tgt.add(tgt)
            fresh.append((src, tgt))
            state.accepted.append((src, tgt, float(score), it))
        if fresh:
            state.seeds = np.concatenate(
                [state.seeds, np.asarray(fresh, dtype=np.int64)])

        elapsed = time.perf_counter() - iter_started
        iterations.append({
            "iteration": it,
            "new_pairs": len(fresh),
            "total_seeds": int(len(state.seeds)),
            "hits@1": report.hits.get(1, 0.0),
            "mrr": report.mrr,
            "seconds": elapsed,
        })
        log.info("iteration %d: new_pairs=%d total_seeds=%d hits@1=%.4f "
                 "elapsed=%.2fs", it, len(fresh), len(state.seeds),
                 report.hits.get(1, 0.0), elapsed)
        if not fresh:
            break

    return _finalize(report, config, started, timings, iterations), result, state


def run(pair: TkgPair, config: Config) -> tuple[MetricsReport, AlignmentResult]:
    """Dispatch on config.mode and config.direction.

    direction="both" runs the full pipeline independently in each direction
    and averages the scalar metrics; the forward result is returned.
    """
    forward = _run_one_direction(pair, config)
    if config.direction != "both":
        return forward
    backward = _run_one_direction(pair.swapped(), config)
    fwd_report, fwd_result = forward
    bwd_report, _ = backward
    merged = MetricsReport(
        mrr=(fwd_report.mrr + bwd_report.mrr) / 2.0,
        hits={k: (v + bwd_report.hits.get(k, 0.0)) / 2.0
              for k, v in fwd_report.hits.items()},
        num_evaluated=fwd_report.num_evaluated + bwd_report.num_evaluated,
        wall_clock_seconds=fwd_report.wall_clock_seconds
        + bwd_report.wall_clock_seconds,
        config=config.to_dict(),
        phase_seconds={key: fwd_report.phase_seconds.get(key, 0.0)
                       + bwd_report.phase_seconds.get(key, 0.0)
                       for key in set(fwd_report.phase_seconds)
                       | set(bwd_report.phase_seconds)},
        iterations=[{"direction": "forward", "log": fwd_report.iterations},
                    {"direction": "backward", "log": bwd_report.iterations}],
    )
    return merged, fwd_result


def _run_one_direction(pair: TkgPair, config: Config
                       ) -> tuple[MetricsReport, AlignmentResult]:
    if config.mode == "semi":
        report, result, _ = run_semi_supervised(pair, config)
        return report, result
    return run_supervised(pair, config)
