"""Batch command-line front end.

Loads a dataset directory, runs one alignment (or a one-parameter sweep),
prints key = value metric lines, and optionally writes a JSON result
document. The document is written atomically: a failed run leaves no
partial file behind.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

from .config import Config
from .evaluation import MetricsReport
from .graph import DatasetError, FormatOptions, load_tkg_pair, validate_split
from .pipeline import run

log = logging.getLogger(__name__)

# sweep parameter -> (Config attribute, value parser); short spellings are
# accepted alongside the flag names
_SWEEP_PARAMS = {
    "alpha": ("alpha", float),
    "beta": ("beta", float),
    "d": ("dim", int),
    "dim": ("dim", int),
    "k": ("topk", int),
    "topk": ("topk", int),
    "m": ("sinkhorn_iters", int),
    "sinkhorn-iters": ("sinkhorn_iters", int),
    "t": ("temperature", float),
    "temperature": ("temperature", float),
    "threshold": ("threshold", float),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tkgalign",
        description="Align entities across two temporal knowledge graphs.",
    )
    p.add_argument("--data", required=True,
                   help="dataset directory (tab-separated quadruples and pairs)")
    p.add_argument("--mode", choices=("sup", "semi"), default="sup",
                   help="one-shot or iterative bootstrapping run")
    p.add_argument("--dim", type=int, default=512, help="label vector width")
    p.add_argument("--alpha", type=float, default=0.6,
                   help="temporal share in label fusion")
    p.add_argument("--beta", type=float, default=0.4,
                   help="time-signature share in score fusion")
    p.add_argument("--rounds", type=int, default=2,
                   help="propagation rounds per aspect")
    p.add_argument("--topk", type=int, default=500,
                   help="candidates kept per source entity")
    p.add_argument("--sinkhorn-iters", type=int, default=15,
                   help="normalization passes in the assignment step")
    p.add_argument("--temperature", type=float, default=0.05,
                   help="exponent scale in the assignment step")
    p.add_argument("--threshold", type=float, default=0.8,
                   help="acceptance bar for extracted pairs")
    p.add_argument("--max-iters", type=int, default=5,
                   help="bootstrapping iteration cap (semi mode)")
    p.add_argument("--no-tlp", action="store_true",
                   help="disable the temporal propagation aspect")
    p.add_argument("--no-tc", action="store_true",
                   help="disable time-signature score fusion")
    p.add_argument("--no-sinkhorn", action="store_true",
                   help="disable the assignment normalization step")
    p.add_argument("--no-one-to-one", action="store_true",
                   help="extract per-source best pairs without de-conflicting")
    p.add_argument("--binarize-views", action="store_true",
                   help="0/1 adjacency instead of co-occurrence counts")
    p.add_argument("--dedup-point-events", action="store_true",
                   help="insert tb == te once into time bags instead of twice")
    p.add_argument("--threshold-on-raw", action="store_true",
                   help="apply the acceptance bar to pre-assignment scores")
    p.add_argument("--direction", choices=("one-way", "both"), default="one-way",
                   help="evaluate graph-1 to graph-2, or average both ways")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--out", help="write a JSON result document here")
    p.add_argument("--sweep", metavar="NAME=V1,V2,...",
                   help="run once per value of one hyper-parameter "
                        "(alpha, beta, dim, topk, sinkhorn-iters, "
                        "temperature, threshold)")
    p.add_argument("--threads", type=int, default=0,
                   help="cap BLAS/numba thread pools (0: leave unchanged)")
    p.add_argument("--local-ids", action="store_true",
                   help="dataset files use per-graph id namespaces")
    p.add_argument("--val-file",
                   help="extra pair file folded into the references")
    return p


def _config_from_args(args: argparse.Namespace) -> Config:
    return Config(
        dim=args.dim,
        alpha=args.alpha,
        beta=args.beta,
        rounds=args.rounds,
        topk=args.topk,
        sinkhorn_iters=args.sinkhorn_iters,
        temperature=args.temperature,
        threshold=args.threshold,
        max_semi_iters=args.max_iters,
        mode=args.mode,
        direction=args.direction,
        temporal_propagation=not args.no_tlp,
        time_constraints=not args.no_tc,
        sinkhorn=not args.no_sinkhorn,
        one_to_one=not args.no_one_to_one,
        binarize_views=args.binarize_views,
        dedup_point_events=args.dedup_point_events,
        threshold_on_raw=args.threshold_on_raw,
        rng_seed=args.seed,
        threads=args.threads,
    )


def _parse_sweep(text: str) -> tuple[str, list]:
    name, sep, values = text.partition("=")
    name = name.strip().lower()
    if not sep or name not in _SWEEP_PARAMS or not values:
        raise ValueError(
            f"bad --sweep {text!r}: expected NAME=V1,V2,... with NAME one of "
            + ", ".join(sorted(set(_SWEEP_PARAMS)))
        )
    attr, convert = _SWEEP_PARAMS[name]
    try:
        parsed = [convert(v) for v in values.split(",") if v != ""]
    except ValueError:
        raise ValueError(f"bad --sweep value in {values!r}") from None
    if not parsed:
        raise ValueError(f"bad --sweep {text!r}: no values")
    return attr, parsed


def _limit_threads(n: int) -> None:
    if n <= 0:
        return
    from threadpoolctl import threadpool_limits
    threadpool_limits(limits=n)
    try:
        import numba
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
    except ImportError:
        pass


def _write_json(path: str, doc: dict) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def _report_doc(report: MetricsReport, data_dir: str) -> dict:
    doc = report.to_json_dict()
    doc["dataset"] = os.path.abspath(data_dir)
    return doc


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s",
                        stream=sys.stdout, force=True)
    args = build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
        sweep = _parse_sweep(args.sweep) if args.sweep else None
        _limit_threads(args.threads)

        started = time.perf_counter()
        options = FormatOptions(global_ids=not args.local_ids,
                                val_file=args.val_file)
        pair = validate_split(load_tkg_pair(args.data, options))
        load_seconds = time.perf_counter() - started
        log.info("loaded %s: |E1|=%d |E2|=%d quads=%d/%d seeds=%d refs=%d",
                 args.data, pair.g1.num_entities, pair.g2.num_entities,
                 len(pair.g1.quads), len(pair.g2.quads),
                 len(pair.seeds), len(pair.refs))

        if sweep is None:
            report, _ = run(pair, config)
            report.wall_clock_seconds += load_seconds
            report.phase_seconds["load"] = load_seconds
            print(report.to_text())
            if args.out:
                _write_json(args.out, _report_doc(report, args.data))
        else:
            attr, values = sweep
            runs = []
            for value in values:
                cfg = Config(**{**config.to_dict(), attr: value})
                report, _ = run(pair, cfg)
                report.wall_clock_seconds += load_seconds
                report.phase_seconds["load"] = load_seconds
                runs.append((value, report))
                print(f"{attr}={value}: mrr={report.mrr:.6f} "
                      + " ".join(f"hits@{k}={v:.6f}"
                                 for k, v in sorted(report.hits.items()))
                      + f" seconds={report.wall_clock_seconds:.3f}")
            if args.out:
                doc = {
                    "dataset": os.path.abspath(args.data),
                    "sweep_parameter": attr,
                    "runs": [{"value": value, **_report_doc(rep, args.data)}
                             for value, rep in runs],
                }
                _write_json(args.out, doc)
    except (DatasetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
