"""Entity alignment for temporal knowledge graphs.

Non-neural pipeline: random-label propagation over relational and temporal
graph views, timestamp-bag similarity fusion, sparse alternating-normalization
assignment, greedy one-to-one extraction, and optional iterative seed
bootstrapping.
"""

from .config import Config
from .evaluation import MetricsReport, evaluate
from .graph import (DatasetError, FormatOptions, Quadruple, Tkg, TkgPair,
                    load_tkg_pair, save_tkg_pair, validate_split)
from .labelprop import (AdjacencyViews, LabelState, build_adjacency_views,
                        fuse_labels, init_entity_labels, propagate_relational,
                        propagate_temporal, run_aspect)
from .matching import (AlignmentResult, CandidateTable, apply_time_constraints,
                       dump_candidates, rank_and_extract, sinkhorn_sparse,
                       topk_candidates)
from .pipeline import RunState, run, run_semi_supervised, run_supervised
from .timesim import (TimeBag, TimeBags, batch_time_similarity,
                      collect_time_bags, time_similarity)

__version__ = "0.1.0"

__all__ = [
    "AdjacencyViews",
    "AlignmentResult",
    "CandidateTable",
    "Config",
    "DatasetError",
    "FormatOptions",
    "LabelState",
    "MetricsReport",
    "Quadruple",
    "RunState",
    "TimeBag",
    "TimeBags",
    "Tkg",
    "TkgPair",
    "apply_time_constraints",
    "batch_time_similarity",
    "build_adjacency_views",
    "collect_time_bags",
    "dump_candidates",
    "evaluate",
    "fuse_labels",
    "init_entity_labels",
    "load_tkg_pair",
    "propagate_relational",
    "propagate_temporal",
    "rank_and_extract",
    "run",
    "run_aspect",
    "run_semi_supervised",
    "run_supervised",
    "save_tkg_pair",
    "sinkhorn_sparse",
    "time_similarity",
    "topk_candidates",
    "validate_split",
]
