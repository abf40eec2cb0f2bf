"""Run configuration shared by the pipeline, the CLI and the tests."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field


@dataclass
class Config:
    """Hyper-parameters and switches for one alignment run.

    Defaults are the supervised desktop settings that work well on the
    published benchmark pairs; per-dataset overrides go through the CLI.
    """

    dim: int = 512                  # width of the random label vectors
    alpha: float = 0.6              # temporal share in the label fusion
    beta: float = 0.4               # time-signature share in the score fusion
    rounds: int = 2                 # propagation rounds per aspect
    topk: int = 500                 # candidates kept per source entity
    sinkhorn_iters: int = 15        # row+column normalization passes
    temperature: float = 0.05       # exponent scale before normalization
    threshold: float = 0.8          # acceptance bar for extracted pairs
    max_semi_iters: int = 5         # outer bootstrapping iterations
    mode: str = "sup"               # "sup" or "semi"
    direction: str = "one-way"      # "one-way" or "both"

    # ablation switches
    temporal_propagation: bool = True   # off: relational labels only
    time_constraints: bool = True       # off: skip time-signature fusion
    sinkhorn: bool = True               # off: rank raw fused scores

    # behavior options
    binarize_views: bool = False        # adjacency as 0/1 instead of counts
    dedup_point_events: bool = False    # single bag insertion when tb == te
    threshold_on_raw: bool = False      # acceptance bar on pre-Sinkhorn scores
    one_to_one: bool = True             # greedy de-conflicting of extractions

    rng_seed: int = 0
    threads: int = 0                    # 0: leave pool sizes alone

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.topk < 1:
            raise ValueError("topk must be >= 1")
        if self.sinkhorn_iters < 1:
            raise ValueError("sinkhorn_iters must be >= 1")
        if self.temperature <= 0.0:
            raise ValueError("temperature must be > 0")
        if not 0.0 < self.threshold <= 1.0:
            raise ValueError("threshold must be in (0, 1]")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must be in [0, 1]")
        if self.max_semi_iters < 1:
            raise ValueError("max_semi_iters must be >= 1")
        if self.mode not in ("sup", "semi"):
            raise ValueError("mode must be 'sup' or 'semi'")
        if self.direction not in ("one-way", "both"):
            raise ValueError("direction must be 'one-way' or 'both'")

    def to_dict(self) -> dict:
        return asdict(self)
