"""Synthetic graph pairs for tests: a random temporal graph and an exact
relabeled copy, so the true alignment is known by construction."""

from __future__ import annotations

import numpy as np

from tkgalign import Tkg, TkgPair


def make_random_quads(num_entities: int, num_relations: int, num_times: int,
                      num_quads: int, rng: np.random.Generator) -> np.ndarray:
    """Random quadruples; every entity appears, and each entity carries a
    distinct pair of timestamps so no two entities are structural twins."""
    rows = []
    for i in range(num_entities):
        # two coprime moduli keep the (tb, te) signature unique per entity
        tb = 1 + i % min(49, num_times - 1)
        te = 1 + i % min(47, num_times - 1) if num_times > 2 else tb
        rows.append((i, i % num_relations, (i + 1) % num_entities, tb, te))
    extra = num_quads - len(rows)
    for _ in range(max(extra, 0)):
        h = int(rng.integers(num_entities))
        t = int(rng.integers(num_entities))
        if h == t:
            t = (t + 1) % num_entities
        r = int(rng.integers(num_relations))
        tb = int(rng.integers(1, num_times))
        te = tb if rng.random() < 0.5 else int(rng.integers(0, num_times))
        rows.append((h, r, t, tb, te))
    return np.asarray(rows, dtype=np.int64)


def make_isomorphic_pair(num_entities: int = 500, num_relations: int = 20,
                         num_times: int = 50, num_quads: int = 3000,
                         seed_fraction: float = 0.1,
                         rng_seed: int = 7) -> tuple[TkgPair, np.ndarray]:
    """A pair of isomorphic graphs plus the full truth mapping.

    Graph 2 is graph 1 with entities and relations renamed by random
    permutations; timestamps are shared. A seed_fraction of the truth is
    exposed as seeds, the rest as references.
    """
    rng = np.random.default_rng(rng_seed)
    quads1 = make_random_quads(num_entities, num_relations, num_times,
                               num_quads, rng)
    ent_map = rng.permutation(num_entities)
    rel_map = rng.permutation(num_relations)
    quads2 = quads1.copy()
    quads2[:, 0] = ent_map[quads1[:, 0]]
    quads2[:, 2] = ent_map[quads1[:, 2]]
    quads2[:, 1] = rel_map[quads1[:, 1]]

    truth = np.stack([np.arange(num_entities), ent_map], axis=1)
    picks = rng.permutation(num_entities)
    num_seeds = max(1, int(round(seed_fraction * num_entities)))
    seeds = truth[np.sort(picks[:num_seeds])]
    refs = truth[np.sort(picks[num_seeds:])]

    pair = TkgPair(
        g1=Tkg(num_entities=num_entities, num_relations=num_relations,
               quads=quads1),
        g2=Tkg(num_entities=num_entities, num_relations=num_relations,
               quads=quads2),
        num_times=num_times,
        seeds=seeds,
        refs=refs,
    )
    return pair, truth
