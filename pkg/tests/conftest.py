from __future__ import annotations

import numpy as np
import pytest

from tkgalign import Tkg, TkgPair


@pytest.fixture
def tiny_pair() -> TkgPair:
    """Two 4-entity graphs, hand-sized for worked-value checks."""
    quads1 = np.array([
        [0, 0, 1, 1, 2],
        [1, 1, 2, 2, 2],
        [2, 0, 3, 3, 0],
    ])
    quads2 = np.array([
        [0, 0, 1, 1, 2],
        [1, 1, 2, 2, 2],
        [2, 0, 3, 3, 0],
    ])
    return TkgPair(
        g1=Tkg(num_entities=4, num_relations=2, quads=quads1),
        g2=Tkg(num_entities=4, num_relations=2, quads=quads2),
        num_times=4,
        seeds=np.array([[0, 0]]),
        refs=np.array([[1, 1], [2, 2], [3, 3]]),
    )
