"""Shared independent oracles for the test suite.

These deliberately avoid the library's own code paths: the recursive scan
enumerator checks the vectorized subset scan, and the model-law evaluator
checks the samplers' target distributions.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np
import pytest


def recursive_scan_max(g, K: int):
    """Independent densest-K oracle: plain DFS over vertex choices."""
    adj = g.adjacency()
    n = g.num_vertices
    best_value = -1
    best_set = None

    def rec(start, chosen, count):
        nonlocal best_value, best_set
        if len(chosen) == K:
            if count > best_value:
                best_value, best_set = count, tuple(chosen)
            return
        for v in range(start, n - (K - len(chosen)) + 1):
            gained = sum(1 for u in chosen if v in adj[u])
            chosen.append(v)
            rec(v + 1, chosen, count + gained)
            chosen.pop()

    if K == 0:
        return 0, ()
    rec(0, [], 0)
    return best_value, best_set


def graph_law_tv(law_by_mask: np.ndarray, other: np.ndarray) -> float:
    return 0.5 * float(np.abs(law_by_mask - other).sum())


def all_pair_masks(n: int):
    pairs = list(combinations(range(n), 2))
    return pairs, np.arange(1 << len(pairs), dtype=np.int64)


@pytest.fixture
def tmp_graph_file(tmp_path):
    def write(text: str, name: str = "g.txt"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write
