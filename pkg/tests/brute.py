"""Independent brute-force covering number for very small parameters."""
from __future__ import annotations

import itertools


def brute_cover_number(v: int, k: int, t: int, lam: int = 1, cap: int = 12):
    pts = range(1, v + 1)
    blocks = [frozenset(b) for b in itertools.combinations(pts, k)]
    tsets = [frozenset(x) for x in itertools.combinations(pts, t)]
    for n in range(0, cap + 1):
        for choice in itertools.combinations_with_replacement(blocks, n):
            if all(sum(1 for b in choice if T <= b) >= lam for T in tsets):
                return n
    return None
