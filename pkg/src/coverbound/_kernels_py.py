"""Pure-Python search kernels.

Reference implementation of the routines in ``_kernels.pyx``; both
backends must explore the same search tree and report identical node
counts.
"""
from __future__ import annotations

import sys
from typing import List, Sequence, Tuple

FOUND, INFEASIBLE, BUDGET = 1, 0, -1


def cover_search(
    n_tsets: int,
    block_tsets: Sequence[Sequence[int]],
    tset_blocks: Sequence[Sequence[int]],
    lam: int,
    max_blocks: int,
    node_limit: int,
    fix_first: bool = True,
) -> Tuple[int, int, List[int]]:
    """Look for a block multiset of size <= max_blocks covering every t-set lam times.

    Branches on the lowest-index least-covered t-set; sibling branches
    forbid the blocks already tried at that node, which keeps the search
    complete for multisets.  With ``fix_first`` the root only tries block 0
    (valid when the point set is fully symmetric and block 0 contains
    t-set 0).

    Returns ``(status, nodes, solution)`` with status FOUND, INFEASIBLE or
    BUDGET.
    """
    per_block = len(block_tsets[0]) if block_tsets else 0
    cov = [0] * n_tsets
    forb = [0] * len(block_tsets)
    sol: List[int] = []
    state = {"deficit": lam * n_tsets, "nodes": 0}
    sys.setrecursionlimit(max(sys.getrecursionlimit(), max_blocks + 100))

    def add(b: int) -> None:
        for ts in block_tsets[b]:
            if cov[ts] < lam:
                state["deficit"] -= 1
            cov[ts] += 1

    def remove(b: int) -> None:
        for ts in block_tsets[b]:
            cov[ts] -= 1
            if cov[ts] < lam:
                state["deficit"] += 1

    def rec(depth: int) -> int:
        deficit = state["deficit"]
        if deficit == 0:
            return FOUND
        remaining = max_blocks - depth
        if remaining * per_block < deficit:
            return INFEASIBLE
        state["nodes"] += 1
        if state["nodes"] > node_limit:
            return BUDGET
        best, low = -1, lam
        for i in range(n_tsets):
            if cov[i] < low:
                low, best = cov[i], i
                if low == 0:
                    break
        if lam - low > remaining:
            return INFEASIBLE
        tried = []
        result = INFEASIBLE
        for b in tset_blocks[best]:
            if forb[b]:
                continue
            add(b)
            sol.append(b)
            r = rec(depth + 1)
            if r == FOUND:
                return FOUND
            sol.pop()
            remove(b)
            if r == BUDGET:
                result = BUDGET
                break
            forb[b] += 1
            tried.append(b)
            if depth == 0 and fix_first:
                break
        for b in tried:
            forb[b] -= 1
        return result

    status = rec(0)
    return status, state["nodes"], (list(sol) if status == FOUND else [])


def max_n_independent(adj: Sequence[Sequence[int]], n: int) -> Tuple[int, int]:
    """Largest S with sum_{w in S} adj[u][w] < n for every u in S.

    The property is hereditary, so a depth-first walk over increasing
    vertex indices that stops at the first violation visits only valid
    sets.  Returns ``(size, mask)``.
    """
    nv = len(adj)
    deg = [0] * nv
    best = [0, 0]

    def rec(start: int, size: int, mask: int) -> None:
        if size > best[0]:
            best[0], best[1] = size, mask
        if size + (nv - start) <= best[0]:
            return
        for u in range(start, nv):
            row = adj[u]
            # deg[u] is u's degree into the current set
            if deg[u] >= n:
                continue
            ok = True
            for w in range(nv):
                if mask >> w & 1 and deg[w] + row[w] >= n:
                    ok = False
                    break
            if not ok:
                continue
            for w in range(nv):
                deg[w] += row[w]
            rec(u + 1, size + 1, mask | (1 << u))
            for w in range(nv):
                deg[w] -= row[w]

    rec(0, 0, 0)
    return best[0], best[1]
