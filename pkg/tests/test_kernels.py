from __future__ import annotations

import importlib
import itertools
import os
import random

import pytest

from coverbound import _kernels_py, kernels

try:
    from coverbound import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled kernels not built")


def instance(v, k, t):
    blocks = list(itertools.combinations(range(v), k))
    tsets = list(itertools.combinations(range(v), t))
    idx = {ts: i for i, ts in enumerate(tsets)}
    block_tsets = [[idx[ts] for ts in itertools.combinations(b, t)] for b in blocks]
    tset_blocks = [[] for _ in tsets]
    for j, ids in enumerate(block_tsets):
        for i in ids:
            tset_blocks[i].append(j)
    return len(tsets), block_tsets, tset_blocks


CASES = [(6, 3, 2, 1, 5), (6, 3, 2, 1, 6), (7, 3, 2, 1, 7), (7, 4, 3, 1, 11), (7, 4, 3, 1, 12), (5, 3, 2, 2, 7), (8, 3, 2, 1, 10)]


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")
    if compiled is not None and not os.environ.get("COVERBOUND_PURE_PYTHON"):
        assert kernels.BACKEND == "cython"


def test_pure_python_forced(monkeypatch):
    monkeypatch.setenv("COVERBOUND_PURE_PYTHON", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("COVERBOUND_PURE_PYTHON")
        importlib.reload(kernels)


@pytest.mark.parametrize("v,k,t,lam,target", CASES)
def test_python_kernel_statuses(v, k, t, lam, target):
    n, bt, tb = instance(v, k, t)
    status, nodes, sol = _kernels_py.cover_search(n, bt, tb, lam, target, 10 ** 7)
    assert nodes >= 0
    if status == _kernels_py.FOUND:
        assert len(sol) <= target
        cov = [0] * n
        for b in sol:
            for ts in bt[b]:
                cov[ts] += 1
        assert min(cov) >= lam


@needs_compiled
@pytest.mark.parametrize("v,k,t,lam,target", CASES)
def test_backends_walk_identical_trees(v, k, t, lam, target):
    n, bt, tb = instance(v, k, t)
    for limit in (10 ** 7, 50):
        assert compiled.cover_search(n, bt, tb, lam, target, limit) == _kernels_py.cover_search(
            n, bt, tb, lam, target, limit
        )


@needs_compiled
def test_backends_agree_on_independent_sets():
    rng = random.Random(2)
    for _ in range(200):
        nv = rng.randint(0, 12)
        adj = [[0] * nv for _ in range(nv)]
        for i in range(nv):
            for j in range(i):
                if rng.random() < 0.4:
                    adj[i][j] = adj[j][i] = rng.randint(1, 3)
        n = rng.randint(1, 4)
        assert compiled.max_n_independent(adj, n) == _kernels_py.max_n_independent(adj, n)


@needs_compiled
def test_compiled_rejects_large_graph():
    with pytest.raises(ValueError):
        compiled.max_n_independent([[0] * 63 for _ in range(63)], 1)
