"""Ground truth for small parameters and checks of the matrix identities.

Points are labelled 1..v.  Incidence matrices are small numpy ``int64``
arrays (entries never exceed the block count); determinants and ranks are
computed on Python integers by fraction-free elimination.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .classic import Params, schonheim
from .exactmath import alt_binom_sum, binom, ceil_rat
from .spectral import SpectralContext

DEFAULT_BUDGET = 10 ** 7


# -- coverings -----------------------------------------------------------------

@dataclass(frozen=True)
class Covering:
    v: int
    blocks: Tuple[FrozenSet[int], ...]

    def __post_init__(self) -> None:
        for blk in self.blocks:
            if not all(1 <= x <= self.v for x in blk):
                raise ValueError(f"block {sorted(blk)} not inside 1..{self.v}")

    @classmethod
    def of(cls, v: int, blocks: Iterable[Iterable[int]]) -> "Covering":
        return cls(v, tuple(frozenset(b) for b in blocks))

    @property
    def points(self) -> range:
        return range(1, self.v + 1)

    def b(self, subset: Iterable[int]) -> int:
        """Number of blocks containing ``subset``."""
        xs = frozenset(subset)
        return sum(1 for blk in self.blocks if xs <= blk)

    def block_sizes(self) -> List[int]:
        return [len(b) for b in self.blocks]

    def to_json(self, k: int, t: int, lam: int) -> str:
        return json.dumps(
            {"v": self.v, "k": k, "t": t, "lambda": lam, "blocks": [sorted(b) for b in self.blocks]}
        )


def is_covering(c: Covering, t: int, lam: int = 1) -> bool:
    """True iff every t-subset of the points lies in at least ``lam`` blocks.

    Points with identical block membership are interchangeable, so only
    t-sets of distinct membership classes need checking: any t-subset can be
    grown to touch ``min(t, #classes)`` classes without gaining blocks.
    """
    if t == 0:
        return len(c.blocks) >= lam
    if t > c.v:
        return True
    masks: Dict[int, int] = {}
    for x in c.points:
        m = 0
        for j, blk in enumerate(c.blocks):
            if x in blk:
                m |= 1 << j
        masks[m] = masks.get(m, 0) + 1
    classes = list(masks)
    r = min(t, len(classes))
    for combo in itertools.combinations(classes, r):
        acc = combo[0]
        for m in combo[1:]:
            acc &= m
        if acc.bit_count() < lam:
            return False
    return True


def greedy_covering(v: int, k: int, t: int, lam: int = 1) -> List[FrozenSet[int]]:
    """Deterministic greedy covering: repeatedly take the block covering the most deficits."""
    tsets = list(itertools.combinations(range(1, v + 1), t))
    tindex = {ts: i for i, ts in enumerate(tsets)}
    need = [lam] * len(tsets)
    blocks = [frozenset(b) for b in itertools.combinations(range(1, v + 1), k)]
    contents = [[tindex[ts] for ts in itertools.combinations(sorted(b), t)] for b in blocks]
    chosen = []
    while any(need):
        best_j, best_gain = 0, -1
        for j, ts_ids in enumerate(contents):
            gain = sum(1 for i in ts_ids if need[i] > 0)
            if gain > best_gain:
                best_j, best_gain = j, gain
        chosen.append(blocks[best_j])
        for i in contents[best_j]:
            if need[i] > 0:
                need[i] -= 1
    return chosen


@dataclass
class CoverResult:
    value: Optional[int]
    witness: Optional[Covering]
    nodes: int


def search_tables(v: int, k: int, t: int):
    """All k-blocks, the t-set count and both incidence lists, as the kernel takes them."""
    blocks = list(itertools.combinations(range(1, v + 1), k))
    tsets = list(itertools.combinations(range(1, v + 1), t))
    tindex = {ts: i for i, ts in enumerate(tsets)}
    block_tsets = [[tindex[ts] for ts in itertools.combinations(b, t)] for b in blocks]
    tset_blocks: List[List[int]] = [[] for _ in tsets]
    for j, ids in enumerate(block_tsets):
        for i in ids:
            tset_blocks[i].append(j)
    return blocks, len(tsets), block_tsets, tset_blocks


def exact_cover(v: int, k: int, t: int, lam: int = 1, budget: int = DEFAULT_BUDGET) -> CoverResult:
    """Exact C_lam(v, k, t) by iterative-deepening branch and bound.

    Block counts are tried upward from the Schönheim bound, so the first
    feasible count is optimal.  ``value`` is None when the node budget runs
    out (or the instance is too large to enumerate within it).
    """
    p = Params(v, k, t, lam)
    if t == 0 or k == v:
        return CoverResult(lam, Covering.of(v, [range(1, v + 1)] * lam), 0)
    if binom(v, k) * binom(k, t) + binom(v, t) * binom(v - t, k - t) > budget:
        return CoverResult(None, None, 0)
    blocks, n_tsets, block_tsets, tset_blocks = search_tables(v, k, t)
    upper = greedy_covering(v, k, t, lam)
    lower = schonheim(p)
    nodes_left = budget
    used = 0
    for target in range(lower, len(upper)):
        status, nodes, sol = kernels.cover_search(
            n_tsets, block_tsets, tset_blocks, lam, target, nodes_left
        )
        used += nodes
        nodes_left -= nodes
        if status == kernels.FOUND:
            return CoverResult(len(sol), Covering.of(v, [blocks[j] for j in sol]), used)
        if status == kernels.BUDGET:
            return CoverResult(None, None, used)
    return CoverResult(len(upper), Covering.of(v, upper), used)


def exact_cover_number(v: int, k: int, t: int, lam: int = 1, budget: int = DEFAULT_BUDGET) -> Optional[int]:
    return exact_cover(v, k, t, lam, budget).value


# -- integer matrices ------------------------------------------------------------

@dataclass
class IntMatrix:
    rows: List
    cols: List
    data: np.ndarray

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(self.rows, other.cols, self.data @ other.data)

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, self.data.T.copy())

    def principal(self, labels: Sequence) -> "IntMatrix":
        pos = {r: i for i, r in enumerate(self.rows)}
        idx = [pos[x] for x in labels]
        return IntMatrix(list(labels), list(labels), self.data[np.ix_(idx, idx)])

    def tolist(self) -> List[List[int]]:
        return [[int(x) for x in row] for row in self.data]


def subsets(v: int, s: int) -> List[FrozenSet[int]]:
    return [frozenset(c) for c in itertools.combinations(range(1, v + 1), s)]


def incidence(row_sets: Sequence[FrozenSet[int]], col_sets: Sequence[FrozenSet[int]]) -> IntMatrix:
    data = np.array([[1 if x <= y else 0 for y in col_sets] for x in row_sets], dtype=np.int64)
    data = data.reshape(len(row_sets), len(col_sets))
    return IntMatrix(list(row_sets), list(col_sets), data)


def s_incidence(c: Covering, s: int) -> IntMatrix:
    """Rows: s-subsets of the points; columns: blocks; entry 1 iff row set is inside the block."""
    return incidence(subsets(c.v, s), list(c.blocks))


def gram_check(c: Covering, s: int) -> bool:
    A = s_incidence(c, s)
    G = A @ A.T
    for i, X in enumerate(A.rows):
        for j, Y in enumerate(A.rows):
            if G.data[i, j] != c.b(X | Y):
                return False
    return bool((G.data == G.data.T).all())


def bareiss_minors(m: Sequence[Sequence[int]]) -> List[int]:
    """Leading principal minors via fraction-free elimination without pivoting.

    Stops early (returning the minors found so far plus a 0) when a minor
    vanishes, since elimination cannot continue without a pivot.
    """
    a = [[int(x) for x in row] for row in m]
    n = len(a)
    minors = []
    prev = 1
    for k in range(n):
        piv = a[k][k]
        minors.append(piv)
        if piv == 0:
            break
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * piv - a[i][k] * a[k][j]) // prev
        prev = piv
    return minors


def determinant(m: Sequence[Sequence[int]]) -> int:
    """Exact determinant by Bareiss elimination with row pivoting."""
    a = [[int(x) for x in row] for row in m]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


def exact_rank(m: Sequence[Sequence[int]]) -> int:
    a = [[int(x) for x in row] for row in m]
    if not a:
        return 0
    nrows, ncols = len(a), len(a[0])
    rank, prev = 0, 1
    for col in range(ncols):
        piv = next((i for i in range(rank, nrows) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][col]
        for i in range(rank + 1, nrows):
            for j in range(col + 1, ncols):
                a[i][j] = (a[i][j] * p - a[i][col] * a[rank][j]) // prev
            a[i][col] = 0
        prev = p
        rank += 1
        if rank == nrows:
            break
    return rank


def pd_check(m) -> bool:
    """Sylvester's criterion with exact integer minors."""
    rows = m.tolist() if isinstance(m, IntMatrix) else [list(r) for r in m]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("matrix must be square")
    if any(rows[i][j] != rows[j][i] for i in range(n) for j in range(i)):
        raise ValueError("matrix must be symmetric")
    minors = bareiss_minors(rows)
    return len(minors) == n and all(x > 0 for x in minors)


# -- decomposition of A A^T -----------------------------------------------------------

@dataclass
class Report:
    ok: bool = True
    checks: int = 0
    failure: Optional[str] = None

    def fail(self, msg: str) -> "Report":
        if self.ok:
            self.ok, self.failure = False, msg
        return self

    def count(self, n: int = 1) -> None:
        self.checks += n


def _decomposition_parts(c: Covering, ctx: SpectralContext):
    s = ctx.s
    A = s_incidence(c, s)
    G = (A @ A.T).data
    labels = A.rows
    n = len(labels)
    P = np.zeros((n, n), dtype=np.int64)
    M = np.zeros((n, n), dtype=np.int64)
    for i, X in enumerate(labels):
        for j, Y in enumerate(labels):
            if i == j:
                P[i, j] = ctx.b_s - ctx.a_s
                M[i, j] = ctx.a_s + c.b(X) - ctx.b_s
            else:
                bu = ctx.b[len(X | Y)]
                P[i, j] = bu
                M[i, j] = c.b(X | Y) - bu
    return A, G, P, M


def decomposition_check(c: Covering, ctx: SpectralContext) -> Report:
    """Entrywise verification of the P + M split of A A^T.

    Checks (1) A A^T = P + M with M >= 0 off the diagonal, (2)
    sum_j a_j Q_j^T Q_j = P + a_s I, (3) (Q_j^T Q_j)[X, Y] = C(|X & Y|, j)
    and (4) off-diagonal row sums of M equal (b(X) - b_s)(C(k,s) - 1) + d.
    """
    p = ctx.params
    rep = Report()
    sizes = set(c.block_sizes())
    if c.v != p.v or sizes != {p.k} or not is_covering(c, p.t, p.lam):
        raise ValueError("context/covering mismatch")
    s = ctx.s
    A, G, P, M = _decomposition_parts(c, ctx)
    labels = A.rows
    n = len(labels)
    rep.count()
    if not (G == P + M).all():
        return rep.fail("A A^T != P + M")
    off = M.copy()
    np.fill_diagonal(off, 0)
    rep.count()
    if (off < 0).any():
        return rep.fail("b(X u Y) < b_|X u Y| for some pair")

    total = np.zeros((n, n), dtype=np.int64)
    for j in range(s + 1):
        Qj = incidence(subsets(p.v, j), labels)
        QtQ = (Qj.T @ Qj).data
        for x in range(n):
            for y in range(n):
                rep.count()
                if QtQ[x, y] != binom(len(labels[x] & labels[y]), j):
                    return rep.fail(f"(Q_{j}^T Q_{j})[{sorted(labels[x])},{sorted(labels[y])}] != C(|X&Y|,{j})")
        total += ctx.a[j] * QtQ
    rep.count()
    if not (total == P + ctx.a_s * np.eye(n, dtype=np.int64)).all():
        return rep.fail("sum_j a_j Q_j^T Q_j != P + a_s I")

    bks = binom(p.k, s)
    for x, X in enumerate(labels):
        rep.count()
        row = int(off[x].sum())
        want = (c.b(X) - ctx.b_s) * (bks - 1) + ctx.d
        if row != want:
            return rep.fail(f"row sum at {sorted(X)} is {row}, expected {want}")
    return rep


def v0_gram_submatrix(c: Covering, ctx: SpectralContext) -> IntMatrix:
    """Principal submatrix of A A^T on the s-sets X with b(X) = b_s."""
    A = s_incidence(c, ctx.s)
    G = A @ A.T
    v0 = [X for X in A.rows if c.b(X) == ctx.b_s]
    return G.principal(v0)


# -- Caro–Tuza -------------------------------------------------------------------

@dataclass
class Multigraph:
    n_vertices: int
    mu: List[List[int]]

    def __post_init__(self) -> None:
        for i in range(self.n_vertices):
            if self.mu[i][i] != 0:
                raise ValueError("loops are not allowed")
            for j in range(i):
                if self.mu[i][j] != self.mu[j][i] or self.mu[i][j] < 0:
                    raise ValueError("multiplicities must be symmetric and nonnegative")

    @classmethod
    def edgeless(cls, n: int) -> "Multigraph":
        return cls(n, [[0] * n for _ in range(n)])

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int, int]]) -> "Multigraph":
        mu = [[0] * n for _ in range(n)]
        for x, y, m in edges:
            mu[x][y] += m
            mu[y][x] += m
        return cls(n, mu)

    @classmethod
    def random(cls, rng: random.Random, max_vertices: int = 9, max_mult: int = 3) -> "Multigraph":
        n = rng.randint(1, max_vertices)
        density = rng.random()
        mu = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i):
                if rng.random() < density:
                    mu[i][j] = mu[j][i] = rng.randint(1, max_mult)
        return cls(n, mu)

    def degree(self, u: int) -> int:
        return sum(self.mu[u])


def caro_tuza_f(n: int, x: int) -> Fraction:
    if x <= n:
        return 1 - Fraction(x, 2 * n)
    return Fraction(n + 1, 2 * (x + 1))


@dataclass
class CaroTuzaReport:
    max_size: int
    bound: int
    witness: Tuple[int, ...]

    @property
    def ok(self) -> bool:
        return self.max_size >= self.bound


def max_n_independent_brute(g: Multigraph, n: int) -> int:
    """Plain subset enumeration; an independent cross-check of the kernel."""
    best = 0
    vs = range(g.n_vertices)
    for mask in range(1 << g.n_vertices):
        S = [u for u in vs if mask >> u & 1]
        if len(S) <= best:
            continue
        if all(sum(g.mu[u][w] for w in S) < n for u in S):
            best = len(S)
    return best


def caro_tuza_check(g: Multigraph, n: int, max_vertices: int = 10) -> CaroTuzaReport:
    if g.n_vertices > max_vertices:
        raise ValueError(f"budget exceeded: {g.n_vertices} > {max_vertices} vertices")
    size, mask = kernels.max_n_independent(g.mu, n)
    bound = ceil_rat(sum((caro_tuza_f(n, g.degree(u)) for u in range(g.n_vertices)), Fraction(0)))
    witness = tuple(u for u in range(g.n_vertices) if mask >> u & 1)
    return CaroTuzaReport(size, bound, witness)


# -- random coverings and the identity suite ------------------------------------------

def random_covering(rng: random.Random, v: int, k: int, t: int, lam: int = 1) -> Covering:
    """Seeded covering: all k-subsets, or random k-subsets repaired greedily."""
    if rng.random() < 0.15:
        return Covering.of(v, itertools.combinations(range(1, v + 1), k))
    pts = list(range(1, v + 1))
    n0 = rng.randint(0, max(1, schonheim(Params(v, k, t, lam))))
    blocks = [frozenset(rng.sample(pts, k)) for _ in range(n0)]
    for T in itertools.combinations(pts, t):
        Ts = frozenset(T)
        have = sum(1 for b in blocks if Ts <= b)
        while have < lam:
            rest = [x for x in pts if x not in Ts]
            blocks.append(Ts | frozenset(rng.sample(rest, k - t)))
            have += 1
    return Covering(v, tuple(blocks))


@dataclass
class SuiteReport:
    seed: int
    results: Dict[str, List[int]] = field(default_factory=dict)  # name -> [passed, total]
    failures: List[str] = field(default_factory=list)

    def record(self, name: str, ok: bool, detail: str = "") -> None:
        slot = self.results.setdefault(name, [0, 0])
        slot[1] += 1
        if ok:
            slot[0] += 1
        else:
            self.failures.append(f"{name}: {detail}")

    @property
    def ok(self) -> bool:
        return not self.failures

    def lines(self) -> List[str]:
        return [
            f"{'PASS' if p == n else 'FAIL'} {name}: {p}/{n}"
            for name, (p, n) in self.results.items()
        ]


def random_suite_params(rng: random.Random) -> Tuple[Params, int]:
    while True:
        v = rng.randint(4, 10)
        k = rng.randint(3, min(5, v - 1))
        t = rng.randint(2, min(4, k - 1))
        s = rng.randint(1, min(2, t // 2))
        lam = rng.choice([1, 1, 2])
        return Params(v, k, t, lam), s


def verify_suite(seed: int = 1, n_coverings: int = 100, n_graphs: int = 200) -> SuiteReport:
    """Run every identity check on seeded random instances."""
    from .pipeline import BoundStore, best_bound
    from .spectral import build_context

    rng = random.Random(seed)
    rep = SuiteReport(seed)
    store = BoundStore()
    provider = lambda q: q.lam if q.t == 0 else best_bound(q, store).value  # noqa: E731

    for ell in range(13):
        for i in range(ell + 1):
            want = 1 if i == ell else 0
            rep.record("multinomial", alt_binom_sum(i, ell) == want, f"i={i}, ell={ell}")

    for _ in range(n_coverings):
        p, s = random_suite_params(rng)
        c = random_covering(rng, p.v, p.k, p.t, p.lam)
        tag = f"{p} s={s} |B|={len(c.blocks)}"
        rep.record("covering", is_covering(c, p.t, p.lam), tag)
        rep.record("gram", gram_check(c, s), tag)
        A = s_incidence(c, s)
        rank = exact_rank((A @ A.T).tolist())
        rep.record("rank", len(c.blocks) >= rank, tag)
        ctx = build_context(p, s, provider)
        d = decomposition_check(c, ctx)
        rep.record("decomposition", d.ok, f"{tag}: {d.failure}")
        if ctx.hypotheses_hold and ctx.d < ctx.a_s:
            rep.record("pd_v0", pd_check(v0_gram_submatrix(c, ctx)), tag)

    for _ in range(n_graphs):
        g = Multigraph.random(rng)
        for n in range(1, 5):
            r = caro_tuza_check(g, n)
            rep.record("caro_tuza", r.ok, f"n={n} size={r.max_size} bound={r.bound}")
    return rep
