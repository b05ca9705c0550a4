"""Closed-form parameter families.

Two families are covered here.

* ``inffam``: v = m^2(m-2)+4, k = m(m-1)+2, t = 5, where the s = 2 spectral
  bound with Schönheim inputs beats the Schönheim bound by m(m-4)-10.
* The affine family: hyperplanes of AG(t, q) blown up by a factor m give
  coverings with q(q^t-1)/(q-1) blocks, which the s = 1 spectral bound
  shows to be optimal for v in a window below m q^t.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .classic import Params, schonheim, schonheim_chain
from .oracle import Covering, is_covering
from .spectral import context_from_b, theorem_main


class FamilyError(ValueError):
    pass


# -- the t = 5 family --------------------------------------------------------------

@dataclass(frozen=True)
class InfFamParams:
    m: int

    def __post_init__(self) -> None:
        if self.m < 6:
            raise FamilyError("out of family range")

    @property
    def v(self) -> int:
        return self.m * self.m * (self.m - 2) + 4

    @property
    def k(self) -> int:
        return self.m * (self.m - 1) + 2

    @property
    def params(self) -> Params:
        return Params(self.v, self.k, 5, 1)


@dataclass(frozen=True)
class InfFamResult:
    m: int
    params: Params
    ell: Dict[int, int]
    a: Tuple[int, ...]
    d: int
    theorem_bound: int
    L: int
    promised: int

    @property
    def passed(self) -> bool:
        return self.theorem_bound >= self.promised

    @property
    def gain(self) -> int:
        return self.theorem_bound - self.L


def inffam_check(m: int) -> InfFamResult:
    fam = InfFamParams(m)
    p = fam.params
    chain = schonheim_chain(p)
    ell = {i: chain[i] for i in (2, 3, 4)}
    ctx = context_from_b(p, 2, ell)
    bound = theorem_main(ctx)
    if bound is None:
        raise FamilyError(f"spectral bound inapplicable at m={m}")
    L = chain[0]
    return InfFamResult(m, p, ell, ctx.a, ctx.d, bound, L, L + m * (m - 4) - 10)


# -- finite fields and affine hyperplanes -------------------------------------------------

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


@dataclass(frozen=True)
class FiniteField:
    """Field on 0..q-1 with 0 and 1 the identities, given by full tables."""

    q: int
    mul: Tuple[Tuple[int, ...], ...]
    add: Tuple[Tuple[int, ...], ...]

    @classmethod
    def prime(cls, p: int) -> "FiniteField":
        if not is_prime(p):
            raise FamilyError("field unavailable")
        rng = range(p)
        return cls(
            p,
            tuple(tuple(a * b % p for b in rng) for a in rng),
            tuple(tuple((a + b) % p for b in rng) for a in rng),
        )

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "FiniteField":
        """Read ``q`` followed by the q x q multiplication and addition tables."""
        nums = [int(x) for x in Path(path).read_text().split()]
        if not nums:
            raise FamilyError("empty field table")
        q = nums[0]
        if len(nums) != 1 + 2 * q * q:
            raise FamilyError(f"field table for q={q} needs {2 * q * q} entries, got {len(nums) - 1}")
        body = nums[1:]
        mul = tuple(tuple(body[r * q:(r + 1) * q]) for r in range(q))
        add = tuple(tuple(body[q * q + r * q:q * q + (r + 1) * q]) for r in range(q))
        f = cls(q, mul, add)
        f.validate()
        return f

    def validate(self) -> None:
        q = self.q
        rng = range(q)
        if any(not 0 <= x < q for row in self.mul + self.add for x in row):
            raise FamilyError("field table entry out of range")
        if any(self.add[0][x] != x or self.mul[1][x] != x for x in rng):
            raise FamilyError("field table: 0 and 1 must be the identities")
        for a in rng:
            if sorted(self.add[a]) != list(rng):
                raise FamilyError("field table: addition is not a group")
            if a and sorted(self.mul[a][1:]) != list(range(1, q)):
                raise FamilyError("field table: multiplication is not a group")
            for b in rng:
                if self.add[a][b] != self.add[b][a] or self.mul[a][b] != self.mul[b][a]:
                    raise FamilyError("field table is not commutative")

    def dot(self, a: Sequence[int], x: Sequence[int]) -> int:
        acc = 0
        for ai, xi in zip(a, x):
            acc = self.add[acc][self.mul[ai][xi]]
        return acc


def field_for(q: int, field: Optional[FiniteField] = None) -> FiniteField:
    if field is not None:
        if field.q != q:
            raise FamilyError(f"field table is for q={field.q}, not {q}")
        return field
    return FiniteField.prime(q)


def _vectors(q: int, t: int) -> List[Tuple[int, ...]]:
    out: List[Tuple[int, ...]] = [()]
    for _ in range(t):
        out = [v + (x,) for v in out for x in range(q)]
    return out


def affine_flats(q: int, t: int, field: Optional[FiniteField] = None) -> Covering:
    """All hyperplanes of AG(t, q) as a t-(q^t, q^(t-1), 1) covering.

    Point ``x`` (a vector read as base-q digits, most significant first)
    gets label ``1 + index``.  Normals are the vectors whose first nonzero
    coordinate is 1.
    """
    if t < 1:
        raise FamilyError("t must be positive")
    f = field_for(q, field)
    points = _vectors(q, t)
    normals = [a for a in points if any(a) and a[next(i for i, x in enumerate(a) if x)] == 1]
    blocks = []
    for a in normals:
        by_value: Dict[int, List[int]] = {c: [] for c in range(q)}
        for idx, x in enumerate(points):
            by_value[f.dot(a, x)].append(idx + 1)
        blocks.extend(frozenset(by_value[c]) for c in range(q))
    return Covering(q ** t, tuple(blocks))


def affine_block_count(q: int, t: int) -> int:
    return q * (q ** t - 1) // (q - 1)


def blowup(q: int, t: int, m: int, v: int, field: Optional[FiniteField] = None) -> Covering:
    """Replace each point of the affine covering by m copies, then keep points 1..v.

    Copy j of point u becomes label u*m + j + 1, so the deleted points are
    the copies of the last affine points.
    """
    if m < 1 or not 1 <= v <= m * q ** t:
        raise FamilyError("out of range")
    base = affine_flats(q, t, field)
    blocks = []
    for blk in base.blocks:
        grown = frozenset(
            (u - 1) * m + j + 1 for u in blk for j in range(m) if (u - 1) * m + j + 1 <= v
        )
        blocks.append(grown)
    return Covering(v, tuple(blocks))


# -- the exact-value window ------------------------------------------------------------

def _check_window(q: int, t: int, m: int) -> bool:
    return q >= 2 and m >= 2 * q + 2 and 2 <= t < m * q ** (t - 1)


@dataclass(frozen=True)
class AffineFamilyParams:
    """Blow-up factor m of AG(t, q); k = mq^(t-1) and the window ends at v = mq^t."""

    q: int
    m: int
    t: int

    def __post_init__(self) -> None:
        if not _check_window(self.q, self.t, self.m):
            raise FamilyError("family inapplicable")

    @property
    def k(self) -> int:
        return self.m * self.q ** (self.t - 1)

    @property
    def v_max(self) -> int:
        return self.m * self.q ** self.t

    @property
    def z(self) -> int:
        q, m, t = self.q, self.m, self.t
        return min(q - 2, m * (q - 1) * q ** (t - 1) // (q ** t - 1) - 2 * q + 1)

    @property
    def v_min(self) -> int:
        return self.v_max - self.q + 1 - self.z

    def offset(self, v: int) -> int:
        """c with v = mq^t - q + 1 + c."""
        return v - (self.v_max - self.q + 1)


def exactlem2_ell(v: int, m: int, q: int, t: int, i: int) -> int:
    """Closed form of L(v-i, mq^(t-1)-i, t-i) near v = mq^t.

    The geometric-sum form holds for 2 <= i <= t (i = t gives 1, needed as
    b_2 when t = 2); i = 1 and i = 0 split on whether v is above mq^t - q + 1.
    """
    top = m * q ** t
    if not (_check_window(q, t, m) and top - 2 * q + 3 <= v <= top and 0 <= i <= t):
        raise FamilyError("closed form out of range")
    high = v >= top - q + 2
    if i >= 2:
        return (q ** (t - i + 1) - 1) // (q - 1)
    if i == 1:
        return (q ** t - 1) // (q - 1) if high else q * (q ** (t - 1) - 1) // (q - 1)
    return q * (q ** t - 1) // (q - 1) if high else q * q * (q ** (t - 1) - 1) // (q - 1)


@dataclass(frozen=True)
class ExactFamilyResult:
    m: int
    q: int
    t: int
    z: int
    v_min: int
    v_max: int
    exact_value: int
    lower_bound: int
    witness_blocks: int
    witness_ok: bool

    @property
    def certified(self) -> bool:
        return (
            self.lower_bound >= self.exact_value
            and self.witness_ok
            and self.witness_blocks == self.exact_value
        )


def exactth2_z(m: int, q: int, t: int) -> int:
    return AffineFamilyParams(q, m, t).z


def exactth2(m: int, q: int, t: int, field: Optional[FiniteField] = None, witness: bool = True) -> ExactFamilyResult:
    """Certify C(v, mq^(t-1), t) = q(q^t-1)/(q-1) on [v_min, mq^t].

    The lower bound is the s = 1 spectral bound at v_min with b_1, b_2 the
    closed-form Schönheim values; the upper bound is the blown-up affine
    covering on v_min points, checked by :func:`is_covering`.
    """
    fam = AffineFamilyParams(q, m, t)
    f = field_for(q, field)
    z, v_min, top = fam.z, fam.v_min, fam.v_max
    exact = affine_block_count(q, t)
    p = Params(v_min, fam.k, t, 1)
    b = {i: exactlem2_ell(v_min, m, q, t, i) for i in (1, 2)}
    lower = theorem_main(context_from_b(p, 1, b))
    if lower is None:
        raise FamilyError("spectral bound inapplicable")
    n_blocks, ok = exact, False
    if witness:
        cov = blowup(q, t, m, v_min, f)
        n_blocks = len(cov.blocks)
        ok = all(len(blk) <= p.k for blk in cov.blocks) and is_covering(cov, t)
    return ExactFamilyResult(m, q, t, z, v_min, top, exact, lower, n_blocks, ok)


def schonheim_direct(v: int, m: int, q: int, t: int, i: int) -> int:
    """L(v-i, mq^(t-1)-i, t-i) by direct iteration."""
    return schonheim(Params(v - i, m * q ** (t - 1) - i, t - i, 1))
