"""Classical covering-number lower bounds.

Covers the conventions for ``t = 0`` and ``t = 1``, the Schönheim bound,
its one-step recursion and the Mills–Mullin refinement.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterator, Optional, Tuple, Union

from .exactmath import binom, ceil_div


class ParamsError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Params:
    """A parameter set (v, k, t, lambda) for C_lambda(v, k, t).

    ``t = 0`` is allowed so the chain recursion can bottom out at the
    ``C_lambda(v, k, 0) = lambda`` convention.
    """

    v: int
    k: int
    t: int
    lam: int = 1

    def __post_init__(self) -> None:
        if self.t < 0 or self.lam < 1:
            raise ParamsError(f"invalid parameters {self.astuple()}")
        if not (self.t <= self.k <= self.v):
            raise ParamsError(f"need t <= k <= v, got {self.astuple()}")
        if self.k < 1 and self.t > 0:
            raise ParamsError(f"invalid parameters {self.astuple()}")

    def astuple(self) -> Tuple[int, int, int, int]:
        return (self.v, self.k, self.t, self.lam)

    def derived(self, i: int) -> "Params":
        """The parameter set (v-i, k-i, t-i, lambda)."""
        return Params(self.v - i, self.k - i, self.t - i, self.lam)

    def chain(self) -> Iterator["Params"]:
        """Diagonal chain from t = 1 up to this key (inclusive)."""
        for i in range(self.t - 1, -1, -1):
            yield self.derived(i)

    def __str__(self) -> str:
        return f"({self.v},{self.k},{self.t},{self.lam})"


def base_bound(p: Params) -> Optional[int]:
    if p.t == 0:
        return p.lam
    if p.t == 1:
        return ceil_div(p.lam * p.v, p.k)
    return None


def schonheim_step(v: int, k: int, sub_bound: int) -> int:
    """ceil((v/k) * sub_bound), one application of the derived-structure bound."""
    if k < 1 or v < k:
        raise ParamsError(f"need 1 <= k <= v, got v={v}, k={k}")
    return ceil_div(v * sub_bound, k)


def schonheim_chain(p: Params) -> Dict[int, int]:
    """Map i -> L_lambda(v-i, k-i, t-i) for i = t, t-1, ..., 0."""
    values = {p.t: p.lam}
    cur = p.lam
    for i in range(p.t - 1, -1, -1):
        cur = ceil_div((p.v - i) * cur, p.k - i)
        values[i] = cur
    return values


def schonheim(p: Params) -> int:
    """The Schönheim bound L_lambda(v, k, t), evaluated innermost first."""
    return schonheim_chain(p)[0]


def mills_mullin_special(p: Params, schonheim_value: int) -> Optional[int]:
    """The r = t = 2 case of Mills–Mullin.

    The congruence ``lambda v (v-1) = 1 (mod k)`` is equivalent to the
    original ``lambda v (v-1)/(k-1) = -1 (mod k)`` once
    ``lambda (v-1) = 0 (mod k-1)`` holds, because ``k - 1 = -1 (mod k)``.
    """
    if p.t != 2 or p.k < 2:
        return None
    if (p.lam * (p.v - 1)) % (p.k - 1) != 0:
        return None
    if (p.lam * p.v * (p.v - 1)) % p.k != 1:
        return None
    return schonheim_value + 1


ExactKey = Tuple[int, int, int, int]


@dataclass
class ExactValueTable:
    """Known exact covering numbers, treated as trusted input."""

    values: Dict[ExactKey, Tuple[int, str]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.values)

    def add(self, p: Params, value: int, source: str = "") -> None:
        self.values[p.astuple()] = (value, source)

    def get(self, p: Params) -> Optional[int]:
        if p.t == 0:
            return p.lam
        hit = self.values.get(p.astuple())
        return None if hit is None else hit[0]

    def fingerprint_items(self):
        return sorted((k, v[0]) for k, v in self.values.items())

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "ExactValueTable":
        table = cls()
        for p, value, source in read_bound_csv(path):
            table.add(p, value, source)
        return table


def mills_mullin_general(p: Params, r: int, exact: ExactValueTable) -> Optional[int]:
    """Mills–Mullin with general r, gated on exact sub-values.

    Both side conditions reference true covering numbers, so the rule only
    fires when ``exact`` supplies C(v-1, k-1, t-1) and C(v-r, k-r, t-r).

    The value is ceil((v*C + r)/k): once the point-degree excess is nonzero
    it is at least r.  For r = t = 2 this reduces to L + 1 exactly when
    v*C = -1 (mod k), matching :func:`mills_mullin_special`.  The stronger
    reading ceil(v*(C + r)/k) is not sound (it exceeds C_2(5,3,2) = 8).
    """
    if not (2 <= r <= p.t):
        raise ValueError(f"need 2 <= r <= t, got r={r}, t={p.t}")
    c1 = exact.get(p.derived(1))
    if c1 is None:
        return None
    if (p.v * c1) % p.k == 0:
        return None
    cr = exact.get(p.derived(r))
    if cr is None:
        return None
    ratio = Fraction(binom(p.v - 1, r - 1), binom(p.k - 1, r - 1))
    if c1 != ratio * cr:
        return None
    return ceil_div(p.v * c1 + r, p.k)


class BoundFileError(ValueError):
    pass


CSV_HEADER = ["v", "k", "t", "lambda", "value", "source"]


def read_bound_csv(path: Union[str, Path]) -> Iterator[Tuple[Params, int, str]]:
    """Parse a ``v,k,t,lambda,value,source`` file.

    Row numbers in error messages count the header as row 1.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return
        if [h.strip() for h in header] != CSV_HEADER:
            raise BoundFileError("malformed row 1")
        for rowno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(CSV_HEADER):
                raise BoundFileError(f"malformed row {rowno}")
            try:
                v, k, t, lam, value = (int(c) for c in row[:5])
            except ValueError:
                raise BoundFileError(f"malformed row {rowno}") from None
            if value < 0:
                raise BoundFileError(f"malformed row {rowno}")
            try:
                p = Params(v, k, t, lam)
            except ParamsError:
                raise BoundFileError(f"invalid parameter row {rowno}") from None
            yield p, value, row[5].strip()
