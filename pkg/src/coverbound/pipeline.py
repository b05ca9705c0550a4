"""Best-known bound evaluation along diagonal chains, and improvement scans.

A key (v, k, t) is evaluated after every key (v-i, k-i, t-i) below it on
its diagonal; each evaluation takes the maximum over the enabled rules.
Records are memoized per ruleset fingerprint and can be persisted to a
line-oriented JSON cache.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import re
import threading
from dataclasses import asdict, dataclass, fields
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from . import spectral
from .classic import (
    ExactValueTable,
    Params,
    base_bound,
    mills_mullin_general,
    mills_mullin_special,
    read_bound_csv,
    schonheim,
    schonheim_step,
)
from .exactmath import DEFAULT_SQRT_SCALE

log = logging.getLogger(__name__)


class RuleKind(str, Enum):
    BASE = "Base"
    SCHONHEIM_STEP = "SchonheimStep"
    MM_SPECIAL = "MillsMullinSpecial"
    MM_GENERAL = "MillsMullinGeneral"
    EXTERNAL = "External"
    MAIN = "TheoremMain"
    DBIG = "TheoremDBig"
    SMALLD = "TheoremSmallD"
    TRIVIAL = "Trivial"


SPECTRAL_KINDS = (RuleKind.MAIN, RuleKind.DBIG, RuleKind.SMALLD)

_RULE_RE = re.compile(r"^(\w+)(?:\((.*)\))?$")


@dataclass(frozen=True)
class Rule:
    kind: RuleKind
    s: Optional[int] = None
    case: Optional[str] = None
    r: Optional[int] = None
    source: Optional[str] = None

    @property
    def is_spectral(self) -> bool:
        return self.kind in SPECTRAL_KINDS

    def __str__(self) -> str:
        if self.kind is RuleKind.EXTERNAL:
            return f"External({self.source or ''})"
        args = []
        if self.s is not None:
            args.append(f"s={self.s}")
        if self.case is not None:
            args.append(f"case={self.case}")
        if self.r is not None:
            args.append(f"r={self.r}")
        return f"{self.kind.value}({','.join(args)})" if args else self.kind.value

    @classmethod
    def parse(cls, text: str) -> "Rule":
        m = _RULE_RE.match(text)
        if not m:
            raise ValueError(f"unparseable rule {text!r}")
        kind = RuleKind(m.group(1))
        body = m.group(2)
        if kind is RuleKind.EXTERNAL:
            return cls(kind, source=body or "")
        kw: Dict[str, object] = {}
        for part in filter(None, (body or "").split(",")):
            name, _, value = part.partition("=")
            kw[name] = value if name == "case" else int(value)
        return cls(kind, **kw)  # type: ignore[arg-type]


@dataclass(frozen=True)
class RuleSet:
    """Which rules may contribute to a bound."""

    base: bool = True
    schonheim_step: bool = True
    mm_special: bool = True
    mm_general: bool = True
    external: bool = True
    main: bool = True
    dbig: bool = True
    smalld: bool = True
    s_min: int = 1
    s_max: Optional[int] = None
    external_as_inputs: bool = True
    sqrt_scale: int = DEFAULT_SQRT_SCALE

    @classmethod
    def full(cls) -> "RuleSet":
        return cls()

    @classmethod
    def restricted(cls) -> "RuleSet":
        """Base, Schönheim step, Mills–Mullin r = t = 2 and the spectral bounds."""
        return cls(mm_general=False, external=False)

    @classmethod
    def classical(cls) -> "RuleSet":
        return cls(main=False, dbig=False, smalld=False)

    def without(self, *names: str) -> "RuleSet":
        kw = asdict(self)
        for n in names:
            if n not in kw or not isinstance(kw[n], bool):
                raise ValueError(f"unknown rule {n!r}")
            kw[n] = False
        return RuleSet(**kw)

    def s_values(self, t: int) -> range:
        hi = t // 2 if self.s_max is None else min(self.s_max, t // 2)
        return range(max(1, self.s_min), hi + 1)

    def as_json(self) -> Dict[str, object]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class BoundRecord:
    key: Params
    value: int
    rule: Rule
    inputs: Tuple[Tuple[Params, int], ...] = ()

    def to_json(self, fingerprint: str) -> str:
        return json.dumps(
            {
                "key": list(self.key.astuple()),
                "value": self.value,
                "rule": str(self.rule),
                "inputs": [[list(p.astuple()), val] for p, val in self.inputs],
                "ruleset_fingerprint": fingerprint,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, obj: Dict) -> "BoundRecord":
        return cls(
            key=Params(*obj["key"]),
            value=int(obj["value"]),
            rule=Rule.parse(obj["rule"]),
            inputs=tuple((Params(*p), int(val)) for p, val in obj["inputs"]),
        )


@dataclass
class Evaluation:
    """Every rule value computed for one key, in a fixed rule order."""

    key: Params
    candidates: List[BoundRecord]

    def best(self) -> BoundRecord:
        # ties go to the earliest rule in evaluation order
        best = self.candidates[0]
        for rec in self.candidates[1:]:
            if rec.value > best.value:
                best = rec
        return best

    def best_non_spectral(self) -> Optional[BoundRecord]:
        rest = [c for c in self.candidates if not c.rule.is_spectral]
        return Evaluation(self.key, rest).best() if rest else None

    def spectral_values(self, s: int) -> Dict[RuleKind, BoundRecord]:
        out: Dict[RuleKind, BoundRecord] = {}
        for c in self.candidates:
            if c.rule.is_spectral and c.rule.s == s:
                out[c.rule.kind] = c
        return out


class BoundStore:
    """Memoized records, external bounds and an optional persistent cache.

    Records are keyed by ruleset fingerprint, so one store may serve
    several rulesets.  Only the first fingerprint used is persisted; a
    cache file written under another fingerprint is discarded.
    """

    def __init__(
        self,
        exact: Optional[ExactValueTable] = None,
        cache_path: Optional[Union[str, Path]] = None,
    ) -> None:
        self.exact = exact if exact is not None else ExactValueTable()
        self.external: Dict[Params, Tuple[int, str]] = {}
        self.cache_path = Path(cache_path) if cache_path else None
        self._memo: Dict[str, Dict[Params, BoundRecord]] = {}
        self._persisted_fp: Optional[str] = None
        self._lock = threading.RLock()

    # -- external data -------------------------------------------------
    def add_external(self, p: Params, value: int, source: str) -> None:
        with self._lock:
            old = self.external.get(p)
            if old is None or value > old[0]:
                self.external[p] = (value, source)

    def fingerprint(self, ruleset: RuleSet) -> str:
        payload = {
            "ruleset": ruleset.as_json(),
            "external": sorted([list(p.astuple()), v, s] for p, (v, s) in self.external.items()),
            "exact": [[list(k), v] for k, v in self.exact.fingerprint_items()],
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    # -- memo and cache --------------------------------------------------
    def memo(self, ruleset: RuleSet) -> Tuple[str, Dict[Params, BoundRecord]]:
        fp = self.fingerprint(ruleset)
        with self._lock:
            if fp not in self._memo:
                self._memo[fp] = {}
                if self.cache_path is not None and self._persisted_fp is None:
                    self._persisted_fp = fp
                    self._memo[fp].update(self._load_cache(fp))
            return fp, self._memo[fp]

    def _load_cache(self, fp: str) -> Dict[Params, BoundRecord]:
        path = self.cache_path
        assert path is not None
        if not path.exists():
            return {}
        records: Dict[Params, BoundRecord] = {}
        stale = False
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError:
                    stale = True
                    break
                if obj.get("ruleset_fingerprint") != fp:
                    stale = True
                    break
                rec = BoundRecord.from_json(obj)
                records[rec.key] = rec
        if stale:
            log.info("cache %s invalidated (fingerprint changed)", path)
            path.unlink()
            return {}
        return records

    def _persist(self, fp: str, rec: BoundRecord) -> None:
        if self.cache_path is None or fp != self._persisted_fp:
            return
        self.cache_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.cache_path, "a", encoding="utf-8") as fh:
            fh.write(rec.to_json(fp) + "\n")

    def clear_cache(self) -> None:
        with self._lock:
            self._memo.clear()
            self._persisted_fp = None
            if self.cache_path is not None and self.cache_path.exists():
                self.cache_path.unlink()


def ingest_external(path: Union[str, Path], store: BoundStore) -> int:
    """Load a ``v,k,t,lambda,value,source`` CSV into ``store``.

    The whole file is parsed before anything is added, so a bad row leaves
    the store untouched.  Duplicate keys keep the maximum value.
    """
    rows = list(read_bound_csv(path))
    for p, value, source in rows:
        store.add_external(p, value, source)
    return len(rows)


def _evaluate(key: Params, store: BoundStore, ruleset: RuleSet, memo: Dict[Params, BoundRecord]) -> Evaluation:
    """All rule values for ``key``; every chain predecessor must be in ``memo``."""
    lam = key.lam
    cands: List[BoundRecord] = []

    def lookup(p: Params) -> int:
        if p.t == 0:
            return p.lam
        return memo[p].value

    if key.t == 0:
        return Evaluation(key, [BoundRecord(key, lam, Rule(RuleKind.BASE))])

    if ruleset.base:
        bb = base_bound(key)
        if bb is not None:
            cands.append(BoundRecord(key, bb, Rule(RuleKind.BASE)))
    pred = key.derived(1)
    if ruleset.schonheim_step:
        pv = lookup(pred)
        cands.append(BoundRecord(key, schonheim_step(key.v, key.k, pv), Rule(RuleKind.SCHONHEIM_STEP), ((pred, pv),)))
    if ruleset.mm_special and key.t == 2:
        mm = mills_mullin_special(key, schonheim(key))
        if mm is not None:
            cands.append(BoundRecord(key, mm, Rule(RuleKind.MM_SPECIAL)))
    if ruleset.mm_general and key.t >= 2 and len(store.exact):
        for r in range(2, key.t + 1):
            mm = mills_mullin_general(key, r, store.exact)
            if mm is not None:
                ins = ((key.derived(1), store.exact.get(key.derived(1))), (key.derived(r), store.exact.get(key.derived(r))))
                cands.append(BoundRecord(key, mm, Rule(RuleKind.MM_GENERAL, r=r), ins))  # type: ignore[arg-type]
    if ruleset.external and key in store.external:
        value, source = store.external[key]
        cands.append(BoundRecord(key, value, Rule(RuleKind.EXTERNAL, source=source)))

    if key.t < key.k < key.v and (ruleset.main or ruleset.dbig or ruleset.smalld):
        if ruleset.external_as_inputs or not (ruleset.external and store.external):
            provider = lookup
        else:
            inner = RuleSet(**{**ruleset.as_json(), "external": False})
            provider = lambda p: p.lam if p.t == 0 else best_bound(p, store, inner).value  # noqa: E731
        found: List[BoundRecord] = []
        for s in ruleset.s_values(key.t):
            ctx = spectral.build_context(key, s, provider)
            ins = tuple((key.derived(i), ctx.b[i]) for i in range(s, 2 * s + 1))
            if ruleset.main:
                val = spectral.theorem_main(ctx)
                if val is not None:
                    found.append(BoundRecord(key, val, Rule(RuleKind.MAIN, s=s), ins))
            if ruleset.dbig:
                val = spectral.theorem_dbig(ctx)
                if val is not None:
                    found.append(BoundRecord(key, val, Rule(RuleKind.DBIG, s=s), ins))
            if ruleset.smalld:
                hit = spectral.best_smalld(ctx, ruleset.sqrt_scale)
                if hit is not None:
                    found.append(BoundRecord(key, hit[0], Rule(RuleKind.SMALLD, s=s, case=hit[1]), ins))
        cands.extend(found)

    if not cands:
        cands.append(BoundRecord(key, lam, Rule(RuleKind.TRIVIAL)))
    return Evaluation(key, cands)


def best_bound(key: Params, store: BoundStore, ruleset: Optional[RuleSet] = None) -> BoundRecord:
    """Best known lower bound for ``key`` under ``ruleset``."""
    ruleset = ruleset or RuleSet.full()
    fp, memo = store.memo(ruleset)
    with store._lock:
        hit = memo.get(key)
        if hit is not None:
            return hit
        if key.t == 0:
            return BoundRecord(key, key.lam, Rule(RuleKind.BASE))
        for sub in key.chain():
            if sub not in memo:
                rec = _evaluate(sub, store, ruleset, memo).best()
                memo[sub] = rec
                store._persist(fp, rec)
        return memo[key]


def evaluate(key: Params, store: BoundStore, ruleset: Optional[RuleSet] = None) -> Evaluation:
    """Every rule value for ``key`` (predecessors are evaluated first)."""
    ruleset = ruleset or RuleSet.full()
    _, memo = store.memo(ruleset)
    with store._lock:
        if key.t >= 2:
            best_bound(key.derived(1), store, ruleset)
        return _evaluate(key, store, ruleset, memo)


def bound_chain(key: Params, store: BoundStore, ruleset: Optional[RuleSet] = None) -> List[BoundRecord]:
    """Records for the diagonal chain (t = 1 .. key.t) after evaluating ``key``."""
    best_bound(key, store, ruleset)
    _, memo = store.memo(ruleset or RuleSet.full())
    return [memo[p] for p in key.chain()]


# -- improvement scans -------------------------------------------------------

class Marker(str, Enum):
    PLAIN = "plain"
    ITALIC_DBIG = "italic_dbig"
    BOLD_SMALLD = "bold_smalld"


MARK_SUFFIX = {Marker.PLAIN: "", Marker.ITALIC_DBIG: "*", Marker.BOLD_SMALLD: "!"}


@dataclass(frozen=True)
class ImprovementEntry:
    params: Params
    s: int
    new_bound: int
    comparison_bound: int
    marker: Marker = Marker.PLAIN


def useless_threshold(k: int, t: int, lam: int) -> int:
    """max over s of the least integer V with V^(t-s) * s! * lam >= k^t."""
    best = 0
    fact = 1
    for s in range(1, t // 2 + 1):
        fact *= s
        e = t - s
        target = k ** t
        # integer e-th root, rounded up
        lo, hi = 1, k ** t + 1
        while lo < hi:
            mid = (lo + hi) // 2
            if mid ** e * fact * lam >= target:
                hi = mid
            else:
                lo = mid + 1
        best = max(best, lo)
    return best


def scan_cell(key: Params, store: BoundStore, ruleset: RuleSet) -> List[ImprovementEntry]:
    ev = evaluate(key, store, ruleset)
    other = ev.best_non_spectral()
    other_val = other.value if other is not None else 0
    out = []
    for s in ruleset.s_values(key.t):
        vals = ev.spectral_values(s)
        if not vals:
            continue
        new = max(r.value for r in vals.values())
        if new <= other_val:
            continue
        main = vals.get(RuleKind.MAIN)
        main_cmp = main.value if main is not None else other_val
        marker = Marker.PLAIN
        dbig, smalld = vals.get(RuleKind.DBIG), vals.get(RuleKind.SMALLD)
        if dbig is not None and dbig.value > main_cmp and dbig.value == new:
            marker = Marker.ITALIC_DBIG
        elif smalld is not None and smalld.value > main_cmp and smalld.value == new:
            marker = Marker.BOLD_SMALLD
        out.append(ImprovementEntry(key, s, new, other_val, marker))
    return out


def scan_improvements(
    t: int,
    lam: int,
    k_range: Iterable[int],
    store: BoundStore,
    ruleset: Optional[RuleSet] = None,
) -> List[ImprovementEntry]:
    ruleset = ruleset or RuleSet.full()
    ks = list(k_range)
    if not ks:
        raise ValueError("k_range must be nonempty")
    entries: List[ImprovementEntry] = []
    for k in ks:
        if k <= t:
            continue
        for v in range(k + 1, useless_threshold(k, t, lam) + 1):
            entries.extend(scan_cell(Params(v, k, t, lam), store, ruleset))
    return entries


# -- table rendering -----------------------------------------------------------

TABLE_FIELDS = ["v", "k", "t", "lambda", "s", "new_bound", "comparison_bound", "marker"]


def _entry_row(e: ImprovementEntry) -> List[object]:
    p = e.params
    return [p.v, p.k, p.t, p.lam, e.s, e.new_bound, e.comparison_bound, e.marker.value]


def emit_table(entries: Sequence[ImprovementEntry], fmt: str = "text") -> str:
    if fmt == "text":
        return _emit_text(entries)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TABLE_FIELDS)
        for e in entries:
            w.writerow(_entry_row(e))
        return buf.getvalue()
    if fmt == "json":
        rows = [dict(zip(TABLE_FIELDS, _entry_row(e))) for e in entries]
        return json.dumps(rows, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def _emit_text(entries: Sequence[ImprovementEntry]) -> str:
    groups: Dict[Tuple[int, int, int], Dict[int, List[str]]] = {}
    for e in entries:
        g = groups.setdefault((e.params.t, e.params.lam, e.s), {})
        g.setdefault(e.params.k, []).append(f"{e.params.v}{MARK_SUFFIX[e.marker]}")
    lines = []
    for (t, lam, s), rows in sorted(groups.items()):
        if len(groups) > 1:
            lines.append(f"# t={t} lambda={lam} s={s}")
        for k in sorted(rows):
            lines.append(f"{k}: {','.join(rows[k])}")
    return "".join(line + "\n" for line in lines)


def parse_table(text: str, fmt: str) -> List[ImprovementEntry]:
    """Inverse of :func:`emit_table` for the csv and json formats."""
    if fmt == "csv":
        rows = list(csv.DictReader(io.StringIO(text)))
    elif fmt == "json":
        rows = json.loads(text) if text.strip() else []
    else:
        raise ValueError("only csv and json tables can be parsed")
    out = []
    for r in rows:
        p = Params(int(r["v"]), int(r["k"]), int(r["t"]), int(r["lambda"]))
        out.append(ImprovementEntry(p, int(r["s"]), int(r["new_bound"]), int(r["comparison_bound"]), Marker(r["marker"])))
    return out
