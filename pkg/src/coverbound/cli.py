"""Command-line front end.

Exit codes: 0 success, 1 a verification failed, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import families, oracle
from .classic import CSV_HEADER, ExactValueTable, Params
from .exactmath import DEFAULT_SQRT_SCALE
from .pipeline import (
    BoundStore,
    RuleSet,
    bound_chain,
    emit_table,
    ingest_external,
    scan_improvements,
)

RULE_FLAGS = {
    "base": "base",
    "schonheim-step": "schonheim_step",
    "mm-special": "mm_special",
    "mm-general": "mm_general",
    "external": "external",
    "main": "main",
    "dbig": "dbig",
    "smalld": "smalld",
}
PRESETS = {"full": RuleSet.full, "restricted": RuleSet.restricted, "classical": RuleSet.classical}


class UsageError(Exception):
    pass


def default_cache_path() -> Path:
    env = os.environ.get("COVERBOUND_CACHE")
    if env:
        return Path(env).expanduser()
    return Path.home() / ".cache" / "coverbound" / "bounds.jsonl"


def external_store_path(cache: Path) -> Path:
    """Ingested external bounds live next to the cache file."""
    return cache.with_name("external.csv")


def build_ruleset(args: argparse.Namespace) -> RuleSet:
    rs = PRESETS[args.ruleset]()
    if args.disable:
        rs = rs.without(*(RULE_FLAGS[name] for name in args.disable))
    kw = rs.as_json()
    kw["s_min"] = args.s_min
    kw["s_max"] = args.s_max
    kw["sqrt_scale"] = args.sqrt_scale
    kw["external_as_inputs"] = not args.no_external_inputs
    return RuleSet(**kw)  # type: ignore[arg-type]


def build_store(args: argparse.Namespace) -> BoundStore:
    cache = default_cache_path() if args.cache is None else Path(args.cache)
    exact = None
    if args.exact_table:
        exact = ExactValueTable.from_csv(args.exact_table)
    store = BoundStore(exact=exact, cache_path=None if args.no_cache else cache)
    persistent = external_store_path(cache)
    if persistent.exists():
        ingest_external(persistent, store)
    for path in args.external or ():
        ingest_external(path, store)
    return store


def params_from(args: argparse.Namespace) -> Params:
    lam = args.lam_pos if args.lam_pos is not None else args.lam
    return Params(args.v, args.k, args.t, lam)


# -- commands -------------------------------------------------------------------

def cmd_bound(args: argparse.Namespace, out) -> int:
    p = params_from(args)
    store = build_store(args)
    chain = bound_chain(p, store, build_ruleset(args)) if p.t > 0 else []
    if not chain:
        value, rule = p.lam, "Base"
    else:
        value, rule = chain[-1].value, str(chain[-1].rule)
    if args.format == "json":
        rows = [{"key": list(r.key.astuple()), "value": r.value, "rule": str(r.rule)} for r in chain]
        out.write(json.dumps({"key": list(p.astuple()), "value": value, "rule": rule, "chain": rows}, indent=2) + "\n")
    elif args.format == "csv":
        out.write("v,k,t,lambda,value,rule\n")
        for r in chain:
            out.write(",".join(map(str, r.key.astuple())) + f",{r.value},{r.rule}\n")
    else:
        out.write(f"C_{p.lam}({p.v},{p.k},{p.t}) >= {value}\n")
        out.write(f"rule: {rule}\n")
        if chain:
            out.write("chain:\n")
            for r in chain:
                out.write(f"  {r.key}  {r.value}  {r.rule}\n")
    return 0


def cmd_scan(args: argparse.Namespace, out) -> int:
    if args.kmin > args.kmax:
        raise UsageError("--kmin must not exceed --kmax")
    store = build_store(args)
    entries = scan_improvements(args.t, args.lam, range(args.kmin, args.kmax + 1), store, build_ruleset(args))
    out.write(emit_table(entries, args.format))
    return 0


def parse_range(text: str) -> range:
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or A..B, got {text!r}") from None
    if a > b:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return range(a, b + 1)


def cmd_family_inffam(args: argparse.Namespace, out) -> int:
    results = [families.inffam_check(m) for m in args.m]
    ok = all(r.passed for r in results)
    if args.format == "json":
        rows = [
            {"m": r.m, "v": r.params.v, "k": r.params.k, "L": r.L, "theorem_bound": r.theorem_bound,
             "promised": r.promised, "pass": r.passed}
            for r in results
        ]
        out.write(json.dumps(rows, indent=2) + "\n")
    else:
        out.write("m v k L bound promised status\n")
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            out.write(f"{r.m} {r.params.v} {r.params.k} {r.L} {r.theorem_bound} {r.promised} {status}\n")
    return 0 if ok else 1


def cmd_family_affine(args: argparse.Namespace, out) -> int:
    field = families.FiniteField.from_file(args.field_table) if args.field_table else None
    r = families.exactth2(args.m, args.q, args.t, field)
    checks = [
        ("lower bound reaches exact value", r.lower_bound >= r.exact_value),
        ("witness is a covering", r.witness_ok),
        ("witness block count", r.witness_blocks == r.exact_value),
    ]
    if args.format == "json":
        payload = {
            "q": r.q, "m": r.m, "t": r.t, "z": r.z, "v_min": r.v_min, "v_max": r.v_max,
            "k": r.m * r.q ** (r.t - 1), "exact_value": r.exact_value, "lower_bound": r.lower_bound,
            "checks": {name: ok for name, ok in checks},
        }
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        out.write(f"z={r.z}\n")
        out.write(f"exact value {r.exact_value} on v in [{r.v_min},{r.v_max}] (k={r.m * r.q ** (r.t - 1)}, t={r.t})\n")
        out.write(f"lower bound at v={r.v_min}: {r.lower_bound}\n")
        for name, ok in checks:
            out.write(f"{'PASS' if ok else 'FAIL'} {name}\n")
    return 0 if r.certified else 1


def cmd_oracle_exact(args: argparse.Namespace, out) -> int:
    p = params_from(args)
    res = oracle.exact_cover(p.v, p.k, p.t, p.lam, args.budget)
    if res.value is None:
        out.write("unknown (budget)\n")
        return 0
    out.write(f"{res.value}\n")
    if args.witness:
        assert res.witness is not None
        out.write(res.witness.to_json(p.k, p.t, p.lam) + "\n")
    return 0


def cmd_oracle_verify(args: argparse.Namespace, out) -> int:
    rep = oracle.verify_suite(args.seed, args.coverings, args.graphs)
    for line in rep.lines():
        out.write(line + "\n")
    for failure in rep.failures[:20]:
        out.write(f"  {failure}\n")
    return 0 if rep.ok else 1


def cmd_ingest(args: argparse.Namespace, out) -> int:
    cache = default_cache_path() if args.cache is None else Path(args.cache)
    target = external_store_path(cache)
    store = BoundStore()
    if target.exists():
        ingest_external(target, store)
    n = ingest_external(args.csv, store)
    target.parent.mkdir(parents=True, exist_ok=True)
    tmp = target.with_suffix(".tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for p in sorted(store.external):
            value, source = store.external[p]
            w.writerow([*p.astuple(), value, source])
    tmp.replace(target)
    out.write(f"ingested {n} rows; {len(store.external)} external bounds stored in {target}\n")
    return 0


def cmd_cache_clear(args: argparse.Namespace, out) -> int:
    cache = default_cache_path() if args.cache is None else Path(args.cache)
    if cache.exists():
        cache.unlink()
        out.write(f"removed {cache}\n")
    else:
        out.write(f"no cache at {cache}\n")
    return 0


# -- parser -----------------------------------------------------------------------

def _config_parent() -> argparse.ArgumentParser:
    cfg = argparse.ArgumentParser(add_help=False)
    g = cfg.add_argument_group("configuration")
    g.add_argument("--ruleset", choices=sorted(PRESETS), default="full")
    g.add_argument("--disable", action="append", choices=sorted(RULE_FLAGS), metavar="RULE",
                   help=f"turn off a rule; one of {', '.join(RULE_FLAGS)}")
    g.add_argument("--s-min", type=int, default=1)
    g.add_argument("--s-max", type=int, default=None)
    g.add_argument("--cache", default=None, help="cache file (default $COVERBOUND_CACHE or ~/.cache/coverbound/bounds.jsonl)")
    g.add_argument("--no-cache", action="store_true")
    g.add_argument("--external", action="append", metavar="CSV", help="extra external bounds for this run")
    g.add_argument("--exact-table", metavar="CSV", help="exact covering numbers for the general Mills–Mullin rule")
    g.add_argument("--no-external-inputs", action="store_true",
                   help="do not feed external bounds into the spectral b_i")
    g.add_argument("--format", choices=["text", "csv", "json"], default="text")
    g.add_argument("--budget", type=int, default=oracle.DEFAULT_BUDGET)
    g.add_argument("--sqrt-scale", type=int, default=DEFAULT_SQRT_SCALE)
    g.add_argument("--lambda", dest="lam", type=int, default=1)
    return cfg


def build_parser() -> argparse.ArgumentParser:
    cfg = _config_parent()
    parser = argparse.ArgumentParser(prog="coverbound", description="Lower bounds on covering numbers C_lambda(v,k,t).")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_params(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("v", type=int)
        sp.add_argument("k", type=int)
        sp.add_argument("t", type=int)
        sp.add_argument("lam_pos", nargs="?", type=int, metavar="lambda")

    sp = sub.add_parser("bound", parents=[cfg], help="best lower bound for one parameter set")
    add_params(sp)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("scan", parents=[cfg], help="list parameter sets where the spectral bounds improve")
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--kmin", type=int, required=True)
    sp.add_argument("--kmax", type=int, required=True)
    sp.set_defaults(func=cmd_scan)

    fam = sub.add_parser("family", help="closed-form families").add_subparsers(dest="family", required=True)
    sp = fam.add_parser("inffam", parents=[cfg])
    sp.add_argument("--m", type=parse_range, default=range(6, 21), help="N or A..B (default 6..20)")
    sp.set_defaults(func=cmd_family_inffam)
    sp = fam.add_parser("affine", parents=[cfg])
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--field-table", metavar="FILE", help="field tables for prime-power q")
    sp.set_defaults(func=cmd_family_affine)

    orc = sub.add_parser("oracle", help="exact values and identity checks").add_subparsers(dest="oracle", required=True)
    sp = orc.add_parser("exact", parents=[cfg])
    add_params(sp)
    sp.add_argument("--witness", action="store_true", help="also print an optimal covering as JSON")
    sp.set_defaults(func=cmd_oracle_exact)
    sp = orc.add_parser("verify", parents=[cfg])
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--coverings", type=int, default=100)
    sp.add_argument("--graphs", type=int, default=200)
    sp.set_defaults(func=cmd_oracle_verify)

    sp = sub.add_parser("ingest", parents=[cfg], help="merge a v,k,t,lambda,value,source CSV into the external store")
    sp.add_argument("csv")
    sp.set_defaults(func=cmd_ingest)

    cache = sub.add_parser("cache", help="cache management").add_subparsers(dest="cache_cmd", required=True)
    sp = cache.add_parser("clear", parents=[cfg])
    sp.set_defaults(func=cmd_cache_clear)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except (UsageError, OSError, ValueError) as exc:
        # ParamsError, BoundFileError and FamilyError are ValueErrors
        print(f"coverbound: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
