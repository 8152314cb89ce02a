"""Command line front end.

Exit codes: 0 success, 1 a check failed, 2 invalid input, 3 unsupported case.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

from . import __version__
from .closed import SPACES, closed_component_homology, kappa_ses, unknot_detectors
from .engine import component_model, component_series
from .errors import (
    CellBudgetExceeded,
    InvalidExpression,
    KnotHomError,
    KnotSyntaxError,
    OracleUnavailable,
    UnknownAtom,
    UnsupportedClass,
    UnsupportedSymmetry,
)
from .expr import Cable, Sum, Torus, canonical_text, canonicalize, hyp, parse, validate
from .graded import FieldSpec, GradedAb, PoincarePoly, field_betti
from .integral import check_low_degree_torsion_free, h1_integral, reconstruct_low_degrees, torsion_witnesses
from .oracle import DEFAULT_CELL_BUDGET, model_homology

SCHEMA = 1
CACHE_ENV = "KNOTHOM_CACHE_DIR"


def _emit(args, payload: dict, text: str):
    if args.json:
        print(json.dumps(dict(payload, schema=SCHEMA), sort_keys=True))
    else:
        print(text)


def _expr(text: str):
    e = parse(text)
    bad = validate(e)
    if bad:
        raise InvalidExpression(bad)
    return canonicalize(e)


def _coeff(text: str) -> FieldSpec | None:
    if text.lower() in ("z", "int", "integral"):
        return None
    return FieldSpec.parse(text)


def _cached_series(e, fld: FieldSpec, cutoff: int) -> PoincarePoly:
    cache = os.environ.get(CACHE_ENV)
    if not cache:
        return component_series(e, fld, cutoff)
    key = hashlib.sha256(f"{canonical_text(e)}|{fld.char}|{cutoff}".encode()).hexdigest()
    path = os.path.join(cache, f"series-{key}.json")
    try:
        with open(path) as fh:
            return PoincarePoly.from_json(json.load(fh))
    except (OSError, ValueError):
        pass
    s = component_series(e, fld, cutoff)
    os.makedirs(cache, exist_ok=True)
    tmp = f"{path}.{os.getpid()}.tmp"
    with open(tmp, "w") as fh:
        json.dump(s.to_json(), fh)
    os.replace(tmp, path)
    return s


# --------------------------------------------------------------------------
# Subcommands


def cmd_validate(args):
    e = parse(args.expr)
    bad = validate(e)
    payload = {"expr": canonical_text(e) if not bad else args.expr, "valid": not bad,
               "violations": [{"path": list(v.path), "rule": v.rule, "message": v.message} for v in bad]}
    text = "ok " + canonical_text(e) if not bad else "\n".join(str(v) for v in bad)
    _emit(args, payload, text)
    return 0 if not bad else 2


def cmd_homology(args):
    e = _expr(args.expr)
    fld = FieldSpec.parse(args.coeff)
    s = _cached_series(e, fld, args.max_degree)
    _emit(args, {"expr": canonical_text(e), "coeff": fld.name, "series": s.to_json()}, s.render())
    return 0


def cmd_h1(args):
    e = _expr(args.expr)
    h = h1_integral(e)
    payload = {"expr": canonical_text(e), "r_plus": h.r_plus, "r_minus": h.r_minus, "t2": h.t2, "group": h.render()}
    _emit(args, payload, h.render())
    return 0


def cmd_witnesses(args):
    e = _expr(args.expr)
    ws = torsion_witnesses(e, args.p, args.max_degree)
    payload = {"expr": canonical_text(e), "p": args.p, "witnesses": [w.provenance() for w in ws]}
    text = "\n".join(f"{w.render()} {w.rule}" for w in ws) if ws else "none"
    _emit(args, payload, text)
    return 0


def cmd_low(args):
    e = _expr(args.expr)
    h = reconstruct_low_degrees(e, 3)
    _emit(args, {"expr": canonical_text(e), "homology": h.to_json()}, h.render())
    return 0


def cmd_closed(args):
    e = _expr(args.expr)
    fld = _coeff(args.coeff)
    h = closed_component_homology(e, args.space, fld, args.max_degree)
    payload = {"expr": canonical_text(e), "space": args.space, "coeff": "Z" if fld is None else fld.name}
    if isinstance(h, GradedAb):
        payload["homology"] = h.to_json()
    else:
        payload["series"] = h.to_json()
    if args.detectors:
        payload["detectors"] = unknot_detectors(e)
    text = h.render()
    if args.kappa is not None and args.space != "s3":
        k = kappa_ses(e, args.space, args.kappa)
        payload["kappa"] = {"degree": k["degree"], "coker": k["coker"].render(), "ker": k["ker"].render(), "exact": k["exact"]}
        text += f"\ncoker = {k['coker'].render()}, ker = {k['ker'].render()}"
    _emit(args, payload, text)
    return 0


def _multisets(pool, budget: int, max_arity: int):
    """Index multisets of size 2..max_arity whose node counts sum to ``budget``."""

    def rec(start, left, acc):
        if len(acc) >= 2 and left == 0:
            yield tuple(acc)
        if len(acc) == max_arity:
            return
        for i in range(start, len(pool)):
            cost = pool[i][0]
            if cost <= left:
                acc.append(i)
                yield from rec(i, left - cost, acc)
                acc.pop()

    yield from rec(0, budget, [])


def scan_expressions(max_nodes: int, leaves=None, max_arity: int = 4):
    """Admissible trees over torus-knot leaves, by internal node count then canonical text."""
    leaves = leaves or [Torus(3, 2), Torus(5, 2)]
    by_k: dict[int, dict[str, object]] = {0: {canonical_text(l): l for l in leaves}}
    for k in range(1, max_nodes + 1):
        out: dict[str, object] = {}
        for c in by_k[k - 1].values():
            for e in (Cable(3, 2, c), hyp("W", c, order=1), hyp("W", c, order=2, rev=False), hyp("W", c, order=2, rev=True)):
                out.setdefault(canonical_text(e), e)
        pool = [(j, e) for j in range(k) for e in by_k[j].values() if not isinstance(e, Sum)]
        for combo in _multisets(pool, k - 1, max_arity):
            e = canonicalize(Sum(tuple(pool[i][1] for i in combo)))
            out.setdefault(canonical_text(e), e)
        by_k[k] = dict(sorted(out.items()))
    for k in range(max_nodes + 1):
        for text, e in by_k[k].items():
            yield k, e


def cmd_scan(args):
    primes = [int(x) for x in args.primes.split(",") if x]
    start = time.perf_counter()
    rows, failures, skipped = [], [], []
    for k, e in scan_expressions(args.max_nodes, max_arity=args.max_arity):
        for p in primes:
            try:
                r = check_low_degree_torsion_free(e, p)
            except (UnsupportedSymmetry, UnsupportedClass) as ex:
                skipped.append({"expr": canonical_text(e), "p": p, "reason": str(ex)})
                continue
            rows.append(r)
            if not r["passed"]:
                failures.append(r)
    rows.sort(key=lambda r: (r["expr"], r["p"]))
    payload = {"primes": primes, "max_nodes": args.max_nodes, "checked": len(rows), "skipped": len(skipped),
               "violations": failures}
    text = f"checked {len(rows)} (expression, prime) pairs, skipped {len(skipped)}, violations {len(failures)}"
    for f in failures:
        text += f"\nviolation: {f['expr']} p={f['p']} degree {f['first_failure']}"
    if args.verbose:
        text += f"\nelapsed {time.perf_counter() - start:.1f}s"
    _emit(args, payload, text)
    return 1 if failures else 0


def cmd_oracle_check(args):
    e = _expr(args.expr)
    model = component_model(e)
    h = model_homology(model, args.max_cells)
    rows = []
    ok = True
    for name in args.fields.split(","):
        fld = FieldSpec.parse(name)
        s = component_series(e, fld, args.max_degree)
        o = field_betti(h, fld)
        o = PoincarePoly.of(o.coeffs, args.max_degree)
        same = o == s
        ok = ok and same
        rows.append({"coeff": fld.name, "engine": s.to_json(), "oracle": o.to_json(), "agree": same})
    text = "\n".join(f"{r['coeff']}: engine {PoincarePoly.from_json(r['engine'])} | oracle "
                     f"{PoincarePoly.from_json(r['oracle'])} | {'agree' if r['agree'] else 'DISAGREE'}" for r in rows)
    _emit(args, {"expr": canonical_text(e), "integral": h.to_json(), "rows": rows, "agree": ok}, text)
    return 0 if ok else 1


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="knothom", description="Homology of knot space components.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON (schema 1)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check admissibility")
    p.add_argument("expr")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("homology", parents=[common], help="Poincaré polynomial of the component")
    p.add_argument("expr")
    p.add_argument("--coeff", default="q")
    p.add_argument("--max-degree", type=int, default=6)
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("h1", parents=[common], help="integral H_1")
    p.add_argument("expr")
    p.set_defaults(func=cmd_h1)

    p = sub.add_parser("witnesses", parents=[common], help="guaranteed torsion summands")
    p.add_argument("expr")
    p.add_argument("-p", type=int, required=True)
    p.add_argument("--max-degree", type=int, default=10)
    p.set_defaults(func=cmd_witnesses)

    p = sub.add_parser("low", parents=[common], help="integral homology in degrees <= 3")
    p.add_argument("expr")
    p.set_defaults(func=cmd_low)

    p = sub.add_parser("closed", parents=[common], help="closed embedding spaces")
    p.add_argument("expr")
    p.add_argument("--space", choices=SPACES, default="s3")
    p.add_argument("--coeff", default="z")
    p.add_argument("--max-degree", type=int, default=6)
    p.add_argument("--kappa", type=int, default=None, metavar="N", help="also report the kappa sequence in degree N")
    p.add_argument("--detectors", action="store_true", help="include the unknot detectors")
    p.set_defaults(func=cmd_closed)

    p = sub.add_parser("scan", parents=[common], help="check odd torsion stays above degree 2p-2")
    p.add_argument("--primes", default="3,5")
    p.add_argument("--max-nodes", type=int, default=3)
    p.add_argument("--max-arity", type=int, default=4)
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("oracle-check", parents=[common], help="compare series with the chain-level oracle")
    p.add_argument("expr")
    p.add_argument("--max-cells", type=int, default=DEFAULT_CELL_BUDGET)
    p.add_argument("--max-degree", type=int, default=6)
    p.add_argument("--fields", default="q,f2,f3")
    p.set_defaults(func=cmd_oracle_check)
    return ap


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (KnotSyntaxError, UnknownAtom, InvalidExpression, ValueError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 2
    except (UnsupportedSymmetry, UnsupportedClass, OracleUnavailable, CellBudgetExceeded) as ex:
        print(f"unsupported: {ex}", file=sys.stderr)
        return 3
    except KnotHomError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())
