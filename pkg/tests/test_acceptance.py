"""Acceptance suite: one check per criterion, each printing a PASS or FAIL line.

Run directly with ``python3 tests/test_acceptance.py`` or through pytest.
"""

from __future__ import annotations

import math
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

from knothom.cli import scan_expressions
from knothom.closed import closed_component_homology, kappa_ses
from knothom.engine import component_model, component_series
from knothom.errors import UnsupportedClass, UnsupportedSymmetry
from knothom.expr import parse
from knothom.functors import c2_series, free_lie_dims, weighted_dims
from knothom.graded import F2, QQ, AbGroup, FieldSpec, GradedAb, PoincarePoly, field_betti, mod_p_betti, so3
from knothom.integral import (
    check_low_degree_torsion_free,
    h1_integral,
    integral_homology,
    reconstruct_low_degrees,
    torsion_witnesses,
)
from knothom.oracle import DEFAULT_CELL_BUDGET, model_cells, model_homology
from strategies import ORACLE_SUITE


def _line(n, ok, detail):
    return f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"


def _sum(text, n):
    return "sum(" + ",".join([text] * n) + ")"


# --------------------------------------------------------------------------


def criterion_1():
    cases = [
        ("T(3,2)", AbGroup(1)),
        ("F8", AbGroup(2)),
        ("hyp(W;m=2;rev=yes;T(3,2))", AbGroup(2, (2,))),
        ("cable(3,2;T(3,2))", AbGroup(2)),
        ("U", AbGroup(0)),
    ]
    bad = [(t, h1_integral(parse(t)).render()) for t, want in cases if h1_integral(parse(t)).group() != want]
    return not bad, f"H_1 fixtures {len(cases) - len(bad)}/{len(cases)}" + (f", mismatches {bad}" if bad else "")


def criterion_2():
    four = _sum("T(3,2)", 4)
    low = reconstruct_low_degrees(parse(four), 3)
    h2, h3 = low[2], low[3]
    ok_h2 = h2 == AbGroup(0, (2,))
    ok_h3 = h3.rank == 0 and h3.torsion_count(2) == 0
    cab = integral_homology(parse(f"cable(3,2;{four})"), 3)[3]
    ok_cab = cab.torsion_count(2) == 1
    detail = f"H_2 = {h2.render()}, H_3 = {h3.render()}, cable H_3 2-torsion count {cab.torsion_count(2)}"
    return ok_h2 and ok_h3 and ok_cab, detail


def criterion_3():
    cases = []
    for p in (2, 3, 5):
        cases.append((_sum("T(3,2)", p), p, 2 * p - 2, 2 * p - 2, p))
    for p, s in ((3, 1), (2, 2)):
        inner = f"cable(3,2;{_sum('T(3,2)', p)})"
        deg = 2 * p ** (s + 1) - 1
        cases.append((_sum(inner, p ** s), p, deg, deg, p ** (s + 1)))
    for s in (1, 2):
        inner = f"cable(3,2;{_sum('T(3,2)', 4)})"
        deg = 2 * 2 ** (s + 2) - 1
        cases.append((_sum(inner, 2 ** s), 2, deg, None, 2 ** (s + 1)))
    bad = []
    for text, p, maxdeg, deg, order in cases:
        ws = torsion_witnesses(parse(text), p, maxdeg)
        hit = any(w.order == order and (deg is None or w.degree == deg) for w in ws)
        if not hit:
            bad.append((text, p, [w.render() for w in ws]))
    return not bad, f"witnesses {len(cases) - len(bad)}/{len(cases)}" + (f", missing {bad}" if bad else "")


def criterion_4():
    bad, biggest = [], 0
    for text in ORACLE_SUITE:
        e = parse(text)
        model = component_model(e)
        biggest = max(biggest, model_cells(model))
        h = model_homology(model, DEFAULT_CELL_BUDGET)
        for fld in (QQ, F2):
            if PoincarePoly.of(field_betti(h, fld).coeffs, 6) != component_series(e, fld, 6):
                bad.append((text, fld.name))
    n = len(ORACLE_SUITE)
    return not bad, f"{n} expressions over Q and F2 agree with the oracle (largest {biggest} cells)" + (
        f", disagreements {bad}" if bad else ""
    )


def _series_mul(a, b, n):
    out = [0] * (n + 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b[: n + 1 - i]):
                out[i + j] += x * y
    return out


def _reexpand(lie, n, graded):
    out = [1] + [0] * n
    for d, k in enumerate(lie):
        if k:
            f = [0] * (n + 1)
            for j in range(n // d + 1):
                f[j * d] = math.comb(k, j) if graded and d % 2 else math.comb(k + j - 1, j)
            out = _series_mul(out, f, n)
    return out


def _geometric(w, n):
    out = [1] + [0] * n
    for d in range(1, n + 1):
        out[d] = sum(w[j] * out[d - j] for j in range(1, min(d, len(w) - 1) + 1))
    return out


def criterion_5(count=500, cutoff=12):
    rng = random.Random(20261019)
    bad = []
    for _ in range(count):
        w = [0] + [rng.randint(0, 3) for _ in range(6)]
        target = _geometric(w, cutoff)
        if _reexpand(free_lie_dims(w, cutoff, QQ).dims, cutoff, True) != target:
            bad.append(("Q", w))
        if _reexpand(free_lie_dims(w, cutoff, F2).dims, cutoff, False) != target:
            bad.append(("F2", w))
        v = [rng.randint(0, 3) for _ in range(7)]
        V = weighted_dims([PoincarePoly.of(v)])
        if c2_series(V, FieldSpec(13), cutoff, 4) != c2_series(V, QQ, cutoff, 4):
            bad.append(("F13", v))
    return not bad, f"{count} random inputs, re-expansion over Q and F2 and F13 = Q" + (f", failures {bad[:3]}" if bad else "")


def criterion_6():
    start = time.perf_counter()
    checked, skipped, bad = 0, 0, []
    for _, e in scan_expressions(3):
        for p in (3, 5):
            try:
                r = check_low_degree_torsion_free(e, p)
            except (UnsupportedSymmetry, UnsupportedClass):
                skipped += 1
                continue
            checked += 1
            if not r["passed"]:
                bad.append((r["expr"], p, r["first_failure"]))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 60
    return ok, f"{checked} pairs checked, {skipped} unsupported, {len(bad)} violations, {elapsed:.1f}s"


def criterion_7():
    u = parse("U")
    s3 = closed_component_homology(u, "s3", None, 5)
    ok_u = s3 == GradedAb.from_ranks([1, 0, 1, 1, 0, 1])
    ok_t = closed_component_homology(parse("T(3,2)"), "s3", None, 3)[1] == AbGroup(0, (2,))
    ok_r = closed_component_homology(u, "r3", None, 3) == so3(3)
    done, missing, unsupported = 0, [], 0
    for text in ORACLE_SUITE:
        for space in ("star", "r3"):
            try:
                k = kappa_ses(parse(text), space, 1)
            except UnsupportedClass:
                unsupported += 1
                continue
            done += 1
            if k["coker"].torsion_count(2) == 0:
                missing.append((text, space))
    ok = ok_u and ok_t and ok_r and not missing
    return ok, (
        f"unknot S^3 {ok_u}, trefoil H_1 {ok_t}, unknot R^3 {ok_r}, "
        f"kappa coker 2-torsion {done - len(missing)}/{done} ({unsupported} unsupported)"
    )


def criterion_8():
    bad = []
    for text in ORACLE_SUITE:
        e = parse(text)
        low = reconstruct_low_degrees(e, 3)
        for p in (2, 3):
            got = mod_p_betti(low, p).coeffs[:3]
            want = component_series(e, FieldSpec(p), 2).coeffs
            if got != want:
                bad.append((text, p, got, want))
    return not bad, f"{len(ORACLE_SUITE)} expressions, p in {{2,3}}, degrees <= 2" + (f", mismatches {bad}" if bad else "")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.mark.parametrize("n", range(1, 9))
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n - 1]()
    with capsys.disabled():
        print("\n" + _line(n, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for i, fn in enumerate(CRITERIA, 1):
        ok, detail = fn()
        print(_line(i, ok, detail), flush=True)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
