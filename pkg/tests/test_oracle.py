import pytest
from hypothesis import given, strategies as st

from knothom.engine import Circle, CyclicTwist, EPiece, Product
from knothom.errors import ActionOrderMismatch, CellBudgetExceeded, InvalidComplex, OracleUnavailable
from knothom.graded import AbGroup, GradedAb, prime_power_factors
from knothom.oracle import (
    FinChainComplex,
    SignedAuto,
    circle2_complex,
    circle2_reflection,
    circle2_rotation,
    circle_complex,
    cyclic_quotient_complex,
    diagonal_entries,
    e2_complex,
    homology_znf,
    klein_complex,
    mapping_torus,
    model_complex,
    model_homology,
    orbit_decomposition,
    permutation_action,
    point_complex,
    tensor,
)
from oracles import smith_torsion


def cols_of(m):
    cols = {}
    for i, row in enumerate(m):
        for j, v in enumerate(row):
            if v:
                cols.setdefault(j, {})[i] = v
    return cols


def torsion_of(m, nrows):
    out = []
    for x in diagonal_entries(cols_of(m), nrows):
        if abs(x) > 1:
            out.extend(prime_power_factors(abs(x)))
    return sorted(out)


def invariant_factor_parts(m):
    out = []
    for x in smith_torsion(m):
        out.extend(prime_power_factors(x))
    return sorted(out)


def test_klein_bottle():
    h = homology_znf(klein_complex())
    assert h == GradedAb((AbGroup(1), AbGroup(1, (2,)), AbGroup(0)))


def test_circle_and_torus():
    assert homology_znf(circle_complex()).ranks().coeffs == (1, 1)
    assert homology_znf(circle2_complex()).ranks().coeffs == (1, 1)
    assert homology_znf(tensor(circle_complex(), circle_complex())).ranks().coeffs == (1, 2, 1)


def test_reflection_twist_is_klein():
    C = cyclic_quotient_complex([circle2_complex()], [0], [circle2_reflection()], 2)
    assert homology_znf(C) == homology_znf(klein_complex())


def test_rotation_twist_is_torus():
    C = cyclic_quotient_complex([circle2_complex()], [0], [circle2_rotation()], 2)
    assert homology_znf(C).ranks().coeffs == (1, 2, 1)


def test_e2_point_and_circle():
    assert homology_znf(e2_complex(point_complex())) == GradedAb.of([1, 1])
    h = homology_znf(e2_complex(circle_complex()))
    assert h == GradedAb((AbGroup(1), AbGroup(2), AbGroup(1, (2,)), AbGroup(0)))


def test_three_cycle_on_circles_torsion_free():
    C = cyclic_quotient_complex([circle_complex()] * 3, [1, 2, 0], [None] * 3, 3)
    assert not homology_znf(C).has_torsion()


def test_action_order_mismatch():
    with pytest.raises(ActionOrderMismatch):
        cyclic_quotient_complex([circle_complex()] * 3, [1, 2, 0], [None] * 3, 2)


def test_invalid_complex():
    with pytest.raises(InvalidComplex):
        FinChainComplex([1, 1, 1], {1: {0: {0: 1}}, 2: {0: {0: 1}}})
    with pytest.raises(InvalidComplex):
        FinChainComplex([1, 1], {1: {3: {0: 1}}})


def test_not_a_chain_map():
    g = SignedAuto({0: ((0, 1), (1, 1)), 1: ((0, 1), (1, -1))})
    with pytest.raises(InvalidComplex):
        g.check_chain_map(circle2_complex())


def test_json_roundtrip():
    C = e2_complex(circle_complex())
    D = FinChainComplex.from_json(C.to_json())
    assert D.dims == C.dims and homology_znf(D) == homology_znf(C)


def test_orbit_decomposition_signs():
    C, g = permutation_action([circle_complex()] * 2, [1, 0], [None, None])
    orbs = orbit_decomposition(C, g, 2)
    top = [o for o in orbs if o["degree"] == 2]
    # swapping two odd cells is a Koszul sign
    assert top == [{"degree": 2, "cells": [0], "size": 1, "stabiliser": 2, "sign": -1}]


def test_mapping_torus_identity_is_product():
    C = tensor(circle_complex(), circle_complex())
    M = mapping_torus(C, SignedAuto.identity(C))
    assert homology_znf(M).ranks().coeffs == (1, 3, 3, 1)


def test_model_budget_and_unavailable():
    big = Product((Circle(),) * 12)
    with pytest.raises(CellBudgetExceeded):
        model_complex(big, 2000)
    with pytest.raises(OracleUnavailable):
        model_homology(EPiece(3, ((Circle(), 3),)))
    m = Product((Circle(), CyclicTwist(2, (Circle(),), (0,), (True,))))
    assert model_homology(m).has_torsion()


matrix_st = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


@given(matrix_st)
def test_diagonalisation_matches_smith(m):
    assert torsion_of(m, len(m)) == invariant_factor_parts(m)
    rank = len(diagonal_entries(cols_of(m), len(m)))
    import sympy

    assert rank == sympy.Matrix(m).rank()


def _row_op(m, i, j, k):
    m = [row[:] for row in m]
    m[i] = [a + k * b for a, b in zip(m[i], m[j])]
    return m


def _col_op(m, i, j, k):
    m = [row[:] for row in m]
    for row in m:
        row[i] += k * row[j]
    return m


@given(matrix_st, st.lists(st.tuples(st.booleans(), st.integers(0, 4), st.integers(0, 4), st.integers(-3, 3)), max_size=8))
def test_unimodular_invariance(m, ops):
    before = torsion_of(m, len(m))
    for is_row, i, j, k in ops:
        n = len(m) if is_row else len(m[0])
        i, j = i % n, j % n
        if i == j:
            continue
        m = _row_op(m, i, j, k) if is_row else _col_op(m, i, j, k)
    assert torsion_of(m, len(m)) == before
