import math
import random

import pytest
from hypothesis import given, strategies as st

from knothom.errors import DegreeZeroGenerator, WeightBoundExceeded
from knothom.functors import (
    LieDims,
    c2_series,
    free_lie_dims,
    gamma_series,
    restricted_extension,
    symmetric_series,
    weighted_dims,
)
from knothom.graded import F2, F3, QQ, FieldSpec, PoincarePoly


def series_mul(a, b, n):
    out = [0] * (n + 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if i + j <= n:
                out[i + j] += x * y
    return out


def binom_series(k, d, n, exterior):
    """(1 + t^d)^k or (1 - t^d)^(-k) truncated at n."""
    out = [0] * (n + 1)
    for j in range(0, n // d + 1):
        out[j * d] = math.comb(k, j) if exterior else math.comb(k + j - 1, j)
    return out


def reexpand(lie, n, graded):
    out = [1] + [0] * n
    for d, k in enumerate(lie):
        if k:
            out = series_mul(out, binom_series(k, d, n, graded and d % 2 == 1), n)
    return out


def geometric(w, n):
    out = [1] + [0] * n
    for d in range(1, n + 1):
        out[d] = sum(w[j] * out[d - j] for j in range(1, min(d, len(w) - 1) + 1))
    return out


def test_examples():
    assert free_lie_dims([0, 1], 4).dims == (0, 1, 1, 0, 0)
    assert free_lie_dims([0, 0, 1], 6).dims == (0, 0, 1, 0, 0, 0, 0)
    assert free_lie_dims([0, 2], 3).dims == (0, 2, 3, 2)


def test_degree_zero_rejected():
    with pytest.raises(DegreeZeroGenerator):
        free_lie_dims([1, 1], 3)


def test_restricted_extension_p2():
    # ungraded solve on one class in each of degrees 1 and 2, then towers
    L = free_lie_dims([0, 1, 1], 8, F2)
    Lp, Wp = restricted_extension(L, 2, 8)
    assert [Wp[d] for d in range(9)][:3] == [0, 0, L[1]]
    ref = reexpand(L.dims, 8, graded=False)
    # restricted PBW: prod (1 + t^n)^(Lp_n) = 1/(1 - h)
    ext = [1] + [0] * 8
    for d, k in enumerate(Lp.dims):
        if k:
            ext = series_mul(ext, binom_series(k, d, 8, True), 8)
    assert ext == geometric([0, 1, 1], 8)
    assert ref == geometric([0, 1, 1], 8)


def test_symmetric_series():
    assert symmetric_series([0, 1], QQ, 3).coeffs == (1, 1, 0, 0)
    assert symmetric_series([0, 1], F2, 3).coeffs == (1, 1, 1, 1)
    assert symmetric_series([0, 0, 1], QQ, 4).coeffs == (1, 0, 1, 0, 1)


def test_c2_weight_two_of_circle():
    # E_2(S^1) = mapping torus of the swap on the torus
    s = c2_series([1, 1], QQ, 4, 2)
    assert s.slice((2,)).coeffs == (1, 2, 1, 0, 0)
    assert c2_series([1, 1], F2, 4, 2).slice((2,)).coeffs == (1, 2, 2, 1, 0)


def test_c2_weight_bound():
    with pytest.raises(WeightBoundExceeded):
        c2_series([1], QQ, 3, 17)


def test_gamma_drops_low_weight():
    g = gamma_series([1, 1], QQ, 3, 3)
    assert all(sum(w) >= 2 for (_, w), _ in g.terms)


dims_st = st.lists(st.integers(0, 3), min_size=6, max_size=6).map(lambda xs: [0] + xs)


@given(dims_st)
def test_pbw_reexpansion_q(w):
    L = free_lie_dims(w, 12, QQ)
    assert reexpand(L.dims, 12, True) == geometric(w, 12)


@given(dims_st)
def test_pbw_reexpansion_f2(w):
    L = free_lie_dims(w, 12, F2)
    assert reexpand(L.dims, 12, False) == geometric(w, 12)


@given(st.lists(st.integers(0, 2), min_size=3, max_size=3))
def test_large_prime_matches_rational(v):
    V = weighted_dims([PoincarePoly.of(v)])
    assert c2_series(V, FieldSpec(13), 8, 3) == c2_series(V, QQ, 8, 3)


def test_weighted_two_variables():
    V = weighted_dims([PoincarePoly.of([1, 1]), PoincarePoly.of([1, 1])])
    s = c2_series(V, QQ, 4, (1, 1))
    # E_(1,1) = Conf(R^2,2) x S^1 x S^1 = S^1 x T^2
    assert s.slice((1, 1)).coeffs == (1, 3, 3, 1, 0)


def test_lie_dims_char_recorded():
    assert free_lie_dims([0, 1], 3, F3).char == 3
    assert isinstance(free_lie_dims([0, 1], 3), LieDims)


def test_random_inputs_deterministic():
    rng = random.Random(7)
    for _ in range(20):
        w = [0] + [rng.randint(0, 3) for _ in range(6)]
        assert reexpand(free_lie_dims(w, 12).dims, 12, True) == geometric(w, 12)
