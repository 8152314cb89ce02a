"""Graded dimensions of free Lie algebras and the functors built from them.

Series are stored as dicts keyed by ``(degree, weight)`` where ``weight`` is a
tuple of non-negative ints. Truncation is by degree and by a weight bound,
both downward closed, so truncated products are exact on the kept keys.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import DegreeZeroGenerator, NonIntegralSolution, WeightBoundExceeded
from .graded import FieldSpec, PoincarePoly, WeightedSeries, QQ, is_prime

DEFAULT_MAX_WEIGHT = 16


# --------------------------------------------------------------------------
# Truncated multigraded series as plain dicts


class Trunc:
    """Which (degree, weight) keys survive truncation.

    ``bound`` is either an int (bound on the total weight) or a tuple giving a
    componentwise bound.
    """

    def __init__(self, max_degree: int, bound=None):
        self.max_degree = max_degree
        self.bound = bound

    def fits(self, deg: int, w: tuple) -> bool:
        if deg > self.max_degree:
            return False
        b = self.bound
        if b is None:
            return True
        if isinstance(b, int):
            return sum(w) <= b
        for x, y in zip(w, b):
            if x > y:
                return False
        return True

    def with_degree(self, max_degree: int) -> "Trunc":
        return Trunc(max_degree, self.bound)


def _add_w(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def _scale_w(a: tuple, k: int) -> tuple:
    return tuple(k * x for x in a)


def mul_series(a: dict, b: dict, tr: Trunc) -> dict:
    out: dict = {}
    for (da, wa), va in a.items():
        for (db, wb), vb in b.items():
            d = da + db
            w = _add_w(wa, wb)
            if tr.fits(d, w):
                out[(d, w)] = out.get((d, w), 0) + va * vb
    return out


def mul_factor(series: dict, key, exponent: int, exterior: bool, tr: Trunc) -> dict:
    """Multiply by (1+x)^e if ``exterior`` else by (1-x)^(-e), where x is the monomial ``key``."""
    if exponent == 0:
        return series
    deg, w = key
    if deg == 0 and not any(w):
        raise DegreeZeroGenerator("a weightless degree-0 generator has no truncated series")
    coeffs = [1]
    j = 1
    while tr.fits(j * deg, _scale_w(w, j)):
        coeffs.append(math.comb(exponent, j) if exterior else math.comb(exponent + j - 1, j))
        if exterior and j >= exponent:
            break
        j += 1
    steps = [(j * deg, _scale_w(w, j), c) for j, c in enumerate(coeffs) if c]
    fits = tr.fits
    out: dict = {}
    for (d, ww), v in series.items():
        for sd, sw, c in steps:
            nd = d + sd
            nw = tuple(x + y for x, y in zip(ww, sw))
            # truncation is downward closed, so larger powers cannot fit either
            if not fits(nd, nw):
                break
            k = (nd, nw)
            out[k] = out.get(k, 0) + v * c
    return out


def geometric(h: Mapping, zero_w: tuple, tr: Trunc) -> dict:
    """1 / (1 - h) truncated; h must have no degree-0 terms."""
    for (d, _), v in h.items():
        if d <= 0 and v:
            raise DegreeZeroGenerator("1/(1-h) needs h concentrated in positive degrees")
    out = {(0, zero_w): 1}
    by_deg: dict[int, list] = {0: [((0, zero_w), 1)]}
    for n in range(1, tr.max_degree + 1):
        acc: dict = {}
        for (hd, hw), hv in h.items():
            if hv == 0 or hd > n:
                continue
            for (_, tw), tv in by_deg.get(n - hd, ()):
                w = _add_w(hw, tw)
                if tr.fits(n, w):
                    acc[(n, w)] = acc.get((n, w), 0) + hv * tv
        acc = {k: v for k, v in acc.items() if v}
        by_deg[n] = list(acc.items())
        out.update(acc)
    return out


def pbw_solve(h: Mapping, zero_w: tuple, tr: Trunc, graded: bool = True) -> dict:
    """Exponents L with prod(factors) = 1/(1-h), solved degree by degree.

    Graded: odd-degree keys carry (1+x)^L and even-degree keys (1-x)^(-L).
    Ungraded (characteristic 2): every key carries (1-x)^(-L).
    """
    target = geometric(h, zero_w, tr)
    prod = {(0, zero_w): 1}
    lie: dict = {}
    for n in range(1, tr.max_degree + 1):
        keys = sorted({k for k in target if k[0] == n} | {k for k in prod if k[0] == n})
        new = []
        for k in keys:
            val = target.get(k, 0) - prod.get(k, 0)
            if val < 0:
                raise NonIntegralSolution(f"negative Lie dimension {val} at {k}")
            if val:
                lie[k] = val
                new.append((k, val))
        for k, val in new:
            prod = mul_factor(prod, k, val, graded and k[0] % 2 == 1, tr)
    return lie


def towers(lie: Mapping, p: int, tr: Trunc, even_only: bool) -> dict:
    """Iterated p-th powers (k >= 1): degree and weight both scale by p^k."""
    out: dict = {}
    for (d, w), v in lie.items():
        if even_only and d % 2:
            continue
        q = p
        while tr.fits(q * d, _scale_w(w, q)):
            key = (q * d, _scale_w(w, q))
            out[key] = out.get(key, 0) + v
            q *= p
    return out


def symmetric(gens: Mapping, zero_w: tuple, tr: Trunc, char: int) -> dict:
    """S[V]: exterior on odd and polynomial on even classes, all polynomial in characteristic 2."""
    out = {(0, zero_w): 1}
    for key in sorted(gens):
        v = gens[key]
        if v:
            out = mul_factor(out, key, v, char != 2 and key[0] % 2 == 1, tr)
    return out


# --------------------------------------------------------------------------
# One-variable wrappers


@dataclass(frozen=True)
class GradedDims:
    """Dimensions per degree 0..cutoff of a graded vector space."""

    dims: tuple[int, ...]

    @classmethod
    def of(cls, dims) -> "GradedDims":
        if isinstance(dims, (PoincarePoly, GradedDims, LieDims)):
            return cls(tuple(dims.coeffs if isinstance(dims, PoincarePoly) else dims.dims))
        if isinstance(dims, Mapping):
            top = max(dims, default=0)
            return cls(tuple(dims.get(d, 0) for d in range(top + 1)))
        return cls(tuple(int(x) for x in dims))

    @property
    def cutoff(self) -> int:
        return len(self.dims) - 1

    def __getitem__(self, d):
        return self.dims[d] if 0 <= d < len(self.dims) else 0

    def as_dict(self) -> dict:
        return {(d, ()): v for d, v in enumerate(self.dims) if v}


@dataclass(frozen=True)
class LieDims(GradedDims):
    """Lie algebra dimensions per degree; ``char`` records which PBW solve produced them."""

    char: int = 0


def _check_no_degree_zero(dims: GradedDims):
    if dims[0]:
        raise DegreeZeroGenerator("generators in degree 0 are not allowed here")


def free_lie_dims(W, cutoff: int, field: FieldSpec = QQ) -> LieDims:
    """Dimensions of the free graded Lie algebra on W, from the PBW identity.

    >>> free_lie_dims([0, 1], 4).dims
    (0, 1, 1, 0, 0)
    >>> free_lie_dims([0, 2], 2).dims
    (0, 2, 3)

    Over F_2 the bracket [x, x] is not a free class, so the solve is the
    ungraded one and p-th powers are added later by :func:`restricted_extension`.
    """
    W = GradedDims.of(W)
    _check_no_degree_zero(W)
    tr = Trunc(cutoff)
    lie = pbw_solve(W.as_dict(), (), tr, graded=field.char != 2)
    return LieDims(tuple(lie.get((d, ()), 0) for d in range(cutoff + 1)), field.char)


def restricted_extension(L: LieDims, p: int, cutoff: int) -> tuple[LieDims, LieDims]:
    """Add p-th power towers: returns (L^(p), W^p) where W^p holds only the towers.

    >>> Lp, Wp = restricted_extension(LieDims((0, 0, 1)), 3, 20)
    >>> [d for d, v in enumerate(Lp.dims) if v], [d for d, v in enumerate(Wp.dims) if v]
    ([2, 6, 18], [6, 18])
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    tr = Trunc(cutoff)
    base = {(d, ()): v for d, v in enumerate(L.dims[: cutoff + 1]) if v}
    tw = towers(base, p, tr, even_only=p != 2)
    wp = tuple(tw.get((d, ()), 0) for d in range(cutoff + 1))
    lp = tuple(L[d] + wp[d] for d in range(cutoff + 1))
    return LieDims(lp, p), LieDims(wp, p)


def symmetric_series(V, field: FieldSpec, cutoff: int) -> PoincarePoly:
    V = GradedDims.of(V)
    _check_no_degree_zero(V)
    s = symmetric(V.as_dict(), (), Trunc(cutoff), field.char)
    return PoincarePoly(tuple(s.get((d, ()), 0) for d in range(cutoff + 1)))


# --------------------------------------------------------------------------
# C_2(X u *)


def weighted_dims(classes: Sequence, names: Sequence | None = None) -> WeightedSeries:
    """One weight variable per entry of ``classes`` (each a Poincaré series of a space)."""
    k = len(classes)
    names = tuple(names) if names is not None else tuple(f"x{i}" for i in range(k))
    terms: dict = {}
    cutoff = 0
    for i, c in enumerate(classes):
        dims = GradedDims.of(c)
        cutoff = max(cutoff, dims.cutoff)
        w = tuple(1 if j == i else 0 for j in range(k))
        for d, v in enumerate(dims.dims):
            if v:
                terms[(d, w)] = terms.get((d, w), 0) + v
    return WeightedSeries.from_dict(cutoff, names, terms)


def _as_weighted(V) -> WeightedSeries:
    if isinstance(V, WeightedSeries):
        return V
    return weighted_dims([V])


def _make_trunc(V: WeightedSeries, cutoff: int, max_weight) -> Trunc:
    if max_weight is None:
        max_weight = DEFAULT_MAX_WEIGHT
    if isinstance(max_weight, int):
        if max_weight > DEFAULT_MAX_WEIGHT:
            raise WeightBoundExceeded(f"total weight bound {max_weight} exceeds {DEFAULT_MAX_WEIGHT}")
        return Trunc(cutoff, max_weight)
    bound = tuple(max_weight)
    if len(bound) != len(V.weight_vars):
        raise ValueError("weight bound has the wrong number of coordinates")
    if sum(bound) > DEFAULT_MAX_WEIGHT:
        raise WeightBoundExceeded(f"weight bound {bound} exceeds total {DEFAULT_MAX_WEIGHT}")
    return Trunc(cutoff, bound)


def c2_generators(V, field: FieldSpec, cutoff: int, max_weight=None) -> dict:
    """Generators of the symmetric algebra computing H_*(C_2(X u *); field)."""
    V = _as_weighted(V)
    tr = _make_trunc(V, cutoff, max_weight)
    zero = tuple(0 for _ in V.weight_vars)
    for (d, w), v in V.terms:
        if sum(w) == 0:
            raise ValueError("classes of V must carry positive weight")
    # W = sigma V, the Lie solve runs two degrees past the cutoff for sigma^-2.
    ltr = tr.with_degree(cutoff + 2)
    h = {(d + 1, w): v for (d, w), v in V.terms if ltr.fits(d + 1, w)}
    p = field.char
    lie = pbw_solve(h, zero, ltr, graded=p != 2)
    gens: dict = {}

    def put(d, w, v):
        if d <= cutoff and tr.fits(d, w):
            gens[(d, w)] = gens.get((d, w), 0) + v

    for (d, w), v in lie.items():
        put(d - 1, w, v)
    if p:
        for (d, w), v in towers(lie, p, ltr, even_only=p != 2).items():
            put(d - 1, w, v)
            if p != 2:
                put(d - 2, w, v)
    return gens


def c2_series(V, field: FieldSpec, cutoff: int, max_weight=None) -> WeightedSeries:
    """Weighted Poincaré series of C_2(X u *) from V = H_*(X; field).

    ``V`` is a WeightedSeries (or a single series, giving one weight variable).
    The coefficient at (d, w) is dim H_d of the weight-w piece E_w(X).
    ``max_weight`` is a total-weight int or a componentwise tuple.
    """
    V = _as_weighted(V)
    tr = _make_trunc(V, cutoff, max_weight)
    zero = tuple(0 for _ in V.weight_vars)
    gens = c2_generators(V, field, cutoff, max_weight)
    s = symmetric(gens, zero, tr, field.char)
    return WeightedSeries.from_dict(cutoff, V.weight_vars, s)


def gamma_series(V, field: FieldSpec, cutoff: int, max_weight=None) -> WeightedSeries:
    """c2_series without the unit and without the weight-1 copy of X."""
    s = c2_series(V, field, cutoff, max_weight)
    return s.without(lambda k: sum(k[1]) <= 1)
