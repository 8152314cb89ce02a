"""Field-coefficient Poincaré series of long-knot components.

A component is modelled recursively on the companionship tree: torus knots
give a circle, cabling multiplies by a circle, connected sums give a piece of
C_2 of the summands, and hyperbolic splices give S^1 x (SO(2) x_A product).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

from .errors import InvalidExpression, UnsupportedSymmetry
from .expr import Cable, HypSplice, Sum, Torus, Unknot, canonical_text, canonicalize, check, is_prime, young_classes
from .functors import c2_series, weighted_dims
from .graded import FieldSpec, PoincarePoly, WeightedSeries


@dataclass(frozen=True)
class Point:
    pass


@dataclass(frozen=True)
class Circle:
    pass


@dataclass(frozen=True)
class Product:
    factors: tuple


@dataclass(frozen=True)
class EPiece:
    """Conf(R^2, n) x_{Young} prod X_i^{mult_i}; ``parts`` pairs models with multiplicities."""

    n: int
    parts: tuple


@dataclass(frozen=True)
class CyclicTwist:
    """SO(2) x_A (children), A cyclic of order m; its homology circle is included."""

    m: int
    children: tuple
    perm: tuple
    reversals: tuple


def component_model(e):
    """Structural homotopy model of the component of ``e``."""
    e = canonicalize(e)
    if isinstance(e, Unknot):
        return Point()
    if isinstance(e, Torus):
        return Circle()
    if isinstance(e, Cable):
        return Product((Circle(), component_model(e.child)))
    if isinstance(e, Sum):
        parts = tuple((component_model(c), n) for c, n in young_classes(e))
        return EPiece(len(e.children), parts)
    if isinstance(e, HypSplice):
        kids = tuple(component_model(c) for c in e.children)
        if not kids:
            return Product((Circle(), Circle()))
        if e.sym.order == 1:
            return Product((Circle(), Circle()) + kids)
        return Product((Circle(), CyclicTwist(e.sym.order, kids, e.sym.perm, e.sym.reversals)))
    raise TypeError(f"not a knot expression: {e!r}")


# --------------------------------------------------------------------------
# Polynomial helpers with signed coefficients


def _pmul(a: list, b: list, n: int) -> list:
    out = [0] * (n + 1)
    for i, x in enumerate(a[: n + 1]):
        if x:
            for j, y in enumerate(b[: n + 1 - i]):
                out[i + j] += x * y
    return out


def _ppow(a: list, k: int, n: int) -> list:
    out = [1] + [0] * n
    for _ in range(k):
        out = _pmul(out, a, n)
    return out


_ONE_T = [1, 1]


# --------------------------------------------------------------------------
# Inversion characters


def inversion_character(e, cutoff: int) -> tuple[list, list]:
    """(plus, minus): dimensions of the +1 and -1 parts of the inversion on H_*.

    Known for torus knots, hyperbolic knots and iterated cables of those. The
    answer is characteristic independent wherever it is used (char != 2).
    """
    n = cutoff
    if isinstance(e, Unknot):
        return [1] + [0] * n, [0] * (n + 1)
    if isinstance(e, Torus):
        return _pad([1], n), _pad([0, 1], n)
    if isinstance(e, HypSplice) and not e.children:
        return _pad([1, 0, 1], n), _pad([0, 2], n)
    if isinstance(e, Cable):
        p, m = inversion_character(e.child, cutoff)
        tp = [0] + p[:n]
        tm = [0] + m[:n]
        return [a + b for a, b in zip(p, tm)], [a + b for a, b in zip(m, tp)]
    raise UnsupportedSymmetry(f"the inversion action on the component of {canonical_text(e)} is not known")


def _pad(a, n):
    return (list(a) + [0] * (n + 1))[: n + 1]


# --------------------------------------------------------------------------
# Series


_CACHE: dict = {}
_LOCK = threading.Lock()


def clear_cache():
    with _LOCK:
        _CACHE.clear()


def component_series(e, field: FieldSpec, cutoff: int) -> PoincarePoly:
    """Poincaré polynomial of the component of ``e``, degrees 0..cutoff."""
    check(e)
    return _series(canonicalize(e), field, cutoff)


def _series(e, field: FieldSpec, cutoff: int) -> PoincarePoly:
    key = (canonical_text(e), field.char, cutoff)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    val = _compute(e, field, cutoff)
    with _LOCK:
        _CACHE[key] = val
    return val


def _compute(e, field: FieldSpec, cutoff: int) -> PoincarePoly:
    circ = PoincarePoly.of(_ONE_T, cutoff)
    if isinstance(e, Unknot):
        return PoincarePoly.one(cutoff)
    if isinstance(e, Torus):
        return circ
    if isinstance(e, Cable):
        return circ * _series(e.child, field, cutoff)
    if isinstance(e, Sum):
        classes = young_classes(e)
        V = weighted_dims([_series(c, field, cutoff) for c, _ in classes])
        mult = tuple(n for _, n in classes)
        s = c2_series(V, field, cutoff, max_weight=mult)
        return s.slice(mult)
    if isinstance(e, HypSplice):
        if not e.children:
            return circ * circ
        return circ * circ * twist_fixed_series(e, field, cutoff)
    raise TypeError(f"not a knot expression: {e!r}")


def twist_fixed_series(e: HypSplice, field: FieldSpec, cutoff: int) -> PoincarePoly:
    """Dimensions of the A-fixed part of H_*(prod of children; field).

    H_* of SO(2) x_A Y is (1 + t) times this, by the Wang sequence. The
    fixed dimension is the number of basis orbits with trivial holonomy,
    counted by a signed Burnside sum that is valid in every characteristic.
    """
    n = cutoff
    m = e.sym.order
    orbits = e.sym.orbits()
    data = []
    for orb in orbits:
        child = e.children[orb[0]]
        h = list(_series(child, field, cutoff).coeffs)
        rev = e.sym.reversals[orb[0]]
        chars = inversion_character(child, cutoff) if rev and field.char != 2 else None
        data.append((len(orb), h, rev, chars))
    total = [0] * (n + 1)
    for k in range(m):
        acc = [1] + [0] * n
        for ell, h, rev, chars in data:
            c = math.gcd(k, ell)
            r = ell // c
            j = (k // c) if rev else 0
            cyc = [0] * (n + 1)
            for d in range(n // r + 1):
                if field.char == 2:
                    coef = h[d]
                elif j % 2 and chars is not None:
                    coef = chars[0][d] - chars[1][d]
                else:
                    coef = h[d]
                if field.char != 2 and (d * (r - 1)) % 2:
                    coef = -coef
                cyc[r * d] += coef
            acc = _pmul(acc, _ppow(cyc, c, n), n)
        total = [a + b for a, b in zip(total, acc)]
    if any(x % m for x in total):
        raise AssertionError(f"orbit count is not integral: {total} / {m}")
    return PoincarePoly(tuple(x // m for x in total))


def total_series(generators, field: FieldSpec, cutoff: int, max_weight=None) -> WeightedSeries:
    """Homology of the union of components generated from the given primes by connected sum.

    ``generators`` is a list of (expression, weight class label); expressions
    sharing a label share a weight variable.
    """
    labels: list = []
    by_label: dict = {}
    for ex, label in generators:
        if not is_prime(ex):
            raise InvalidExpression([f"{canonical_text(ex)} is not prime"])
        s = component_series(ex, field, cutoff)
        if label not in by_label:
            labels.append(label)
            by_label[label] = s
        else:
            by_label[label] = by_label[label] + s
    V = weighted_dims([by_label[l] for l in labels], names=[str(l) for l in labels])
    return c2_series(V, field, cutoff, max_weight)
