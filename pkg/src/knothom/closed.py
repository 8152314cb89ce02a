"""Components of the closed embedding spaces Emb(S^1,S^3), Emb_*(S^1,S^3), Emb(S^1,R^3).

Models used (K is the long-knot component, X = K / SO(2)):

* unknot: S^3 x S^2, S^2 and SO(3) respectively;
* prime knots: S^3 x SO(3) x X, SO(3) x X and S^1 x SO(3) x X;
* sums of distinct primes: SO(3) x Conf(R^2, n) x T^(n-1) x prod X_i for the
  based space, times S^3 or S^1 for the other two.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import _series
from .errors import UnsupportedClass
from .expr import Sum, Unknot, canonical_text, canonicalize, check, young_classes
from .graded import (
    AbGroup,
    FieldSpec,
    GradedAb,
    PoincarePoly,
    field_betti,
    kunneth_all,
    kunneth_integral,
    so3,
    sphere,
    torus,
)
from .integral import _h1, integral_homology, split_circle

SPACES = ("s3", "star", "r3")


def _check_space(space: str):
    if space not in SPACES:
        raise ValueError(f"space must be one of {', '.join(SPACES)}, got {space!r}")


def conf_ranks(n: int, cutoff: int) -> GradedAb:
    """H_*(Conf(R^2, n); Z): torsion free with Poincaré polynomial prod (1 + k t)."""
    poly = [1]
    for k in range(1, n):
        nxt = [0] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i] += c
            nxt[i + 1] += k * c
        poly = nxt
    return GradedAb.from_ranks((poly + [0] * (cutoff + 1))[: cutoff + 1])


def quotient_homology(e, cutoff: int) -> GradedAb:
    """Integral homology of X(f) = K(f) / SO(2) for a prime knot f."""
    e = canonicalize(e)
    if isinstance(e, (Unknot, Sum)):
        raise UnsupportedClass("X(f) is defined here for prime knots only")
    return split_circle(integral_homology(e, cutoff + 1)).truncate(cutoff)


def _y_factors(e, cutoff: int) -> list[GradedAb]:
    """Factors of Y with K = S^1 x Y as SO(2)-spaces."""
    e = canonicalize(e)
    if isinstance(e, Unknot):
        raise UnsupportedClass("the unknot component is a point")
    if isinstance(e, Sum):
        classes = young_classes(e)
        if any(n > 1 for _, n in classes):
            raise UnsupportedClass(f"{canonical_text(e)} repeats a summand; the symmetric quotient is not modelled")
        n = len(e.children)
        return [conf_ranks(n, cutoff), torus(n - 1, cutoff)] + [quotient_homology(c, cutoff) for c, _ in classes]
    return [quotient_homology(e, cutoff)]


def _field_y(e, fld: FieldSpec, cutoff: int) -> PoincarePoly:
    e = canonicalize(e)
    if isinstance(e, Sum):
        classes = young_classes(e)
        if any(n > 1 for _, n in classes):
            raise UnsupportedClass(f"{canonical_text(e)} repeats a summand; the symmetric quotient is not modelled")
        n = len(e.children)
        acc = conf_ranks(n, cutoff).ranks() * torus(n - 1, cutoff).ranks()
        for c, _ in classes:
            acc = acc * _series(c, fld, cutoff + 1).divide_one_plus_t().truncate(cutoff)
        return acc
    return _series(e, fld, cutoff + 1).divide_one_plus_t().truncate(cutoff)


def closed_component_homology(e, space: str, coeff: FieldSpec | None, cutoff: int):
    """Homology of the component of ``e`` in a closed embedding space.

    ``coeff`` None means integral coefficients (returns GradedAb); a field
    returns a PoincarePoly.
    """
    _check_space(space)
    check(e)
    e = canonicalize(e)
    if isinstance(e, Unknot):
        if space == "s3":
            h = kunneth_integral(sphere(3, cutoff), sphere(2, cutoff), cutoff)
        elif space == "star":
            h = sphere(2, cutoff)
        else:
            h = so3(cutoff)
        return h if coeff is None else field_betti(h, coeff)
    extra = {"s3": sphere(3, cutoff), "star": None, "r3": sphere(1, cutoff)}[space]
    if coeff is None:
        parts = [so3(cutoff)] + _y_factors(e, cutoff)
        if extra is not None:
            parts.append(extra)
        return kunneth_all(parts, cutoff)
    acc = field_betti(so3(cutoff), coeff) * _field_y(e, coeff, cutoff)
    if extra is not None:
        acc = acc * extra.ranks()
    return acc


# --------------------------------------------------------------------------
# kappa and the Mayer-Vietoris sequences


@dataclass(frozen=True)
class KappaData:
    """kappa_n : H_{n-1}K -> H_nK on the split basis of H(S^1 x Y).

    H_nK = a0 (x) Y_n + a1 (x) Y_{n-1}; kappa sends a0 (x) y to a1 (x) y and
    kills a1 (x) Y. ``y`` holds the groups Y_n.
    """

    y: GradedAb

    def k_group(self, n: int) -> AbGroup:
        return self.y[n] + self.y[n - 1]

    def matrix(self, n: int) -> tuple:
        """Block matrix of kappa_n from (a0 Y_{n-1}, a1 Y_{n-2}) to (a0 Y_n, a1 Y_{n-1})."""
        return ((0, 0), (1, 0))

    def composite_is_zero(self, n: int) -> bool:
        a, b = self.matrix(n + 1), self.matrix(n)
        prod = [[sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
        return not any(any(r) for r in prod)


def _tau2(g: AbGroup) -> AbGroup:
    return g.killed_by(2)


def _mod2(g: AbGroup) -> AbGroup:
    return g.mod(2)


def kappa_ses(e, space: str, n: int) -> dict:
    """The two ends of 0 -> coker -> H_n(component) -> ker -> 0."""
    if space not in ("star", "r3"):
        raise ValueError("kappa sequences exist for the based space and for R^3")
    check(e)
    e = canonicalize(e)
    cutoff = max(n, 0) + 1
    if isinstance(e, Unknot):
        k = GradedAb.point(cutoff)
        if space == "star":
            coker, ker = k[n], k[n - 2]
        else:
            coker, ker = _mod2(k[n - 1]) + k[n], k[n - 3] + _tau2(k[n - 2])
    else:
        y = kunneth_all(_y_factors(e, cutoff), cutoff)
        kd = KappaData(y)
        if space == "star":
            coker = y[n] + _mod2(y[n - 1])
            ker = _tau2(y[n - 2]) + y[n - 3]
        else:
            coker = _mod2(kd.k_group(n - 1)) + kd.k_group(n)
            ker = kd.k_group(n - 3) + _tau2(kd.k_group(n - 2))
    exact = ker.is_zero() or coker.is_zero()
    middle = (coker + ker) if exact else None
    return {
        "expr": canonical_text(e),
        "space": space,
        "degree": n,
        "coker": coker,
        "ker": ker,
        "rank": coker.rank + ker.rank,
        "middle": middle,
        "exact": exact,
    }


# --------------------------------------------------------------------------
# Unknot detection


def unknot_detectors(e) -> dict:
    """Four homological tests, each answering "is this the unknot?".

    They need only H_1 and H_2 of the long-knot component:
    Emb(S^1,S^3): H_1 = H_1K / (2 Gramain), 2-torsion free iff H_1K = 0;
    Emb(S^1,R^3): H_1 = Z/2 + H_1K is torsion iff H_1K has rank 0, and
    H_2 = H_1K/2 + H_2K vanishes iff both do.
    """
    check(e)
    e = canonicalize(e)
    h1 = _h1(e)
    k = integral_homology(e, 2)
    s3 = h1.rank == 0 and h1.t2 == 0
    r3_h1 = h1.rank == 0
    r3_h2 = _mod2(k[1]).is_zero() and k[2].is_zero()
    long_h1 = k[1].is_zero()
    verdicts = {
        "s3_h1_no_2_torsion": s3,
        "r3_h1_torsion": r3_h1,
        "r3_h2_trivial": r3_h2,
        "long_h1_trivial": long_h1,
    }
    truth = isinstance(e, Unknot)
    return dict(verdicts, unknot=truth, consistent=all(v == truth for v in verdicts.values()))
