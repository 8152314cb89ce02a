"""Integral invariants: H_1 with its inversion action, torsion witnesses, low degrees."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .engine import _series, inversion_character
from .errors import CutoffTooSmall, MissingSymmetryData, UnsupportedClass
from .expr import Cable, HypSplice, Sum, Torus, Unknot, canonical_text, canonicalize, check, children_of, young_classes
from .graded import (
    AbGroup,
    FieldSpec,
    GradedAb,
    InvolutionH1,
    QQ,
    coinvariants_h1,
    is_prime,
    prime_power_exponent,
    primes_up_to,
)

FREE, ELEMENTARY, UNKNOWN = "free", "elementary", "unknown"


# --------------------------------------------------------------------------
# H_1


def h1_integral(e) -> InvolutionH1:
    """H_1 of the component with the inversion action split off.

    >>> h1_integral(Torus(3, 2))
    InvolutionH1(r_plus=0, r_minus=1, t2=0)
    """
    check(e)
    return _h1(canonicalize(e))


def _h1(e) -> InvolutionH1:
    if isinstance(e, Unknot):
        return InvolutionH1()
    if isinstance(e, Torus):
        return InvolutionH1(0, 1, 0)
    if isinstance(e, Cable):
        return _h1(e.child) + InvolutionH1(0, 1, 0)
    if isinstance(e, Sum):
        classes = young_classes(e)
        k = len(classes)
        l = sum(1 for _, n in classes if n > 1)
        out = InvolutionH1(0, l + math.comb(k, 2), 0)
        for c, _ in classes:
            out = out + _h1(c)
        return out
    if isinstance(e, HypSplice):
        if len(e.sym.reversals) != len(e.children) or len(e.sym.perm) != len(e.children):
            raise MissingSymmetryData(f"{e.name} needs a permutation and a reversal flag per child")
        out = InvolutionH1(0, 2, 0)
        for orb in e.sym.orbits():
            h = _h1(e.children[orb[0]])
            out = out + (coinvariants_h1(h) if e.sym.reversals[orb[0]] else h)
        return out
    raise TypeError(f"not a knot expression: {e!r}")


# --------------------------------------------------------------------------
# Torsion profile


def torsion_profile(e) -> str:
    """What is known about torsion orders: 'free', 'elementary' (all of prime order) or 'unknown'."""
    e = canonicalize(e)
    if isinstance(e, (Unknot, Torus)):
        return FREE
    if isinstance(e, Cable):
        return torsion_profile(e.child)
    if isinstance(e, Sum):
        return ELEMENTARY if all(torsion_profile(c) == FREE for c in e.children) else UNKNOWN
    if isinstance(e, HypSplice):
        kids = [torsion_profile(c) for c in e.children]
        if e.sym.order == 1 or not e.children:
            if all(k == FREE for k in kids):
                return FREE
            return ELEMENTARY if all(k != UNKNOWN for k in kids) else UNKNOWN
        if all(is_circle_product(c) for c in e.children):
            return ELEMENTARY
        return UNKNOWN
    raise TypeError(f"not a knot expression: {e!r}")


def is_circle_product(e) -> bool:
    """Components that are products of circles: torus knots, hyperbolic knots and their cables."""
    if isinstance(e, Torus):
        return True
    if isinstance(e, HypSplice):
        return not e.children
    if isinstance(e, Cable):
        return is_circle_product(e.child)
    return False


# --------------------------------------------------------------------------
# Integral homology from field series


def _torsion_primes(cutoff: int) -> list[int]:
    # odd p-torsion first appears in degree 2p - 2
    return [p for p in primes_up_to(cutoff + 2) if p == 2 or 2 * p - 2 <= cutoff]


def integral_homology(e, cutoff: int, pins: dict | None = None) -> GradedAb:
    """H_*(component; Z) through ``cutoff`` from the rational and mod-p series.

    Ranks and the number of cyclic p-primary summands are exact. Orders are
    exact when the torsion profile is elementary (or a degree is torsion
    free, or ``pins`` fixes the order); otherwise they are lower bounds.
    """
    check(e)
    e = canonicalize(e)
    q = _series(e, QQ, cutoff)
    profile = torsion_profile(e)
    counts: dict[int, list[int]] = {}
    for p in _torsion_primes(cutoff):
        s = _series(e, FieldSpec(p), cutoff)
        prev = 0
        row = []
        for d in range(cutoff + 1):
            t = s[d] - q[d] - prev
            if t < 0:
                raise AssertionError(f"mod-{p} series below rational series at degree {d}")
            row.append(t)
            prev = t
        counts[p] = row
    h1 = _h1(e) if cutoff >= 1 else None
    groups = []
    for d in range(cutoff + 1):
        tors = []
        for p, row in counts.items():
            tors += [p] * row[d]
        if d == 1:
            if h1.rank != q[1] or h1.t2 != counts[2][1] or any(counts[p][1] for p in counts if p != 2):
                raise AssertionError(f"H_1 of {canonical_text(e)} disagrees with the series")
            groups.append(h1.group())
            continue
        pinned = (pins or {}).get(d)
        if pinned is not None:
            groups.append(pinned)
            continue
        exact = not tors or profile != UNKNOWN
        groups.append(AbGroup(q[d], tuple(tors), exact, True))
    return GradedAb(tuple(groups))


def split_circle(k: GradedAb) -> GradedAb:
    """X with H(K) = H(S^1 x X): X_0 = K_0 and X_n = K_n minus X_{n-1}."""
    out = []
    prev = AbGroup()
    for g in k.groups:
        tors = list(g.torsion)
        for x in prev.torsion:
            tors.remove(x)
        cur = AbGroup(g.rank - prev.rank, tuple(tors), g.exact and prev.exact, g.counts_exact and prev.counts_exact)
        out.append(cur)
        prev = cur
    return GradedAb(tuple(out))


def twist_integral(e: HypSplice, cutoff: int) -> GradedAb:
    """H_*(SO(2) x_A prod children; Z) for circle-product children.

    H(Y; Z) is a signed permutation module, so H_n is Z^(pos_n + pos_{n-1})
    plus (Z/2)^(neg_n), counting orbits of basis tensors with trivial and
    nontrivial holonomy.
    """
    if not all(is_circle_product(c) for c in e.children):
        raise UnsupportedClass("twisted integral homology needs circle-product children")
    from .engine import _pmul, _ppow

    n = cutoff
    m = e.sym.order
    data = []
    for orb in e.sym.orbits():
        child = e.children[orb[0]]
        h = list(_series(child, QQ, n).coeffs)
        chars = inversion_character(child, n) if e.sym.reversals[orb[0]] else None
        data.append((len(orb), h, chars))

    def burnside(signed: bool) -> list:
        total = [0] * (n + 1)
        for k in range(m):
            acc = [1] + [0] * n
            for ell, h, chars in data:
                c = math.gcd(k, ell)
                r = ell // c
                j = (k // c) if chars is not None else 0
                cyc = [0] * (n + 1)
                for d in range(n // r + 1):
                    coef = h[d]
                    if signed:
                        if j % 2:
                            coef = chars[0][d] - chars[1][d]
                        if (d * (r - 1)) % 2:
                            coef = -coef
                    cyc[r * d] += coef
                acc = _pmul(acc, _ppow(cyc, c, n), n)
            total = [a + b for a, b in zip(total, acc)]
        return [x // m for x in total]

    pos = burnside(True)
    allo = burnside(False)
    neg = [a - b for a, b in zip(allo, pos)]
    return GradedAb(tuple(AbGroup(pos[d] + (pos[d - 1] if d else 0), (2,) * neg[d]) for d in range(n + 1)))


# --------------------------------------------------------------------------
# Low degrees


def reconstruct_low_degrees(e, up_to: int = 3) -> GradedAb:
    """Exact integral homology in degrees <= 3 where the data pins it down.

    Odd torsion cannot occur below degree 4, so only 2-torsion is counted.
    Orders of 2-torsion are exact for elementary profiles, or when a
    witness of the same order is the only 2-primary summand in its degree.
    """
    if up_to > 3:
        raise CutoffTooSmall("low-degree reconstruction only goes up to degree 3")
    check(e)
    e = canonicalize(e)
    base = integral_homology(e, up_to)
    if torsion_profile(e) != UNKNOWN:
        return base
    wit = _collect(e, 2, up_to, (), local_r5=False)
    groups = list(base.groups)
    for d in range(2, up_to + 1):
        g = groups[d]
        if g.exact:
            continue
        two = g.p_torsion(2)
        w = wit.get((d, 2))
        if len(two) == 1 and w is not None:
            rest = tuple(x for x in g.torsion if x % 2)
            groups[d] = AbGroup(g.rank, rest + (w.order,), True)
    return GradedAb(tuple(groups))


def check_low_degree_torsion_free(e, p: int) -> dict:
    """Compare mod-p and rational series below degree 2p - 2."""
    check(e)
    if p == 2 or not is_prime(p):
        raise ValueError("the torsion floor is stated for odd primes")
    top = 2 * p - 3
    q = _series(canonicalize(e), QQ, top)
    s = _series(canonicalize(e), FieldSpec(p), top)
    first = next((d for d in range(top + 1) if q[d] != s[d]), None)
    return {"expr": canonical_text(e), "p": p, "degrees": top + 1, "passed": first is None, "first_failure": first}


# --------------------------------------------------------------------------
# Torsion witnesses


@dataclass(frozen=True)
class TorsionWitness:
    """Z/order is a direct summand of H_degree of the component."""

    degree: int
    order: int
    rule: str
    path: tuple
    sources: tuple = field(default=())

    @property
    def prime(self) -> int:
        return prime_power_exponent(self.order)[0]

    def provenance(self) -> dict:
        return {
            "rule": self.rule,
            "path": list(self.path),
            "degree": self.degree,
            "order": self.order,
            "from": [s.provenance() for s in self.sources],
        }

    def render(self) -> str:
        return f"({self.degree}, Z/{self.order})"


def torsion_witnesses(e, p: int, max_degree: int) -> list[TorsionWitness]:
    """Guaranteed Z/p^s summands of the component's integral homology.

    Rules: R1 (p-fold sum of a knot with odd-degree mod-p homology), R2
    (p^r-fold sum of a knot with an odd-degree witness), R3 (cabling keeps
    a witness and shifts a copy up one degree), R4 (2-torsion in H_1) and
    R5 (torsion found exactly by the low-degree reconstruction).
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    check(e)
    found = _collect(canonicalize(e), p, max_degree, (), local_r5=True)
    return sorted(found.values(), key=lambda w: (w.degree, w.order, w.rule))


def _keep(acc: dict, w: TorsionWitness):
    key = (w.degree, w.prime)
    old = acc.get(key)
    if old is None or w.order > old.order or (w.order == old.order and w.rule < old.rule):
        acc[key] = w


def _collect(e, p: int, maxdeg: int, path: tuple, local_r5: bool) -> dict:
    acc: dict = {}
    kids = {i: _collect(c, p, maxdeg, path + (i,), True) for i, c in enumerate(children_of(e))}
    if p == 2 and maxdeg >= 1:
        t2 = _h1(e).t2
        if t2:
            _keep(acc, TorsionWitness(1, 2, "R4", path))
    if isinstance(e, Cable):
        for w in kids[0].values():
            _keep(acc, TorsionWitness(w.degree, w.order, "R3", path, (w,)))
            if w.degree + 1 <= maxdeg:
                _keep(acc, TorsionWitness(w.degree + 1, w.order, "R3", path, (w,)))
    if isinstance(e, Sum):
        classes = young_classes(e)
        if len(classes) == 1:
            g, n = classes[0]
            r = _log(n, p)
            if n == p:
                t_max = (maxdeg + 2) // (2 * p)
                if t_max >= 1:
                    s = _series(g, FieldSpec(p), 2 * t_max - 1)
                    for t in range(1, t_max + 1):
                        if s[2 * t - 1]:
                            _keep(acc, TorsionWitness(2 * p * t - 2, p, "R1", path, ()))
            if r:
                for w in kids[0].values():
                    if w.degree % 2 == 1:
                        t = (w.degree + 1) // 2
                        deg = 2 * t * n - 1
                        if deg <= maxdeg:
                            _keep(acc, TorsionWitness(deg, w.order * n, "R2", path, (w,)))
    if local_r5 and p == 2 and maxdeg >= 2 and torsion_profile(e) != FREE:
        low = reconstruct_low_degrees(e, min(3, maxdeg))
        for d in range(2, len(low.groups)):
            g = low.groups[d]
            if g.exact:
                for q in g.p_torsion(2):
                    _keep(acc, TorsionWitness(d, q, "R5", path))
    return acc


def _log(n: int, p: int) -> int:
    """r with n = p^r and r >= 1, else 0."""
    r = 0
    while n > 1 and n % p == 0:
        n //= p
        r += 1
    return r if n == 1 else 0
