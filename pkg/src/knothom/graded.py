"""Truncated Poincaré series, integral graded groups and the H_1 involution calculus.

Everything here is immutable. Coefficients and torsion orders are Python ints,
so there is no overflow to worry about.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import CutoffTooSmall, Inexact, NotDivisible


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def primes_up_to(n: int) -> list[int]:
    return [k for k in range(2, n + 1) if is_prime(k)]


def prime_power_factors(n: int) -> list[int]:
    """Split n > 1 into its prime-power parts, e.g. 12 -> [4, 3]."""
    if n < 2:
        raise ValueError(f"torsion order must exceed 1, got {n}")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            q = 1
            while n % p == 0:
                n //= p
                q *= p
            out.append(q)
        p += 1
    if n > 1:
        out.append(n)
    return out


def prime_of(q: int) -> int:
    """The prime p of a prime power q = p^k."""
    parts = prime_power_factors(q)
    if len(parts) != 1:
        raise ValueError(f"{q} is not a prime power")
    p = 2
    while q % p:
        p += 1
    return p


def prime_power_exponent(q: int) -> tuple[int, int]:
    p = prime_of(q)
    k = 0
    while q > 1:
        q //= p
        k += 1
    return p, k


# --------------------------------------------------------------------------
# Fields


@dataclass(frozen=True)
class FieldSpec:
    """Coefficient field: characteristic 0 (the rationals) or a prime p."""

    char: int = 0

    def __post_init__(self):
        if self.char != 0 and not is_prime(self.char):
            raise ValueError(f"field characteristic must be 0 or prime, got {self.char}")

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        t = text.strip().lower()
        if t in ("q", "0", "rational", "rationals"):
            return cls(0)
        if t.startswith("f") and t[1:].isdigit():
            return cls(int(t[1:]))
        if t.isdigit():
            return cls(int(t))
        raise ValueError(f"unknown coefficient field {text!r}")

    @property
    def name(self) -> str:
        return "Q" if self.char == 0 else f"F{self.char}"

    def __str__(self):
        return self.name


QQ = FieldSpec(0)
F2 = FieldSpec(2)
F3 = FieldSpec(3)


# --------------------------------------------------------------------------
# Poincaré polynomials


def _render_terms(coeffs: Sequence[int], var: str = "t") -> str:
    parts = []
    for d, c in enumerate(coeffs):
        if c == 0:
            continue
        if d == 0:
            parts.append(str(c))
            continue
        mono = var if d == 1 else f"{var}^{d}"
        parts.append(mono if c == 1 else f"{c}{mono}")
    return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class PoincarePoly:
    """Graded dimensions in degrees 0..cutoff.

    Products and sums truncate to the smaller cutoff of the operands; nothing
    above ``cutoff`` is ever read or invented.
    """

    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("a PoincarePoly needs at least degree 0")
        if any(c < 0 for c in self.coeffs):
            raise ValueError(f"negative coefficient in {self.coeffs}")

    @classmethod
    def of(cls, coeffs: Iterable[int], cutoff: int | None = None) -> "PoincarePoly":
        cs = [int(c) for c in coeffs]
        if cutoff is not None:
            cs = (cs + [0] * (cutoff + 1))[: cutoff + 1]
        return cls(tuple(cs))

    @classmethod
    def one(cls, cutoff: int) -> "PoincarePoly":
        return cls.of([1], cutoff)

    @property
    def cutoff(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, d: int) -> int:
        if d < 0:
            return 0
        if d > self.cutoff:
            raise CutoffTooSmall(f"degree {d} requested from series truncated at {self.cutoff}")
        return self.coeffs[d]

    def truncate(self, cutoff: int) -> "PoincarePoly":
        if cutoff > self.cutoff:
            raise CutoffTooSmall(f"cannot extend series truncated at {self.cutoff} to {cutoff}")
        return PoincarePoly(self.coeffs[: cutoff + 1])

    def __add__(self, other: "PoincarePoly") -> "PoincarePoly":
        n = min(self.cutoff, other.cutoff)
        return PoincarePoly(tuple(self.coeffs[d] + other.coeffs[d] for d in range(n + 1)))

    def __mul__(self, other: "PoincarePoly") -> "PoincarePoly":
        n = min(self.cutoff, other.cutoff)
        out = [0] * (n + 1)
        for i, a in enumerate(self.coeffs[: n + 1]):
            if a:
                for j, b in enumerate(other.coeffs[: n + 1 - i]):
                    out[i + j] += a * b
        return PoincarePoly(tuple(out))

    def shift(self, k: int) -> "PoincarePoly":
        """Multiply by t^k, keeping the cutoff."""
        return PoincarePoly.of([0] * k + list(self.coeffs), self.cutoff)

    def divide_one_plus_t(self) -> "PoincarePoly":
        """Exact division by (1 + t); raises NotDivisible on a negative coefficient."""
        out = []
        prev = 0
        for c in self.coeffs:
            q = c - prev
            if q < 0:
                raise NotDivisible(f"{self} is not divisible by 1 + t")
            out.append(q)
            prev = q
        return PoincarePoly(tuple(out))

    def render(self) -> str:
        return _render_terms(self.coeffs)

    def to_json(self) -> list[int]:
        return list(self.coeffs)

    @classmethod
    def from_json(cls, data) -> "PoincarePoly":
        return cls(tuple(int(c) for c in data))

    def __str__(self):
        return self.render()


def circle_poly(cutoff: int) -> PoincarePoly:
    return PoincarePoly.of([1, 1], cutoff)


# --------------------------------------------------------------------------
# Weighted series


WeightKey = tuple[int, tuple[int, ...]]


@dataclass(frozen=True)
class WeightedSeries:
    """Dimensions indexed by (degree, weight vector), truncated in degree.

    ``weight_vars`` labels the coordinates of the weight vectors.
    """

    cutoff: int
    weight_vars: tuple
    terms: tuple[tuple[WeightKey, int], ...] = field(default=())

    @classmethod
    def from_dict(cls, cutoff: int, weight_vars: Sequence, terms: Mapping[WeightKey, int]) -> "WeightedSeries":
        items = tuple(sorted((k, int(v)) for k, v in terms.items() if v and k[0] <= cutoff))
        for (d, w), v in items:
            if v < 0 or any(x < 0 for x in w) or len(w) != len(weight_vars):
                raise ValueError(f"bad weighted term {(d, w)}: {v}")
        return cls(cutoff, tuple(weight_vars), items)

    def as_dict(self) -> dict[WeightKey, int]:
        return dict(self.terms)

    def __getitem__(self, key: WeightKey) -> int:
        return self.as_dict().get((key[0], tuple(key[1])), 0)

    def weights(self) -> list[tuple[int, ...]]:
        return sorted({w for (_, w), _ in self.terms})

    def slice(self, weight: Sequence[int]) -> PoincarePoly:
        w = tuple(weight)
        out = [0] * (self.cutoff + 1)
        for (d, ww), v in self.terms:
            if ww == w:
                out[d] += v
        return PoincarePoly(tuple(out))

    def slice_total_weight(self, n: int) -> PoincarePoly:
        out = [0] * (self.cutoff + 1)
        for (d, ww), v in self.terms:
            if sum(ww) == n:
                out[d] += v
        return PoincarePoly(tuple(out))

    def total(self) -> PoincarePoly:
        """All weights summed; this is the one-variable specialisation."""
        out = [0] * (self.cutoff + 1)
        for (d, _), v in self.terms:
            out[d] += v
        return PoincarePoly(tuple(out))

    def without(self, pred) -> "WeightedSeries":
        return WeightedSeries(self.cutoff, self.weight_vars, tuple((k, v) for k, v in self.terms if not pred(k)))


# --------------------------------------------------------------------------
# Integral graded groups


@dataclass(frozen=True)
class AbGroup:
    """Z^rank plus cyclic prime-power summands.

    ``exact`` False means the torsion orders are lower bounds. ``counts_exact``
    False additionally says the list of summands may be incomplete; only a
    witness-style "contains these summands" statement is being made.
    """

    rank: int = 0
    torsion: tuple[int, ...] = ()
    exact: bool = True
    counts_exact: bool = True

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("negative rank")
        parts = []
        for q in self.torsion:
            parts.extend(prime_power_factors(q))
        object.__setattr__(self, "torsion", tuple(sorted(parts)))
        if self.exact and not self.counts_exact:
            object.__setattr__(self, "counts_exact", True)

    @classmethod
    def free(cls, rank: int) -> "AbGroup":
        return cls(rank)

    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def torsion_count(self, p: int) -> int:
        return sum(1 for q in self.torsion if q % p == 0)

    def p_torsion(self, p: int) -> tuple[int, ...]:
        return tuple(q for q in self.torsion if q % p == 0)

    def mod(self, n: int) -> "AbGroup":
        """G / nG."""
        out = []
        for q in self.torsion:
            g = math.gcd(q, n)
            if g > 1:
                out.append(g)
        for p in prime_power_factors(n) if n > 1 else []:
            out.extend([p] * self.rank)
        return AbGroup(0, tuple(out), self.exact)

    def killed_by(self, n: int) -> "AbGroup":
        """The n-torsion subgroup {x : n x = 0}."""
        out = []
        for q in self.torsion:
            g = math.gcd(q, n)
            if g > 1:
                out.append(g)
        return AbGroup(0, tuple(out), self.exact)

    def __add__(self, other: "AbGroup") -> "AbGroup":
        return AbGroup(
            self.rank + other.rank,
            self.torsion + other.torsion,
            self.exact and other.exact,
            self.counts_exact and other.counts_exact,
        )

    def render(self) -> str:
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        counts: dict[int, int] = {}
        for q in self.torsion:
            counts[q] = counts.get(q, 0) + 1
        for q in sorted(counts):
            c = counts[q]
            parts.append(f"Z/{q}" if c == 1 else f"(Z/{q})^{c}")
        text = " + ".join(parts) if parts else "0"
        if not self.exact:
            text += " (lower bound)"
        return text

    def __str__(self):
        return self.render()


def _torsion_strings(torsion: Sequence[int]) -> list[str]:
    out = []
    for q in torsion:
        p, k = prime_power_exponent(q)
        out.append(f"{p}^{k}")
    return out


def _parse_torsion_string(s: str) -> int:
    p, k = s.split("^")
    return int(p) ** int(k)


@dataclass(frozen=True)
class GradedAb:
    """Integral homology in degrees 0..cutoff, one AbGroup per degree."""

    groups: tuple[AbGroup, ...]

    def __post_init__(self):
        if not self.groups:
            raise ValueError("a GradedAb needs at least degree 0")

    @classmethod
    def of(cls, groups: Iterable, cutoff: int | None = None) -> "GradedAb":
        gs = []
        for g in groups:
            if isinstance(g, AbGroup):
                gs.append(g)
            elif isinstance(g, int):
                gs.append(AbGroup(g))
            else:
                rank, tors = g
                gs.append(AbGroup(rank, tuple(tors)))
        if cutoff is not None:
            gs = (gs + [AbGroup()] * (cutoff + 1))[: cutoff + 1]
        return cls(tuple(gs))

    @classmethod
    def point(cls, cutoff: int = 0) -> "GradedAb":
        return cls.of([1], cutoff)

    @classmethod
    def from_ranks(cls, ranks: Iterable[int]) -> "GradedAb":
        return cls(tuple(AbGroup(r) for r in ranks))

    @property
    def cutoff(self) -> int:
        return len(self.groups) - 1

    def __getitem__(self, d: int) -> AbGroup:
        if d < 0:
            return AbGroup()
        if d > self.cutoff:
            raise CutoffTooSmall(f"degree {d} requested from groups truncated at {self.cutoff}")
        return self.groups[d]

    def truncate(self, cutoff: int) -> "GradedAb":
        if cutoff > self.cutoff:
            raise CutoffTooSmall(f"cannot extend groups truncated at {self.cutoff} to {cutoff}")
        return GradedAb(self.groups[:cutoff + 1])

    def ranks(self) -> PoincarePoly:
        return PoincarePoly(tuple(g.rank for g in self.groups))

    def is_exact(self) -> bool:
        return all(g.exact for g in self.groups)

    def has_torsion(self) -> bool:
        return any(g.torsion for g in self.groups)

    def to_json(self) -> list[dict]:
        out = []
        for d, g in enumerate(self.groups):
            entry = {"degree": d, "rank": g.rank, "torsion": _torsion_strings(g.torsion), "exact": g.exact}
            if not g.exact:
                entry["counts_exact"] = g.counts_exact
            out.append(entry)
        return out

    @classmethod
    def from_json(cls, data) -> "GradedAb":
        entries = sorted(data, key=lambda e: e["degree"])
        if [e["degree"] for e in entries] != list(range(len(entries))):
            raise ValueError("degrees must be 0..cutoff without gaps")
        return cls(tuple(
            AbGroup(
                e["rank"],
                tuple(_parse_torsion_string(s) for s in e["torsion"]),
                e["exact"],
                e.get("counts_exact", True),
            )
            for e in entries
        ))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def render(self) -> str:
        return "\n".join(f"H_{d} = {g.render()}" for d, g in enumerate(self.groups))


def _tensor(a: AbGroup, b: AbGroup) -> AbGroup:
    tors = []
    tors += list(b.torsion) * a.rank
    tors += list(a.torsion) * b.rank
    tors += _tor_parts(a.torsion, b.torsion)
    return AbGroup(a.rank * b.rank, tuple(tors))


def _tor_parts(ta: Sequence[int], tb: Sequence[int]) -> list[int]:
    out = []
    for x in ta:
        for y in tb:
            g = math.gcd(x, y)
            if g > 1:
                out.append(g)
    return out


def kunneth_integral(a: GradedAb, b: GradedAb, cutoff: int) -> GradedAb:
    """Integral homology of a product from the homology of its factors."""
    if a.cutoff < cutoff or b.cutoff < cutoff:
        raise CutoffTooSmall(f"Künneth to degree {cutoff} needs both inputs to that degree")
    for g in a.groups[: cutoff + 1] + b.groups[: cutoff + 1]:
        if not g.exact:
            raise Inexact("Künneth needs exact groups in every degree up to the cutoff")
    out = []
    for n in range(cutoff + 1):
        acc = AbGroup()
        for i in range(n + 1):
            acc = acc + _tensor(a[i], b[n - i])
        for i in range(n):
            acc = acc + AbGroup(0, tuple(_tor_parts(a[i].torsion, b[n - 1 - i].torsion)))
        out.append(acc)
    return GradedAb(tuple(out))


def kunneth_all(factors: Sequence[GradedAb], cutoff: int) -> GradedAb:
    acc = GradedAb.point(cutoff)
    for f in factors:
        acc = kunneth_integral(acc, f, cutoff)
    return acc


def mod_p_betti(a: GradedAb, p: int) -> PoincarePoly:
    """Betti numbers with F_p coefficients, by the universal coefficient theorem.

    Only the number of p-primary cyclic summands matters, so degrees whose
    orders are lower bounds are accepted as long as their counts are exact.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    for d, g in enumerate(a.groups):
        if not g.counts_exact:
            raise Inexact(f"degree {d} is only known up to unspecified summands")
    out = []
    for n in range(a.cutoff + 1):
        out.append(a[n].rank + a[n].torsion_count(p) + a[n - 1].torsion_count(p))
    return PoincarePoly(tuple(out))


def field_betti(a: GradedAb, fld: FieldSpec) -> PoincarePoly:
    if fld.char == 0:
        for d, g in enumerate(a.groups):
            if not g.counts_exact:
                raise Inexact(f"degree {d} rank unknown")
        return a.ranks()
    return mod_p_betti(a, fld.char)


# Commonly used spaces.

def sphere(n: int, cutoff: int) -> GradedAb:
    ranks = [0] * (max(cutoff, n) + 1)
    ranks[0] += 1
    ranks[n] += 1
    return GradedAb.from_ranks(ranks[: cutoff + 1])


def so3(cutoff: int) -> GradedAb:
    return GradedAb.of([1, (0, (2,)), 0, 1], cutoff)


def torus(k: int, cutoff: int) -> GradedAb:
    return GradedAb.from_ranks([math.comb(k, d) for d in range(cutoff + 1)])


# --------------------------------------------------------------------------
# H_1 with an involution


@dataclass(frozen=True)
class InvolutionH1:
    """Z^r_plus (trivial action) + Z^r_minus (negation) + (Z/2)^t2."""

    r_plus: int = 0
    r_minus: int = 0
    t2: int = 0

    def __post_init__(self):
        if min(self.r_plus, self.r_minus, self.t2) < 0:
            raise ValueError("InvolutionH1 entries must be non-negative")

    def __add__(self, other: "InvolutionH1") -> "InvolutionH1":
        return InvolutionH1(self.r_plus + other.r_plus, self.r_minus + other.r_minus, self.t2 + other.t2)

    @property
    def rank(self) -> int:
        return self.r_plus + self.r_minus

    def group(self) -> AbGroup:
        return AbGroup(self.rank, (2,) * self.t2)

    def render(self) -> str:
        return self.group().render()

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.r_plus, self.r_minus, self.t2)


def coinvariants_h1(h: InvolutionH1) -> InvolutionH1:
    """Quotient by {a - g a}: each negated Z collapses to Z/2."""
    return InvolutionH1(h.r_plus, 0, h.t2 + h.r_minus)
