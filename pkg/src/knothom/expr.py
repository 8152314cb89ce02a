"""Companionship trees: grammar, validation, canonical form and companions.

Grammar::

    expr  := "U" | torus | cable | sum | hyp | atom
    torus := "T(" int "," int ")"
    cable := "cable(" int "," int ";" expr ")"
    sum   := "sum(" expr ("," expr)+ ")"
    hyp   := "hyp(" name (";" option)* (";" expr ("," expr)*)? ")"
    option:= "m=" int | "perm=" cycles | "rev=" ("yes" | "no" | flags)
    cycles:= "()" | ("(" int ("," int)* ")")+       children numbered from 1
    flags := "[" ("yes"|"no") ("," ("yes"|"no"))* "]"

A bare atom name such as ``F8`` is short for ``hyp(F8; m=1)``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Iterator, Union

from .errors import InvalidExpression, KnotSyntaxError, UnknownAtom

# Hyperbolic knot generating links and their number of components.
ATOMS = {"F8": 1, "W": 2, "B": 3}
_ATOM_FAMILY = re.compile(r"B\(\d+,\d+\)$")


def atom_components(name: str) -> int:
    if name in ATOMS:
        return ATOMS[name]
    if _ATOM_FAMILY.match(name):
        return 3
    raise UnknownAtom(f"unknown hyperbolic link {name!r}")


@dataclass(frozen=True)
class Unknot:
    pass


@dataclass(frozen=True)
class Torus:
    p: int
    q: int


@dataclass(frozen=True)
class Cable:
    alpha: int
    beta: int
    child: "KnotExpr"


@dataclass(frozen=True)
class Sum:
    children: tuple


@dataclass(frozen=True)
class SymmetryData:
    """A cyclic group of order m acting on the children.

    ``perm[i]`` is the image of child i under the generator. ``reversals[i]``
    says whether the stabiliser of child i inverts it.
    """

    order: int = 1
    perm: tuple = ()
    reversals: tuple = ()

    def orbits(self) -> list[list[int]]:
        seen = set()
        out = []
        for i in range(len(self.perm)):
            if i in seen:
                continue
            orb = [i]
            seen.add(i)
            j = self.perm[i]
            while j != i and j not in seen:
                orb.append(j)
                seen.add(j)
                j = self.perm[j]
            out.append(orb)
        return out

    def perm_order(self) -> int:
        out = 1
        for orb in self.orbits():
            out = out * len(orb) // math.gcd(out, len(orb))
        return out


@dataclass(frozen=True)
class HypSplice:
    name: str
    ncomp: int
    sym: SymmetryData
    children: tuple = ()


KnotExpr = Union[Unknot, Torus, Cable, Sum, HypSplice]


def hyp(name: str, *children, order: int = 1, perm=None, rev=False) -> HypSplice:
    """Convenience constructor. ``rev`` is a bool or one flag per child."""
    n = len(children)
    perm = tuple(range(n)) if perm is None else tuple(perm)
    if isinstance(rev, bool):
        rev = (rev,) * n
    return HypSplice(name, atom_components(name), SymmetryData(order, perm, tuple(rev)), tuple(children))


def children_of(e) -> tuple:
    if isinstance(e, Cable):
        return (e.child,)
    if isinstance(e, (Sum, HypSplice)):
        return e.children
    return ()


def node_count(e) -> int:
    return 1 + sum(node_count(c) for c in children_of(e))


def is_prime(e) -> bool:
    return not isinstance(e, (Unknot, Sum))


# --------------------------------------------------------------------------
# Serialisation


def _cycles_text(perm: tuple) -> str:
    sym = SymmetryData(1, perm)
    cyc = [o for o in sym.orbits() if len(o) > 1]
    if not cyc:
        return "()"
    return "".join("(" + ",".join(str(i + 1) for i in o) + ")" for o in cyc)


def serialize(e) -> str:
    if isinstance(e, Unknot):
        return "U"
    if isinstance(e, Torus):
        return f"T({e.p},{e.q})"
    if isinstance(e, Cable):
        return f"cable({e.alpha},{e.beta};{serialize(e.child)})"
    if isinstance(e, Sum):
        return "sum(" + ",".join(serialize(c) for c in e.children) + ")"
    if isinstance(e, HypSplice):
        s = e.sym
        parts = [e.name, f"m={s.order}"]
        if e.children:
            parts.append(f"perm={_cycles_text(s.perm)}")
            revs = s.reversals
            if all(revs):
                parts.append("rev=yes")
            elif not any(revs):
                parts.append("rev=no")
            else:
                parts.append("rev=[" + ",".join("yes" if r else "no" for r in revs) + "]")
            parts.append(",".join(serialize(c) for c in e.children))
        return "hyp(" + ";".join(parts) + ")"
    raise TypeError(f"not a knot expression: {e!r}")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise KnotSyntaxError(msg, self.pos)

    def ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def eat(self, s: str):
        self.ws()
        if not self.text.startswith(s, self.pos):
            self.error(f"expected {s!r}")
        self.pos += len(s)

    def try_eat(self, s: str) -> bool:
        self.ws()
        if self.text.startswith(s, self.pos):
            self.pos += len(s)
            return True
        return False

    def integer(self) -> int:
        self.ws()
        m = re.compile(r"[+-]?\d+").match(self.text, self.pos)
        if not m:
            self.error("expected an integer")
        self.pos = m.end()
        return int(m.group())

    def ident(self) -> str:
        self.ws()
        m = re.compile(r"[A-Za-z_][A-Za-z0-9_]*").match(self.text, self.pos)
        if not m:
            self.error("expected a name")
        self.pos = m.end()
        return m.group()

    def atom_name(self) -> str:
        start = self.pos
        name = self.ident()
        save = self.pos
        if self.try_eat("("):
            # B(i,j) style family names
            try:
                i = self.integer()
                self.eat(",")
                j = self.integer()
                self.eat(")")
                name = f"{name}({i},{j})"
            except KnotSyntaxError:
                self.pos = save
        self.ws()
        if name not in ATOMS and not _ATOM_FAMILY.match(name):
            self.pos = start
            raise UnknownAtom(f"unknown hyperbolic link {name!r} at position {start}")
        return name

    def expr(self):
        self.ws()
        start = self.pos
        m = re.compile(r"[A-Za-z_][A-Za-z0-9_]*").match(self.text, self.pos)
        if not m:
            self.error("expected an expression")
        word = m.group()
        if word == "U":
            self.pos = m.end()
            return Unknot()
        if word == "T" and self.text[m.end():].lstrip().startswith("("):
            self.pos = m.end()
            self.eat("(")
            p = self.integer()
            self.eat(",")
            q = self.integer()
            self.eat(")")
            return Torus(p, q)
        if word == "cable":
            self.pos = m.end()
            self.eat("(")
            a = self.integer()
            self.eat(",")
            b = self.integer()
            self.eat(";")
            child = self.expr()
            self.eat(")")
            return Cable(a, b, child)
        if word == "sum":
            self.pos = m.end()
            self.eat("(")
            kids = [self.expr()]
            while self.try_eat(","):
                kids.append(self.expr())
            if len(kids) < 2:
                self.error("sum needs at least two summands")
            self.eat(")")
            return Sum(tuple(kids))
        if word == "hyp":
            self.pos = m.end()
            return self.hyp_body()
        self.pos = start
        name = self.atom_name()
        return HypSplice(name, atom_components(name), SymmetryData(1, (), ()), ())

    def cycles(self) -> list[list[int]]:
        out = []
        self.eat("(")
        if self.try_eat(")"):
            return out
        while True:
            cyc = [self.integer()]
            while self.try_eat(","):
                cyc.append(self.integer())
            self.eat(")")
            out.append(cyc)
            if self.peek() != "(":
                return out
            self.eat("(")

    def flags(self):
        if self.try_eat("["):
            out = [self.flag()]
            while self.try_eat(","):
                out.append(self.flag())
            self.eat("]")
            return out
        return self.flag()

    def flag(self) -> bool:
        if self.try_eat("yes"):
            return True
        if self.try_eat("no"):
            return False
        self.error("expected yes or no")

    def hyp_body(self):
        self.eat("(")
        name_pos = self.pos
        name = self.atom_name()
        order, cycles, rev = 1, [], False
        kids = []
        seen = set()
        while self.try_eat(";"):
            self.ws()
            opt = re.compile(r"(m|perm|rev)\s*=").match(self.text, self.pos)
            if opt:
                key = opt.group(1)
                if key in seen:
                    self.error(f"option {key} given twice")
                seen.add(key)
                self.pos = opt.end()
                if key == "m":
                    order = self.integer()
                elif key == "perm":
                    cycles = self.cycles()
                else:
                    rev = self.flags()
                continue
            kids.append(self.expr())
            while self.try_eat(","):
                kids.append(self.expr())
            break
        self.eat(")")
        n = len(kids)
        perm = list(range(n))
        used = set()
        for cyc in cycles:
            for i in cyc:
                if not 1 <= i <= n or i in used:
                    raise KnotSyntaxError(f"bad child index {i} in perm", name_pos)
                used.add(i)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                perm[a - 1] = b - 1
        if isinstance(rev, bool):
            revs = (rev,) * n
        else:
            if len(rev) != n:
                raise KnotSyntaxError("rev list length differs from the number of children", name_pos)
            revs = tuple(rev)
        return HypSplice(name, atom_components(name), SymmetryData(order, tuple(perm), revs), tuple(kids))


def parse(text: str):
    """Parse the textual form of a companionship tree.

    >>> parse("cable(-17,2; sum(T(3,2), hyp(F8; m=1)))")
    Cable(alpha=-17, beta=2, child=Sum(children=(Torus(p=3, q=2), HypSplice(name='F8', ncomp=1, sym=SymmetryData(order=1, perm=(), reversals=()), children=()))))
    """
    p = _Parser(text)
    e = p.expr()
    p.ws()
    if p.pos != len(text):
        p.error("trailing input")
    return e


# --------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Violation:
    path: tuple
    rule: str
    message: str

    def __str__(self):
        where = "root" if not self.path else "/".join(str(i) for i in self.path)
        return f"{where}: {self.message}"


def validate(e, _path: tuple = (), _root: bool = True) -> list[Violation]:
    out: list[Violation] = []

    def bad(rule, msg):
        out.append(Violation(_path, rule, msg))

    if isinstance(e, Unknot):
        if not _root:
            bad("unknot", "the unknot may only be the whole tree")
    elif isinstance(e, Torus):
        if e.q < 2:
            bad("torus", f"torus knot needs q >= 2, got {e.q}")
        if abs(e.p) < 2:
            bad("torus", f"torus knot needs |p| >= 2, got {e.p}")
        if math.gcd(e.p, e.q) != 1:
            bad("torus", f"torus knot needs gcd(p,q) = 1, got ({e.p},{e.q})")
    elif isinstance(e, Cable):
        if e.beta < 1:
            bad("cable", f"cable needs beta >= 1, got {e.beta}")
        if math.gcd(e.alpha, e.beta) != 1:
            bad("cable", f"cable needs gcd(alpha,beta) = 1, got ({e.alpha},{e.beta})")
    elif isinstance(e, Sum):
        if len(e.children) < 2:
            bad("sum", "a connected sum needs at least two summands")
        for i, c in enumerate(e.children):
            if isinstance(c, Sum):
                out.append(Violation(_path + (i,), "keychain", "a connected sum may not have a connected sum as a summand"))
    elif isinstance(e, HypSplice):
        out.extend(_validate_hyp(e, _path))
    else:
        bad("type", f"not a knot expression: {e!r}")
        return out
    for i, c in enumerate(children_of(e)):
        out.extend(validate(c, _path + (i,), False))
    return out


def _validate_hyp(e: HypSplice, path) -> list[Violation]:
    out = []

    def bad(rule, msg):
        out.append(Violation(path, rule, msg))

    try:
        ncomp = atom_components(e.name)
    except UnknownAtom:
        bad("atom", f"unknown hyperbolic link {e.name!r}")
        return out
    if e.ncomp != ncomp:
        bad("atom", f"{e.name} has {ncomp} components, not {e.ncomp}")
    n = len(e.children)
    if n != ncomp - 1:
        bad("arity", f"{e.name} takes {ncomp - 1} companions, got {n}")
    s = e.sym
    if s.order < 1:
        bad("symmetry", f"group order must be >= 1, got {s.order}")
        return out
    if sorted(s.perm) != list(range(n)):
        bad("symmetry", "perm is not a permutation of the children")
        return out
    if len(s.reversals) != n:
        bad("symmetry", "one reversal flag per child is required")
        return out
    if s.order % s.perm_order():
        bad("symmetry", f"perm of order {s.perm_order()} does not divide m={s.order}")
        return out
    canon = [serialize(canonicalize(c)) for c in e.children]
    for orb in s.orbits():
        if len({s.reversals[i] for i in orb}) > 1:
            bad("symmetry", f"reversal flags differ on orbit {[i + 1 for i in orb]}")
        if len({canon[i] for i in orb}) > 1:
            bad("symmetry", f"children permuted into each other must be equal, orbit {[i + 1 for i in orb]}")
        if s.reversals[orb[0]] and (s.order // len(orb)) % 2:
            bad("symmetry", f"a reversal on orbit {[i + 1 for i in orb]} needs an even stabiliser")
    return out


def check(e):
    """Raise InvalidExpression unless ``e`` is admissible; returns ``e``."""
    v = validate(e)
    if v:
        raise InvalidExpression(v)
    return e


# --------------------------------------------------------------------------
# Canonical form


def canonicalize(e):
    """Sort connected-sum summands by canonical text, recursively.

    >>> serialize(canonicalize(parse("sum(T(5,2),T(3,2))")))
    'sum(T(3,2),T(5,2))'
    """
    if isinstance(e, Cable):
        return Cable(e.alpha, e.beta, canonicalize(e.child))
    if isinstance(e, Sum):
        kids = sorted((canonicalize(c) for c in e.children), key=serialize)
        return Sum(tuple(kids))
    if isinstance(e, HypSplice):
        return HypSplice(e.name, e.ncomp, e.sym, tuple(canonicalize(c) for c in e.children))
    return e


def canonical_text(e) -> str:
    return serialize(canonicalize(e))


def young_classes(e: Sum) -> list[tuple[object, int]]:
    """Distinct canonical summands with multiplicities, in canonical order."""
    counts: dict[str, list] = {}
    for c in e.children:
        c = canonicalize(c)
        key = serialize(c)
        if key in counts:
            counts[key][1] += 1
        else:
            counts[key] = [c, 1]
    return [(c, n) for _, (c, n) in sorted(counts.items())]


def companions(e) -> list[tuple[tuple, object]]:
    """Every vertex of the tree with the subtree below it, in preorder."""
    out = []

    def walk(x, path):
        out.append((path, x))
        for i, c in enumerate(children_of(x)):
            walk(c, path + (i,))

    walk(e, ())
    return out


# --------------------------------------------------------------------------
# JSON


def to_json(e) -> dict:
    if isinstance(e, Unknot):
        return {"kind": "unknot"}
    if isinstance(e, Torus):
        return {"kind": "torus", "p": e.p, "q": e.q}
    if isinstance(e, Cable):
        return {"kind": "cable", "alpha": e.alpha, "beta": e.beta, "child": to_json(e.child)}
    if isinstance(e, Sum):
        return {"kind": "sum", "children": [to_json(c) for c in e.children]}
    if isinstance(e, HypSplice):
        return {
            "kind": "hyp",
            "name": e.name,
            "ncomp": e.ncomp,
            "sym": {"order": e.sym.order, "perm": list(e.sym.perm), "reversals": list(e.sym.reversals)},
            "children": [to_json(c) for c in e.children],
        }
    raise TypeError(f"not a knot expression: {e!r}")


def from_json(d):
    if isinstance(d, str):
        d = json.loads(d)
    kind = d["kind"]
    if kind == "unknot":
        return Unknot()
    if kind == "torus":
        return Torus(d["p"], d["q"])
    if kind == "cable":
        return Cable(d["alpha"], d["beta"], from_json(d["child"]))
    if kind == "sum":
        return Sum(tuple(from_json(c) for c in d["children"]))
    if kind == "hyp":
        s = d["sym"]
        return HypSplice(
            d["name"], d["ncomp"],
            SymmetryData(s["order"], tuple(s["perm"]), tuple(bool(r) for r in s["reversals"])),
            tuple(from_json(c) for c in d["children"]),
        )
    raise ValueError(f"unknown node kind {kind!r}")
