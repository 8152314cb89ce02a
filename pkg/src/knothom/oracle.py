"""Finite free chain complexes over Z and their homology.

This module is deliberately independent of the series machinery: it builds
explicit cellular chain complexes (circles, products, mapping tori of
cellular actions) and reads homology off an integer diagonalisation.
"""

from __future__ import annotations

import json
from typing import Sequence

from .errors import ActionOrderMismatch, CellBudgetExceeded, InvalidComplex, OracleUnavailable
from .graded import AbGroup, GradedAb

DEFAULT_CELL_BUDGET = 2000


class FinChainComplex:
    """Free Z-modules C_0..C_top with sparse boundary maps.

    ``bd[d]`` maps a column index j of C_d to a dict {row index in C_{d-1}: coefficient}.
    """

    def __init__(self, dims: Sequence[int], bd: dict | None = None, check: bool = True):
        self.dims = tuple(int(x) for x in dims)
        self.bd = {}
        for d, cols in (bd or {}).items():
            if not 1 <= d < len(self.dims):
                raise InvalidComplex(f"boundary in degree {d} outside 1..{len(self.dims) - 1}")
            clean = {}
            for j, col in cols.items():
                col = {i: v for i, v in col.items() if v}
                if not 0 <= j < self.dims[d] or any(not 0 <= i < self.dims[d - 1] for i in col):
                    raise InvalidComplex(f"boundary entry out of range in degree {d}")
                if col:
                    clean[j] = col
            self.bd[d] = clean
        if check:
            self._check()

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    def cells(self) -> int:
        return sum(self.dims)

    def boundary(self, d: int, j: int) -> dict:
        return self.bd.get(d, {}).get(j, {})

    def _check(self):
        for d in range(2, len(self.dims)):
            for j, col in self.bd.get(d, {}).items():
                acc: dict = {}
                for i, v in col.items():
                    for k, w in self.boundary(d - 1, i).items():
                        acc[k] = acc.get(k, 0) + v * w
                if any(acc.values()):
                    raise InvalidComplex(f"boundary squared is nonzero on cell {j} of degree {d}")

    def matrix(self, d: int) -> list[list[int]]:
        """Dense row-major matrix of the boundary C_d -> C_{d-1}."""
        rows = self.dims[d - 1] if d >= 1 else 0
        out = [[0] * self.dims[d] for _ in range(rows)]
        for j, col in self.bd.get(d, {}).items():
            for i, v in col.items():
                out[i][j] = v
        return out

    @classmethod
    def from_matrices(cls, dims: Sequence[int], matrices: dict) -> "FinChainComplex":
        bd = {}
        for d, m in matrices.items():
            cols: dict = {}
            for i, row in enumerate(m):
                for j, v in enumerate(row):
                    if v:
                        cols.setdefault(j, {})[i] = v
            bd[int(d)] = cols
        return cls(dims, bd)

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "boundaries": [self.matrix(d) for d in range(1, len(self.dims))]}

    @classmethod
    def from_json(cls, data) -> "FinChainComplex":
        if isinstance(data, str):
            data = json.loads(data)
        dims = data["dims"]
        mats = {d + 1: m for d, m in enumerate(data["boundaries"])}
        for d, m in mats.items():
            if len(m) != dims[d - 1] or any(len(r) != dims[d] for r in m):
                raise InvalidComplex(f"matrix of degree {d} has the wrong shape")
        return cls.from_matrices(dims, mats)


# --------------------------------------------------------------------------
# Integer diagonalisation


def diagonal_entries(cols: dict, nrows: int) -> list[int]:
    """Nonzero diagonal entries of an integer diagonalisation of a sparse matrix.

    The entries need not divide each other; their prime-power parts give the
    same cokernel torsion as the Smith form.
    """
    rows: dict[int, dict[int, int]] = {}
    colidx: dict[int, set] = {}
    for j, col in cols.items():
        for i, v in col.items():
            if v:
                rows.setdefault(i, {})[j] = v
                colidx.setdefault(j, set()).add(i)
    out = []

    def setv(i, j, v):
        if v:
            rows.setdefault(i, {})[j] = v
            colidx.setdefault(j, set()).add(i)
        else:
            r = rows.get(i)
            if r is not None and j in r:
                del r[j]
                if not r:
                    del rows[i]
            c = colidx.get(j)
            if c is not None:
                c.discard(i)
                if not c:
                    del colidx[j]

    def row_op(target, src, q):
        for j, v in list(rows[src].items()):
            setv(target, j, rows.get(target, {}).get(j, 0) - q * v)

    def col_op(target, src, q):
        for i in list(colidx[src]):
            setv(i, target, rows[i].get(target, 0) - q * rows[i][src])

    def drop(i, j):
        out.append(abs(rows[i][j]))
        for jj in list(rows[i]):
            setv(i, jj, 0)
        for ii in list(colidx.get(j, ())):
            setv(ii, j, 0)

    while rows:
        best = None
        for i, r in rows.items():
            for j, v in r.items():
                if v in (1, -1):
                    cost = (len(r) - 1) * (len(colidx[j]) - 1)
                    if best is None or cost < best[0]:
                        best = (cost, i, j)
                        if cost == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is not None:
            _, i, j = best
            piv = rows[i][j]
            for ii in list(colidx[j]):
                if ii != i:
                    row_op(ii, i, rows[ii][j] * piv)
            # the column is now clear, so the rest of row i can be cleared by column operations
            drop(i, j)
            continue
        # no unit entry: reduce around an entry of smallest size
        _, i, j = min((abs(v), i, j) for i, r in rows.items() for j, v in r.items())
        a = rows[i][j]
        changed = False
        for ii in list(colidx[j]):
            if ii != i:
                row_op(ii, i, rows[ii][j] // a)
                changed = changed or bool(rows.get(ii, {}).get(j))
        for jj in list(rows[i]):
            if jj != j:
                col_op(jj, j, rows[i][jj] // a)
                changed = changed or bool(rows.get(i, {}).get(jj))
        # a nonzero remainder is smaller than a, so the next pass makes progress
        if not changed:
            drop(i, j)
    return out


def homology_znf(C: FinChainComplex) -> GradedAb:
    """Integral homology of a finite free complex, degrees 0..top."""
    diag = {d: diagonal_entries(C.bd.get(d, {}), C.dims[d - 1]) for d in range(1, len(C.dims))}
    groups = []
    for d in range(len(C.dims)):
        rk_out = len(diag.get(d, ()))
        inc = diag.get(d + 1, ())
        rank = C.dims[d] - rk_out - len(inc)
        groups.append(AbGroup(rank, tuple(x for x in inc if x > 1)))
    return GradedAb(tuple(groups))


# --------------------------------------------------------------------------
# Signed permutation automorphisms


class SignedAuto:
    """Cellular automorphism sending basis cell j of C_d to sign * cell target."""

    def __init__(self, images: dict):
        self.images = {d: tuple(v) for d, v in images.items()}

    @classmethod
    def identity(cls, C: FinChainComplex) -> "SignedAuto":
        return cls({d: tuple((j, 1) for j in range(n)) for d, n in enumerate(C.dims)})

    def __call__(self, d, j):
        return self.images[d][j]

    def is_identity(self) -> bool:
        return all(img == (j, 1) for imgs in self.images.values() for j, img in enumerate(imgs))

    def compose(self, other: "SignedAuto") -> "SignedAuto":
        """self after other."""
        out = {}
        for d, imgs in other.images.items():
            row = []
            for t, s in imgs:
                t2, s2 = self.images[d][t]
                row.append((t2, s * s2))
            out[d] = tuple(row)
        return SignedAuto(out)

    def check_chain_map(self, C: FinChainComplex):
        for d in range(1, len(C.dims)):
            for j in range(C.dims[d]):
                t, s = self(d, j)
                lhs = {}
                for i, v in C.boundary(d, j).items():
                    ti, si = self(d - 1, i)
                    lhs[ti] = lhs.get(ti, 0) + si * v
                rhs = {i: s * v for i, v in C.boundary(d, t).items()}
                if {k: v for k, v in lhs.items() if v} != rhs:
                    raise InvalidComplex(f"action is not a chain map on cell {j} of degree {d}")


# --------------------------------------------------------------------------
# Basic cell models


def point_complex() -> FinChainComplex:
    return FinChainComplex([1])


def circle_complex() -> FinChainComplex:
    """One vertex and one loop."""
    return FinChainComplex([1, 1])


def circle2_complex() -> FinChainComplex:
    """Two vertices v0, v1 and edges e0 = v1 - v0, e1 = v0 - v1."""
    return FinChainComplex([2, 2], {1: {0: {1: 1, 0: -1}, 1: {0: 1, 1: -1}}})


def circle2_rotation() -> SignedAuto:
    return SignedAuto({0: ((1, 1), (0, 1)), 1: ((1, 1), (0, 1))})


def circle2_reflection() -> SignedAuto:
    return SignedAuto({0: ((0, 1), (1, 1)), 1: ((1, -1), (0, -1))})


def klein_complex() -> FinChainComplex:
    """Square with sides a, b, a, b^-1: one vertex, two edges, one face."""
    return FinChainComplex([1, 2, 1], {2: {0: {0: 2}}})


def _basis(dims_list: Sequence[Sequence[int]], n: int) -> list[tuple]:
    """Multi-indices ((d_1, j_1), ..., (d_k, j_k)) of total degree n."""
    out = []

    def rec(i, left, acc):
        if i == len(dims_list):
            if left == 0:
                out.append(tuple(acc))
            return
        for d, size in enumerate(dims_list[i]):
            if d > left:
                break
            for j in range(size):
                acc.append((d, j))
                rec(i + 1, left - d, acc)
                acc.pop()

    rec(0, n, [])
    return out


def tensor_size(dims_list: Sequence[Sequence[int]]) -> int:
    total = 1
    for dims in dims_list:
        total *= sum(dims)
    return total


class _Tensor:
    """Tensor product of several complexes with an explicit basis."""

    def __init__(self, factors: Sequence[FinChainComplex]):
        self.factors = list(factors)
        dl = [f.dims for f in factors]
        top = sum(f.top for f in factors)
        self.basis = [_basis(dl, n) for n in range(top + 1)]
        self.index = [{b: i for i, b in enumerate(bs)} for bs in self.basis]

    def complex_parts(self):
        bd = {}
        for n in range(1, len(self.basis)):
            cols = {}
            for j, b in enumerate(self.basis[n]):
                col: dict = {}
                sign = 1
                for k, (d, i) in enumerate(b):
                    if d >= 1:
                        for ii, v in self.factors[k].boundary(d, i).items():
                            nb = b[:k] + ((d - 1, ii),) + b[k + 1:]
                            r = self.index[n - 1][nb]
                            col[r] = col.get(r, 0) + sign * v
                    if d % 2:
                        sign = -sign
                cols[j] = col
            bd[n] = cols
        return [len(bs) for bs in self.basis], bd


def tensor(*factors: FinChainComplex) -> FinChainComplex:
    if not factors:
        return point_complex()
    dims, bd = _Tensor(factors).complex_parts()
    return FinChainComplex(dims, bd, check=False)


def tensor_auto(factors: Sequence[FinChainComplex], autos: Sequence[SignedAuto]) -> SignedAuto:
    t = _Tensor(factors)
    images = {}
    for n, bs in enumerate(t.basis):
        row = []
        for b in bs:
            s = 1
            nb = []
            for k, (d, i) in enumerate(b):
                ti, si = autos[k](d, i)
                s *= si
                nb.append((d, ti))
            row.append((t.index[n][tuple(nb)], s))
        images[n] = tuple(row)
    return SignedAuto(images)


# --------------------------------------------------------------------------
# Cyclic actions and mapping tori


def _koszul_sign(degs: Sequence[int], perm: Sequence[int]) -> int:
    odd = [i for i, d in enumerate(degs) if d % 2]
    inv = 0
    for a in range(len(odd)):
        for b in range(a + 1, len(odd)):
            if perm[odd[a]] > perm[odd[b]]:
                inv += 1
    return -1 if inv % 2 else 1


def permutation_action(factors: Sequence[FinChainComplex], perm: Sequence[int], autos: Sequence[SignedAuto | None]):
    """The tensor product with the signed action moving factor i to slot perm[i] after applying autos[i]."""
    for i, j in enumerate(perm):
        if factors[i].dims != factors[j].dims:
            raise InvalidComplex("permuted factors must be the same complex")
    t = _Tensor(factors)
    images = {}
    for n, bs in enumerate(t.basis):
        row = []
        for b in bs:
            s = _koszul_sign([d for d, _ in b], perm)
            nb = [None] * len(b)
            for k, (d, i) in enumerate(b):
                a = autos[k]
                if a is not None:
                    i, si = a(d, i)
                    s *= si
                nb[perm[k]] = (d, i)
            row.append((t.index[n][tuple(nb)], s))
        images[n] = tuple(row)
    dims, bd = t.complex_parts()
    C = FinChainComplex(dims, bd, check=False)
    return C, SignedAuto(images)


def auto_power(g: SignedAuto, k: int, C: FinChainComplex) -> SignedAuto:
    out = SignedAuto.identity(C)
    for _ in range(k):
        out = g.compose(out)
    return out


def mapping_torus(C: FinChainComplex, g: SignedAuto) -> FinChainComplex:
    """Complex of SO(2) x_A Y when A is generated by g: degree n is C_n + C_{n-1}.

    d(0, c) = (0, dc) and d(1, c) = (0, c - g c) - (1, dc).
    """
    top = C.top + 1
    dims = [(C.dims[n] if n <= C.top else 0) + (C.dims[n - 1] if n >= 1 else 0) for n in range(top + 1)]
    bd = {}
    for n in range(1, top + 1):
        off_lo = C.dims[n - 1] if n - 1 <= C.top else 0
        cols = {}
        nn = C.dims[n] if n <= C.top else 0
        for j in range(nn):
            cols[j] = dict(C.boundary(n, j))
        for j in range(C.dims[n - 1]):
            col: dict = {j: 1}
            t, s = g(n - 1, j)
            col[t] = col.get(t, 0) - s
            for i, v in C.boundary(n - 1, j).items():
                col[off_lo + i] = col.get(off_lo + i, 0) - v
            cols[nn + j] = col
        bd[n] = cols
    return FinChainComplex(dims, bd)


def cyclic_quotient_complex(factors: Sequence[FinChainComplex], perm: Sequence[int], autos: Sequence[SignedAuto | None], m: int) -> FinChainComplex:
    """Chain complex of SO(2) x_A (X_1 x ... x X_k) for A cyclic of order m.

    The generator moves factor i to slot ``perm[i]`` after applying ``autos[i]``.
    Raises ActionOrderMismatch unless the generator has order dividing m.
    """
    C, g = permutation_action(factors, perm, autos)
    for a, f in zip(autos, factors):
        if a is not None:
            a.check_chain_map(f)
    if not auto_power(g, m, C).is_identity():
        raise ActionOrderMismatch(f"the action does not have order dividing {m}")
    return mapping_torus(C, g)


def orbit_decomposition(C: FinChainComplex, g: SignedAuto, m: int) -> list[dict]:
    """Orbits of the signed basis action: degree, size, stabiliser order and holonomy sign."""
    out = []
    for d, n in enumerate(C.dims):
        seen = set()
        for j in range(n):
            if j in seen:
                continue
            orb = [j]
            seen.add(j)
            t, s = g(d, j)
            sign = s
            while t != j:
                orb.append(t)
                seen.add(t)
                t, s2 = g(d, t)
                sign *= s2
            out.append({"degree": d, "cells": orb, "size": len(orb), "stabiliser": m // len(orb), "sign": sign})
    return out


def e2_complex(X: FinChainComplex) -> FinChainComplex:
    """Chain complex of Conf(R^2, 2) x_{S_2} X^2, using the free antipodal circle."""
    return cyclic_quotient_complex([X, X], [1, 0], [None, None], 2)


# --------------------------------------------------------------------------
# Models from the component engine


def _model_dims(model, involution: bool) -> tuple:
    from .engine import Circle, CyclicTwist, EPiece, Point, Product

    if isinstance(model, Point):
        return (1,)
    if isinstance(model, Circle):
        return (2, 2) if involution else (1, 1)
    if isinstance(model, Product):
        acc = (1,)
        for f in model.factors:
            acc = _mul_dims(acc, _model_dims(f, involution))
        return acc
    if involution:
        raise OracleUnavailable("no cellular inversion for this model")
    if isinstance(model, CyclicTwist):
        acc = (1,)
        for c, r in zip(model.children, model.reversals):
            acc = _mul_dims(acc, _model_dims(c, r))
        return _mul_dims(acc, (1, 1))
    if isinstance(model, EPiece):
        if model.n != 2:
            raise OracleUnavailable(f"no finite model for E_{model.n}")
        acc = (1, 1)
        for c, mult in model.parts:
            for _ in range(mult):
                acc = _mul_dims(acc, _model_dims(c, False))
        return acc
    raise OracleUnavailable(f"unknown model {model!r}")


def _mul_dims(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return tuple(out)


def model_cells(model) -> int:
    return sum(_model_dims(model, False))


def _build(model, involution: bool):
    from .engine import Circle, CyclicTwist, EPiece, Point, Product

    if isinstance(model, Point):
        C = point_complex()
        return C, (SignedAuto.identity(C) if involution else None)
    if isinstance(model, Circle):
        if involution:
            return circle2_complex(), circle2_reflection()
        return circle_complex(), None
    if isinstance(model, Product):
        parts = [_build(f, involution) for f in model.factors]
        C = tensor(*[c for c, _ in parts])
        if involution:
            return C, tensor_auto([c for c, _ in parts], [a for _, a in parts])
        return C, None
    if involution:
        raise OracleUnavailable("no cellular inversion for this model")
    if isinstance(model, CyclicTwist):
        parts = [_build(c, r) for c, r in zip(model.children, model.reversals)]
        autos: list = [None] * len(parts)
        for orb in _orbits(model.perm):
            last = orb[-1]
            autos[last] = parts[last][1] if model.reversals[last] else None
        return cyclic_quotient_complex([c for c, _ in parts], model.perm, autos, model.m), None
    if isinstance(model, EPiece):
        if model.n != 2:
            raise OracleUnavailable(f"no finite model for E_{model.n}")
        if len(model.parts) == 1:
            X, _ = _build(model.parts[0][0], False)
            return e2_complex(X), None
        a, _ = _build(model.parts[0][0], False)
        b, _ = _build(model.parts[1][0], False)
        return tensor(circle_complex(), a, b), None
    raise OracleUnavailable(f"unknown model {model!r}")


def _orbits(perm):
    seen = set()
    out = []
    for i in range(len(perm)):
        if i in seen:
            continue
        orb = [i]
        seen.add(i)
        j = perm[i]
        while j != i:
            orb.append(j)
            seen.add(j)
            j = perm[j]
        out.append(orb)
    return out


def model_complex(model, max_cells: int = DEFAULT_CELL_BUDGET) -> FinChainComplex:
    """Cellular chain complex realising an engine model; respects the cell budget."""
    n = model_cells(model)
    if n > max_cells:
        raise CellBudgetExceeded(f"model needs {n} cells, budget is {max_cells}")
    C, _ = _build(model, False)
    return C


def model_homology(model, max_cells: int = DEFAULT_CELL_BUDGET) -> GradedAb:
    return homology_znf(model_complex(model, max_cells))
