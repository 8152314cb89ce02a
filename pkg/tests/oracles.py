"""Independent reference computations used only by the tests."""

from __future__ import annotations

from itertools import combinations, permutations
from math import factorial

import sympy


def _wedge_sort(idx):
    """Sign and sorted tuple for a wedge of distinct generator indices, or (0, None)."""
    idx = list(idx)
    if len(set(idx)) < len(idx):
        return 0, None
    sign = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                sign = -sign
    return sign, tuple(sorted(idx))


class OrlikSolomon:
    """Rational cohomology of Conf(R^2, n) as exterior algebra modulo Arnold relations."""

    def __init__(self, n: int):
        self.n = n
        self.gens = list(combinations(range(n), 2))
        self.index = {g: i for i, g in enumerate(self.gens)}
        self._ideal = {}

    def basis(self, d):
        return list(combinations(range(len(self.gens)), d))

    def _rel(self, i, j, k):
        g = self.index
        return [((g[(i, j)], g[(j, k)]), 1), ((g[(i, j)], g[(i, k)]), -1), ((g[(i, k)], g[(j, k)]), -1)]

    def ideal(self, d):
        """Matrix whose columns span the degree-d part of the Arnold ideal."""
        if d in self._ideal:
            return self._ideal[d]
        B = self.basis(d)
        pos = {b: i for i, b in enumerate(B)}
        cols = []
        if d >= 2:
            for i, j, k in combinations(range(self.n), 3):
                for mono in self.basis(d - 2):
                    v = [0] * len(B)
                    for pair, c in self._rel(i, j, k):
                        s, key = _wedge_sort(pair + mono)
                        if s:
                            v[pos[key]] += s * c
                    if any(v):
                        cols.append(v)
        M = sympy.Matrix(cols).T if cols else sympy.zeros(len(B), 0)
        if M.cols:
            M = sympy.Matrix.hstack(*M.columnspace())
        self._ideal[d] = M
        return M

    def act(self, sigma, d):
        """Matrix of a permutation on the degree-d exterior power."""
        B = self.basis(d)
        pos = {b: i for i, b in enumerate(B)}
        M = sympy.zeros(len(B), len(B))
        img = []
        for a, b in self.gens:
            x, y = sigma[a], sigma[b]
            img.append(self.index[(min(x, y), max(x, y))])
        for c, mono in enumerate(B):
            s, key = _wedge_sort(tuple(img[i] for i in mono))
            M[pos[key], c] = s
        return M

    def trace(self, sigma, d):
        """Trace of sigma on the degree-d part of the quotient."""
        A = self.act(sigma, d)
        I = self.ideal(d)
        full = A.trace()
        if I.cols == 0:
            return full
        X = (I.T * I).inv() * I.T * (A * I)
        return full - X.trace()


def _cycles(sigma):
    seen, out = set(), []
    for i in range(len(sigma)):
        if i not in seen:
            ell, j = 0, i
            while j not in seen:
                seen.add(j)
                j = sigma[j]
                ell += 1
            out.append(ell)
    return out


def _tensor_trace(sigma, dims, cutoff):
    """Graded trace of sigma permuting tensor factors of H(X)^n, Koszul signs included."""
    out = [1] + [0] * cutoff
    for ell in _cycles(sigma):
        cyc = [0] * (cutoff + 1)
        for d, v in enumerate(dims):
            if v and ell * d <= cutoff:
                cyc[ell * d] += v * (-1) ** ((ell - 1) * d)
        nxt = [0] * (cutoff + 1)
        for i, a in enumerate(out):
            for j, b in enumerate(cyc):
                if a and b and i + j <= cutoff:
                    nxt[i + j] += a * b
        out = nxt
    return out


def labelled_configuration_betti(n: int, dims, cutoff: int) -> list[int]:
    """Rational Betti numbers of Conf(R^2, n) x_{S_n} X^n, averaging characters."""
    os_alg = OrlikSolomon(n)
    total = [sympy.Integer(0)] * (cutoff + 1)
    for sigma in permutations(range(n)):
        conf = [os_alg.trace(sigma, d) if d <= len(os_alg.gens) else 0 for d in range(min(n - 1, cutoff) + 1)]
        tens = _tensor_trace(sigma, dims, cutoff)
        for i, a in enumerate(conf):
            for j, b in enumerate(tens):
                if i + j <= cutoff:
                    total[i + j] += a * b
    out = []
    for x in total:
        q = x / factorial(n)
        assert q.is_integer
        out.append(int(q))
    return out


def smith_torsion(matrix) -> list[int]:
    """Nontrivial invariant factors via sympy."""
    from sympy.matrices.normalforms import smith_normal_form

    M = sympy.Matrix(matrix)
    if M.rows == 0 or M.cols == 0:
        return []
    S = smith_normal_form(M, domain=sympy.ZZ)
    diag = [abs(int(S[i, i])) for i in range(min(S.rows, S.cols))]
    return sorted(x for x in diag if x > 1)
