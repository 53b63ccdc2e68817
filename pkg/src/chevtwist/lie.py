"""Chevalley basis of the simple Lie algebra and its adjoint matrices.

Basis order is ``x_beta`` for beta in ``RootSystem.roots`` followed by
``h_1 .. h_l`` where ``h_i = [x_{alpha_i}, x_{-alpha_i}]``. Brackets:

    [h_i, x_beta]      = A(alpha_i, beta) x_beta
    [x_a, x_{-a}]      = h_a  (coroot of a, expanded in the h_i)
    [x_a, x_b]         = N(a, b) x_{a+b}   if a + b is a root

Signs of N follow the extraspecial-pair convention: for every positive root
xi, its extraspecial pair (a, b) gets N(a, b) = +(p + 1). Every other constant
is forced by the standard identities on N.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache

from .errors import UnknownLabel
from .matrix import Matrix
from .roots import Root, RootSystem, enumerate_roots, format_root


class ChevalleyBasis:
    def __init__(self, rs: RootSystem):
        self.rs = rs
        self.rank = rs.rank
        self.nroots = len(rs.roots)
        self.dim = self.nroots + self.rank
        self._pos_rank = {r: k for k, r in enumerate(sorted(rs.positive_roots, key=lambda r: (sum(r), r)))}
        self._extraspecial = self._find_extraspecial()
        self._n_cache: dict = {}
        self.structure_constants = self._all_constants()
        self._ad_cache: dict = {}

    def __repr__(self):
        return f"<ChevalleyBasis {self.rs.type} dim={self.dim}>"

    # structure constants ---------------------------------------------

    def _find_extraspecial(self) -> dict:
        rs = self.rs
        out = {}
        for xi in rs.positive_roots:
            best = None
            for a in rs.positive_roots:
                b = tuple(x - y for x, y in zip(xi, a))
                if b in rs.index and sum(b) > 0 and self._pos_rank[a] < self._pos_rank[b]:
                    if best is None or self._pos_rank[a] < self._pos_rank[best[0]]:
                        best = (a, b)
            if best is not None:
                out[xi] = best
        return out

    def _norm(self, r) -> Fraction:
        return self.rs.inner(r, r)

    def N(self, a: Root, b: Root) -> int:
        """Structure constant N(a, b); zero when a + b is not a root."""
        key = (a, b)
        if key in self._n_cache:
            return self._n_cache[key]
        val = self._compute_n(a, b)
        self._n_cache[key] = val
        return val

    def _compute_n(self, a, b) -> int:
        rs = self.rs
        c = rs.add(a, b)
        if c not in rs.index:
            return 0
        pa, pb = sum(a) > 0, sum(b) > 0
        if pa and pb:
            return self._positive_n(a, b, c)
        if not pa and not pb:
            return -self.N(rs.neg(a), rs.neg(b))
        if not pa:
            return -self.N(b, a)
        # a > 0 > b
        if sum(c) > 0:
            val = -self._norm(c) / self._norm(a) * self.N(rs.neg(b), c)
        else:
            val = self._norm(c) / self._norm(b) * self.N(rs.neg(c), a)
        assert val.denominator == 1
        return int(val)

    def _positive_n(self, a, b, xi) -> int:
        rs = self.rs
        es = self._extraspecial[xi]
        if (a, b) == es:
            p, _ = rs.string(a, b)
            return p + 1
        if (b, a) == es:
            return -self.N(b, a)
        if self._pos_rank[a] > self._pos_rank[b]:
            return -self.N(b, a)
        a1, b1 = es
        na, nb = rs.neg(a), rs.neg(b)
        total = Fraction(0)
        s = rs.add(b1, na)
        if s in rs.index:
            total += Fraction(self.N(b1, na) * self.N(a1, nb)) / self._norm(s)
        s = rs.add(a1, na)
        if s in rs.index:
            total += Fraction(self.N(na, a1) * self.N(b1, nb)) / self._norm(s)
        n_neg = -self._norm(xi) / self.N(a1, b1) * total
        val = -n_neg
        assert val.denominator == 1
        return int(val)

    def _all_constants(self) -> dict:
        rs = self.rs
        out = {}
        for a in rs.roots:
            for b in rs.roots:
                if rs.add(a, b) in rs.index:
                    out[(a, b)] = self.N(a, b)
        return out

    # brackets ---------------------------------------------------------

    def label_index(self, label) -> int:
        kind, val = label
        if kind == "x":
            try:
                return self.rs.index[tuple(val)]
            except KeyError:
                raise UnknownLabel(f"x_{list(val)} is not a basis label") from None
        if kind == "h" and 0 <= val < self.rank:
            return self.nroots + val
        raise UnknownLabel(f"unknown basis label {label!r}")

    def index_label(self, k: int):
        if k < self.nroots:
            return ("x", self.rs.roots[k])
        return ("h", k - self.nroots)

    def bracket_basis(self, i: int, j: int) -> dict:
        """[e_i, e_j] as {index: integer coefficient}."""
        rs, n = self.rs, self.nroots
        if i >= n and j >= n:
            return {}
        if i >= n:
            b = rs.roots[j]
            c = sum(b[k] * rs.cartan[i - n][k] for k in range(self.rank))
            return {j: c} if c else {}
        if j >= n:
            out = self.bracket_basis(j, i)
            return {k: -v for k, v in out.items()}
        a, b = rs.roots[i], rs.roots[j]
        s = rs.add(a, b)
        if not any(s):
            return {n + k: c for k, c in enumerate(rs.coroot_coefficients(a)) if c}
        if s in rs.index:
            return {rs.index[s]: self.structure_constants[(a, b)]}
        return {}

    def bracket(self, u: dict, v: dict) -> dict:
        out: dict = {}
        for i, a in u.items():
            for j, b in v.items():
                for k, c in self.bracket_basis(i, j).items():
                    out[k] = out.get(k, 0) + a * b * c
        return {k: c for k, c in out.items() if c != 0}

    def ad_matrix(self, label) -> Matrix:
        """Matrix of ad(e) in basis order: column j holds [e, e_j]."""
        k = self.label_index(label) if not isinstance(label, int) else label
        if k in self._ad_cache:
            return self._ad_cache[k]
        rows = [{} for _ in range(self.dim)]
        for j in range(self.dim):
            for i, c in self.bracket_basis(k, j).items():
                rows[i][j] = c
        m = Matrix(self.dim, self.dim, rows)
        self._ad_cache[k] = m
        return m

    def to_json(self) -> dict:
        return {
            "type": str(self.rs.type),
            "rank": self.rank,
            "dimension": self.dim,
            "structure_constants": [
                [list(a), list(b), n] for (a, b), n in sorted(self.structure_constants.items())
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


@lru_cache(maxsize=None)
def _cached(t) -> ChevalleyBasis:
    return ChevalleyBasis(enumerate_roots(t))


def build_chevalley_basis(rs) -> ChevalleyBasis:
    if isinstance(rs, RootSystem):
        return _cached(rs.type)
    return _cached(enumerate_roots(rs).type)


def ad_matrix(b: ChevalleyBasis, label) -> Matrix:
    return b.ad_matrix(label)


def parse_label(s: str):
    """``x[1,0,1]`` or ``h2`` (1-based Cartan index)."""
    s = s.strip()
    if s.startswith("x"):
        from .roots import parse_root

        return ("x", parse_root(s[1:]))
    if s.startswith("h") and s[1:].isdigit():
        return ("h", int(s[1:]) - 1)
    raise UnknownLabel(f"bad basis label {s!r}")


def format_label(label) -> str:
    kind, val = label
    return f"x{format_root(val)}" if kind == "x" else f"h{val + 1}"
