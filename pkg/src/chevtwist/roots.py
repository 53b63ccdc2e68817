"""Irreducible root systems, Cartan numbers and Dynkin-diagram symmetries.

Conventions
-----------
Roots are integer coefficient vectors over the simple roots. Long roots have
squared length 2. The Cartan number of an ordered pair is

    A(alpha, beta) = 2 (alpha, beta) / (alpha, alpha)

which is the exponent in ``h_alpha(t) x_beta = t**A(alpha, beta) x_beta`` and
the coefficient in ``[h_alpha, x_beta] = A(alpha, beta) x_beta``. The Cartan
matrix is ``C[i][j] = A(alpha_i, alpha_j)``.

Numbering: B_l has alpha_l short, C_l has alpha_l long, D_l branches at
alpha_{l-2}, G_2 has alpha_1 short, F_4 has alpha_1, alpha_2 long. E_l uses the
chain alpha_1 - ... - alpha_{l-3} with alpha_{l-2} a leaf on alpha_{l-3} and
the arm alpha_{l-3} - alpha_{l-1} - alpha_l; this is the numbering under which
the torus index sets below (E_6: {1,2,3,5}, E_7: {1,2,3,4,6}) are what they are.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

from .errors import InvalidRank, NotARoot, ParseError

Root = tuple  # tuple[int, ...]

_RANK_OK = {
    "A": lambda l: l >= 1,
    "B": lambda l: l >= 2,
    "C": lambda l: l >= 3,
    "D": lambda l: l >= 4,
    "E": lambda l: l in (6, 7, 8),
    "F": lambda l: l == 4,
    "G": lambda l: l == 2,
}


@dataclass(frozen=True)
class RootSystemType:
    family: str
    rank: int

    def __post_init__(self):
        if self.family not in _RANK_OK:
            raise InvalidRank(f"unknown family {self.family!r}")
        if not isinstance(self.rank, int) or not _RANK_OK[self.family](self.rank):
            raise InvalidRank(f"{self.family}_{self.rank} is not a valid irreducible type")

    def __str__(self):
        return f"{self.family}{self.rank}"

    @classmethod
    def parse(cls, s: str) -> "RootSystemType":
        m = re.fullmatch(r"\s*([A-Ga-g])_?(\d+)\s*", s)
        if not m:
            raise ParseError(f"bad root system type {s!r}")
        return cls(m.group(1).upper(), int(m.group(2)))


@dataclass(frozen=True)
class DecompositionProfile:
    """Torus index set I (0-based here), degree of f(T) and SNF data per type."""

    index_set: frozenset
    f_degree: int


def decomposition_profile(t: RootSystemType) -> DecompositionProfile:
    f, l = t.family, t.rank
    if f == "A":
        idx, deg = range(0, l - 1), l + 1
    elif f == "B":
        idx, deg = range(1, l), 2
    elif f == "C":
        idx, deg = range(0, l - 1), 2
    elif f == "D":
        idx, deg = range(0, l - 2), 2
    elif f == "E" and l == 6:
        idx, deg = (0, 1, 2, 4), 3
    elif f == "E" and l == 7:
        idx, deg = (0, 1, 2, 3, 5), 2
    else:
        idx, deg = range(l), 1
    return DecompositionProfile(frozenset(idx), deg)


def _gram(t: RootSystemType) -> list[list[Fraction]]:
    f, l = t.family, t.rank
    g = [[Fraction(0)] * l for _ in range(l)]

    def edge(i, j, v):
        g[i][j] = g[j][i] = Fraction(v)

    if f in "ADE":
        for i in range(l):
            g[i][i] = Fraction(2)
    if f == "A":
        for i in range(l - 1):
            edge(i, i + 1, -1)
    elif f == "B":
        for i in range(l):
            g[i][i] = Fraction(2 if i < l - 1 else 1)
        for i in range(l - 1):
            edge(i, i + 1, -1)
    elif f == "C":
        for i in range(l):
            g[i][i] = Fraction(1 if i < l - 1 else 2)
        for i in range(l - 2):
            edge(i, i + 1, Fraction(-1, 2))
        edge(l - 2, l - 1, -1)
    elif f == "D":
        for i in range(l - 2):
            edge(i, i + 1, -1)
        edge(l - 3, l - 1, -1)
    elif f == "E":
        for i in range(l - 4):
            edge(i, i + 1, -1)
        edge(l - 4, l - 3, -1)
        edge(l - 4, l - 2, -1)
        edge(l - 2, l - 1, -1)
    elif f == "F":
        for i, v in enumerate((2, 2, 1, 1)):
            g[i][i] = Fraction(v)
        edge(0, 1, -1)
        edge(1, 2, -1)
        edge(2, 3, Fraction(-1, 2))
    elif f == "G":
        g[0][0], g[1][1] = Fraction(2, 3), Fraction(2)
        edge(0, 1, -1)
    return g


def cartan_matrix(t: RootSystemType) -> list[list[int]]:
    g = _gram(t)
    out = []
    for i in range(t.rank):
        row = []
        for j in range(t.rank):
            v = 2 * g[i][j] / g[i][i]
            assert v.denominator == 1
            row.append(int(v))
        out.append(row)
    return out


@dataclass(frozen=True)
class DiagramSymmetry:
    """Permutation of simple-root indices (0-based) preserving the Cartan matrix."""

    perm: tuple

    @property
    def order(self) -> int:
        k, p = 1, self.perm
        while any(p[i] != i for i in range(len(p))):
            p = tuple(self.perm[x] for x in p)
            k += 1
        return k

    def is_identity(self) -> bool:
        return all(p == i for i, p in enumerate(self.perm))

    def on_root(self, root: Root) -> Root:
        out = [0] * len(root)
        for i, c in enumerate(root):
            out[self.perm[i]] = c
        return tuple(out)

    def compose(self, other: "DiagramSymmetry") -> "DiagramSymmetry":
        """self after other."""
        return DiagramSymmetry(tuple(self.perm[other.perm[i]] for i in range(len(self.perm))))

    def inverse(self) -> "DiagramSymmetry":
        inv = [0] * len(self.perm)
        for i, p in enumerate(self.perm):
            inv[p] = i
        return DiagramSymmetry(tuple(inv))

    def one_based(self) -> list[int]:
        return [p + 1 for p in self.perm]


def _positive_roots(gram, rank) -> list[Root]:
    """Grow positive roots by height using alpha_i-strings (p - q = <beta, alpha_i^vee>)."""
    simple = [tuple(1 if j == i else 0 for j in range(rank)) for i in range(rank)]
    found = set(simple)
    layer = list(simple)
    out = list(simple)
    while layer:
        nxt = []
        for beta in layer:
            for i in range(rank):
                p, down = 0, list(beta)
                while True:
                    down[i] -= 1
                    if tuple(down) in found:
                        p += 1
                    else:
                        break
                pair = sum(beta[j] * gram[j][i] for j in range(rank))
                q = p - 2 * pair / gram[i][i]
                if q > 0:
                    up = list(beta)
                    up[i] += 1
                    up = tuple(up)
                    if up not in found:
                        found.add(up)
                        nxt.append(up)
        layer = nxt
        out.extend(nxt)
    return out


class RootSystem:
    """Full root set with a fixed total order.

    Order: roots supported only on the torus index set I first, then the rest;
    inside each block by height, then lexicographically. Chevalley-basis
    coordinates follow this order with the Cartan coordinates h_1..h_l last.
    """

    def __init__(self, t: RootSystemType):
        self.type = t
        self.rank = t.rank
        self.gram = _gram(t)
        self.cartan = cartan_matrix(t)
        self.squared_lengths = tuple(self.gram[i][i] for i in range(t.rank))
        self.profile = decomposition_profile(t)
        pos = _positive_roots(self.gram, self.rank)
        allr = pos + [tuple(-c for c in r) for r in pos]
        self.roots: tuple = tuple(sorted(allr, key=self._order_key))
        self.positive_roots: tuple = tuple(r for r in self.roots if sum(r) > 0)
        self.index = {r: i for i, r in enumerate(self.roots)}
        self.simple_roots = tuple(
            tuple(1 if j == i else 0 for j in range(self.rank)) for i in range(self.rank)
        )

    def _order_key(self, r):
        return (not self.supported_on_index_set(r), sum(r), r)

    # basic data -------------------------------------------------------

    def __repr__(self):
        return f"<RootSystem {self.type} |Phi|={len(self.roots)}>"

    def __len__(self):
        return len(self.roots)

    @property
    def dimension(self) -> int:
        return len(self.roots) + self.rank

    def is_root(self, r) -> bool:
        return tuple(r) in self.index

    def check_root(self, r) -> Root:
        r = tuple(int(c) for c in r)
        if r not in self.index:
            raise NotARoot(f"{list(r)} is not a root of {self.type}")
        return r

    def inner(self, a: Sequence[int], b: Sequence[int]) -> Fraction:
        g = self.gram
        l = self.rank
        return sum(
            (a[i] * b[j] * g[i][j] for i in range(l) if a[i] for j in range(l) if b[j]),
            Fraction(0),
        )

    def height(self, r) -> int:
        return sum(r)

    def is_long(self, r) -> bool:
        return self.inner(r, r) == 2

    def supported_on_index_set(self, r) -> bool:
        return all(c == 0 or i in self.profile.index_set for i, c in enumerate(r))

    def string(self, alpha: Root, beta: Root) -> tuple[int, int]:
        """(p, q): beta - p alpha, ..., beta + q alpha is the alpha-string through beta."""
        p = 0
        while tuple(b - (p + 1) * a for a, b in zip(alpha, beta)) in self.index:
            p += 1
        q = 0
        while tuple(b + (q + 1) * a for a, b in zip(alpha, beta)) in self.index:
            q += 1
        return p, q

    def coroot_coefficients(self, alpha: Root) -> tuple:
        """alpha^vee in the basis of simple coroots (integers)."""
        aa = self.inner(alpha, alpha)
        out = []
        for i, c in enumerate(alpha):
            v = Fraction(c) * self.squared_lengths[i] / aa
            assert v.denominator == 1
            out.append(int(v))
        return tuple(out)

    def add(self, a: Root, b: Root) -> Root:
        return tuple(x + y for x, y in zip(a, b))

    def neg(self, a: Root) -> Root:
        return tuple(-x for x in a)

    @cached_property
    def highest_root(self) -> Root:
        return max(self.positive_roots, key=lambda r: (sum(r), r))

    def to_json(self) -> dict:
        return {
            "type": str(self.type),
            "family": self.type.family,
            "rank": self.rank,
            "roots": [list(r) for r in self.roots],
            "cartan_matrix": self.cartan,
            "squared_lengths": [str(x) for x in self.squared_lengths],
        }


@lru_cache(maxsize=None)
def _cached(t: RootSystemType) -> RootSystem:
    return RootSystem(t)


def enumerate_roots(t) -> RootSystem:
    if isinstance(t, str):
        t = RootSystemType.parse(t)
    return _cached(t)


def cartan_number(s: RootSystem, alpha, beta) -> int:
    alpha, beta = s.check_root(alpha), s.check_root(beta)
    v = 2 * s.inner(alpha, beta) / s.inner(alpha, alpha)
    assert v.denominator == 1
    return int(v)


def diagram_symmetries(t) -> list[DiagramSymmetry]:
    """All permutations of the simple roots preserving the Cartan matrix, identity first."""
    if isinstance(t, str):
        t = RootSystemType.parse(t)
    c = cartan_matrix(t)
    l = t.rank
    out = []

    def extend(assigned: list, used: set):
        i = len(assigned)
        if i == l:
            out.append(DiagramSymmetry(tuple(assigned)))
            return
        for cand in range(l):
            if cand in used:
                continue
            if all(c[i][j] == c[cand][assigned[j]] and c[j][i] == c[assigned[j]][cand] for j in range(i)):
                assigned.append(cand)
                used.add(cand)
                extend(assigned, used)
                assigned.pop()
                used.discard(cand)

    extend([], set())
    out.sort(key=lambda s: (not s.is_identity(), s.perm))
    return out


def format_root(r: Root) -> str:
    return "[" + ",".join(str(c) for c in r) + "]"


def parse_root(s: str) -> Root:
    s = s.strip()
    try:
        v = json.loads(s)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad root {s!r}") from exc
    if not isinstance(v, list) or not all(isinstance(c, int) for c in v):
        raise ParseError(f"bad root {s!r}")
    return tuple(v)
