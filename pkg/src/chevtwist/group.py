"""Elements of the adjoint elementary Chevalley group as exact matrices.

Matrices act on the Chevalley basis in the order fixed by :mod:`chevtwist.lie`.
Torus elements are diagonal; ``h(chi)`` scales ``x_beta`` by ``chi(beta)`` and
fixes the Cartan coordinates.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Sequence

from .errors import FieldMismatch, InvalidRank, NonInvertibleScalar, NotARoot, ParseError
from .lie import ChevalleyBasis, build_chevalley_basis
from .matrix import Matrix, _recip
from .roots import Root, RootSystem, RootSystemType, format_root, parse_root
from .scalars import QQ, Field, field_of, parse_field


def join_fields(a: Field, b: Field) -> Field:
    if a == b or b == QQ:
        return a
    if a == QQ:
        return b
    raise FieldMismatch(f"cannot combine elements over {a.name} and {b.name}")


class GroupElement:
    """Invertible matrix in the Chevalley basis over an exact field.

    The inverse is tracked lazily: products and generators record how to
    build it, so words in root elements never go through elimination.
    """

    __slots__ = ("basis", "matrix", "field", "word", "_inv", "_inv_parts")

    def __init__(self, basis: ChevalleyBasis, matrix: Matrix, field: Field = QQ, word: str | None = None):
        self.basis = basis
        self.matrix = matrix
        self.field = field
        self.word = word
        self._inv = None
        self._inv_parts = None

    @classmethod
    def identity(cls, basis: ChevalleyBasis, field: Field = QQ) -> "GroupElement":
        e = cls(basis, Matrix.identity(basis.dim), field, word="")
        e._inv = e
        return e

    def _check(self, other: "GroupElement") -> Field:
        if other.basis is not self.basis:
            raise FieldMismatch("elements of different Chevalley groups")
        return join_fields(self.field, other.field)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        f = self._check(other)
        word = None
        if self.word is not None and other.word is not None:
            word = " ".join(w for w in (self.word, other.word) if w)
        out = GroupElement(self.basis, self.matrix @ other.matrix, f, word)
        out._inv_parts = (self, other)
        return out

    def inverse(self) -> "GroupElement":
        if self._inv is None:
            if callable(self._inv_parts):
                self._inv = self._inv_parts()
            elif self._inv_parts is not None:
                a, b = self._inv_parts
                self._inv = b.inverse() * a.inverse()
                self._inv.word = None
            else:
                self._inv = GroupElement(self.basis, self.matrix.inverse(), self.field)
            self._inv._inv = self
            self._inv_parts = None
        return self._inv

    def with_lazy_inverse(self, thunk) -> "GroupElement":
        self._inv_parts = thunk
        return self

    def with_inverse(self, inv: "GroupElement") -> "GroupElement":
        self._inv = inv
        inv._inv = self
        return self

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.basis is other.basis and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def is_identity(self) -> bool:
        return self.matrix.is_identity()

    def trace(self):
        return self.matrix.trace()

    def __repr__(self):
        return f"<GroupElement {self.basis.rs.type} over {self.field.name} nnz={self.matrix.nnz()}>"

    def to_json(self) -> dict:
        rs = self.basis.rs
        return {
            "type": str(rs.type),
            "rank": rs.rank,
            "field": self.field.name,
            "matrix": [[self.field.format(v) for v in row] for row in self.matrix.to_dense()],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "GroupElement":
        basis = build_chevalley_basis(RootSystemType.parse(doc["type"]))
        f = parse_field(doc["field"])
        rows = [[f.parse(s) for s in row] for row in doc["matrix"]]
        return cls(basis, Matrix.from_dense(rows), f)


# ---------------------------------------------------------------------------
# generators


def _require_group_type(b: ChevalleyBasis) -> None:
    t = b.rs.type
    if t.family == "A" and t.rank == 1:
        raise InvalidRank("A_1 is excluded from group-level operations")


@lru_cache(maxsize=None)
def _exp_terms(basis: ChevalleyBasis, k: int) -> tuple:
    """ad(x)^j / j! for j >= 1 until zero; integral for a Chevalley basis."""
    ad = basis.ad_matrix(k)
    terms = []
    p = ad
    j = 1
    while not p.is_zero():
        t = p.scale(Fraction(1, factorial(j)))
        assert all(Fraction(v).denominator == 1 for _, _, v in t.entries())
        terms.append(t.map(int))
        j += 1
        p = p @ ad
    return tuple(terms)


def nilpotency_index(basis: ChevalleyBasis, alpha) -> int:
    """Smallest n with ad(x_alpha)^n = 0."""
    return len(_exp_terms(basis, basis.label_index(("x", tuple(alpha))))) + 1


def _field_for(t, field: Field | None) -> Field:
    return field if field is not None else field_of(t)


def root_element(b: ChevalleyBasis, alpha, t, field: Field | None = None) -> GroupElement:
    """x_alpha(t) = exp(t ad x_alpha), a finite sum."""
    _require_group_type(b)
    alpha = b.rs.check_root(alpha)
    f = _field_for(t, field)
    t = f.coerce(t)
    k = b.rs.index[alpha]
    rows = [{i: 1} for i in range(b.dim)]
    if t != 0:
        power = t
        for term in _exp_terms(b, k):
            for i, j, v in term.entries():
                w = rows[i].get(j, 0) + power * v
                if w == 0:
                    rows[i].pop(j, None)
                else:
                    rows[i][j] = w
            power = power * t
    word = f"x({format_root(alpha)};{f.format(t)})"
    x = GroupElement(b, Matrix(b.dim, b.dim, rows), f, word)
    if t == 0:
        x._inv = x
    return x


def root_element_inverse_pair(b: ChevalleyBasis, alpha, t, field: Field | None = None) -> GroupElement:
    x = root_element(b, alpha, t, field)
    if not x.is_identity():
        x.with_inverse(root_element(b, alpha, -x.field.coerce(t), x.field))
    return x


def weyl_torus_elements(b: ChevalleyBasis, alpha, t, field: Field | None = None):
    """(n_alpha(t), h_alpha(t)) from their defining words in root elements."""
    _require_group_type(b)
    alpha = b.rs.check_root(alpha)
    f = _field_for(t, field)
    t = f.coerce(t)
    if t == 0:
        raise NonInvertibleScalar("n_alpha(t) needs t != 0")
    neg = b.rs.neg(alpha)

    def n(s):
        return (
            root_element_inverse_pair(b, alpha, s, f)
            * root_element_inverse_pair(b, neg, -1 / s, f)
            * root_element_inverse_pair(b, alpha, s, f)
        )

    na = n(t)
    h = na * n(f.coerce(-1))
    na.word = f"n({format_root(alpha)};{f.format(t)})"
    h.word = f"h({format_root(alpha)};{f.format(t)})"
    return na, h


# ---------------------------------------------------------------------------
# characters and torus elements


@dataclass(frozen=True)
class Character:
    """Values (chi(alpha_1), ..., chi(alpha_l)); extended multiplicatively."""

    values: tuple

    def __post_init__(self):
        vals = tuple(Fraction(v) if isinstance(v, int) else v for v in self.values)
        if any(v == 0 for v in vals):
            raise NonInvertibleScalar("character values must be invertible")
        object.__setattr__(self, "values", vals)

    def __call__(self, root: Sequence[int]):
        out = 1
        for v, c in zip(self.values, root):
            if c:
                out = out * v**c
        return out

    def __mul__(self, other: "Character") -> "Character":
        return Character(tuple(a * b for a, b in zip(self.values, other.values)))

    def inverse(self) -> "Character":
        return Character(tuple(_recip(v) for v in self.values))

    def is_trivial(self) -> bool:
        return all(v == 1 for v in self.values)

    @classmethod
    def trivial(cls, rank: int) -> "Character":
        return cls((Fraction(1),) * rank)


@dataclass
class TorusElement:
    element: GroupElement
    character: Character
    factors: tuple | None = None  # t_i with element == prod h_{alpha_i}(t_i), when known


def character_of_h_alpha(rs: RootSystem, alpha, t) -> Character:
    """chi_{alpha,t}: alpha_j -> t^{A(alpha, alpha_j)}."""
    alpha = rs.check_root(alpha)
    aa = rs.inner(alpha, alpha)
    if isinstance(t, int):
        t = Fraction(t)
    vals = []
    for s in rs.simple_roots:
        e = 2 * rs.inner(alpha, s) / aa
        vals.append(t ** int(e))
    return Character(tuple(vals))


def torus_from_character(b: ChevalleyBasis, chi, field: Field | None = None) -> TorusElement:
    _require_group_type(b)
    if not isinstance(chi, Character):
        chi = Character(tuple(chi))
    if field is None:
        field = QQ
        for v in chi.values:
            field = join_fields(field, field_of(v))
    vals = [field.coerce(chi(r)) for r in b.rs.roots] + [1] * b.rank
    m = Matrix.diagonal(vals)
    el = GroupElement(b, m, field)
    el._inv = GroupElement(b, Matrix.diagonal([_recip(v) for v in vals]), field)
    el._inv._inv = el
    return TorusElement(el, chi)


def torus_product(b: ChevalleyBasis, ts: Sequence, field: Field | None = None) -> TorusElement:
    """prod_i h_{alpha_i}(t_i) through characters (diagonal route)."""
    rs = b.rs
    chi = Character.trivial(rs.rank)
    for s, t in zip(rs.simple_roots, ts):
        chi = chi * character_of_h_alpha(rs, s, t)
    te = torus_from_character(b, chi, field)
    te.factors = tuple(ts)
    return te


def is_torus_element(g: GroupElement) -> bool:
    if not g.matrix.is_diagonal():
        return False
    n = g.basis.nroots
    return all(g.matrix[i, i] == 1 for i in range(n, g.basis.dim))


def character_of(g: GroupElement) -> Character:
    """Recover chi from a diagonal torus element."""
    if not is_torus_element(g):
        raise ValueError("not a torus element")
    rs = g.basis.rs
    return Character(tuple(g.matrix[rs.index[s], rs.index[s]] for s in rs.simple_roots))


# ---------------------------------------------------------------------------
# commutator formula


def group_commutator(x: GroupElement, y: GroupElement) -> GroupElement:
    """x y x^-1 y^-1."""
    return x * y * x.inverse() * y.inverse()


def commutator_roots(rs: RootSystem, alpha, beta) -> list[tuple[int, int]]:
    """(i, j) with i, j >= 1 and i alpha + j beta a root, ordered by (i + j, i)."""
    out = []
    for i in range(1, 4):
        for j in range(1, 4):
            if rs.is_root(tuple(i * a + j * c for a, c in zip(alpha, beta))):
                out.append((i, j))
    return sorted(out, key=lambda ij: (ij[0] + ij[1], ij[0]))


def commutator_constants(b: ChevalleyBasis, alpha, beta, t, u) -> dict:
    """Constants c_ij with [x_alpha(t), x_beta(u)] = prod x_{i alpha + j beta}(c_ij t^i u^j).

    The product is peeled one factor at a time in (i + j, i) order. The lowest
    remaining root receives no cross terms, so its parameter can be read off
    from the column of a Cartan coordinate.
    """
    rs = b.rs
    alpha, beta = rs.check_root(alpha), rs.check_root(beta)
    t, u = Fraction(t), Fraction(u)
    m = group_commutator(root_element_inverse_pair(b, alpha, t), root_element_inverse_pair(b, beta, u))
    consts = {}
    for i, j in commutator_roots(rs, alpha, beta):
        gamma = tuple(i * a + j * c for a, c in zip(alpha, beta))
        k = next(k for k in range(rs.rank) if rs.cartan[k] and sum(rs.cartan[k][q] * gamma[q] for q in range(rs.rank)))
        a_k = sum(rs.cartan[k][q] * gamma[q] for q in range(rs.rank))
        s = -m.matrix[rs.index[gamma], b.nroots + k] / a_k
        consts[(i, j)] = s / (t**i * u**j)
        m = root_element_inverse_pair(b, gamma, -s) * m
    if not m.is_identity():
        raise ArithmeticError("commutator is not a product over i alpha + j beta")
    return consts


def commutator_product(b: ChevalleyBasis, alpha, beta, consts: dict, t, u) -> GroupElement:
    rs = b.rs
    out = GroupElement.identity(b)
    for (i, j), c in sorted(consts.items(), key=lambda kv: (kv[0][0] + kv[0][1], kv[0][0])):
        gamma = tuple(i * a + j * c2 for a, c2 in zip(alpha, beta))
        out = out * root_element_inverse_pair(b, rs.check_root(gamma), c * Fraction(t) ** i * Fraction(u) ** j)
    return out


# ---------------------------------------------------------------------------
# decomposition of the torus


def _prod_pow(values: Sequence, exps: Sequence[int]):
    out = 1
    for v, e in zip(values, exps):
        if e:
            out = out * v**e
    return out


def _unimodular_solution_exponents(cartan: Sequence[Sequence[int]]) -> list[list[int]]:
    """Integer matrix M with t_i = prod_j a_j^{M[i][j]} solving prod_i t_i^{C[i][j]} = a_j."""
    l = len(cartan)
    # solve C^T M^T = I over Q, then check integrality
    ct = [[Fraction(cartan[j][i]) for j in range(l)] for i in range(l)]
    aug = [row + [Fraction(int(i == k)) for k in range(l)] for i, row in enumerate(ct)]
    for col in range(l):
        piv = next(r for r in range(col, l) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(l):
            if r != col and aug[r][col] != 0:
                c = aug[r][col]
                aug[r] = [x - c * y for x, y in zip(aug[r], aug[col])]
    inv = [row[l:] for row in aug]  # (C^T)^{-1}
    assert all(v.denominator == 1 for row in inv for v in row)
    return [[int(v) for v in row] for row in inv]


def decomposition_factors(rs: RootSystem, a: Sequence) -> list:
    """t_1..t_l of h_1 = prod h_{alpha_i}(t_i) for h = h(chi) with chi(alpha_i) = a_i."""
    fam, l = rs.type.family, rs.rank
    a = [Fraction(x) if isinstance(x, int) else x for x in a]

    def chain(i):  # 1-based: (a_1^{i-1} a_2^{i-2} ... a_{i-1})^{-1}
        return _recip(_prod_pow(a[: i - 1], [i - 1 - k for k in range(i - 1)]))

    t = [None] * (l + 1)  # 1-based
    if fam in ("A", "C"):
        t[1] = 1
        for i in range(2, l + 1):
            t[i] = chain(i)
    elif fam == "B":
        t[l] = 1
        for i in range(1, l):
            # t_{l-i} = (a_l^i a_{l-1}^{i-1} ... a_{l-i+1})^{-1}
            t[l - i] = _recip(_prod_pow([a[l - 1 - k] for k in range(i)], [i - k for k in range(i)]))
    elif fam == "D":
        t[1] = t[l] = 1
        for i in range(2, l):
            t[i] = chain(i)
    elif fam == "E" and l in (6, 7):
        t[1] = t[l - 1] = 1
        for i in range(2, l - 1):
            t[i] = chain(i)
        # t_l = a_1^{l-4} a_2^{l-5} ... a_{l-4} a_{l-1}^{-1}
        t[l] = _prod_pow(a[: l - 4], [l - 4 - k for k in range(l - 4)]) / a[l - 2]
    else:
        m = _unimodular_solution_exponents(rs.cartan)
        return [_prod_pow(a, m[i]) for i in range(l)]
    return t[1:]


def decompose_torus(b: ChevalleyBasis, h) -> tuple[TorusElement, TorusElement]:
    """h = h1 * h2 with h1 = prod h_{alpha_i}(t_i) in H and h2 fixing x_{alpha_i}, i in I."""
    if isinstance(h, GroupElement):
        h = TorusElement(h, character_of(h))
    field = h.element.field
    ts = [field.coerce(t) for t in decomposition_factors(b.rs, h.character.values)]
    h1 = torus_product(b, ts, field)
    chi2 = h1.character.inverse() * h.character
    h2 = torus_from_character(b, chi2, field)
    return h1, h2


def h2_block_shape(b: ChevalleyBasis, h2: GroupElement) -> tuple[int, int, int]:
    """Positional check of diag(1 x (|Phi|-k), * x k, 1 x l); returns the three lengths."""
    rs = b.rs
    k = count_k(rs)
    n = len(rs.roots)
    diag = h2.matrix.diagonal_values()
    if not h2.matrix.is_diagonal():
        raise ValueError("h2 is not diagonal")
    if any(v != 1 for v in diag[: n - k]) or any(v != 1 for v in diag[n:]):
        raise ValueError("h2 does not have the expected block shape")
    return n - k, k, rs.rank


# ---------------------------------------------------------------------------
# counts and degrees


def count_k(rs: RootSystem) -> int:
    """Roots with a nonzero coefficient outside the torus index set I."""
    return sum(1 for r in rs.roots if not rs.supported_on_index_set(r))


def k_closed_form(t: RootSystemType) -> int:
    f, l = t.family, t.rank
    if f == "A":
        return 2 * l
    if f == "B":
        return 2 * (2 * l - 1)
    if f == "C":
        return l * (l + 1)
    if f == "D":
        return (l - 1) * (l + 2)
    if f == "E":
        return {6: 52, 7: 96, 8: 0}[l]
    return 0


def listed_max_degree_root(t: RootSystemType) -> Root:
    f, l = t.family, t.rank
    if f in "ADE":
        return (1,) * l
    if f == "B":
        return (1,) * (l - 1) + (2,)
    if f == "C":
        return (2,) * (l - 1) + (1,)
    if f == "F":
        return (0, -2, -1, 0)
    return (-3, -1)


@dataclass
class DegreeTable:
    degrees: dict  # root -> int
    argmax: Root
    max_abs: int
    listed: Root
    listed_is_root: bool
    listed_attains_max: bool
    listed_degree: int  # value of the linear form at the listed vector
    strict_in_sign_class: bool


def torus_degrees(rs: RootSystem) -> DegreeTable:
    """Degree of T at each x_beta in g(T) = prod_i h_{alpha_i}(T): sum_i A(alpha_i, beta)."""
    col = [sum(rs.cartan[i][k] for i in range(rs.rank)) for k in range(rs.rank)]

    def d(beta):
        return sum(c * x for c, x in zip(col, beta))

    degrees = {r: d(r) for r in rs.roots}
    max_abs = max(abs(v) for v in degrees.values())
    argmax = next(r for r in rs.roots if abs(degrees[r]) == max_abs)
    listed = listed_max_degree_root(rs.type)
    is_root = rs.is_root(listed)
    attains = is_root and abs(degrees[listed]) == max_abs
    others = [r for r in rs.roots if r not in (listed, rs.neg(listed))]
    strict = attains and all(abs(degrees[r]) < max_abs for r in others)
    return DegreeTable(degrees, argmax, max_abs, listed, is_root, attains, d(listed), strict)


# ---------------------------------------------------------------------------
# element expression language


_TOKEN = re.compile(r"^([xhn])\((\[[^\]]*\]);(.+)\)$")


def parse_element(b: ChevalleyBasis, expr: str, field: Field = QQ) -> GroupElement:
    """Product of whitespace-separated tokens ``x(alpha;t)``, ``h(alpha;t)``, ``n(alpha;t)``."""
    out = GroupElement.identity(b, field)
    for tok in expr.split():
        m = _TOKEN.match(tok)
        if not m:
            raise ParseError(f"bad generator token {tok!r}")
        kind, alpha, t = m.group(1), parse_root(m.group(2)), field.parse(m.group(3))
        if not b.rs.is_root(alpha):
            raise NotARoot(f"{list(alpha)} is not a root of {b.rs.type}")
        if kind == "x":
            g = root_element_inverse_pair(b, alpha, t, field)
        else:
            n_el, h_el = weyl_torus_elements(b, alpha, t, field)
            g = n_el if kind == "n" else h_el
        out = out * g
    out.word = expr.strip()
    return out


def random_word(b: ChevalleyBasis, rng: random.Random, length: int = 2, field: Field = QQ, max_param: int = 3) -> GroupElement:
    """Product of ``length`` root elements with small nonzero rational parameters."""
    roots = b.rs.roots
    out = GroupElement.identity(b, field)
    toks = []
    for _ in range(length):
        alpha = roots[rng.randrange(len(roots))]
        num = rng.randint(1, max_param) * rng.choice((-1, 1))
        den = rng.randint(1, max_param)
        t = Fraction(num, den)
        out = out * root_element_inverse_pair(b, alpha, t, field)
        toks.append(f"x({format_root(alpha)};{field.format(t)})")
    out.word = " ".join(toks)
    return out


def element_to_json(g: GroupElement) -> str:
    return json.dumps(g.to_json(), sort_keys=True)
