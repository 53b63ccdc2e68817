"""Automorphisms in semilinear normal form and twisted-conjugacy invariants.

An automorphism is stored by its four parts ``rho`` (diagram symmetry),
``delta`` (field automorphism), ``chi`` (torus character) and ``g`` (inner
element), meaning the composite  rho-bar . delta-bar . phi_h(chi) . phi_g.
On matrices it acts as ``x -> Q sigma(x) Q^-1`` with

    Q = R_rho . delta(h(chi) g),    sigma = delta

where ``R_rho`` is the signed permutation realising the graph automorphism.

The class invariant of ``g`` is ``psi(g) = tr(Psi(g) N)`` with the twisted norm
``Psi(g) = g phi(g) ... phi^{m-1}(g)`` and ``N = Q sigma(Q) ... sigma^{m-1}(Q)``.
It telescopes to ``tr(prod_k sigma^k(g Q))``, which is what the fast path uses.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Sequence

from .errors import (
    ConstantInvariant,
    ExhaustedCandidates,
    FieldMismatch,
    IncompatibleField,
    InconsistentSigns,
    NoSuchSymmetry,
)
from .group import (
    Character,
    GroupElement,
    decompose_torus,
    join_fields,
    parse_element,
    random_word,
    torus_from_character,
    torus_product,
    weyl_torus_elements,
)
from .lie import ChevalleyBasis, build_chevalley_basis
from .matrix import Matrix
from .roots import DiagramSymmetry, RootSystemType, diagram_symmetries
from .scalars import QQ, Field, FieldAutomorphism, RationalFunction, apply_field_automorphism
from .scalars import distinct_value_inputs, nu, nu_pairwise_disjoint, parse_field

# ---------------------------------------------------------------------------
# graph automorphisms


@dataclass(frozen=True, eq=False)
class GraphMatrix:
    """Signed permutation e_j -> signs[j] e_perm[j] on the Chevalley basis."""

    basis: ChevalleyBasis
    rho: DiagramSymmetry
    perm: tuple
    signs: tuple

    def gamma(self, root) -> int:
        return self.signs[self.basis.rs.index[tuple(root)]]

    @property
    def matrix(self) -> Matrix:
        return Matrix.from_entries(self.basis.dim, self.basis.dim, ((p, j, s) for j, (p, s) in enumerate(zip(self.perm, self.signs))))

    @property
    def inverse_matrix(self) -> Matrix:
        return self.matrix.transpose()

    def conjugate(self, m: Matrix) -> Matrix:
        """R m R^-1."""
        return m.permute(self.perm, self.signs)

    def conjugate_inverse(self, m: Matrix) -> Matrix:
        """R^-1 m R."""
        inv = [0] * len(self.perm)
        sg = [0] * len(self.perm)
        for j, (p, s) in enumerate(zip(self.perm, self.signs)):
            inv[p] = j
            sg[p] = s
        return m.permute(inv, sg)


def _propagate_signs(b: ChevalleyBasis, rho: DiagramSymmetry) -> dict:
    rs = b.rs
    gamma = {}
    for sign in (1, -1):
        for s in rs.simple_roots:
            gamma[tuple(sign * c for c in s)] = 1
        ordered = sorted(rs.positive_roots, key=lambda r: (sum(r), r))
        for xi in ordered:
            if sum(xi) == 1:
                continue
            xi_s = tuple(sign * c for c in xi)
            for s in rs.simple_roots:
                a = tuple(sign * c for c in s)
                rest = rs.add(xi_s, rs.neg(a))
                if rest in gamma:
                    n_src = b.N(a, rest)
                    n_img = b.N(rho.on_root(a), rho.on_root(rest))
                    val = Fraction(gamma[a] * gamma[rest] * n_img, n_src)
                    if val not in (1, -1):
                        raise InconsistentSigns(f"sign for {xi_s} is {val}")
                    gamma[xi_s] = int(val)
                    break
    return gamma


def _check_signs(b: ChevalleyBasis, rho: DiagramSymmetry, gamma: dict) -> None:
    rs = b.rs
    for a in rs.roots:
        if gamma[a] * gamma[rs.neg(a)] != 1:
            raise InconsistentSigns(f"gamma({a}) gamma(-{a}) != 1")
        for c in rs.roots:
            s = rs.add(a, c)
            if s in rs.index:
                lhs = gamma[s] * b.N(a, c)
                rhs = gamma[a] * gamma[c] * b.N(rho.on_root(a), rho.on_root(c))
                if lhs != rhs:
                    raise InconsistentSigns(f"bracket of {a}, {c} not preserved")


@lru_cache(maxsize=None)
def graph_matrix(b: ChevalleyBasis, rho: DiagramSymmetry) -> GraphMatrix:
    rs = b.rs
    if rho not in diagram_symmetries(rs.type):
        raise NoSuchSymmetry(f"{rho.one_based()} is not a diagram symmetry of {rs.type}")
    gamma = _propagate_signs(b, rho)
    _check_signs(b, rho, gamma)
    perm = [0] * b.dim
    signs = [1] * b.dim
    for k, r in enumerate(rs.roots):
        perm[k] = rs.index[rho.on_root(r)]
        signs[k] = gamma[r]
    for i in range(rs.rank):
        perm[b.nroots + i] = b.nroots + rho.perm[i]
    return GraphMatrix(b, rho, tuple(perm), tuple(signs))


# ---------------------------------------------------------------------------
# automorphisms


def _sigma_matrix(delta: FieldAutomorphism, m: Matrix) -> Matrix:
    if delta.is_identity:
        return m
    return m.map(lambda v: apply_field_automorphism(delta, v))


def _sigma_element(delta: FieldAutomorphism, g: GroupElement) -> GroupElement:
    if delta.is_identity or g.field == QQ:
        return g
    out = GroupElement(g.basis, _sigma_matrix(delta, g.matrix), g.field)
    return out.with_lazy_inverse(lambda: GroupElement(g.basis, _sigma_matrix(delta, g.inverse().matrix), g.field))


class Automorphism:
    """rho-bar . delta-bar . phi_h(chi) . phi_g in semilinear form (Q, sigma)."""

    def __init__(
        self,
        basis: ChevalleyBasis,
        field: Field = QQ,
        rho: DiagramSymmetry | None = None,
        delta: FieldAutomorphism | None = None,
        chi: Character | None = None,
        inner: GroupElement | None = None,
        reduction: dict | None = None,
    ):
        self.basis = basis
        self.field = field
        self.rho = rho if rho is not None else DiagramSymmetry(tuple(range(basis.rank)))
        self.delta = delta if delta is not None else FieldAutomorphism()
        self.chi = None if chi is None or chi.is_trivial() else chi
        self.inner = None if inner is None or inner.is_identity() else inner
        self.reduction = reduction
        self._q = None

    # parts --------------------------------------------------------------

    @property
    def sigma(self) -> FieldAutomorphism:
        return self.delta

    @property
    def graph(self) -> GraphMatrix:
        return graph_matrix(self.basis, self.rho)

    @property
    def m(self) -> int:
        return lcm(self.rho.order, self.delta.order())

    def torus_element(self) -> GroupElement | None:
        if self.chi is None:
            return None
        return torus_from_character(self.basis, self.chi, self.field).element

    def is_reduced(self) -> bool:
        return self.inner is None

    def is_identity(self) -> bool:
        return self.rho.is_identity() and self.delta.is_identity and self.chi is None and self.inner is None

    def _hg(self) -> GroupElement:
        b = self.basis
        hg = GroupElement.identity(b, self.field)
        h = self.torus_element()
        if h is not None:
            hg = h
        if self.inner is not None:
            hg = hg * self.inner
        return _sigma_element(self.delta, hg)

    def _build_q(self):
        hg = self._hg()
        gm = self.graph
        q = hg.matrix if self.rho.is_identity() else gm.matrix @ hg.matrix

        def qinv():
            m = hg.inverse().matrix
            return m if self.rho.is_identity() else m @ gm.inverse_matrix

        self._q = (q, qinv, [None])

    @property
    def Q(self) -> Matrix:
        if self._q is None:
            self._build_q()
        return self._q[0]

    @property
    def Q_inverse(self) -> Matrix:
        if self._q is None:
            self._build_q()
        cache = self._q[2]
        if cache[0] is None:
            cache[0] = self._q[1]()
        return cache[0]

    def N(self) -> Matrix:
        """Q sigma(Q) ... sigma^{m-1}(Q)."""
        out = self.Q
        s = self.delta
        for _ in range(1, self.m):
            out = out @ _sigma_matrix(s, self.Q)
            s = s.compose(self.delta)
        return out

    # action ---------------------------------------------------------------

    def _check_element(self, x: GroupElement) -> None:
        if x.basis is not self.basis:
            raise FieldMismatch("element belongs to a different Chevalley group")
        join_fields(self.field, x.field)
        if x.field != QQ and x.field != self.field:
            raise FieldMismatch(f"element over {x.field.name}, automorphism over {self.field.name}")

    def __call__(self, x: GroupElement) -> GroupElement:
        return apply(self, x)

    def compose(self, other: "Automorphism") -> "Automorphism":
        return compose(self, other)

    def to_json(self) -> dict:
        f = self.field
        inner = None
        if self.inner is not None:
            inner = self.inner.word if self.inner.word else [[f.format(v) for v in r] for r in self.inner.matrix.to_dense()]
        out = {
            "rho": None if self.rho.is_identity() else self.rho.one_based(),
            "delta": self.delta.describe(),
            "chi": None if self.chi is None else [f.format(v) for v in self.chi.values],
            "inner": inner,
        }
        if self.reduction is not None:
            out["reduction"] = self.reduction
        return out

    @classmethod
    def from_json(cls, basis: ChevalleyBasis, f: Field, doc: dict) -> "Automorphism":
        rho = None if doc.get("rho") is None else DiagramSymmetry(tuple(p - 1 for p in doc["rho"]))
        chi = None if doc.get("chi") is None else Character(tuple(f.parse(s) for s in doc["chi"]))
        inner = doc.get("inner")
        if isinstance(inner, str):
            inner = parse_element(basis, inner, f)
        elif inner is not None:
            inner = GroupElement(basis, Matrix.from_dense([[f.parse(s) for s in r] for r in inner]), f)
        return make_automorphism(basis, f, rho, FieldAutomorphism.parse(doc.get("delta", "id")), chi, inner, doc.get("reduction"))

    def __repr__(self):
        return f"<Automorphism {self.basis.rs.type}/{self.field.name} {json.dumps(self.to_json(), sort_keys=True)}>"


def make_automorphism(
    basis: ChevalleyBasis,
    field: Field = QQ,
    rho: DiagramSymmetry | Sequence[int] | None = None,
    delta: FieldAutomorphism | None = None,
    chi: Character | Sequence | None = None,
    inner: GroupElement | None = None,
    reduction: dict | None = None,
) -> Automorphism:
    """Validate the parts and return the automorphism; ``rho`` may be a 0-based permutation."""
    if rho is not None and not isinstance(rho, DiagramSymmetry):
        rho = DiagramSymmetry(tuple(rho))
    if rho is not None:
        if len(rho.perm) != basis.rank or rho not in diagram_symmetries(basis.rs.type):
            raise NoSuchSymmetry(f"{list(rho.perm)} is not a diagram symmetry of {basis.rs.type}")
    delta = delta or FieldAutomorphism()
    if not delta.compatible_with(field):
        raise IncompatibleField(f"{delta.describe()} does not act on {field.name}")
    if chi is not None:
        if not isinstance(chi, Character):
            if len(chi) != basis.rank:
                raise IncompatibleField(f"character needs {basis.rank} values")
            chi = Character(tuple(field.coerce(v) if _fits(field, v) else _bad(field, v) for v in chi))
        else:
            for v in chi.values:
                if not _fits(field, v):
                    _bad(field, v)
    if inner is not None:
        if inner.basis is not basis:
            raise IncompatibleField("inner element belongs to a different group")
        if inner.field != QQ and inner.field != field:
            raise IncompatibleField(f"inner element over {inner.field.name}, expected {field.name}")
    return Automorphism(basis, field, rho, delta, chi, inner, reduction)


def _fits(f: Field, v) -> bool:
    try:
        f.coerce(v)
        return True
    except FieldMismatch:
        return False


def _bad(f: Field, v):
    raise IncompatibleField(f"{v!r} is not in {f.name}")


def apply(phi: Automorphism, x: GroupElement) -> GroupElement:
    """Q sigma(x) Q^-1."""
    phi._check_element(x)
    f = join_fields(phi.field, x.field)
    sx = _sigma_matrix(phi.delta, x.matrix)
    out = GroupElement(phi.basis, phi.Q @ sx @ phi.Q_inverse, f)

    def inv():
        xi = x.inverse()
        return GroupElement(phi.basis, phi.Q @ _sigma_matrix(phi.delta, xi.matrix) @ phi.Q_inverse, f)

    return out.with_lazy_inverse(inv)


def _pull_back(psi2: Automorphism, y: GroupElement) -> GroupElement:
    """(rho2-bar delta2-bar)^-1 (y) = delta2^-1(R2^-1 y R2)."""
    gm = psi2.graph
    dinv = psi2.delta.inverse()
    m = gm.conjugate_inverse(y.matrix)
    m = _sigma_matrix(dinv, m)
    out = GroupElement(y.basis, m, y.field)

    def inv():
        return GroupElement(y.basis, _sigma_matrix(dinv, gm.conjugate_inverse(y.inverse().matrix)), y.field)

    return out.with_lazy_inverse(inv)


def compose(phi1: Automorphism, phi2: Automorphism) -> Automorphism:
    """phi1 after phi2, brought back to normal form.

    Uses  phi_y . psi = psi . phi_{psi^-1(y)}  for psi = rho2-bar delta2-bar, the
    torus pull-back chi -> delta2^-1(chi . rho2) and h2^-1 g h2 to move g past h2.
    """
    if phi1.basis is not phi2.basis:
        raise FieldMismatch("automorphisms of different groups")
    f = join_fields(phi1.field, phi2.field)
    b = phi1.basis
    rho = phi1.rho.compose(phi2.rho)
    delta = phi1.delta.compose(phi2.delta)
    dinv = phi2.delta.inverse()
    chi1 = None
    if phi1.chi is not None:
        vals = phi1.chi.values
        chi1 = Character(tuple(apply_field_automorphism(dinv, vals[phi2.rho.perm[i]]) for i in range(b.rank)))
    chi = chi1
    if phi2.chi is not None:
        chi = phi2.chi if chi is None else chi * phi2.chi
    inner = None
    if phi1.inner is not None:
        g1 = _pull_back(phi2, phi1.inner)
        if phi2.chi is not None:
            h2 = torus_from_character(b, phi2.chi, f).element
            g1 = h2.inverse() * g1 * h2
        inner = g1
    if phi2.inner is not None:
        inner = phi2.inner if inner is None else inner * phi2.inner
    return Automorphism(b, f, rho, delta, chi, inner)


def power(phi: Automorphism, k: int) -> Automorphism:
    out = Automorphism(phi.basis, phi.field)
    for _ in range(k):
        out = compose(phi, out)
    return out


def reduce_mod_inner(phi: Automorphism) -> Automorphism:
    """Drop phi_g and the H-part of the torus factor; R(phi) is unchanged."""
    b = phi.basis
    meta = {"inner_dropped": phi.inner is not None}
    chi2 = None
    if phi.chi is not None:
        te = torus_from_character(b, phi.chi, phi.field)
        h1, h2 = decompose_torus(b, te)
        meta["h1_factors"] = [phi.field.format(t) for t in h1.factors]
        meta["original_chi"] = [phi.field.format(v) for v in phi.chi.values]
        chi2 = h2.character
    return Automorphism(b, phi.field, phi.rho, phi.delta, chi2, None, reduction=meta)


def twisted_conjugate(z: GroupElement, g: GroupElement, phi: Automorphism) -> GroupElement:
    """z g phi(z^-1)."""
    phi._check_element(z)
    phi._check_element(g)
    return z * g * apply(phi, z.inverse())


# ---------------------------------------------------------------------------
# invariants


def twisted_norm(phi: Automorphism, g: GroupElement) -> tuple[GroupElement, Matrix]:
    """(Psi(g), N) computed literally by iterating phi."""
    phi._check_element(g)
    psi = g
    cur = g
    for _ in range(1, phi.m):
        cur = apply(phi, cur)
        psi = psi * cur
    return psi, phi.N()


def _norm_factors(phi: Automorphism, g: GroupElement) -> list[Matrix]:
    gq = g.matrix @ phi.Q
    out = [gq]
    for _ in range(1, phi.m):
        out.append(_sigma_matrix(phi.delta, out[-1]))
    return out


def characteristic_polynomial(a: Matrix) -> tuple:
    """Coefficients c_0..c_n of det(xI - a), via Faddeev-LeVerrier (characteristic 0)."""
    n = a.nrows
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    mk = Matrix(n, n)
    for k in range(1, n + 1):
        mk = a @ mk + Matrix.identity(n, coeffs[n - k + 1])
        coeffs[n - k] = -a.trace_of_product(mk) / k
    return tuple(coeffs)


def class_invariant(phi: Automorphism, g: GroupElement, charpoly: bool = False):
    """psi(g) = tr(Psi(g) N); with ``charpoly`` the characteristic polynomial of Psi(g) N."""
    phi._check_element(g)
    fs = _norm_factors(phi, g)
    if charpoly:
        prod = fs[0]
        for f in fs[1:]:
            prod = prod @ f
        return characteristic_polynomial(prod)
    prod = fs[0]
    for f in fs[1:-1]:
        prod = prod @ f
    if len(fs) == 1:
        return prod.trace()
    return prod.trace_of_product(fs[-1])


def symbolic_invariant(phi: Automorphism) -> dict:
    """psi(g(T)) for g(T) = prod_i h_{alpha_i}(T) as {exponent: coefficient}.

    Valid for reduced phi: g(T) is then fixed by rho, delta and commutes with Q,
    so Psi(g) N = g^m N with N's diagonal giving the coefficients.
    """
    if not phi.is_reduced():
        raise ValueError("symbolic invariant needs a reduced automorphism")
    rs = phi.basis.rs
    col = [sum(rs.cartan[i][k] for i in range(rs.rank)) for k in range(rs.rank)]
    diag = phi.N().diagonal_values()
    out: dict = {}
    for j, v in enumerate(diag):
        if v == 0:
            continue
        e = phi.m * sum(c * x for c, x in zip(col, rs.roots[j])) if j < len(rs.roots) else 0
        out[e] = out.get(e, 0) + v
    return {e: c for e, c in sorted(out.items()) if c != 0}


def _laurent_eval(poly: dict, x):
    return sum((c * Fraction(x) ** e for e, c in poly.items()), 0)


# ---------------------------------------------------------------------------
# witness certificates


def _first_primes(n: int) -> list[int]:
    from sympy import prime

    return [int(prime(k)) for k in range(1, n + 1)]


@dataclass
class WitnessCertificate:
    type: str
    rank: int
    field: str
    automorphism: dict
    m: int
    strategy: str
    elements: list
    distinct: bool
    seed: int
    invariant: str = "trace"
    symbolic: dict | None = None

    def to_json(self) -> dict:
        out = {
            "type": self.type,
            "rank": self.rank,
            "field": self.field,
            "automorphism": self.automorphism,
            "m": self.m,
            "strategy": self.strategy,
            "elements": self.elements,
            "distinct": self.distinct,
            "seed": self.seed,
            "invariant": self.invariant,
        }
        if self.symbolic is not None:
            out["symbolic"] = self.symbolic
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, doc: dict) -> "WitnessCertificate":
        return cls(
            doc["type"], doc["rank"], doc["field"], doc["automorphism"], doc["m"], doc["strategy"],
            doc["elements"], doc["distinct"], doc["seed"], doc.get("invariant", "trace"), doc.get("symbolic"),
        )

    @property
    def values(self) -> list[str]:
        return [e["invariant"] for e in self.elements]


def _format_invariant(f: Field, v) -> str:
    if isinstance(v, tuple):
        return "[" + ",".join(f.format(c) for c in v) + "]"
    return f.format(v)


def r_infinity_witness(
    phi: Automorphism,
    n: int,
    strategy: str = "P",
    seed: int = 0,
    budget: int = 1000,
    charpoly: bool = False,
) -> WitnessCertificate:
    """n elements with pairwise-distinct psi, certifying R(phi) >= n."""
    if n < 1:
        raise ValueError("n must be positive")
    red = reduce_mod_inner(phi)
    b, f = red.basis, red.field
    l = b.rank
    seen: set = set()
    elements: list = []
    symbolic = None

    def take(construction, g):
        v = class_invariant(red, g, charpoly)
        if v in seen:
            return False
        seen.add(v)
        elements.append({"construction": construction, "invariant": _format_invariant(f, v)})
        return True

    if strategy == "P":
        primes = _first_primes(l * budget) if budget <= 64 else None
        blocks = []
        k = 0
        while len(elements) < n:
            if k >= budget:
                raise ExhaustedCandidates(f"{len(elements)} of {n} distinct invariants after {budget} candidates")
            if primes is None or len(primes) < l * (k + 1):
                primes = _first_primes(l * (k + 1) * 2)
            ps = primes[l * k : l * (k + 1)]
            k += 1
            g = torus_product(b, [Fraction(p) for p in ps], f)
            if take({"primes": ps}, g.element):
                blocks.append(g)
        # nu-disjointness of the torus data across kept elements
        supports = []
        for g in blocks:
            s = frozenset()
            for a in g.character.values:
                s |= nu(a)
            supports.append(s)
        rads = [_prod(sorted(s)) for s in supports]
        if not nu_pairwise_disjoint(rads):
            raise AssertionError("prime supports overlap")
    elif strategy == "T":
        poly = symbolic_invariant(red)
        if all(e == 0 for e in poly):
            raise ConstantInvariant(f"psi(g(T)) is the constant {poly.get(0, 0)}")
        symbolic = {str(e): f.format(c) for e, c in poly.items()}
        xs = _distinct_inputs(poly, n, budget)
        for x in xs:
            g = torus_product(b, [x] * l, f).element
            expected = _laurent_eval(poly, x)
            if not take({"x": f.format(x)}, g):
                raise AssertionError("collision among inputs chosen to be distinct")
            if not charpoly and f.parse(elements[-1]["invariant"]) != f.coerce(expected):
                raise AssertionError("symbolic and matrix invariants disagree")
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    rs = b.rs
    return WitnessCertificate(
        str(rs.type), l, f.name, red.to_json(), red.m, strategy, elements,
        len(set(e["invariant"] for e in elements)) == len(elements), seed,
        "charpoly" if charpoly else "trace", symbolic,
    )


def _prod(xs):
    out = 1
    for x in xs:
        out *= x
    return out


def _distinct_inputs(poly: dict, n: int, budget: int) -> list[Fraction]:
    if all(isinstance(c, (int, Fraction)) for c in poly.values()):
        lo = min(min(poly), 0)
        num = [0] * (max(poly) - lo + 1)
        for e, c in poly.items():
            num[e - lo] = c
        den = [0] * (-lo) + [1]
        xs = distinct_value_inputs(RationalFunction(num, den), n)
        if xs and max(xs) > budget:
            raise ExhaustedCandidates(f"needed inputs up to {max(xs)}, budget {budget}")
        return xs
    out, seen = [], set()
    x = 1
    while len(out) < n:
        if x > budget:
            raise ExhaustedCandidates(f"{len(out)} of {n} distinct values after {budget} inputs")
        v = _laurent_eval(poly, x)
        if v not in seen:
            seen.add(v)
            out.append(Fraction(x))
        x += 1
    return out


# ---------------------------------------------------------------------------
# independent re-check


@dataclass
class Verification:
    ok: bool
    problems: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def verify_certificate(doc) -> Verification:
    """Recompute every psi from the raw construction data by a separate route.

    Torus elements come from the n_alpha words, Psi(g) from literal iteration
    of x -> Q sigma(x) Q^-1 with Q^-1 by elimination, N from the composition law.
    """
    if isinstance(doc, WitnessCertificate):
        doc = doc.to_json()
    if isinstance(doc, str):
        doc = json.loads(doc)
    problems = []
    b = build_chevalley_basis(RootSystemType.parse(doc["type"]))
    f = parse_field(doc["field"])
    a = doc["automorphism"]
    delta = FieldAutomorphism.parse(a.get("delta", "id"))
    rho = None if a.get("rho") is None else DiagramSymmetry(tuple(p - 1 for p in a["rho"]))
    rs = b.rs

    # Q = R delta(h g), assembled densely
    hg = Matrix.identity(b.dim)
    if a.get("chi") is not None:
        chi = [f.parse(s) for s in a["chi"]]
        vals = []
        for r in rs.roots:
            v = f.coerce(1)
            for c, x in zip(r, chi):
                v = v * x**c
            vals.append(v)
        hg = Matrix.diagonal(vals + [1] * b.rank)
    if a.get("inner") is not None:
        problems.append("certificate automorphism is not reduced")
    q = _sigma_matrix(delta, hg)
    if rho is not None:
        q = graph_matrix(b, rho).matrix @ q
    qinv = Matrix.from_dense(q.to_dense()).inverse()
    m = lcm(1 if rho is None else rho.order, delta.order())
    if m != doc["m"]:
        problems.append(f"m recorded as {doc['m']}, recomputed {m}")

    def act(x: Matrix) -> Matrix:
        return q @ _sigma_matrix(delta, x) @ qinv

    nmat = Matrix.identity(b.dim)
    s = FieldAutomorphism()
    for _ in range(m):
        nmat = nmat @ _sigma_matrix(s, q)
        s = s.compose(delta)

    seen = []
    for k, el in enumerate(doc["elements"]):
        con = el["construction"]
        if "primes" in con:
            ts = [Fraction(p) for p in con["primes"]]
        else:
            ts = [f.parse(con["x"])] * b.rank
        g = Matrix.identity(b.dim)
        for simple, t in zip(rs.simple_roots, ts):
            g = g @ weyl_torus_elements(b, simple, t, f)[1].matrix
        big = g
        cur = g
        for _ in range(1, m):
            cur = act(cur)
            big = big @ cur
        if doc.get("invariant", "trace") == "charpoly":
            val = _format_invariant(f, characteristic_polynomial(big @ nmat))
            ok = val == el["invariant"]
        else:
            val = (big @ nmat).trace()
            ok = f.coerce(val) == f.parse(el["invariant"])
        if not ok:
            problems.append(f"element {k}: recorded {el['invariant']}, recomputed {f.format(val) if not isinstance(val, str) else val}")
        seen.append(el["invariant"])
    if len(set(seen)) != len(seen):
        problems.append("invariants are not pairwise distinct")
    if doc.get("distinct") is not True:
        problems.append("distinct flag not set")
    return Verification(not problems, problems)


# ---------------------------------------------------------------------------
# [e]_phi refutation


@dataclass
class Refutation:
    z1: str
    z2: str
    psi_xy: str
    psi_e: str
    attempts: int
    automorphism: dict
    type: str
    field: str
    seed: int

    found = True

    def to_json(self) -> dict:
        return {
            "z1": self.z1, "z2": self.z2, "psi_xy": self.psi_xy, "psi_e": self.psi_e,
            "attempts": self.attempts, "automorphism": self.automorphism,
            "type": self.type, "field": self.field, "seed": self.seed,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


@dataclass
class NoRefutation:
    budget: int
    seed: int

    found = False

    def to_json(self) -> dict:
        return {"refutation": None, "budget": self.budget, "seed": self.seed}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


def unit_class_refutation(phi: Automorphism, budget: int = 10000, seed: int = 0, word_length: int = 2):
    """Search x = z1 phi(z1^-1), y = z2 phi(z2^-1) with psi(xy) != psi(e)."""
    b, f = phi.basis, phi.field
    rng = random.Random(seed)
    psi_e = phi.N().trace()
    for attempt in range(1, budget + 1):
        z1 = random_word(b, rng, word_length, f)
        z2 = random_word(b, rng, word_length, f)
        x = twisted_conjugate(z1, GroupElement.identity(b, f), phi)
        y = twisted_conjugate(z2, GroupElement.identity(b, f), phi)
        v = class_invariant(phi, x * y)
        if v != psi_e:
            return Refutation(z1.word, z2.word, f.format(v), f.format(psi_e), attempt, phi.to_json(), str(b.rs.type), f.name, seed)
    return NoRefutation(budget, seed)


def check_refutation(phi: Automorphism, ref: Refutation) -> bool:
    """Rebuild x, y from the recorded words and compare psi(xy) with psi(e)."""
    b, f = phi.basis, phi.field
    z1 = parse_element(b, ref.z1, f)
    z2 = parse_element(b, ref.z2, f)
    e = GroupElement.identity(b, f)
    xy = twisted_conjugate(z1, e, phi) * twisted_conjugate(z2, e, phi)
    psi_xy, _ = twisted_norm(phi, xy)
    val = psi_xy.matrix.trace_of_product(phi.N())
    return f.format(val) == ref.psi_xy and ref.psi_xy != ref.psi_e and f.format(phi.N().trace()) == ref.psi_e


__all__ = [
    "Automorphism",
    "GraphMatrix",
    "NoRefutation",
    "Refutation",
    "Verification",
    "WitnessCertificate",
    "apply",
    "characteristic_polynomial",
    "check_refutation",
    "class_invariant",
    "compose",
    "graph_matrix",
    "make_automorphism",
    "power",
    "r_infinity_witness",
    "reduce_mod_inner",
    "symbolic_invariant",
    "twisted_conjugate",
    "twisted_norm",
    "unit_class_refutation",
    "verify_certificate",
]
