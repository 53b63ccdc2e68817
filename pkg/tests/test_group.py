from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chevtwist.errors import FieldMismatch, InvalidRank, NonInvertibleScalar, NotARoot, ParseError
from chevtwist.group import (
    Character,
    GroupElement,
    character_of,
    character_of_h_alpha,
    commutator_constants,
    commutator_product,
    count_k,
    decompose_torus,
    group_commutator,
    h2_block_shape,
    k_closed_form,
    nilpotency_index,
    parse_element,
    root_element,
    torus_degrees,
    torus_from_character,
    torus_product,
    weyl_torus_elements,
)
from chevtwist.roots import RootSystemType, enumerate_roots
from chevtwist.scalars import QQ, QT, QuadraticField, QuadraticScalar, RationalFunction

from conftest import basis, small_fraction

nonzero = st.builds(lambda n, s, d: Fraction(s * n, d), st.integers(1, 999), st.sampled_from([1, -1]), st.integers(1, 20))


def apply_vec(m, v: dict) -> dict:
    out: dict = {}
    for j, c in v.items():
        for i in range(m.nrows):
            a = m.rows[i].get(j)
            if a is not None:
                out[i] = out.get(i, 0) + a * c
    return {k: c for k, c in out.items() if c != 0}


def preserves_brackets(b, m) -> bool:
    for i in range(b.dim):
        for j in range(i + 1, b.dim):
            lhs = apply_vec(m, b.bracket({i: 1}, {j: 1}))
            rhs = b.bracket(apply_vec(m, {i: 1}), apply_vec(m, {j: 1}))
            if lhs != rhs:
                return False
    return True


# root elements -------------------------------------------------------------


def test_root_element_zero_and_errors():
    b = basis("A2")
    assert root_element(b, (1, 0), 0).is_identity()
    with pytest.raises(NotARoot):
        root_element(b, (1, -1), 1)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["A2", "B2", "G2", "C3"]), st.data(), nonzero, nonzero)
def test_root_element_additive(name, data, t1, t2):
    b = basis(name)
    a = data.draw(st.sampled_from(b.rs.roots))
    assert root_element(b, a, t1) * root_element(b, a, t2) == root_element(b, a, t1 + t2)


@pytest.mark.parametrize("name", ["A2", "G2"])
def test_root_element_is_a_lie_automorphism(name, rng):
    b = basis(name)
    for a in b.rs.roots:
        assert preserves_brackets(b, root_element(b, a, small_fraction(rng)).matrix)


def test_nilpotency_bound():
    for name in ["A4", "B4", "C4", "D4", "F4", "G2"]:
        b = basis(name)
        assert max(nilpotency_index(b, a) for a in b.rs.roots) <= 5
    assert max(nilpotency_index(basis("G2"), a) for a in basis("G2").rs.roots) == 4  # strings of length 4


def test_root_element_over_other_fields():
    b = basis("A2")
    k = QuadraticField(3)
    x = root_element(b, (1, 1), QuadraticScalar(1, 1, 3))
    assert x.field == k
    assert (x * x.inverse()).is_identity()
    f = root_element(b, (0, 1), RationalFunction.T)
    assert f.field == QT
    with pytest.raises(FieldMismatch):
        x * f


def test_a1_rejected():
    b = basis("A1")
    with pytest.raises(InvalidRank):
        root_element(b, (1,), 1)


# torus ---------------------------------------------------------------------


def test_weyl_torus_examples():
    b = basis("A2")
    a1, a2 = b.rs.simple_roots
    assert weyl_torus_elements(b, a1, 1)[1].is_identity()
    _, h = weyl_torus_elements(b, a1, Fraction(5))
    k = b.rs.index[a2]
    assert h.matrix[k, k] == Fraction(1, 5)
    with pytest.raises(NonInvertibleScalar):
        weyl_torus_elements(b, a1, 0)


@settings(max_examples=20, deadline=None)
@given(nonzero, nonzero)
def test_h_multiplicative(t1, t2):
    b = basis("B2")
    a = b.rs.roots[3]
    h = lambda t: weyl_torus_elements(b, a, t)[1]  # noqa: E731
    assert h(t1) * h(t2) == h(t1 * t2)


@pytest.mark.parametrize("name", ["A2", "B2", "G2"])
def test_diagonal_law(name, rng):
    b = basis(name)
    rs = b.rs
    for a in rs.roots:
        t = small_fraction(rng)
        _, h = weyl_torus_elements(b, a, t)
        assert h.matrix.is_diagonal()
        for beta in rs.roots:
            k = rs.index[beta]
            expo = 2 * rs.inner(a, beta) / rs.inner(a, a)
            assert h.matrix[k, k] == t ** int(expo)
        assert all(h.matrix[k, k] == 1 for k in range(b.nroots, b.dim))
        assert h == torus_from_character(b, character_of_h_alpha(rs, a, t)).element


def test_torus_from_character_examples():
    b = basis("A2")
    assert torus_from_character(b, (1, 1)).element.is_identity()
    h = torus_from_character(b, (2, 1)).element
    k = b.rs.index[(1, 1)]
    assert h.matrix[k, k] == 2
    with pytest.raises(NonInvertibleScalar):
        torus_from_character(b, (0, 1))


@settings(max_examples=30, deadline=None)
@given(st.lists(nonzero, min_size=6, max_size=6))
def test_character_multiplicative(vals):
    b = basis("C3")
    c1, c2 = Character(tuple(vals[:3])), Character(tuple(vals[3:]))
    assert torus_from_character(b, c1).element * torus_from_character(b, c2).element == torus_from_character(b, c1 * c2).element


# decomposition ----------------------------------------------------------------

DECOMP_TYPES = ["A2", "A4", "B3", "B5", "C3", "C5", "D4", "D5", "D6", "E6", "F4", "G2"]


def test_decompose_examples():
    b = basis("A2")
    h1, h2 = decompose_torus(b, torus_from_character(b, (4, 9)))
    assert h1.factors == (1, Fraction(1, 4))
    k = b.rs.index[(1, 0)]
    assert h2.element.matrix[k, k] == 1
    assert h1.element * h2.element == torus_from_character(b, (4, 9)).element
    one, two = decompose_torus(b, torus_from_character(b, (1, 1)))
    assert one.element.is_identity() and two.element.is_identity()


@pytest.mark.parametrize("name", ["E8", "F4", "G2"])
def test_decompose_unimodular_types(name, rng):
    b = basis(name)
    for _ in range(5):
        chi = [small_fraction(rng) for _ in range(b.rank)]
        _, h2 = decompose_torus(b, torus_from_character(b, chi))
        assert h2.element.is_identity()


@pytest.mark.parametrize("name", DECOMP_TYPES)
def test_decompose_round_trip(name, rng):
    b = basis(name)
    rs = b.rs
    for _ in range(25):
        h = torus_from_character(b, [small_fraction(rng) for _ in range(b.rank)])
        h1, h2 = decompose_torus(b, h)
        assert h1.element * h2.element == h.element
        assert h1.element == torus_product(b, h1.factors).element
        for beta in rs.roots:
            if rs.supported_on_index_set(beta):
                k = rs.index[beta]
                assert h2.element.matrix[k, k] == 1
        assert h2_block_shape(b, h2.element) == (len(rs.roots) - count_k(rs), count_k(rs), rs.rank)


def test_decompose_over_quadratic_field():
    b = basis("B3")
    k = QuadraticField(2)
    h = torus_from_character(b, (k.element(1, 1), Fraction(3), k.element(0, 2)), k)
    h1, h2 = decompose_torus(b, h)
    assert h1.element * h2.element == h.element


# counts and degrees -------------------------------------------------------------


@pytest.mark.parametrize(
    "name,k",
    [("A5", 10), ("B4", 14), ("C4", 20), ("D5", 28), ("E6", 52), ("E7", 96), ("E8", 0), ("F4", 0), ("G2", 0)],
)
def test_count_k_examples(name, k):
    rs = enumerate_roots(name)
    assert count_k(rs) == k == k_closed_form(rs.type)
    assert count_k(rs) == len(rs.roots) - sum(1 for r in rs.roots if rs.supported_on_index_set(r))


def test_degrees_examples():
    dt = torus_degrees(enumerate_roots("A3"))
    assert dt.degrees[(1, 1, 1)] == 2
    assert dt.degrees[(0, 1, 0)] == 0
    g2 = torus_degrees(enumerate_roots("G2"))
    assert g2.listed == (-3, -1) and g2.listed_attains_max
    assert g2.degrees[(-3, -1)] == -sum(sum(row[k] * c for k, c in enumerate((3, 1))) for row in enumerate_roots("G2").cartan)


def test_degrees_f4_listed_vector_is_not_a_root():
    dt = torus_degrees(enumerate_roots("F4"))
    assert not dt.listed_is_root
    assert dt.max_abs == 2 and dt.listed_degree == 2


@pytest.mark.parametrize("name", ["A4", "B3", "C4", "D5", "E6", "E7", "E8"])
def test_degrees_listed_root_attains_max(name):
    dt = torus_degrees(enumerate_roots(name))
    assert dt.listed_is_root and dt.listed_attains_max


# commutator formula ------------------------------------------------------------------


def test_commutator_formula_a3(rng):
    b = basis("A3")
    pos = b.rs.positive_roots
    for a in pos:
        for c in pos:
            if a == c:
                continue
            consts = commutator_constants(b, a, c, 2, 3)
            t, u = small_fraction(rng), small_fraction(rng)
            assert group_commutator(root_element(b, a, t), root_element(b, c, u)) == commutator_product(b, a, c, consts, t, u)


# expressions and JSON ------------------------------------------------------------------


def test_parse_element():
    b = basis("A2")
    g = parse_element(b, "x([1,0];2) h([0,1];3) n([1,1];-1/2)")
    expected = root_element(b, (1, 0), 2) * weyl_torus_elements(b, (0, 1), 3)[1] * weyl_torus_elements(b, (1, 1), Fraction(-1, 2))[0]
    assert g == expected
    with pytest.raises(ParseError):
        parse_element(b, "y([1,0];2)")
    with pytest.raises(NotARoot):
        parse_element(b, "x([2,0];2)")


def test_json_round_trip():
    b = basis("B2")
    k = QuadraticField(2)
    g = parse_element(b, "x([1,1];1+1*sqrt(2)) h([0,1];3)", k)
    doc = json.loads(json.dumps(g.to_json()))
    assert doc["field"] == "Q(sqrt(2))" and doc["type"] == "B2"
    assert GroupElement.from_json(doc) == g


def test_inverse_is_tracked_without_elimination():
    b = basis("E6")
    rng = random.Random(3)
    g = GroupElement.identity(b)
    for _ in range(4):
        a = b.rs.roots[rng.randrange(len(b.rs.roots))]
        g = g * parse_element(b, f"x({list(a)};{small_fraction(rng)})".replace(" ", ""))
    assert (g * g.inverse()).is_identity()


def test_character_of_round_trip():
    b = basis("D4")
    chi = (Fraction(2), Fraction(3, 5), Fraction(-1), Fraction(7))
    assert character_of(torus_from_character(b, chi).element).values == chi


def test_fields_are_not_radically_closed():
    assert not QQ.power_equations_solvable and not QT.power_equations_solvable
    assert not QuadraticField(2).power_equations_solvable


def test_type_parse():
    assert RootSystemType.parse("E7") == RootSystemType("E", 7)
