"""Shared fixtures and independent oracles."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from chevtwist.lie import build_chevalley_basis
from chevtwist.roots import RootSystemType


def basis(name: str):
    return build_chevalley_basis(RootSystemType.parse(name))


def reflection_closure(cartan) -> set:
    """All roots as the orbit of the simple roots under simple reflections.

    s_i(beta) = beta - <beta, alpha_i^vee> alpha_i, where the pairing is read
    off the Cartan matrix C[i][j] = <alpha_j, alpha_i^vee>.
    """
    l = len(cartan)
    frontier = [tuple(int(i == j) for j in range(l)) for i in range(l)]
    seen = set(frontier)
    while frontier:
        nxt = []
        for beta in frontier:
            for i in range(l):
                pair = sum(cartan[i][j] * beta[j] for j in range(l))
                img = tuple(b - (pair if k == i else 0) for k, b in enumerate(beta))
                if img not in seen:
                    seen.add(img)
                    nxt.append(img)
        frontier = nxt
    return seen


def cofactor_det(m) -> Fraction:
    n = len(m)
    if n == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * cofactor_det([r[:j] + r[j + 1:] for r in m[1:]]) for j in range(n) if m[0][j])


def small_fraction(rng: random.Random, bound: int = 9) -> Fraction:
    num = 0
    while num == 0:
        num = rng.randint(-bound, bound)
    return Fraction(num, rng.randint(1, bound))


@pytest.fixture
def rng():
    return random.Random(20240613)


_ACCEPTANCE: list = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for i, title, ok, detail in sorted(_ACCEPTANCE):
        line = f"criterion {i:2d} {'PASS' if ok else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail and not ok else ""))
