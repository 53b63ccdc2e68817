"""Smith normal form over the integers with unimodular witnesses."""

from __future__ import annotations

import json
from typing import Sequence

from .errors import NotSquare
from .matrix import int_determinant

IntMatrix = list  # list[list[int]], row-major


def _identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    if not a:
        return []
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(cols)] for i in range(len(a))]


def smith_normal_form(m: Sequence[Sequence[int]]):
    """Return (D, U, V) with U @ M @ V == D, U and V unimodular.

    D is diagonal with nonnegative entries and d_i | d_{i+1}. Pivots are the
    nonzero entry of smallest absolute value, ties broken by (row, column).
    """
    a = [list(map(int, r)) for r in m]
    nr = len(a)
    nc = len(a[0]) if nr else 0
    if nr == 0 or nc == 0:
        raise ValueError("empty matrix")
    u = _identity(nr)
    v = _identity(nc)

    def swap_rows(i, j):
        if i != j:
            a[i], a[j] = a[j], a[i]
            u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        if i != j:
            for row in a:
                row[i], row[j] = row[j], row[i]
            for row in v:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, k):  # row dst += k * row src
        if k:
            a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
            u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, k):  # col dst += k * col src
        if k:
            for row in a:
                row[dst] += k * row[src]
            for row in v:
                row[dst] += k * row[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    for t in range(min(nr, nc)):
        while True:
            best = None
            for i in range(t, nr):
                for j in range(t, nc):
                    x = abs(a[i][j])
                    if x and (best is None or x < best[0]):
                        best = (x, i, j)
            if best is None:
                break
            _, pi, pj = best
            swap_rows(t, pi)
            swap_cols(t, pj)
            p = a[t][t]
            dirty = False
            for i in range(t + 1, nr):
                q = a[i][t] // p
                add_row(t, i, -q)
                dirty |= a[i][t] != 0
            for j in range(t + 1, nc):
                q = a[t][j] // p
                add_col(t, j, -q)
                dirty |= a[t][j] != 0
            if dirty:
                continue
            # divisibility: fold any entry not divisible by the pivot into row t
            bad = None
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(bad, t, 1)
        if best is None:
            break
        if a[t][t] < 0:
            negate_row(t)
    return a, u, v


def invariant_factors(m) -> list[int]:
    d, _, _ = smith_normal_form(m)
    return [d[i][i] for i in range(min(len(d), len(d[0])))]


def determinant(m: Sequence[Sequence[int]]) -> int:
    if any(len(r) != len(m) for r in m):
        raise NotSquare("determinant needs a square matrix")
    return int_determinant(m)


def to_json(m: IntMatrix) -> str:
    return json.dumps([[str(x) for x in r] for r in m])


def from_json(s: str) -> IntMatrix:
    return [[int(x) for x in r] for r in json.loads(s)]
