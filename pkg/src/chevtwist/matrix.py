"""Sparse exact matrices over any of the scalar fields.

Rows are stored as ``{column: value}`` dicts holding nonzero entries only.
Chevalley-group elements built from a handful of root elements stay sparse,
which is what keeps 78x78 exact products affordable in pure Python.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

from fractions import Fraction

from .errors import NotSquare, SingularMatrix


def _recip(v):
    return Fraction(1, v) if isinstance(v, int) else 1 / v


class Matrix:
    __slots__ = ("nrows", "ncols", "rows", "_hash")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[dict] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows = tuple(rows) if rows is not None else tuple({} for _ in range(nrows))
        self._hash = None

    # construction -----------------------------------------------------

    @classmethod
    def identity(cls, n: int, one=1) -> "Matrix":
        return cls(n, n, [{i: one} for i in range(n)])

    @classmethod
    def diagonal(cls, values: Sequence) -> "Matrix":
        n = len(values)
        return cls(n, n, [{i: v} if v != 0 else {} for i, v in enumerate(values)])

    @classmethod
    def from_dense(cls, data: Sequence[Sequence]) -> "Matrix":
        nrows = len(data)
        ncols = len(data[0]) if nrows else 0
        rows = []
        for r in data:
            if len(r) != ncols:
                raise ValueError("ragged matrix")
            rows.append({j: v for j, v in enumerate(r) if v != 0})
        return cls(nrows, ncols, rows)

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries: Iterable) -> "Matrix":
        rows = [{} for _ in range(nrows)]
        for i, j, v in entries:
            if v != 0:
                rows[i][j] = rows[i].get(j, 0) + v
                if rows[i][j] == 0:
                    del rows[i][j]
        return cls(nrows, ncols, rows)

    # access -----------------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i].get(j, 0)

    def to_dense(self, zero=0) -> list[list]:
        return [[r.get(j, zero) for j in range(self.ncols)] for r in self.rows]

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def entries(self):
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                yield i, j, v

    def column(self, j: int) -> list:
        return [r.get(j, 0) for r in self.rows]

    def diagonal_values(self) -> list:
        return [self.rows[i].get(i, 0) for i in range(min(self.nrows, self.ncols))]

    def is_diagonal(self) -> bool:
        return all(all(j == i for j in r) for i, r in enumerate(self.rows))

    def is_identity(self) -> bool:
        if self.nrows != self.ncols:
            return False
        return all(len(r) == 1 and r.get(i, 0) == 1 for i, r in enumerate(self.rows))

    def is_zero(self) -> bool:
        return not any(self.rows)

    # arithmetic -------------------------------------------------------

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        orows = other.rows
        out = []
        for row in self.rows:
            acc: dict = {}
            for k, a in row.items():
                for j, b in orows[k].items():
                    v = acc.get(j)
                    acc[j] = a * b if v is None else v + a * b
            out.append({j: v for j, v in acc.items() if v != 0})
        return Matrix(self.nrows, other.ncols, out)

    __mul__ = __matmul__

    def apply(self, vec: Sequence) -> list:
        return [sum((a * vec[j] for j, a in r.items()), 0) for r in self.rows]

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        out = []
        for r1, r2 in zip(self.rows, other.rows):
            acc = dict(r1)
            for j, v in r2.items():
                acc[j] = acc.get(j, 0) + v
            out.append({j: v for j, v in acc.items() if v != 0})
        return Matrix(self.nrows, self.ncols, out)

    def __neg__(self) -> "Matrix":
        return Matrix(self.nrows, self.ncols, [{j: -v for j, v in r.items()} for r in self.rows])

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        if c == 0:
            return Matrix(self.nrows, self.ncols)
        return Matrix(self.nrows, self.ncols, [{j: c * v for j, v in r.items()} for r in self.rows])

    def map(self, f: Callable) -> "Matrix":
        """Entrywise image; used for field automorphisms acting on coordinates."""
        out = []
        for r in self.rows:
            new = {}
            for j, v in r.items():
                w = f(v)
                if w != 0:
                    new[j] = w
            out.append(new)
        return Matrix(self.nrows, self.ncols, out)

    def transpose(self) -> "Matrix":
        out = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                out[j][i] = v
        return Matrix(self.ncols, self.nrows, out)

    def trace(self):
        if self.nrows != self.ncols:
            raise NotSquare("trace of a non-square matrix")
        return sum((r.get(i, 0) for i, r in enumerate(self.rows)), 0)

    def trace_of_product(self, other: "Matrix"):
        """tr(self @ other) without forming the product."""
        total = 0
        orows = other.rows
        for i, r in enumerate(self.rows):
            for k, a in r.items():
                b = orows[k].get(i)
                if b is not None:
                    total = total + a * b
        return total

    def power(self, k: int) -> "Matrix":
        if k < 0:
            return self.inverse().power(-k)
        out = Matrix.identity(self.nrows)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def permute(self, perm: Sequence[int], signs: Sequence | None = None) -> "Matrix":
        """P @ self @ P^-1 for the signed permutation e_j -> signs[j] e_perm[j]."""
        signs = signs or [1] * len(perm)
        out = [{} for _ in range(self.nrows)]
        for i, r in enumerate(self.rows):
            pi, si = perm[i], signs[i]
            for j, v in r.items():
                out[pi][perm[j]] = si * signs[j] * v
        return Matrix(self.nrows, self.ncols, out)

    def inverse(self) -> "Matrix":
        """Gauss-Jordan over the entry field; sparse pivot rows kept sparse."""
        n = self.nrows
        if n != self.ncols:
            raise NotSquare("inverse of a non-square matrix")
        if self.is_diagonal():
            vals = self.diagonal_values()
            if any(v == 0 for v in vals):
                raise SingularMatrix("singular diagonal matrix")
            return Matrix(n, n, [{i: _recip(v)} for i, v in enumerate(vals)])
        work = [dict(r) for r in self.rows]
        inv = [{i: 1} for i in range(n)]
        for col in range(n):
            pivot = None
            best = None
            for r in range(col, n):
                if col in work[r]:
                    size = len(work[r])
                    if best is None or size < best:
                        pivot, best = r, size
            if pivot is None:
                raise SingularMatrix("matrix is singular")
            work[col], work[pivot] = work[pivot], work[col]
            inv[col], inv[pivot] = inv[pivot], inv[col]
            p = work[col][col]
            if p != 1:
                pinv = _recip(p)
                work[col] = {j: v * pinv for j, v in work[col].items()}
                inv[col] = {j: v * pinv for j, v in inv[col].items()}
            prow, pinvrow = work[col], inv[col]
            for r in range(n):
                if r == col:
                    continue
                c = work[r].get(col)
                if c is None:
                    continue
                for target, src in ((work[r], prow), (inv[r], pinvrow)):
                    for j, v in src.items():
                        w = target.get(j, 0) - c * v
                        if w == 0:
                            target.pop(j, None)
                        else:
                            target[j] = w
        return Matrix(n, n, inv)

    # comparison -------------------------------------------------------

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and all(a == b for a, b in zip(self.rows, other.rows))

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(
                (self.shape, tuple(tuple(sorted(r.items(), key=lambda kv: kv[0])) for r in self.rows))
            )
        return self._hash

    def __repr__(self):
        return f"<Matrix {self.nrows}x{self.ncols} nnz={self.nnz()}>"


def int_determinant(rows: Sequence[Sequence[int]]) -> int:
    """Fraction-free (Bareiss) determinant of an integer matrix."""
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise NotSquare("determinant of a non-square matrix")
    if n == 0:
        return 1
    m = [list(map(int, r)) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]
