"""Exact scalar fields: Q, Q(T) and Q(sqrt d), their automorphisms, and prime support.

Rationals are plain :class:`fractions.Fraction` values. Rational functions and
quadratic scalars interoperate with ``int`` and ``Fraction`` on either side of
an operator, so generic matrix code can use ``0`` and ``1`` as field constants.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import (
    ConstantFunction,
    FieldMismatch,
    InfiniteOrderSigma,
    ParseError,
    PoleAtPoint,
    ZeroArgument,
)

Rational = Fraction
Poly = tuple  # coefficients, lowest degree first, no trailing zeros

_MAX_MOBIUS_ORDER = 12


# --------------------------------------------------------------------------
# univariate polynomials over Q (tuples of Fractions)


def _ptrim(c: Sequence) -> Poly:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(Fraction(x) for x in c)


def _padd(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return _ptrim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def _pneg(a: Poly) -> Poly:
    return tuple(-x for x in a)


def _pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _ptrim(out)


def _pscale(a: Poly, c) -> Poly:
    return _ptrim([x * c for x in a])


def _pdivmod(a: Poly, b: Poly):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    for shift in range(len(a) - len(b), -1, -1):
        c = rem[shift + len(b) - 1] / lead
        if c:
            q[shift] = c
            for j, y in enumerate(b):
                rem[shift + j] -= c * y
    return _ptrim(q), _ptrim(rem[: len(b) - 1])


def _pmonic(a: Poly) -> Poly:
    return _pscale(a, 1 / a[-1]) if a else a


def _pgcd(a: Poly, b: Poly) -> Poly:
    while b:
        a, b = b, _pdivmod(a, b)[1]
    return _pmonic(a)


def _ppow(a: Poly, k: int) -> Poly:
    out: Poly = (Fraction(1),)
    for _ in range(k):
        out = _pmul(out, a)
    return out


def _peval(a: Poly, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _fmt_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _fmt_poly(p: Poly, var: str = "T") -> str:
    if not p:
        return "0"
    parts = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if k == 0:
            body = _fmt_rational(mag)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if mag == 1 else f"{_fmt_rational(mag)}*{mono}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    s = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        s += sign + body
    return s


_TERM = re.compile(r"^(?:(\d+(?:/\d+)?)\*?)?(T(?:\^(\d+))?)?$")


def _parse_poly(s: str) -> Poly:
    s = s.replace(" ", "")
    if not s:
        raise ParseError("empty polynomial")
    terms = re.findall(r"[+-]?[^+-]+", s)
    if "".join(terms) != s:
        raise ParseError(f"cannot parse polynomial {s!r}")
    acc: Poly = ()
    for t in terms:
        sign = -1 if t[0] == "-" else 1
        t = t.lstrip("+-")
        m = _TERM.match(t)
        if not m or not (m.group(1) or m.group(2)):
            raise ParseError(f"cannot parse term {t!r}")
        coeff = Fraction(m.group(1)) if m.group(1) else Fraction(1)
        deg = 0 if not m.group(2) else int(m.group(3) or 1)
        mono = [Fraction(0)] * deg + [sign * coeff]
        acc = _padd(acc, _ptrim(mono))
    return acc


# --------------------------------------------------------------------------
# Q(T)


class RationalFunction:
    """An element of Q(T) in canonical form: coprime, monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Iterable = (), den: Iterable = (1,), _canonical: bool = False):
        num, den = _ptrim(num), _ptrim(den)
        if not _canonical:
            if not den:
                raise ZeroDivisionError("rational function with zero denominator")
            if not num:
                den = (Fraction(1),)
            else:
                g = _pgcd(num, den)
                if len(g) > 1:
                    num, den = _pdivmod(num, g)[0], _pdivmod(den, g)[0]
                lead = den[-1]
                if lead != 1:
                    num, den = _pscale(num, 1 / lead), _pscale(den, 1 / lead)
        self.num = num
        self.den = den

    T: "RationalFunction"

    @classmethod
    def constant(cls, c) -> "RationalFunction":
        return cls((Fraction(c),), (Fraction(1),), _canonical=True) if c else cls()

    @classmethod
    def from_poly(cls, coeffs: Iterable) -> "RationalFunction":
        return cls(coeffs)

    def canonical(self) -> "RationalFunction":
        return RationalFunction(self.num, self.den)

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num[0] if self.num else Fraction(0)

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, (int, Fraction)):
            return RationalFunction.constant(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RationalFunction(_padd(self.num, o.num), self.den)
        return RationalFunction(
            _padd(_pmul(self.num, o.den), _pmul(o.num, self.den)), _pmul(self.den, o.den)
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(_pneg(self.num), self.den, _canonical=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return RationalFunction()
            return RationalFunction(_pscale(self.num, Fraction(other)), self.den, _canonical=True)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return RationalFunction(_pmul(self.num, other.num), _pmul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if not self.num:
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction(_ppow(self.num, k), _ppow(self.den, k), _canonical=True)

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self.is_constant():
            return hash(self.constant_value())
        return hash((self.num, self.den))

    def __bool__(self):
        return bool(self.num)

    def __call__(self, a):
        return evaluate(self, a)

    def __str__(self):
        if self.den == (1,):
            return f"({_fmt_poly(self.num)})"
        return f"({_fmt_poly(self.num)})/({_fmt_poly(self.den)})"

    def __repr__(self):
        return f"RationalFunction({self})"

    @classmethod
    def parse(cls, s: str) -> "RationalFunction":
        s = s.replace(" ", "")
        m = re.fullmatch(r"\(([^()]*)\)(?:/\(([^()]*)\))?", s)
        if m:
            return cls(_parse_poly(m.group(1)), _parse_poly(m.group(2)) if m.group(2) else (1,))
        return cls(_parse_poly(s))


RationalFunction.T = RationalFunction((0, 1), (1,), _canonical=True)


def evaluate(f: RationalFunction, a) -> Fraction:
    """Exact value of ``f`` at ``a``; raises PoleAtPoint where the reduced denominator vanishes."""
    den = _peval(f.den, a)
    if den == 0:
        raise PoleAtPoint(f"{f} has a pole at {a}")
    return Fraction(_peval(f.num, a)) / den if isinstance(a, (int, Fraction)) else _peval(f.num, a) / den


def distinct_value_inputs(f: RationalFunction, n: int) -> list[Fraction]:
    """Scan 1, 2, 3, ... and keep the first ``n`` points with pairwise-distinct values."""
    if not isinstance(f, RationalFunction):
        f = RationalFunction.constant(f)
    if f.is_constant():
        raise ConstantFunction(f"{f} is constant")
    xs: list[Fraction] = []
    seen = set()
    x = 0
    while len(xs) < n:
        x += 1
        try:
            v = evaluate(f, Fraction(x))
        except PoleAtPoint:
            continue
        if v in seen:
            continue
        seen.add(v)
        xs.append(Fraction(x))
    return xs


# --------------------------------------------------------------------------
# Q(sqrt d)


def _squarefree(d: int) -> bool:
    if d in (0, 1):
        return False
    n = abs(d)
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


class QuadraticScalar:
    """a + b*sqrt(d) with rational a, b and fixed square-free d."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = d

    def _coerce(self, other):
        if isinstance(other, QuadraticScalar):
            if other.d != self.d:
                raise FieldMismatch(f"Q(sqrt({self.d})) vs Q(sqrt({other.d}))")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticScalar(other, 0, self.d)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadraticScalar(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticScalar(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadraticScalar(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadraticScalar(self.a * other, self.b * other, self.d)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadraticScalar(
            self.a * o.a + self.d * self.b * o.b, self.a * o.b + self.b * o.a, self.d
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadraticScalar":
        return QuadraticScalar(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self) -> "QuadraticScalar":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero quadratic scalar")
        return QuadraticScalar(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        base = self if k >= 0 else self.inverse()
        out = QuadraticScalar(1, 0, self.d)
        for _ in range(abs(k)):
            out = out * base
        return out

    def __eq__(self, other):
        if isinstance(other, QuadraticScalar):
            return self.d == other.d and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        return hash(self.a) if self.b == 0 else hash((self.a, self.b, self.d))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __str__(self):
        a, b = _fmt_rational(self.a), _fmt_rational(abs(self.b))
        sign = "-" if self.b < 0 else "+"
        return f"{a}{sign}{b}*sqrt({self.d})"

    def __repr__(self):
        return f"QuadraticScalar({self})"


_QUAD = re.compile(r"^([+-]?\d+(?:/\d+)?)([+-])(\d+(?:/\d+)?)\*sqrt\((-?\d+)\)$")


# --------------------------------------------------------------------------
# fields


class Field:
    """A concrete exact field. ``zero``/``one`` are plain ints on purpose."""

    name = "?"
    zero = 0
    one = 1
    # Whether f(T) = a is solvable for all a. None of the shipped fields is
    # radically closed, so torus parts are never assumed inner beyond H.
    power_equations_solvable = False

    def coerce(self, x):
        raise NotImplementedError

    def parse(self, s: str):
        raise NotImplementedError

    def format(self, x) -> str:
        x = self.coerce(x)
        return _fmt_rational(x) if isinstance(x, (int, Fraction)) else str(x)

    def __eq__(self, other):
        return isinstance(other, Field) and self.name == other.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return f"<Field {self.name}>"


class RationalField(Field):
    name = "Q"

    def coerce(self, x):
        if isinstance(x, (int, Fraction)):
            return Fraction(x)
        if isinstance(x, QuadraticScalar) and x.b == 0:
            return x.a
        if isinstance(x, RationalFunction) and x.is_constant():
            return x.constant_value()
        raise FieldMismatch(f"{x!r} is not in Q")

    def parse(self, s: str):
        try:
            return Fraction(s.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational {s!r}") from exc


class QuadraticField(Field):
    def __init__(self, d: int):
        if not _squarefree(d):
            raise ValueError(f"d={d} must be square-free and not 0 or 1")
        self.d = d
        self.name = f"Q(sqrt({d}))"

    def coerce(self, x):
        if isinstance(x, QuadraticScalar):
            if x.d != self.d:
                raise FieldMismatch(f"{x} is not in {self.name}")
            return x
        if isinstance(x, (int, Fraction)):
            return Fraction(x)
        if isinstance(x, RationalFunction) and x.is_constant():
            return x.constant_value()
        raise FieldMismatch(f"{x!r} is not in {self.name}")

    def sqrt(self) -> QuadraticScalar:
        return QuadraticScalar(0, 1, self.d)

    def element(self, a, b) -> QuadraticScalar:
        return QuadraticScalar(a, b, self.d)

    def format(self, x) -> str:
        x = self.coerce(x)
        if isinstance(x, Fraction):
            x = QuadraticScalar(x, 0, self.d)
        return str(x)

    def parse(self, s: str):
        s = s.replace(" ", "")
        m = _QUAD.match(s)
        if m:
            if int(m.group(4)) != self.d:
                raise FieldMismatch(f"{s!r} is not in {self.name}")
            b = Fraction(m.group(3)) * (-1 if m.group(2) == "-" else 1)
            return QuadraticScalar(Fraction(m.group(1)), b, self.d)
        m = re.fullmatch(r"([+-]?\d+(?:/\d+)?)?\*?sqrt\((-?\d+)\)", s)
        if m:
            if int(m.group(2)) != self.d:
                raise FieldMismatch(f"{s!r} is not in {self.name}")
            b = m.group(1)
            b = Fraction(1) if b in (None, "+") else Fraction(-1) if b == "-" else Fraction(b)
            return QuadraticScalar(0, b, self.d)
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad quadratic scalar {s!r}") from exc


class FunctionField(Field):
    name = "Q(T)"

    def coerce(self, x):
        if isinstance(x, RationalFunction):
            return x
        if isinstance(x, (int, Fraction)):
            return Fraction(x)
        raise FieldMismatch(f"{x!r} is not in Q(T)")

    def format(self, x) -> str:
        x = self.coerce(x)
        if isinstance(x, Fraction):
            x = RationalFunction.constant(x)
        return str(x)

    def parse(self, s: str):
        s = s.strip()
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError):
            pass
        f = RationalFunction.parse(s)
        return f.constant_value() if f.is_constant() else f


QQ = RationalField()
QT = FunctionField()


def parse_field(s: str) -> Field:
    """``Q``, ``Q(T)``, ``Q(sqrt(d))`` or the shorthand ``Q(sqrtd)``."""
    t = s.replace(" ", "")
    if t in ("Q", "QQ"):
        return QQ
    if t == "Q(T)":
        return QT
    m = re.fullmatch(r"Q\(sqrt\(?(-?\d+)\)?\)", t)
    if m:
        return QuadraticField(int(m.group(1)))
    raise ParseError(f"unknown field {s!r}")


def field_of(x) -> Field:
    if isinstance(x, QuadraticScalar):
        return QuadraticField(x.d)
    if isinstance(x, RationalFunction):
        return QT
    return QQ


def canonical(x):
    """Canonical representative; idempotent for every scalar kind."""
    if isinstance(x, RationalFunction):
        return x.canonical()
    if isinstance(x, QuadraticScalar):
        return QuadraticScalar(x.a, x.b, x.d)
    return Fraction(x)


def parse_scalar(s: str, field: Field = QQ):
    return field.parse(s)


def format_scalar(x, field: Field | None = None) -> str:
    return (field or field_of(x)).format(x)


# --------------------------------------------------------------------------
# field automorphisms


def _mobius_mat_mul(m, n):
    a, b, c, d = m
    e, f, g, h = n
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _is_scalar_mat(m) -> bool:
    return m[1] == 0 and m[2] == 0 and m[0] == m[3]


@dataclass(frozen=True)
class FieldAutomorphism:
    """Descriptor of a finite-order field automorphism.

    ``kind`` is ``identity``, ``conjugation`` (sqrt d -> -sqrt d) or ``mobius``
    (T -> (aT+b)/(cT+d) for ``matrix = (a, b, c, d)``).
    """

    kind: str = "identity"
    matrix: tuple | None = None
    d: int | None = None

    def __post_init__(self):
        if self.kind == "mobius":
            m = tuple(Fraction(x) for x in self.matrix)
            if m[0] * m[3] - m[1] * m[2] == 0:
                raise ValueError("singular Mobius matrix")
            object.__setattr__(self, "matrix", m)
            self.order()
        elif self.kind not in ("identity", "conjugation"):
            raise ValueError(f"unknown automorphism kind {self.kind!r}")

    @classmethod
    def identity(cls) -> "FieldAutomorphism":
        return cls()

    @classmethod
    def conjugation(cls, d: int | None = None) -> "FieldAutomorphism":
        return cls("conjugation", d=d)

    @classmethod
    def mobius(cls, a, b, c, d) -> "FieldAutomorphism":
        m = (Fraction(a), Fraction(b), Fraction(c), Fraction(d))
        if _is_scalar_mat(m):
            return cls()
        return cls("mobius", matrix=m)

    @property
    def is_identity(self) -> bool:
        return self.kind == "identity"

    def order(self) -> int:
        if self.kind == "identity":
            return 1
        if self.kind == "conjugation":
            return 2
        p = self.matrix
        for k in range(1, _MAX_MOBIUS_ORDER + 1):
            if _is_scalar_mat(p):
                return k
            p = _mobius_mat_mul(p, self.matrix)
        raise InfiniteOrderSigma(f"Mobius map {self.matrix} has infinite order")

    def compatible_with(self, field: Field) -> bool:
        if self.kind == "identity":
            return True
        if self.kind == "conjugation":
            return isinstance(field, QuadraticField) and self.d in (None, field.d)
        return isinstance(field, FunctionField)

    def __call__(self, x):
        return apply_field_automorphism(self, x)

    def compose(self, other: "FieldAutomorphism") -> "FieldAutomorphism":
        """``self`` after ``other``."""
        if other.is_identity:
            return self
        if self.is_identity:
            return other
        if self.kind != other.kind:
            raise FieldMismatch("cannot compose automorphisms of different fields")
        if self.kind == "conjugation":
            return FieldAutomorphism()
        # f -> f(M2.T) then f -> f(M1.T) gives f((M2 M1).T)
        return FieldAutomorphism.mobius(*_mobius_mat_mul(other.matrix, self.matrix))

    def power(self, k: int) -> "FieldAutomorphism":
        k %= self.order()
        out = FieldAutomorphism()
        for _ in range(k):
            out = self.compose(out)
        return out

    def inverse(self) -> "FieldAutomorphism":
        return self.power(self.order() - 1)

    def describe(self) -> str:
        if self.kind == "identity":
            return "id"
        if self.kind == "conjugation":
            return "conj"
        return "mobius:" + ",".join(_fmt_rational(x) for x in self.matrix)

    @classmethod
    def parse(cls, s: str) -> "FieldAutomorphism":
        s = s.strip()
        if s in ("", "id", "identity"):
            return cls()
        if s in ("conj", "conjugation"):
            return cls.conjugation()
        if s.startswith("mobius:"):
            parts = s[len("mobius:"):].split(",")
            if len(parts) != 4:
                raise ParseError(f"mobius needs 4 entries: {s!r}")
            return cls.mobius(*(Fraction(p) for p in parts))
        named = {"T->-T": (-1, 0, 0, 1), "T->1/T": (0, 1, 1, 0)}
        if s in named:
            return cls.mobius(*named[s])
        raise ParseError(f"unknown field automorphism {s!r}")


def _mobius_substitute(f: RationalFunction, m) -> RationalFunction:
    a, b, c, d = m
    lin_num: Poly = _ptrim((b, a))
    lin_den: Poly = _ptrim((d, c))
    n = max(len(f.num), len(f.den)) - 1

    def homog(p: Poly) -> Poly:
        acc: Poly = ()
        for k, coeff in enumerate(p):
            if coeff:
                term = _pmul(_ppow(lin_num, k), _ppow(lin_den, n - k))
                acc = _padd(acc, _pscale(term, coeff))
        return acc

    return RationalFunction(homog(f.num), homog(f.den))


def apply_field_automorphism(delta: FieldAutomorphism, x):
    """Apply ``delta`` to a scalar; Q is fixed pointwise by every automorphism."""
    if delta.kind == "identity" or isinstance(x, (int, Fraction)):
        return x
    if delta.kind == "conjugation":
        if not isinstance(x, QuadraticScalar) or (delta.d is not None and delta.d != x.d):
            raise FieldMismatch(f"conjugation cannot act on {x!r}")
        return x.conjugate()
    if not isinstance(x, RationalFunction):
        raise FieldMismatch(f"Mobius substitution cannot act on {x!r}")
    if x.is_constant():
        return x
    return _mobius_substitute(x, delta.matrix)


# --------------------------------------------------------------------------
# prime support


def nu(x) -> frozenset:
    """Primes dividing the numerator or denominator of ``x`` in lowest terms."""
    from sympy import primefactors

    x = Fraction(x)
    if x == 0:
        raise ZeroArgument("nu(0) is undefined")
    return frozenset(primefactors(abs(x.numerator))) | frozenset(primefactors(x.denominator))


def nu_pairwise_disjoint(xs: Sequence) -> bool:
    seen: set = set()
    for x in xs:
        s = nu(x)
        if s & seen:
            return False
        seen |= s
    return True


Scalar = Union[int, Fraction, QuadraticScalar, RationalFunction]
