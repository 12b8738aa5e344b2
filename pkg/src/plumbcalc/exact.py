"""Exact arithmetic in Q and real quadratic fields Q(sqrt(D)), plus integer
matrix helpers (determinants, leading minors, Smith normal form).

Nothing in this module ever touches floating point except ``__float__``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction]


def squarefree_part(n: int) -> tuple[int, int]:
    """Return ``(k, d)`` with ``n == k*k*d`` and ``d`` square-free."""
    if n < 0:
        raise ValueError(f"radicand must be non-negative, got {n}")
    if n == 0:
        return 0, 0
    k, d = 1, 1
    m = n
    p = 2
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        k *= p ** (e // 2)
        if e % 2:
            d *= p
        p += 1
    d *= m
    return k, d


@dataclass(frozen=True, init=False)
class ExactScalar:
    """The number ``a + b*sqrt(d)`` with rational ``a, b`` and square-free ``d``.

    ``d == 0`` encodes a pure rational (and forces ``b == 0``). Operations
    between two irrational values with different radicands raise
    ``ValueError``; there is no implicit biquadratic embedding.
    """

    a: Fraction
    b: Fraction
    d: int

    def __init__(self, a: Rational = 0, b: Rational = 0, d: int = 0):
        a, b = Fraction(a), Fraction(b)
        d = int(d)
        if d < 0:
            raise ValueError("negative radicand")
        if b != 0 and d != 0:
            k, d = squarefree_part(d)
            b *= k
            if d == 1:
                a, b, d = a + b, Fraction(0), 0
        if b == 0 or d == 0:
            b, d = Fraction(0), 0
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    @classmethod
    def sqrt(cls, n: int) -> "ExactScalar":
        return cls(0, 1, n)

    @classmethod
    def coerce(cls, x) -> "ExactScalar":
        if isinstance(x, ExactScalar):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to ExactScalar")

    # -- predicates ---------------------------------------------------------
    def is_rational(self) -> bool:
        return self.d == 0

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def sign(self) -> int:
        """Exact sign of the real number."""
        if self.b == 0:
            return (self.a > 0) - (self.a < 0)
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with b^2 d (never equal, d square-free > 1)
        return sa if self.a * self.a > self.b * self.b * self.d else sb

    def conjugate(self) -> "ExactScalar":
        return ExactScalar(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self.a

    # -- field operations ---------------------------------------------------
    def _common(self, other) -> int:
        other = ExactScalar.coerce(other)
        if self.d and other.d and self.d != other.d:
            raise ValueError(f"mixed radicands sqrt({self.d}) and sqrt({other.d})")
        return self.d or other.d

    def __add__(self, other):
        try:
            other = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        d = self._common(other)
        return ExactScalar(self.a + other.a, self.b + other.b, d)

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar(-self.a, -self.b, self.d)

    def __sub__(self, other):
        try:
            other = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return ExactScalar.coerce(other) - self

    def __mul__(self, other):
        try:
            other = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        d = self._common(other)
        a = self.a * other.a + self.b * other.b * d
        b = self.a * other.b + self.b * other.a
        return ExactScalar(a, b, d)

    __rmul__ = __mul__

    def inverse(self) -> "ExactScalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        n = self.norm()
        return ExactScalar(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        try:
            other = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return ExactScalar.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = ExactScalar(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- comparison ---------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ExactScalar(other)
        if not isinstance(other, ExactScalar):
            return NotImplemented
        return (self.a, self.b, self.d) == (other.a, other.b, other.d)

    def __hash__(self):
        if self.d == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    # -- text ---------------------------------------------------------------
    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"ExactScalar({format_scalar(self)!r})"


def format_scalar(x: ExactScalar) -> str:
    """Canonical literal: ``p``, ``p/q`` or ``(P+Q*sqrt(D))/R`` with ``R > 0``."""
    if x.is_rational():
        return str(x.a)
    den = x.a.denominator * x.b.denominator // math.gcd(x.a.denominator, x.b.denominator)
    p = int(x.a * den)
    q = int(x.b * den)
    op = "+" if q >= 0 else "-"
    return f"({p}{op}{abs(q)}*sqrt({x.d}))/{den}"


_INT = r"[+-]?\d+"
_RATIONAL_RE = re.compile(rf"^({_INT})(?:/({_INT}))?$")
_SURD_RE = re.compile(rf"^\(({_INT})([+-])({_INT})\*sqrt\((\d+)\)\)(?:/({_INT}))?$")


def parse_scalar(text: str) -> ExactScalar:
    """Parse ``INT``, ``INT/INT`` or ``(INT+INT*sqrt(INT))/INT``.

    The operator between the rational and surd parts may be ``+`` or ``-``
    and each integer may carry its own sign.
    """
    s = text.strip().replace(" ", "")
    m = _RATIONAL_RE.match(s)
    if m:
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return ExactScalar(Fraction(int(m.group(1)), den))
    m = _SURD_RE.match(s)
    if m:
        p, op, q, d, den = m.groups()
        den = int(den) if den else 1
        if den == 0:
            raise ValueError(f"zero denominator in {text!r}")
        qv = int(q) if op == "+" else -int(q)
        return ExactScalar(Fraction(int(p), den), Fraction(qv, den), int(d))
    raise ValueError(f"malformed scalar literal {text!r}")


# ---------------------------------------------------------------------------
# integer matrices


class IntMatrix:
    """Immutable rectangular matrix of Python ints."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, entries: Iterable[Sequence[int]]):
        data = tuple(tuple(int(v) for v in row) for row in entries)
        if not data or not data[0]:
            raise ValueError("matrix must have at least one row and one column")
        width = len(data[0])
        if any(len(row) != width for row in data):
            raise ValueError("ragged matrix")
        self._data = data
        self.rows = len(data)
        self.cols = width

    @classmethod
    def coerce(cls, m) -> "IntMatrix":
        return m if isinstance(m, IntMatrix) else cls(m)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self._data[i][j]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._data]

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_symmetric(self) -> bool:
        return self.is_square() and all(
            self._data[i][j] == self._data[j][i] for i in range(self.rows) for j in range(i)
        )

    def leading_block(self, k: int) -> "IntMatrix":
        return IntMatrix([row[:k] for row in self._data[:k]])

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self._data == other._data

    def __hash__(self):
        return hash(self._data)

    def __repr__(self):
        return f"IntMatrix({self.tolist()})"


def _require_square(m: IntMatrix) -> None:
    if not m.is_square():
        raise ValueError(f"expected a square matrix, got {m.rows}x{m.cols}")


def determinant(m) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    m = IntMatrix.coerce(m)
    _require_square(m)
    n = m.rows
    a = m.tolist()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def leading_principal_minors(m) -> tuple[int, ...]:
    m = IntMatrix.coerce(m)
    _require_square(m)
    return tuple(determinant(m.leading_block(k)) for k in range(1, m.rows + 1))


def is_negative_definite(m) -> bool:
    """Sylvester: ``(-1)^i * delta_i > 0`` for every leading minor."""
    m = IntMatrix.coerce(m)
    _require_square(m)
    if not m.is_symmetric():
        raise ValueError("definiteness requires a symmetric matrix")
    return all((-1) ** i * d > 0 for i, d in enumerate(leading_principal_minors(m), start=1))


def smith_normal_form(m) -> tuple[int, ...]:
    """Invariant factors ``d1 | d2 | ...`` (length ``min(rows, cols)``).

    Only unimodular row and column operations are used.
    """
    m = IntMatrix.coerce(m)
    a = m.tolist()
    nr, nc = m.rows, m.cols
    diag = []
    for t in range(min(nr, nc)):
        # pivot: smallest nonzero |entry| in the remaining block
        while True:
            best = None
            for i in range(t, nr):
                for j in range(t, nc):
                    if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                diag.extend([0] * (min(nr, nc) - t))
                return _fix_divisibility(diag)
            i, j = best
            a[t], a[i] = a[i], a[t]
            for row in a:
                row[t], row[j] = row[j], row[t]
            piv = a[t][t]
            dirty = False
            for i in range(t + 1, nr):
                q = a[i][t] // piv
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                dirty |= a[i][t] != 0
            for j in range(t + 1, nc):
                q = a[t][j] // piv
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                dirty |= a[t][j] != 0
            if dirty:
                continue
            # pivot must divide the rest of the block
            bad = next(
                ((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc) if a[i][j] % piv),
                None,
            )
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
        diag.append(abs(a[t][t]))
    return _fix_divisibility(diag)


def _fix_divisibility(diag: list[int]) -> tuple[int, ...]:
    # the elimination above already yields a divisibility chain; this is a
    # cheap normalisation that also moves zeros to the tail
    vals = list(diag)
    n = len(vals)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = vals[i], vals[j]
            g = math.gcd(a, b)
            lcm = a * b // g if g else 0
            vals[i], vals[j] = g, lcm
    return tuple(vals)
