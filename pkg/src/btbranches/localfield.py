"""Truncated arithmetic in k = Q_p and in quadratic extensions k(sqrt(alpha)).

Elements of k come in two flavours.  Exact rationals (``int`` or
``fractions.Fraction``) embed in Q_p and carry infinite precision; they are
what the tree and quaternion code uses.  ``PadicNumber`` is a truncated
element ``p^v * u + O(p^(v+N))`` and is what p-adic square roots produce.

Valuations are integers, ``Fraction`` halves on extensions, or ``INF``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import PrecisionError, PreconditionError

INF = math.inf
DEFAULT_PREC = 24

Rational = Union[int, Fraction]


def nu2(p: int) -> int:
    """Valuation of 2 in Q_p."""
    return 1 if p == 2 else 0


def vp_int(n: int, p: int) -> int | float:
    if n == 0:
        return INF
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _vp_rational(x: Fraction, p: int) -> int | float:
    if x == 0:
        return INF
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


def valuation(x, p: int | None = None):
    """p-adic valuation of an exact rational, a PadicNumber or a QuadExtElement.

    Exact zero maps to ``INF``; so does a PadicNumber that is zero to its
    precision.
    """
    if isinstance(x, PadicNumber):
        return x.valuation
    if isinstance(x, QuadExtElement):
        return ext_valuation(x)
    if p is None:
        raise PreconditionError("a prime is required to take the valuation of a rational")
    return _vp_rational(Fraction(x), p)


def unit_part(x: Rational, p: int) -> Fraction:
    x = Fraction(x)
    v = _vp_rational(x, p)
    if v == INF:
        raise PreconditionError("zero has no unit part")
    return x / Fraction(p) ** v


def _reduce_unit(u: Fraction, p: int, n: int) -> int:
    """Integer representative of the p-adic unit ``u`` modulo p^n."""
    mod = p**n
    return u.numerator * pow(u.denominator, -1, mod) % mod


def _trunc_val(n: int, p: int, cap: int) -> int:
    """min(v_p(n), cap); ``cap`` signals 'at least cap'."""
    if n % p**cap == 0:
        return cap
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PadicNumber:
    """``p^valuation * unit + O(p^(valuation + prec))``.

    ``unit`` is an integer in [0, p^prec) coprime to p.  A value that is zero
    to precision has ``valuation == INF``, ``unit == 0`` and stores its
    absolute precision in ``prec``.

    Precision law: for ``x + y`` the absolute precision is the minimum of the
    operands' absolute precisions; for ``x * y`` and ``x / y`` the relative
    precision is the minimum of the operands' relative precisions; negation
    and inversion keep it.
    """

    p: int
    valuation: int | float
    unit: int
    prec: int

    @classmethod
    def from_rational(cls, x: Rational, p: int, prec: int = DEFAULT_PREC) -> "PadicNumber":
        if prec < 1:
            raise PreconditionError("precision must be at least one digit")
        x = Fraction(x)
        if x == 0:
            return cls(p, INF, 0, prec)
        v = _vp_rational(x, p)
        return cls(p, v, _reduce_unit(x / Fraction(p) ** v, p, prec), prec)

    @classmethod
    def zero(cls, p: int, absprec: int) -> "PadicNumber":
        return cls(p, INF, 0, absprec)

    def is_zero(self) -> bool:
        return self.valuation == INF

    @property
    def absprec(self) -> int:
        return self.prec if self.is_zero() else self.valuation + self.prec

    def to_fraction(self) -> Fraction:
        """The rational ``p^v * unit``; an approximation of the p-adic value."""
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.valuation

    def _from_value(self, value: Fraction, absprec: int) -> "PadicNumber":
        if value == 0:
            return PadicNumber.zero(self.p, absprec)
        v = _vp_rational(value, self.p)
        n = absprec - v
        if n <= 0:
            return PadicNumber.zero(self.p, absprec)
        return PadicNumber(self.p, v, _reduce_unit(value / Fraction(self.p) ** v, self.p, n), n)

    def _check(self, other: "PadicNumber") -> None:
        if other.p != self.p:
            raise PreconditionError(f"mixed primes {self.p} and {other.p}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._from_value(self.to_fraction() + other, self.absprec)
        if not isinstance(other, PadicNumber):
            return NotImplemented
        self._check(other)
        return self._from_value(
            self.to_fraction() + other.to_fraction(), min(self.absprec, other.absprec)
        )

    __radd__ = __add__

    def __neg__(self) -> "PadicNumber":
        if self.is_zero():
            return self
        return PadicNumber(self.p, self.valuation, (-self.unit) % self.p**self.prec, self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if other == 0:
                return 0
            if self.is_zero():
                return PadicNumber.zero(self.p, self.prec + _vp_rational(other, self.p))
            other = PadicNumber.from_rational(other, self.p, self.prec)
        if not isinstance(other, PadicNumber):
            return NotImplemented
        self._check(other)
        if self.is_zero() or other.is_zero():
            if self.is_zero() and other.is_zero():
                return PadicNumber.zero(self.p, self.prec + other.prec)
            z, nz = (self, other) if self.is_zero() else (other, self)
            return PadicNumber.zero(self.p, z.prec + nz.valuation)
        n = min(self.prec, other.prec)
        return PadicNumber(
            self.p, self.valuation + other.valuation, self.unit * other.unit % self.p**n, n
        )

    __rmul__ = __mul__

    def inverse(self) -> "PadicNumber":
        if self.is_zero():
            raise PrecisionError("cannot invert a value that is zero to precision")
        mod = self.p**self.prec
        return PadicNumber(self.p, -self.valuation, pow(self.unit, -1, mod), self.prec)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __repr__(self) -> str:
        if self.is_zero():
            return f"O({self.p}^{self.prec})"
        return f"{self.p}^{self.valuation}*{self.unit} + O({self.p}^{self.absprec})"


def as_padic(x, p: int | None = None, prec: int = DEFAULT_PREC) -> PadicNumber:
    if isinstance(x, PadicNumber):
        return x
    if p is None:
        raise PreconditionError("a prime is required to interpret a rational p-adically")
    return PadicNumber.from_rational(x, p, prec)


# --------------------------------------------------------------------------
# quadratic theory


class SquareClassTag(enum.Enum):
    ONE = "One"
    DELTA = "Delta"
    RAMIFIED_UNIT = "RamifiedUnit"
    UNIFORMIZER = "Uniformizer"


@dataclass(frozen=True)
class SquareClass:
    tag: SquareClassTag
    representative: int
    defect: int | float
    s: int | None = None

    @property
    def is_square(self) -> bool:
        return self.tag is SquareClassTag.ONE


def _unit_defect_search(u: int, p: int, n: int) -> tuple[int | float, int]:
    """Greedy digit-by-digit maximisation of v(u - b^2) for a unit u mod p^n.

    Returns ``(exponent, b)``.  Past 2*v(2) the unit is a square (Hensel), so
    the exponent is reported as INF.
    """
    e2 = 2 * nu2(p)
    b, e = 0, 0
    for j in range(n):
        step = p**j
        best_c, best_e = None, e
        for c in range(1, p):
            cand = b + c * step
            ec = _trunc_val(u - cand * cand, p, n)
            if ec > best_e:
                best_c, best_e = c, ec
        if best_c is not None:
            b, e = b + best_c * step, best_e
        if e > e2:
            return INF, b
    if e >= n:
        raise PrecisionError(f"{n} digits cannot separate the square class of unit {u} mod {p}^{n}")
    return e, b


def _defect_data(x, p: int | None, prec: int) -> tuple[int | float, Fraction]:
    x = as_padic(x, p, prec)
    if x.is_zero():
        raise PrecisionError("quadratic defect of a value that is zero to precision")
    v = x.valuation
    if v % 2:
        return v, Fraction(0)
    e, b = _unit_defect_search(x.unit, x.p, x.prec)
    scale = Fraction(x.p) ** (v // 2)
    return (INF if e == INF else v + e), b * scale


def quadratic_defect(x, p: int | None = None, prec: int = DEFAULT_PREC) -> int | float:
    """Exponent d of the quadratic defect ideal (pi^d): the largest v(x - b^2), b in k.

    ``INF`` exactly when x is a square.
    """
    return _defect_data(x, p, prec)[0]


def defect_minimizer(x, p: int | None = None, prec: int = DEFAULT_PREC) -> tuple[Fraction, int | float]:
    """A rational delta with v(delta^2 - x) equal to the defect exponent of x.

    For squares the returned delta is only a truncated root; use
    ``sqrt_if_square`` when the root itself matters.
    """
    d, delta = _defect_data(x, p, prec)
    if d == INF:
        r = sqrt_if_square(x, p, prec)
        return r.to_fraction(), INF
    return delta, d


def _sqrt_unit(u: int, p: int, n: int) -> tuple[int, int] | None:
    """Square root of a unit modulo p^n, as ``(root, digits)``; None for non-squares."""
    if p == 2:
        if n < 3:
            raise PrecisionError("2-adic square classes need at least 3 digits")
        if u % 8 != 1:
            return None
        r = 1
        for k in range(3, n):
            if (r * r - u) % 2 ** (k + 1):
                r += 2 ** (k - 1)
        return r % 2 ** (n - 1), n - 1
    if pow(u, (p - 1) // 2, p) != 1:
        return None
    r = next(c for c in range(1, p) if (c * c - u) % p == 0)
    k = 1
    while k < n:
        k = min(2 * k, n)
        mod = p**k
        r = (r - (r * r - u) * pow(2 * r, -1, mod)) % mod
    return r, n


def sqrt_if_square(x, p: int | None = None, prec: int = DEFAULT_PREC) -> PadicNumber | None:
    """Hensel-lifted square root, or None when x is not a square.

    The root carries ``prec`` digits for odd p and ``prec - 1`` for p = 2.
    """
    x = as_padic(x, p, prec)
    if x.is_zero():
        raise PrecisionError("square root of a value that is zero to precision")
    if x.valuation % 2:
        return None
    root = _sqrt_unit(x.unit, x.p, x.prec)
    if root is None:
        return None
    r, n = root
    return PadicNumber(x.p, x.valuation // 2, r, n)


def is_square(x, p: int | None = None, prec: int = DEFAULT_PREC) -> bool:
    return quadratic_defect(x, p, prec) == INF


def _least_nonresidue(p: int) -> int:
    return next(c for c in range(2, p) if pow(c, (p - 1) // 2, p) == p - 1)


def square_class_reps(p: int) -> list[SquareClass]:
    """One representative per class of Q_p^* / Q_p^*2, smallest positive integer lifts."""
    if p == 2:
        classes = [
            SquareClass(SquareClassTag.ONE, 1, INF),
            SquareClass(SquareClassTag.DELTA, 5, 2),
            SquareClass(SquareClassTag.RAMIFIED_UNIT, 3, 1, s=0),
            SquareClass(SquareClassTag.RAMIFIED_UNIT, 7, 1, s=0),
        ]
        units = (1, 3, 5, 7)
    else:
        delta = _least_nonresidue(p)
        classes = [
            SquareClass(SquareClassTag.ONE, 1, INF),
            SquareClass(SquareClassTag.DELTA, delta, 0),
        ]
        units = (1, delta)
    classes += [SquareClass(SquareClassTag.UNIFORMIZER, p * u, 1) for u in units]
    return classes


def class_of(x, p: int | None = None, prec: int = DEFAULT_PREC) -> SquareClass:
    """The representative class containing x."""
    x = as_padic(x, p, prec)
    if x.is_zero():
        raise PrecisionError("square class of a value that is zero to precision")
    for c in square_class_reps(x.p):
        ratio = x / c.representative
        if sqrt_if_square(ratio) is not None:
            return c
    raise AssertionError("square class representatives are not exhaustive")


def hilbert_symbol(a, b, p: int | None = None, prec: int = DEFAULT_PREC) -> int:
    """Local Hilbert symbol (a, b)_p in {+1, -1}."""
    a, b = as_padic(a, p, prec), as_padic(b, p, prec)
    if a.p != b.p:
        raise PreconditionError("mixed primes")
    if a.is_zero() or b.is_zero():
        raise PreconditionError("Hilbert symbol needs nonzero arguments")
    p = a.p
    va, vb = a.valuation, b.valuation
    u, w = a.unit, b.unit
    if p == 2:
        if min(a.prec, b.prec) < 3:
            raise PrecisionError("2-adic Hilbert symbol needs units mod 8")
        eps = lambda z: ((z - 1) // 2) % 2  # noqa: E731
        omega = lambda z: ((z * z - 1) // 8) % 2  # noqa: E731
        e = eps(u % 8) * eps(w % 8) + va * omega(w % 8) + vb * omega(u % 8)
        return -1 if e % 2 else 1

    def legendre(z: int) -> int:
        return 1 if pow(z, (p - 1) // 2, p) == 1 else -1

    sign = (-1) ** (va * vb * ((p - 1) // 2))
    return sign * legendre(u) ** vb * legendre(w) ** va


# --------------------------------------------------------------------------
# quadratic extensions


@dataclass(frozen=True)
class QuadExtElement:
    """``x + y*sqrt(alpha)`` in L = Q_p(sqrt(alpha)), alpha a non-square.

    Coefficients are exact rationals; the valuation is normalised so that it
    extends the one on k, hence lies in (1/2)Z.
    """

    p: int
    alpha: Fraction
    x: Fraction
    y: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))

    def _lift(self, other) -> "QuadExtElement":
        if isinstance(other, QuadExtElement):
            if other.alpha != self.alpha or other.p != self.p:
                raise PreconditionError("elements of different extensions")
            return other
        return QuadExtElement(self.p, self.alpha, Fraction(other), Fraction(0))

    def __add__(self, other):
        o = self._lift(other)
        return QuadExtElement(self.p, self.alpha, self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self):
        return QuadExtElement(self.p, self.alpha, -self.x, -self.y)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return QuadExtElement(
            self.p,
            self.alpha,
            self.x * o.x + self.alpha * self.y * o.y,
            self.x * o.y + self.y * o.x,
        )

    __rmul__ = __mul__

    def conj(self) -> "QuadExtElement":
        return QuadExtElement(self.p, self.alpha, self.x, -self.y)

    def norm(self) -> Fraction:
        return self.x * self.x - self.alpha * self.y * self.y

    def inverse(self) -> "QuadExtElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero in a quadratic extension")
        return QuadExtElement(self.p, self.alpha, self.x / n, -self.y / n)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def is_rational(self) -> bool:
        return self.y == 0

    def __repr__(self) -> str:
        if self.y == 0:
            return str(self.x)
        return f"{self.x}+{self.y}*sqrt({self.alpha})"


def ext_valuation(w: QuadExtElement) -> Fraction | float:
    """Normalised valuation (1/2) v(x^2 - alpha*y^2)."""
    n = w.norm()
    if n == 0:
        if w.x == 0 and w.y == 0:
            return INF
        raise PreconditionError(f"alpha={w.alpha} is a square; x+y*sqrt(alpha) is a zero divisor")
    return Fraction(_vp_rational(n, w.p), 2)


def sqrt_element(alpha: Rational, p: int) -> QuadExtElement:
    return QuadExtElement(p, Fraction(alpha), Fraction(0), Fraction(1))
