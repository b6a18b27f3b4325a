"""Exact 2x2 matrices over Q, stored as ((x, y), (z, w)) tuples of Fractions."""
from __future__ import annotations

from fractions import Fraction
from math import lcm

Matrix = tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]


def mat(x, y, z, w) -> Matrix:
    return ((Fraction(x), Fraction(y)), (Fraction(z), Fraction(w)))


IDENTITY = mat(1, 0, 0, 1)


def mul(a: Matrix, b: Matrix) -> Matrix:
    (a00, a01), (a10, a11) = a
    (b00, b01), (b10, b11) = b
    return (
        (a00 * b00 + a01 * b10, a00 * b01 + a01 * b11),
        (a10 * b00 + a11 * b10, a10 * b01 + a11 * b11),
    )


def add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))  # type: ignore[return-value]


def scale(c, a: Matrix) -> Matrix:
    c = Fraction(c)
    return tuple(tuple(c * x for x in row) for row in a)  # type: ignore[return-value]


def sub(a: Matrix, b: Matrix) -> Matrix:
    return add(a, scale(-1, b))


def det(a: Matrix) -> Fraction:
    return a[0][0] * a[1][1] - a[0][1] * a[1][0]


def trace(a: Matrix) -> Fraction:
    return a[0][0] + a[1][1]


def inv(a: Matrix) -> Matrix:
    d = det(a)
    if d == 0:
        raise ZeroDivisionError("singular matrix")
    return mat(a[1][1] / d, -a[0][1] / d, -a[1][0] / d, a[0][0] / d)


def scalar(c) -> Matrix:
    return mat(c, 0, 0, c)


def is_scalar(a: Matrix) -> bool:
    return a[0][1] == 0 and a[1][0] == 0 and a[0][0] == a[1][1]


def conjugate(m: Matrix, g: Matrix) -> Matrix:
    """m g m^-1."""
    return mul(mul(m, g), inv(m))


def integer_form(g: Matrix) -> tuple[int, int, int, int, int]:
    """(X, Y, Z, W, D) with g = [[X, Y], [Z, W]] / D and D > 0."""
    entries = [g[0][0], g[0][1], g[1][0], g[1][1]]
    d = lcm(*(e.denominator for e in entries))
    x, y, z, w = (int(e * d) for e in entries)
    return x, y, z, w, d


def to_json(g: Matrix) -> list[list[str]]:
    return [[str(x) for x in row] for row in g]
