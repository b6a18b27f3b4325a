"""Idempotents, pure quaternions in M2(Q_p), cross-ratios and splitting of (alpha, beta, lambda).

A pair of pure quaternions with ``i^2 = alpha``, ``j^2 = beta`` and
``ij + ji = 2*lambda`` is described by a :class:`QuaternionPairSpec`.  All
matrices are exact over Q; truncated p-adic square roots only enter through
the witness search, where the resulting lambda is exact for the constructed
matrices and agrees with the requested one to the working precision.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import matrices as mx
from .bttree import INFINITY, ProjectivePoint, _as_point, _is_zero, _same_point
from .errors import DegenerateError, NoWitnessError, PreconditionError
from .localfield import (
    DEFAULT_PREC,
    QuadExtElement,
    _vp_rational,
    class_of,
    hilbert_symbol,
    sqrt_if_square,
)
from .matrices import Matrix

DEFAULT_WITNESS_BOUND = 6


@dataclass(frozen=True)
class Idempotent:
    """tau_{a,b}: kernel spanned by (a, 1), image spanned by (b, 1); infinity stands for (1, 0)."""

    a: ProjectivePoint
    b: ProjectivePoint
    matrix: Matrix

    def reversed(self) -> "Idempotent":
        return idempotent_from_ends(self.b, self.a)


def idempotent_from_ends(a, b) -> Idempotent:
    a, b = _as_point(a), _as_point(b)
    if _same_point(a, b):
        raise PreconditionError("an idempotent needs two different ends")
    if a is INFINITY:
        m = mx.mat(0, b, 0, 1)
    elif b is INFINITY:
        m = mx.mat(1, -a, 0, 0)
    else:
        m = mx.scale(1 / (b - a), mx.mat(b, -a * b, 1, -a))
    return Idempotent(a, b, m)


def reflection(a, b) -> Matrix:
    """2*tau_{a,b} - 1, a pure quaternion squaring to 1."""
    return mx.sub(mx.scale(2, idempotent_from_ends(a, b).matrix), mx.IDENTITY)


@dataclass(frozen=True)
class PureQuaternion:
    matrix: Matrix
    alpha: Fraction

    @classmethod
    def of(cls, m: Matrix) -> "PureQuaternion":
        if mx.trace(m) != 0:
            raise PreconditionError("a pure quaternion has trace zero")
        return cls(m, -mx.det(m))

    def scaled(self, c) -> "PureQuaternion":
        c = Fraction(c)
        return PureQuaternion(mx.scale(c, self.matrix), self.alpha * c * c)


def pure_from_conjugate_ends(alpha, a, b) -> PureQuaternion:
    """The pure quaternion sqrt(alpha) * (2 tau_{z, z'} - 1) for z = a + b sqrt(alpha), z' its conjugate.

    The entries lie in k and the square is alpha exactly.  When alpha is a
    square in Q_p the two ends are the k-points a +- b sqrt(alpha).
    """
    alpha, a, b = Fraction(alpha), Fraction(a), Fraction(b)
    if b == 0:
        raise PreconditionError("b must be nonzero")
    m = mx.mat(-a / b, (a * a - alpha * b * b) / b, -1 / b, a / b)
    return PureQuaternion(m, alpha)


def conjugate_ends(q: PureQuaternion) -> tuple[Fraction, Fraction]:
    """(a, b) with q = pure_from_conjugate_ends(alpha, a, b); inverse of the construction."""
    (x, y), (z, w) = q.matrix
    if z == 0:
        raise PreconditionError("lower-left entry vanishes; infinity is an end of this quaternion")
    b = -1 / z
    return w * b, b


def cross_ratio(a, b, c, d):
    """[a, b; c, d] = (c - a)(d - b) / ((c - b)(d - a)), so that [inf, 0; 1, t] = t."""
    pts = [_as_point(x) for x in (a, b, c, d)]
    for i in range(4):
        for j in range(i + 1, 4):
            if _same_point(pts[i], pts[j]):
                raise PreconditionError("cross-ratio of coincident points")
    a, b, c, d = pts

    def diff(x, y):
        return None if (x is INFINITY or y is INFINITY) else x - y

    num = [diff(c, a), diff(d, b)]
    den = [diff(c, b), diff(d, a)]
    out = Fraction(1)
    for f in num:
        if f is not None:
            out = f * out
    for f in den:
        if f is not None:
            out = out / f
    return out


def _moebius_involution(x):
    """x -> (x + 1)/(x - 1), an involution of P^1 that swaps 1 and infinity."""
    if x is INFINITY:
        return Fraction(1)
    if _is_zero(x - 1):
        return INFINITY
    return (x + 1) / (x - 1)


def lambda_from_t(t):
    """lambda = (t + 1)/(t - 1), for i = 2 tau_{a,b} - 1 and j = 2 tau_{d,c} - 1 with t = [a, b; c, d]."""
    return _moebius_involution(_as_point(t))


def t_from_lambda(lam):
    return _moebius_involution(_as_point(lam))


class SplitStatus(enum.Enum):
    SPLITS = "Splits"
    DIVISION = "Division"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class QuaternionPairSpec:
    """Normalised (alpha, beta, lambda) over Q_p.

    ``alpha`` and ``beta`` have valuation 0 or 1 and equal the given ones up
    to the square factors ``scale_i**-2`` and ``scale_j**-2``; lambda was
    multiplied by ``scale_i * scale_j``.  Unit square factors are left alone:
    they change neither the square class nor any valuation used downstream.
    """

    p: int
    alpha: Fraction
    beta: Fraction
    lam: Fraction
    scale_i: Fraction = Fraction(1)
    scale_j: Fraction = Fraction(1)
    prec: int = DEFAULT_PREC

    @classmethod
    def normalized(cls, p: int, alpha, beta, lam, prec: int = DEFAULT_PREC) -> "QuaternionPairSpec":
        alpha, beta, lam = Fraction(alpha), Fraction(beta), Fraction(lam)
        if alpha == 0 or beta == 0:
            raise PreconditionError("alpha and beta must be nonzero")
        si = Fraction(p) ** -(_vp_rational(alpha, p) // 2)
        sj = Fraction(p) ** -(_vp_rational(beta, p) // 2)
        return cls(p, alpha * si * si, beta * sj * sj, lam * si * sj, si, sj, prec)

    @property
    def is_degenerate(self) -> bool:
        return self.lam * self.lam == self.alpha * self.beta

    @property
    def alpha_rep(self) -> int:
        return class_of(self.alpha, self.p, self.prec).representative

    @property
    def beta_rep(self) -> int:
        return class_of(self.beta, self.p, self.prec).representative

    def swapped(self) -> "QuaternionPairSpec":
        return QuaternionPairSpec(self.p, self.beta, self.alpha, self.lam, self.scale_j, self.scale_i, self.prec)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "lambda": str(self.lam),
            "alpha_class": self.alpha_rep,
            "beta_class": self.beta_rep,
        }


def split_check(triple: QuaternionPairSpec) -> SplitStatus:
    """Does the algebra spanned by i, j split?

    Orthogonalising j' = j - (lambda/alpha) i gives j'^2 = (alpha*beta - lambda^2)/alpha,
    so the algebra is (alpha, (alpha*beta - lambda^2)/alpha) = (alpha, lambda^2 - alpha*beta).
    """
    gap = triple.lam * triple.lam - triple.alpha * triple.beta
    if gap == 0:
        return SplitStatus.DEGENERATE
    if hilbert_symbol(triple.alpha, gap, triple.p, triple.prec) == 1:
        return SplitStatus.SPLITS
    return SplitStatus.DIVISION


def _truncated_sqrt(x: Fraction, p: int, prec: int) -> Optional[Fraction]:
    if x == 0:
        return Fraction(0)
    r = sqrt_if_square(x, p, prec)
    return None if r is None else r.to_fraction()


def _witness_candidates(p: int, bound: int):
    digits = 2 if p != 2 else 4
    units = [u for u in range(1, p**digits) if u % p]
    for v in sorted(range(-bound, bound + 1), key=abs):
        for u in units:
            for sign in (1, -1):
                yield sign * Fraction(u) * Fraction(p) ** v


def find_witness(triple: QuaternionPairSpec, bound: int = DEFAULT_WITNESS_BOUND):
    """Search (a, b, c, d) with lambda = (alpha b^2 + beta d^2 - (a - c)^2)/(2bd).

    After a k-affine change of variable we may take c = 0, d = 1; then a is a
    square root of alpha b^2 - 2 lambda b + beta, scanned over b = +-u p^v with
    |v| <= bound.  ``a`` is a truncated p-adic root, so the relation holds to
    the working precision.  Returns None when nothing is found; that proves nothing.
    """
    if triple.is_degenerate:
        return None
    al, be, lam = triple.alpha, triple.beta, triple.lam
    for b in _witness_candidates(triple.p, bound):
        x = al * b * b - 2 * lam * b + be
        a = _truncated_sqrt(x, triple.p, triple.prec)
        if a is not None:
            return a, b, Fraction(0), Fraction(1)
    return None


def witness_lambda(alpha, beta, a, b, c, d) -> Fraction:
    return (alpha * b * b + beta * d * d - (a - c) ** 2) / (2 * b * d)


def symmetric_product(i: Matrix, j: Matrix) -> Matrix:
    return mx.add(mx.mul(i, j), mx.mul(j, i))


@dataclass(frozen=True)
class ConstructedPair:
    i: PureQuaternion
    j: PureQuaternion
    witness: tuple[Fraction, Fraction, Fraction, Fraction]
    lam_exact: Fraction
    p: int

    def generators(self) -> list[Matrix]:
        return [self.i.matrix, self.j.matrix]

    def lambda_error_valuation(self, lam) -> int | float:
        """v(lambda' - lambda): how many digits the realised lambda shares with the requested one."""
        return _vp_rational(self.lam_exact - Fraction(lam), self.p)


def construct_pair(triple: QuaternionPairSpec, bound: int = DEFAULT_WITNESS_BOUND) -> ConstructedPair:
    """Matrices i, j with i^2 = alpha, j^2 = beta exactly and ij + ji = 2 lambda' with lambda' = lambda to precision."""
    status = split_check(triple)
    if status is SplitStatus.DEGENERATE:
        raise DegenerateError(f"lambda^2 = alpha*beta for {triple}")
    w = find_witness(triple, bound)
    if w is None:
        raise NoWitnessError(f"no witness with |v(b)| <= {bound}; try a larger bound")
    a, b, c, d = w
    i = pure_from_conjugate_ends(triple.alpha, a, b)
    j = pure_from_conjugate_ends(triple.beta, c, d)
    s = symmetric_product(i.matrix, j.matrix)
    if not mx.is_scalar(s):
        raise ArithmeticError("constructed pair has a non-scalar symmetric product")
    return ConstructedPair(i, j, w, s[0][0] / 2, triple.p)


def _lmat(a, b, c, d):
    return ((a, b), (c, d))


def _lmul(x, y):
    return (
        (x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
        (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]),
    )


def descent_moebius(p: int, alpha, c, d, a, b) -> Matrix:
    """Moebius map fixing z = c + d sqrt(alpha) and its conjugate and sending a to b.

    Computed over L; the result is returned as a k-rational matrix after
    dividing by a nonzero entry.  Raises if the rescaled matrix is not k-rational.
    """
    alpha = Fraction(alpha)
    z = QuadExtElement(p, alpha, c, d)
    zb = z.conj()
    a, b = Fraction(a), Fraction(b)
    kappa = ((b - z) * (a - zb)) / ((b - zb) * (a - z))
    t = _lmat(QuadExtElement(p, alpha, 1), -z, QuadExtElement(p, alpha, 1), -zb)
    det_t = z - zb
    t_inv = _lmat(-zb / det_t, z / det_t, -1 / det_t, 1 / det_t)
    diag = _lmat(kappa, QuadExtElement(p, alpha, 0), QuadExtElement(p, alpha, 0), QuadExtElement(p, alpha, 1))
    m = _lmul(_lmul(t_inv, diag), t)
    pivot = next(e for row in m for e in row if not _is_zero(e))
    out = [[e / pivot for e in row] for row in m]
    if any(not e.is_rational() for row in out for e in row):
        raise ArithmeticError("descended Moebius map is not k-rational")
    return mx.mat(out[0][0].x, out[0][1].x, out[1][0].x, out[1][1].x)
