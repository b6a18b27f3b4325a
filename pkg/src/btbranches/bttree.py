"""The Bruhat-Tits tree of PGL2 over Q_p (and over quadratic extensions) as a tree of balls.

A vertex is a closed ball ``B_c^[r] = {z : v(z - c) >= r}``.  Larger ``r``
means a smaller ball.  Over k the radius is an integer; over a quadratic
extension L it lives in (1/e)Z and neighbouring vertices sit at distance 1/e,
so that distances on the k-tree and the L-tree agree.

Nothing here ever forms an absolute value; every comparison is a comparison
of valuations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Union

from . import matrices as mx
from .errors import PreconditionError
from .localfield import (
    QuadExtElement,
    _vp_rational,
    defect_minimizer,
    ext_valuation,
    is_square,
    vp_int,
)
from .matrices import Matrix

DEFAULT_MAX_RADIUS = 8
DEFAULT_MAX_P = 13


class _Infinity:
    """The point at infinity of P^1."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()

Scalar = Union[Fraction, QuadExtElement]
ProjectivePoint = Union[Fraction, QuadExtElement, _Infinity]


def _is_zero(x) -> bool:
    if isinstance(x, QuadExtElement):
        return x.x == 0 and x.y == 0
    return x == 0


def _val(x, p: int):
    if isinstance(x, QuadExtElement):
        return ext_valuation(x)
    return _vp_rational(Fraction(x), p)


def reduce_mod(c: Fraction, p: int, n: int) -> Fraction:
    """Canonical representative of ``c`` modulo p^n: only digits at positions below n survive."""
    if c == 0:
        return Fraction(0)
    if _vp_rational(c, p) >= n:
        return Fraction(0)
    den = c.denominator
    m = vp_int(den, p)
    rest = den // p**m
    mod = p ** (m + n)
    num = c.numerator * pow(rest, -1, mod) % mod
    return Fraction(num, p**m)


@dataclass(frozen=True)
class QuadField:
    """L = Q_p(sqrt(alpha)) with an integral basis {1, omega}.

    ``omega = (delta - sqrt(alpha)) / p^k`` where delta minimises
    v(delta^2 - alpha) and k = floor(d/2) for the defect exponent d.  Then
    omega is a uniformiser when L/k is ramified and a unit with residue
    outside F_p when it is unramified, so v(x0 + x1*omega) = min(v(x0), v(x1) + v(omega)).
    """

    p: int
    alpha: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if self.alpha == 0 or is_square(self.alpha, self.p):
            raise PreconditionError(f"alpha={self.alpha} is a square in Q_{self.p}; k(sqrt(alpha)) is not a field")

    @cached_property
    def _defect(self) -> tuple[Fraction, int]:
        return defect_minimizer(self.alpha, self.p)

    @property
    def delta(self) -> Fraction:
        return self._defect[0]

    @property
    def defect(self) -> int:
        return self._defect[1]

    @property
    def e(self) -> int:
        return 2 if self.defect % 2 else 1

    @property
    def ramified(self) -> bool:
        return self.e == 2

    @property
    def _k(self) -> int:
        return self.defect // 2

    @cached_property
    def sqrt_alpha(self) -> QuadExtElement:
        return QuadExtElement(self.p, self.alpha, 0, 1)

    @cached_property
    def omega(self) -> QuadExtElement:
        return (self.delta - self.sqrt_alpha) / Fraction(self.p) ** self._k

    @property
    def step(self) -> Fraction:
        return Fraction(1, self.e)

    def element(self, x=0, y=0) -> QuadExtElement:
        return QuadExtElement(self.p, self.alpha, x, y)

    def coords(self, z: Scalar) -> tuple[Fraction, Fraction]:
        if not isinstance(z, QuadExtElement):
            return Fraction(z), Fraction(0)
        pk = Fraction(self.p) ** self._k
        return z.x + z.y * self.delta, -z.y * pk

    def from_coords(self, x0: Fraction, x1: Fraction) -> QuadExtElement:
        y = -x1 / Fraction(self.p) ** self._k
        return self.element(x0 - y * self.delta, y)

    def reduce(self, z: Scalar, r) -> QuadExtElement:
        x0, x1 = self.coords(z)
        r = Fraction(r)
        if self.ramified:
            n0, n1 = math.ceil(r), math.ceil(r - Fraction(1, 2))
        else:
            n0 = n1 = int(r)
        return self.from_coords(reduce_mod(x0, self.p, n0), reduce_mod(x1, self.p, n1))

    def power_of_uniformiser(self, r) -> QuadExtElement:
        """An element of valuation exactly r."""
        r = Fraction(r)
        if r.denominator == 1:
            return self.element(Fraction(self.p) ** int(r))
        return Fraction(self.p) ** math.floor(r) * self.omega

    def residue_digits(self) -> list[QuadExtElement]:
        """Representatives of the residue field of L."""
        if self.ramified:
            return [self.element(j) for j in range(self.p)]
        return [self.element(j0) + j1 * self.omega for j0 in range(self.p) for j1 in range(self.p)]


@dataclass(frozen=True)
class Ball:
    """A vertex ``B_center^[radius]``; build through :func:`make_ball` to get the canonical form."""

    p: int
    center: Scalar
    radius: int | Fraction
    field: QuadField | None = None

    @property
    def over_extension(self) -> bool:
        return self.field is not None

    def key(self) -> str:
        return f"{self.center}:{self.radius}"

    def __repr__(self) -> str:
        return f"B[{self.center}]^{self.radius}"


def make_ball(center, radius, p: int, field: QuadField | None = None) -> Ball:
    if field is None:
        if isinstance(center, QuadExtElement):
            if center.y != 0:
                raise PreconditionError("a ball over k needs a center in k")
            center = center.x
        if Fraction(radius).denominator != 1:
            raise PreconditionError("balls over k have integer radius")
        r = int(radius)
        return Ball(p, reduce_mod(Fraction(center), p, r), r, None)
    r = Fraction(radius)
    if (r * field.e).denominator != 1:
        raise PreconditionError(f"radius {r} is not in (1/{field.e})Z")
    return Ball(p, field.reduce(center, r), r, field)


def canonical(b: Ball) -> Ball:
    return make_ball(b.center, b.radius, b.p, b.field)


def _step(v: Ball):
    return 1 if v.field is None else v.field.step


def parent(v: Ball) -> Ball:
    return make_ball(v.center, v.radius - _step(v), v.p, v.field)


def children(v: Ball) -> list[Ball]:
    p, r = v.p, v.radius
    if v.field is None:
        pr = Fraction(p) ** r
        return [Ball(p, v.center + j * pr, r + 1, None) for j in range(p)]
    f = v.field
    shift = f.power_of_uniformiser(r)
    return [make_ball(v.center + d * shift, r + f.step, p, f) for d in f.residue_digits()]


def neighbors(v: Ball) -> list[Ball]:
    """The minimal super-ball followed by the maximal sub-balls."""
    return [parent(v)] + children(v)


def tree_distance(v: Ball, w: Ball):
    if v.p != w.p or v.field != w.field:
        raise PreconditionError("vertices of different trees")
    m = min(_val(v.center - w.center, v.p), v.radius, w.radius)
    return (v.radius - m) + (w.radius - m)


def geodesic(v: Ball, w: Ball) -> list[Ball]:
    """Vertices of the walk from v to w, both included."""
    m = min(_val(v.center - w.center, v.p), v.radius, w.radius)
    s = _step(v)
    up, down = [], []
    r = v.radius
    while r >= m:
        up.append(make_ball(v.center, r, v.p, v.field))
        r -= s
    r = m + s
    while r <= w.radius:
        down.append(make_ball(w.center, r, v.p, v.field))
        r += s
    return up + down


def _same_point(a, b) -> bool:
    if a is INFINITY or b is INFINITY:
        return a is b
    return _is_zero(a - b)


def _as_point(x) -> ProjectivePoint:
    if x is INFINITY or isinstance(x, QuadExtElement):
        return x
    if isinstance(x, str) and x.lower() in ("inf", "infinity", "oo"):
        return INFINITY
    return Fraction(x)


@dataclass(frozen=True)
class Walk:
    """The doubly infinite path between two ends, indexed by position.

    Position n runs from the ``start`` end (n -> -inf) to the ``stop`` end
    (n -> +inf).  With two finite ends position 0 is the top vertex
    B_start^[v(start - stop)]; with one end at infinity position n is the ball
    of radius -n (resp. n) around the finite end.
    """

    p: int
    start: ProjectivePoint
    stop: ProjectivePoint
    field: QuadField | None = None

    @property
    def _finite_gap(self):
        return _val(self.start - self.stop, self.p)

    @property
    def step(self):
        return 1 if self.field is None else self.field.step

    def vertex(self, n) -> Ball:
        a, b = self.start, self.stop
        if a is INFINITY:
            return make_ball(b, n, self.p, self.field)
        if b is INFINITY:
            return make_ball(a, -n, self.p, self.field)
        vab = self._finite_gap
        if n <= 0:
            return make_ball(a, vab - n, self.p, self.field)
        return make_ball(b, vab + n, self.p, self.field)

    def project(self, v: Ball):
        """(position of the nearest path vertex, distance from v to the path)."""
        c, r = v.center, v.radius
        a, b = self.start, self.stop
        if a is INFINITY:
            mu = min(_val(c - b, self.p), r)
            return mu, r - mu
        if b is INFINITY:
            mu = min(_val(c - a, self.p), r)
            return -mu, r - mu
        vab = self._finite_gap
        mu_a = min(_val(c - a, self.p), r)
        mu_b = min(_val(c - b, self.p), r)
        if mu_a > vab:
            return vab - mu_a, r - mu_a
        if mu_b > vab:
            return mu_b - vab, r - mu_b
        return 0, r + vab - 2 * mu_a

    def distance_to(self, v: Ball):
        return self.project(v)[1]

    def contains(self, v: Ball) -> bool:
        return self.distance_to(v) == 0

    def vertices_within(self, center: Ball, radius) -> list[Ball]:
        idx, d = self.project(center)
        if d > radius:
            return []
        span = radius - d
        s = self.step
        out = []
        n = idx - span
        while n <= idx + span:
            out.append(self.vertex(n))
            n += s
        return out

    def reversed(self) -> "Walk":
        return Walk(self.p, self.stop, self.start, self.field)


def path_from_ends(a, b, p: int, field: QuadField | None = None) -> Walk:
    a, b = _as_point(a), _as_point(b)
    if _same_point(a, b):
        raise PreconditionError("a path needs two different ends")
    return Walk(p, a, b, field)


def median_vertex(a, b, c, p: int, field: QuadField | None = None) -> Ball:
    """The unique vertex lying on all three paths between the given ends."""
    pts = [_as_point(x) for x in (a, b, c)]
    for i in range(3):
        for j in range(i + 1, 3):
            if _same_point(pts[i], pts[j]):
                raise PreconditionError("median of coincident ends")
    finite = [x for x in pts if x is not INFINITY]
    if len(finite) == 2:
        x, y = finite
        return make_ball(x, _val(x - y, p), p, field)
    best = None
    for i in range(3):
        for j in range(i + 1, 3):
            v = _val(pts[i] - pts[j], p)
            if best is None or v > best[0]:
                best = (v, pts[i])
    return make_ball(best[1], best[0], p, field)


def vertex_basis(v: Ball) -> Matrix:
    """Columns (c, 1) and (p^r, 0): a basis of the lattice whose endomorphism ring is v."""
    if v.field is not None:
        raise PreconditionError("vertex_basis is only defined over k")
    return mx.mat(v.center, Fraction(v.p) ** v.radius, 1, 0)


class ContainmentTest:
    """Integrality of B^-1 g B at k-vertices, in pure integer arithmetic.

    With basis columns (c, 1), (p^r, 0) and g = [[x, y], [z, w]] one gets
    B^-1 g B = [[z c + w, z p^r], [p^-r (y + (x - w) c - z c^2), x - c z]].
    Writing c = C / p^m and g = G / D clears every denominator.
    """

    def __init__(self, g: Matrix, p: int):
        self.p = p
        self.g = g
        x, y, z, w, d = mx.integer_form(g)
        self.X, self.Y, self.Z, self.W = x, y, z, w
        self.vd = vp_int(d, p)

    def _divisible(self, n: int, k) -> bool:
        if k <= 0:
            return True
        return n % self.p**k == 0

    def at(self, C: int, m: int, r: int) -> bool:
        p, vd = self.p, self.vd
        X, Y, Z, W = self.X, self.Y, self.Z, self.W
        pm = p**m
        if not self._divisible(Z, vd - r):
            return False
        if not self._divisible(Z * C + W * pm, vd + m):
            return False
        if not self._divisible(X * pm - C * Z, vd + m):
            return False
        return self._divisible(Y * pm * pm + (X - W) * C * pm - Z * C * C, vd + r + 2 * m)

    def __call__(self, v: Ball) -> bool:
        if v.field is not None:
            return _contains_generic(v, self.g)
        c = v.center
        return self.at(c.numerator, vp_int(c.denominator, self.p), v.radius)


def _contains_generic(v: Ball, g: Matrix) -> bool:
    (x, y), (z, w) = g
    c, r, p = v.center, v.radius, v.p
    return (
        _val(z * c + w, p) >= 0
        and _val(z, p) + r >= 0
        and _val(x - c * z, p) >= 0
        and _val(y + (x - w) * c - z * c * c, p) >= r
    )


def order_contains_at(v: Ball, g: Matrix) -> bool:
    """Does the maximal order attached to v contain g?"""
    if v.field is not None:
        return _contains_generic(v, g)
    return ContainmentTest(g, v.p)(v)


def iter_ball(center: Ball, radius) -> Iterator[tuple[Ball, object]]:
    """All vertices within ``radius`` of ``center`` with their distance, depth first."""
    s = _step(center)
    stack = [(center, None, 0)]
    while stack:
        v, prev, d = stack.pop()
        yield v, d
        if d + s > radius:
            continue
        for w in neighbors(v):
            if prev is not None and w == prev:
                continue
            stack.append((w, v, d + s))


def enumerate_containment(
    gens: Iterable[Matrix],
    center: Ball,
    radius,
    max_radius: int = DEFAULT_MAX_RADIUS,
    max_p: int = DEFAULT_MAX_P,
) -> set[Ball]:
    """Brute force: every vertex within ``radius`` of ``center`` whose maximal order contains all gens."""
    if radius > max_radius:
        raise PreconditionError(f"enumeration radius {radius} exceeds the cap {max_radius}")
    if center.p > max_p:
        raise PreconditionError(f"p={center.p} exceeds the enumeration cap {max_p}")
    tests = [ContainmentTest(g, center.p) for g in gens]
    return {v for v, _ in iter_ball(center, radius) if all(t(v) for t in tests)}


def galois_image(v: Ball) -> Ball:
    """B_{sigma(c)}^[r] for the non-trivial automorphism sigma of L/k."""
    if v.field is None or not isinstance(v.center, QuadExtElement):
        return v
    return make_ball(v.center.conj(), v.radius, v.p, v.field)


def is_galois_fixed(v: Ball) -> bool:
    return galois_image(v) == v


def apply_moebius(m: Matrix, z: ProjectivePoint) -> ProjectivePoint:
    (a, b), (c, d) = m
    if z is INFINITY:
        return INFINITY if c == 0 else a / c
    den = c * z + d
    if _is_zero(den):
        return INFINITY
    return (a * z + b) / den


def moebius_image(m: Matrix, v: Ball) -> Ball:
    """Image of a vertex: the median of the images of three ends whose median is v."""
    if mx.det(m) == 0:
        raise PreconditionError("Moebius map needs an invertible matrix")
    if v.field is None:
        shift = Fraction(v.p) ** v.radius
    else:
        shift = v.field.power_of_uniformiser(v.radius)
    ends = (INFINITY, v.center, v.center + shift)
    return median_vertex(*(apply_moebius(m, e) for e in ends), p=v.p, field=v.field)


def to_dot(
    vertices: Iterable[Ball],
    groups: Mapping[str, Iterable[Ball]] | None = None,
    name: str = "tree",
) -> str:
    """Undirected DOT graph on the given vertices; ``groups`` tags nodes with a ``group`` attribute."""
    verts = sorted(set(vertices), key=lambda b: (b.radius, str(b.center)))
    membership: dict[Ball, str] = {}
    for label, members in (groups or {}).items():
        for b in members:
            membership.setdefault(b, label)
    lines = [f"graph {name} {{"]
    for b in verts:
        attr = f' [group="{membership[b]}"]' if b in membership else ""
        lines.append(f'  "{b.key()}"{attr};')
    present = set(verts)
    for b in verts:
        up = parent(b)
        if up in present:
            lines.append(f'  "{up.key()}" -- "{b.key()}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
