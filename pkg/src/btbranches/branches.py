"""Branches of pure quaternions on the k-tree and the relative position of two branches.

The branch of an order is the set of vertices whose maximal order contains
it.  For the order k[i] generated by a pure quaternion it is a thick path:
every vertex within ``depth`` of a stem, where the stem is a whole path (i^2 a
square), a single vertex (k(i)/k unramified) or a single edge (ramified).

Predictions come from closed formulas; the ``oracle_*`` functions measure the
same objects by brute-force containment tests and never look at a formula.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from . import matrices as mx
from .bttree import (
    INFINITY,
    Ball,
    ContainmentTest,
    QuadField,
    Walk,
    geodesic,
    iter_ball,
    make_ball,
    neighbors,
    path_from_ends,
    to_dot,
    tree_distance,
)
from .errors import DegenerateError, PreconditionError
from .localfield import (
    DEFAULT_PREC,
    INF,
    QuadExtElement,
    _vp_rational,
    defect_minimizer,
    nu2,
    quadratic_defect,
    sqrt_if_square,
)
from .matrices import Matrix
from .quaternions import PureQuaternion, QuaternionPairSpec, conjugate_ends

class StemClass(enum.Enum):
    SPLIT = "Split"
    UNRAMIFIED = "Unramified"
    RAMIFIED = "Ramified"

    @property
    def length(self):
        return {"Split": INF, "Unramified": 0, "Ramified": 1}[self.value]


def stem_class(alpha, p: int, prec: int = DEFAULT_PREC) -> StemClass:
    d = quadratic_defect(alpha, p, prec)
    if d == INF:
        return StemClass.SPLIT
    return StemClass.RAMIFIED if d % 2 else StemClass.UNRAMIFIED


@dataclass(frozen=True)
class ThickPath:
    """All vertices within ``depth`` of the stem.

    A split stem is the path ``walk``; otherwise ``vertices`` lists the one
    or two stem vertices.
    """

    p: int
    stem_class: StemClass
    depth: int
    vertices: tuple[Ball, ...] = ()
    walk: Optional[Walk] = None

    @property
    def stem_length(self):
        return self.stem_class.length

    def stem_distance(self, v: Ball):
        if self.walk is not None:
            return self.walk.distance_to(v)
        return min(tree_distance(v, u) for u in self.vertices)

    def contains(self, v: Ball) -> bool:
        return self.stem_distance(v) <= self.depth

    def stem_within(self, center: Ball, radius) -> list[Ball]:
        if self.walk is not None:
            return self.walk.vertices_within(center, radius)
        return [u for u in self.vertices if tree_distance(center, u) <= radius]

    def within(self, center: Ball, radius) -> set[Ball]:
        return {v for v, _ in iter_ball(center, radius) if self.contains(v)}

    def anchor(self) -> Ball:
        return self.vertices[0] if self.walk is None else self.walk.vertex(0)

    def nearest_stem_vertex(self, v: Ball) -> Ball:
        if self.walk is not None:
            return self.walk.vertex(self.walk.project(v)[0])
        return min(self.vertices, key=lambda u: tree_distance(v, u))

    def to_json(self, center: Ball | None = None, radius=None) -> dict:
        out: dict = {"stem_class": self.stem_class.value, "depth": self.depth}
        if self.walk is not None:
            out["ends"] = [str(self.walk.start), str(self.walk.stop)]
            if center is not None:
                out["stem"] = [v.key() for v in self.stem_within(center, radius)]
        else:
            out["stem"] = [v.key() for v in self.vertices]
        return out


def ghost_stem_ends(i: PureQuaternion, p: int) -> tuple[QuadExtElement, QuadExtElement]:
    """The two ends z, z' of the stem of i in the tree of L = k(i), conjugate under Galois."""
    if sqrt_if_square(i.alpha, p) is not None:
        raise PreconditionError("alpha is a square; the stem lives in the k-tree")
    a, b = conjugate_ends(i)
    z = QuadExtElement(p, i.alpha, a, b)
    return z, z.conj()


def vine_base(alpha, a, b, p: int, prec: int = DEFAULT_PREC) -> tuple[Fraction, int]:
    """xi = a + b*delta, the k-point closest to the ghost ends, and the defect exponent of alpha."""
    delta, d = defect_minimizer(alpha, p, prec)
    if d == INF:
        raise PreconditionError("alpha is a square; there is no ghost stem")
    return Fraction(a) + Fraction(b) * delta, d


def _split_ends(alpha, a, b, p: int, prec: int):
    r = sqrt_if_square(alpha, p, prec)
    root = r.to_fraction()
    return Fraction(a) + Fraction(b) * root, Fraction(a) - Fraction(b) * root


def k_stem_and_depth(alpha, p: int, a=0, b=1, prec: int = DEFAULT_PREC) -> ThickPath:
    """Predicted branch of pure_from_conjugate_ends(alpha, a, b).

    Split: the path between a +- b sqrt(alpha), depth v(2) + v(alpha)/2.
    Otherwise, with d the defect exponent of alpha and rho = v(b) + d/2:
    d even gives the single vertex B_xi^[rho] with depth d/2; d odd gives
    the edge between radii rho -+ 1/2 around xi, with depth (d - 1)/2.
    """
    alpha, a, b = Fraction(alpha), Fraction(a), Fraction(b)
    if b == 0:
        raise PreconditionError("b must be nonzero")
    delta, d = defect_minimizer(alpha, p, prec)
    if d == INF:
        e1, e2 = _split_ends(alpha, a, b, p, prec)
        depth = nu2(p) + _vp_rational(alpha, p) // 2
        return ThickPath(p, StemClass.SPLIT, depth, (), path_from_ends(e1, e2, p))
    xi = a + b * delta
    vb = _vp_rational(b, p)
    if d % 2 == 0:
        v = make_ball(xi, vb + d // 2, p)
        return ThickPath(p, StemClass.UNRAMIFIED, d // 2, (v,))
    s = (d - 1) // 2
    top = make_ball(xi, vb + s, p)
    bottom = make_ball(xi, vb + s + 1, p)
    return ThickPath(p, StemClass.RAMIFIED, s, (top, bottom))


def _split_end_from_upper_triangular(i: PureQuaternion, p: int, prec: int) -> ThickPath:
    (x, y), _ = i.matrix
    if x == 0:
        raise PreconditionError("nilpotent input; the branch is not a thick path")
    other = -y / (2 * x)
    depth = nu2(p) + _vp_rational(i.alpha, p) // 2
    return ThickPath(p, StemClass.SPLIT, depth, (), path_from_ends(INFINITY, other, p))


def branch_predict(i: PureQuaternion | Matrix, p: int, prec: int = DEFAULT_PREC) -> ThickPath:
    if not isinstance(i, PureQuaternion):
        i = PureQuaternion.of(i)
    if i.alpha == 0:
        raise PreconditionError("nilpotent input; the branch is not a thick path")
    if i.matrix[1][0] == 0:
        return _split_end_from_upper_triangular(i, p, prec)
    a, b = conjugate_ends(i)
    return k_stem_and_depth(i.alpha, p, a, b, prec)


def ghost_route_contains(i: PureQuaternion, v: Ball, p: int, prec: int = DEFAULT_PREC) -> bool:
    """Second predictor: v is in the branch iff its distance to the stem of i over L = k(i) is at most v(2 sqrt(alpha)).

    The k-vertex is viewed in the L-tree, where i is split with ends z and its conjugate.
    """
    a, b = conjugate_ends(i)
    reach = nu2(p) + Fraction(_vp_rational(i.alpha, p), 2)
    if sqrt_if_square(i.alpha, p, prec) is not None:
        e1, e2 = _split_ends(i.alpha, a, b, p, prec)
        return path_from_ends(e1, e2, p).distance_to(v) <= reach
    f = QuadField(p, i.alpha)
    z = f.element(a, b)
    walk = path_from_ends(z, z.conj(), p, f)
    return walk.distance_to(make_ball(v.center, v.radius, p, f)) <= reach


def _in_unit_classes(x: Fraction, p: int, prec: int) -> tuple[bool, int]:
    """(class is 1 or Delta, s) where the defect of a non-member is (pi^(2s+1))."""
    d = quadratic_defect(x, p, prec)
    if d == INF or d % 2 == 0:
        return True, 0
    return False, (d - 1) // 2


def fake_distance(triple: QuaternionPairSpec):
    """The signed quantity of the four-case formula; -INF when lambda^2 = alpha*beta with square alpha, beta."""
    p, al, be, lam = triple.p, triple.alpha, triple.beta, triple.lam
    gap = lam * lam - al * be
    a_unit, s = _in_unit_classes(al, p, triple.prec)
    b_unit, t = _in_unit_classes(be, p, triple.prec)
    if gap == 0:
        if stem_class(al, p, triple.prec) is StemClass.SPLIT:
            return -INF
        raise DegenerateError("lambda^2 = alpha*beta with non-square alpha, beta")
    nu = _vp_rational(gap, p)
    e = nu2(p)
    if a_unit and b_unit:
        return Fraction(-(nu - 2 * e), 2)
    if a_unit:
        return t - Fraction(nu, 2)
    if b_unit:
        return s - Fraction(nu, 2)
    return s + t - Fraction(nu + 2 * e, 2)


@dataclass(frozen=True)
class RelativePosition:
    kind: str  # "distance" or "intersection"
    value: object
    fake_distance: object = None

    @classmethod
    def distance(cls, d, df=None):
        return cls("distance", d, df)

    @classmethod
    def intersection(cls, n, df=None):
        return cls("intersection", n, df)

    def same_as(self, other: "RelativePosition") -> bool:
        return self.kind == other.kind and self.value == other.value

    def to_json(self) -> dict:
        def enc(x):
            if x is None:
                return None
            if x in (INF, -INF):
                return "infinity" if x > 0 else "-infinity"
            return str(x)

        return {"kind": self.kind, "value": enc(self.value), "fake_distance": enc(self.fake_distance)}


def relative_position(triple: QuaternionPairSpec) -> RelativePosition:
    df = fake_distance(triple)
    if df > 0:
        return RelativePosition.distance(df, df)
    li = stem_class(triple.alpha, triple.p, triple.prec).length
    lj = stem_class(triple.beta, triple.p, triple.prec).length
    return RelativePosition.intersection(min(-2 * df, li, lj), df)


# ---------------------------------------------------------------- oracle side


class Branch:
    """Membership oracle for the branch of a set of generators, with cached depth queries."""

    def __init__(self, gens: Iterable[Matrix], p: int, depth_cap: int = 6):
        self.p = p
        self.tests = [ContainmentTest(g, p) for g in gens]
        self.depth_cap = depth_cap
        self._member: dict[Ball, bool] = {}
        self._depth: dict[Ball, int] = {}

    def __contains__(self, v: Ball) -> bool:
        hit = self._member.get(v)
        if hit is None:
            hit = all(t(v) for t in self.tests)
            self._member[v] = hit
        return hit

    def depth(self, v: Ball) -> int:
        """Largest n with every vertex within n of v in the branch; -1 outside."""
        if v in self._depth:
            return self._depth[v]
        if v not in self:
            return -1
        seen = {v}
        frontier = [v]
        n = 0
        while n < self.depth_cap:
            nxt = []
            for u in frontier:
                for w in neighbors(u):
                    if w in seen:
                        continue
                    if w not in self:
                        self._depth[v] = n
                        return n
                    seen.add(w)
                    nxt.append(w)
            frontier = nxt
            n += 1
        self._depth[v] = n
        return n


def oracle_set(branch: Branch, center: Ball, radius) -> set[Ball]:
    return {v for v, _ in iter_ball(center, radius) if v in branch}


@dataclass
class OracleStem:
    members: set[Ball]
    stem: set[Ball]
    depth: int


def oracle_stem(branch: Branch, center: Ball, radius) -> OracleStem:
    members = oracle_set(branch, center, radius)
    if not members:
        return OracleStem(members, set(), -1)
    depths = {v: branch.depth(v) for v in members}
    top = max(depths.values())
    return OracleStem(members, {v for v, d in depths.items() if d == top}, top)


def _in_stem(branch: Branch, depth: int, v: Ball) -> bool:
    return v in branch and branch.depth(v) == depth


def measure_relative_position(bi: Branch, bj: Branch, center: Ball, radius) -> Optional[RelativePosition]:
    """Stem distance or stem intersection length seen in a window; None when the window cannot decide."""
    si, sj = oracle_stem(bi, center, radius), oracle_stem(bj, center, radius)
    if not si.stem or not sj.stem:
        return None
    common = si.stem & sj.stem
    if common:
        for v in common:
            if tree_distance(center, v) < radius:
                continue
            for w in neighbors(v):
                if tree_distance(center, w) > radius and _in_stem(bi, si.depth, w) and _in_stem(bj, sj.depth, w):
                    return None
        length = max(tree_distance(u, w) for u in common for w in common)
        return RelativePosition.intersection(length)
    u, w = min(((u, w) for u in si.stem for w in sj.stem), key=lambda uw: tree_distance(*uw))
    d = tree_distance(u, w)
    for x in neighbors(u):
        if _in_stem(bi, si.depth, x) and tree_distance(x, w) < d:
            return None
    for x in neighbors(w):
        if _in_stem(bj, sj.depth, x) and tree_distance(u, x) < d:
            return None
    return RelativePosition.distance(d)


def _window_centers(ti: ThickPath, tj: ThickPath) -> list[Ball]:
    ai = ti.anchor()
    aj = tj.nearest_stem_vertex(ai)
    ai = ti.nearest_stem_vertex(aj)
    aj = tj.nearest_stem_vertex(ai)
    g = geodesic(ai, aj)
    return [g[len(g) // 2], ai, aj]


def oracle_relative_position(
    gens_i: list[Matrix],
    gens_j: list[Matrix],
    p: int,
    centers: list[Ball],
    radii: Iterable[int] = (4, 6),
) -> Optional[RelativePosition]:
    """Try windows in turn until one decides the relative position of the two stems."""
    bi, bj = Branch(gens_i, p), Branch(gens_j, p)
    for r in radii:
        for c in centers:
            got = measure_relative_position(bi, bj, c, r)
            if got is not None:
                return got
    return None


@dataclass
class BranchReport:
    predicted: ThickPath | None
    predicted_set: set[Ball]
    oracle: set[Ball]
    center: Ball
    radius: int
    trivial: bool = False
    mismatches: list[str] = field(default_factory=list)

    @property
    def agreement(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        pred = self.predicted.to_json(self.center, self.radius) if self.predicted else {"stem": [], "depth": None}
        return {
            "predicted": pred,
            "oracle": sorted(v.key() for v in self.oracle),
            "agreement": self.agreement,
            "mismatches": self.mismatches,
            "trivial": self.trivial,
            "center": self.center.key(),
            "radius": self.radius,
        }

    def to_dot(self) -> str:
        stem = set()
        if self.predicted is not None:
            stem = set(self.predicted.stem_within(self.center, self.radius))
        tube = (self.predicted_set | self.oracle) - stem
        return to_dot(self.predicted_set | self.oracle, {"stem": stem, "tube": tube}, name="branch")


def branch_compare(gens: list[Matrix], center: Ball, radius: int, prec: int = DEFAULT_PREC) -> BranchReport:
    """Predicted branch of the order generated by ``gens`` against brute-force containment in a window."""
    p = center.p
    from .bttree import enumerate_containment

    oracle = enumerate_containment(gens, center, radius)
    nontrivial = [g for g in gens if not mx.is_scalar(g)]
    if not nontrivial:
        ball = {v for v, _ in iter_ball(center, radius)}
        report = BranchReport(None, ball, oracle, center, radius, trivial=True)
    else:
        pure = [PureQuaternion.of(mx.sub(g, mx.scalar(mx.trace(g) / 2))) for g in nontrivial]
        if any(q.alpha == 0 for q in pure):
            raise PreconditionError("nilpotent generators are not supported")
        for g, q in zip(nontrivial, pure):
            if mx.trace(g) != 0 and _vp_rational(mx.trace(g) / 2, p) < 0:
                raise PreconditionError("half the trace of a generator is not integral; only pure parts are predicted")
        paths = [branch_predict(q, p, prec) for q in pure]
        predicted = set.intersection(*(tp.within(center, radius) for tp in paths))
        report = BranchReport(paths[0] if len(paths) == 1 else None, predicted, oracle, center, radius)
    for v in sorted(report.predicted_set - oracle, key=lambda b: b.key()):
        report.mismatches.append(f"predicted but not contained: {v.key()}")
    for v in sorted(oracle - report.predicted_set, key=lambda b: b.key()):
        report.mismatches.append(f"contained but not predicted: {v.key()}")
    return report
