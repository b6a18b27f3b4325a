"""Optimal embedding numbers of quadratic orders into Eichler orders.

An Eichler order of level r is the intersection of the maximal orders along a
path of length r in the tree.  The order O_L^{t} of conductor t in a quadratic
field L embeds optimally exactly when the path sits inside its branch (a thick
path of depth t around a stem of length 0 or 1) and touches the boundary.

``embedding_vector`` evaluates the closed formula for (e1, e2, e3, e4).  The
walk census enumerates such paths on an explicit finite tree and recovers n
and m without the formula, which lets the Burnside identities be checked.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .errors import NonexistenceError, PreconditionError
from .localfield import INF, _vp_rational
from .quaternions import cross_ratio


class ExtensionKind(enum.Enum):
    UNRAMIFIED = "Unramified"
    RAMIFIED = "Ramified"

    @property
    def stem_length(self) -> int:
        return 0 if self is ExtensionKind.UNRAMIFIED else 1

    @classmethod
    def parse(cls, s) -> "ExtensionKind":
        if isinstance(s, cls):
            return s
        key = str(s).strip().lower()
        for kind in cls:
            if kind.value.lower().startswith(key[:3]):
                return kind
        raise PreconditionError(f"unknown extension kind {s!r}")


@dataclass(frozen=True)
class EichlerParams:
    kind: ExtensionKind
    r: int
    t: int
    q: int

    def __post_init__(self):
        if self.r < 0 or self.t < 0:
            raise PreconditionError("r and t must be nonnegative")
        if self.q < 2:
            raise PreconditionError("residue size must be at least 2")

    @property
    def h(self) -> int:
        return self.r // 2

    @property
    def v(self) -> int:
        return max(0, self.r - self.t)

    @property
    def returning_point(self) -> int:
        return self.r - self.r // 2

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "r": self.r, "t": self.t, "q": self.q}


def existence(kind, r: int, t: int) -> bool:
    kind = ExtensionKind.parse(kind)
    if r < 0 or t < 0:
        raise PreconditionError("r and t must be nonnegative")
    return r <= 2 * t + (1 if kind is ExtensionKind.RAMIFIED else 0)


def chi(r: int, u: int, t: int, p: int) -> int:
    """Number of residues a mod p^(t-r+2u) with a^2 = 1 and v(a-1) = t-r+u for every lift.

    The count is 1 by convention when u = 0.  The residue 1 never qualifies
    for u > 0 since its lifts have v(a-1) ranging over everything >= t-r+2u.
    """
    if u == 0:
        return 1
    if not (max(0, r - t) <= u <= r // 2):
        raise PreconditionError(f"u={u} outside [max(0, r-t), [r/2]] for r={r}, t={t}")
    return _chi_count(r, u, t, p)


def _chi_count(r: int, u: int, t: int, p: int) -> int:
    if u == 0:
        return 1
    if t - r + u < 0:
        # a - 1 is integral for a unit a, so a negative target valuation is never met
        return 0
    modulus_exp = t - r + 2 * u
    target = t - r + u
    mod = p**modulus_exp
    count = 0
    for a in range(1, mod):
        if a % p == 0 or (a * a - 1) % mod:
            continue
        # a - 1 is nonzero mod p^M, so every lift has the same valuation
        if _vp_rational(Fraction(a - 1), p) == target:
            count += 1
    return count


def chi3(r: int, t: int, p: int) -> int:
    lo, hi = max(0, r - t), r // 2
    return sum(chi(r, u, t, p) for u in range(lo, hi + 1))


def table1(kind, r: int, t: int, q: int) -> tuple[int, int]:
    """The pair (m, chi2) for the order of conductor t in an Eichler order of level r.

    r = 0 returns (1, 1): the trivial path is its own optimal endpoint, and
    with these values the general formula collapses to (1, 1, 1, 1).
    """
    kind = ExtensionKind.parse(kind)
    if not existence(kind, r, t):
        raise NonexistenceError(f"no optimal embedding for {kind.value}, r={r}, t={t}")
    if r == 0:
        return 1, 1
    if r < 2 * t:
        if r % 2:
            return 0, 0
        h = r // 2
        return (q - 1) * q ** (h - 1), chi(r, h, t, q)
    if r == 2 * t:
        if kind is ExtensionKind.UNRAMIFIED:
            return q**t, chi(r, t, t, q)
        return (q - 1) * q ** (t - 1), chi(r, t, t, q)
    # ramified, r = 2t + 1: u = t lies below r - t, so evaluate the definition literally
    return q**t, _chi_count(r, t, t, q)


# -- walk census on an explicit thick path ---------------------------------

# A vertex is (i, path): i indexes a stem vertex, path lists the child labels
# taken away from the stem.  Its distance to the stem is len(path).
Vertex = tuple[int, tuple[int, ...]]


@dataclass(frozen=True)
class ThickPathModel:
    stem_length: int
    depth: int
    q: int
    max_length: int = 16

    def __post_init__(self):
        if self.stem_length not in (0, 1):
            raise PreconditionError("only stems of length 0 or 1 are modelled")
        if self.depth < 0 or self.q < 2:
            raise PreconditionError("need depth >= 0 and q >= 2")

    def neighbors(self, v: Vertex) -> list[Vertex]:
        i, path = v
        if path:
            out = [(i, path[:-1])]
            if len(path) < self.depth:
                out += [(i, path + (c,)) for c in range(self.q)]
            return out
        stem = [(j, ()) for j in (i - 1, i + 1) if 0 <= j <= self.stem_length]
        if self.depth == 0:
            return stem
        return stem + [(i, (c,)) for c in range(self.q + 1 - len(stem))]

    @staticmethod
    def distance(v: Vertex) -> int:
        return len(v[1])

    def start(self) -> Vertex:
        return (0, (0,) * self.depth)


def census_walks(model: ThickPathModel, r: int) -> Iterator[tuple[Vertex, ...]]:
    """All non-backtracking walks of length r from ``model.start()`` inside the thick path."""
    if r < 0:
        raise PreconditionError("walk length must be nonnegative")
    if r > model.max_length:
        raise PreconditionError(f"walk length {r} exceeds the budget {model.max_length}")

    def extend(walk):
        if len(walk) == r + 1:
            yield tuple(walk)
            return
        prev = walk[-2] if len(walk) > 1 else None
        for w in model.neighbors(walk[-1]):
            if w != prev:
                walk.append(w)
                yield from extend(walk)
                walk.pop()

    yield from extend([model.start()])


def walk_census(model: ThickPathModel, r: int) -> tuple[int, int]:
    """(n, m): walks counted, and those ending again at the boundary depth."""
    n = m = 0
    for walk in census_walks(model, r):
        n += 1
        if model.distance(walk[-1]) == model.depth:
            m += 1
    return n, m


def model_for(kind, t: int, q: int) -> ThickPathModel:
    return ThickPathModel(ExtensionKind.parse(kind).stem_length, t, q)


# -- the formula -------------------------------------------------------------


def _num(x: Fraction):
    return x.numerator if x.denominator == 1 else str(x)


@dataclass(frozen=True)
class EmbeddingVector:
    params: EichlerParams
    e: tuple[Fraction, Fraction, Fraction, Fraction]
    n: int
    m: int
    chi2: int
    chi3: int
    census: tuple[int, int]
    violations: tuple[str, ...] = field(default=())

    @property
    def integral(self) -> bool:
        return all(x.denominator == 1 and x > 0 for x in self.e)

    @property
    def consistent(self) -> bool:
        return not any(v.startswith(("burnside", "census")) for v in self.violations)

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "e": [_num(x) for x in self.e],
            "n": self.n,
            "m": self.m,
            "chi2": self.chi2,
            "chi3": self.chi3,
            "flags": {"integral": self.integral, "consistent": self.consistent},
            "census": {"n": self.census[0], "m": self.census[1]},
            "violations": list(self.violations),
        }


def burnside_violations(e, n, m, chi2, chi3) -> list[str]:
    e1, e2, e3, e4 = e
    checks = [
        ("e1 = 2n - m", e1, 2 * n - m),
        ("e2 = (e1 + chi2)/2", e2, Fraction(e1 + chi2, 2)),
        ("e3 = (e1 + chi3)/2", e3, Fraction(e1 + chi3, 2)),
        ("e4 = (e1 + chi2 + chi3 + m)/4", e4, Fraction(e1 + chi2 + chi3 + m, 4)),
    ]
    return [f"burnside: {name} fails ({lhs} != {rhs})" for name, lhs, rhs in checks if lhs != rhs]


def formula_vector(n: int, m: int, chi2: int, chi3: int) -> tuple[Fraction, ...]:
    half, quarter = Fraction(1, 2), Fraction(1, 4)
    terms = [
        (n * half, (4, 2, 2, 1)),
        (-m * half, (2, 1, 1, 0)),
        (chi2 * quarter, (0, 2, 0, 1)),
        (chi3 * quarter, (0, 0, 2, 1)),
    ]
    return tuple(sum(c * w[k] for c, w in terms) for k in range(4))


def embedding_vector(kind, r: int, t: int, p: int) -> EmbeddingVector:
    """Evaluate the embedding numbers and cross-check them against the walk census.

    The census supplies its own n and m; the Burnside identities are checked
    with those, so ``consistent`` is not a tautology of the formula.
    """
    params = EichlerParams(ExtensionKind.parse(kind), r, t, p)
    if not existence(params.kind, r, t):
        raise NonexistenceError(f"no optimal embedding for {params.kind.value}, r={r}, t={t}")
    q = p
    n = q ** (r // 2)
    m, c2 = table1(params.kind, r, t, q)
    c3 = chi3(r, t, p)
    if r == 0:
        e = (Fraction(1),) * 4
    else:
        e = formula_vector(n, m, c2, c3)
    cn, cm = walk_census(model_for(params.kind, t, q), r)
    violations = []
    if (cn, cm) != (n, m):
        violations.append(f"census: walks give (n, m) = ({cn}, {cm}), formula uses ({n}, {m})")
    violations += burnside_violations(e, cn, cm, c2, c3)
    bad = [f"e{k + 1} = {x}" for k, x in enumerate(e) if x.denominator != 1 or x <= 0]
    if bad:
        violations.append("integrality: " + ", ".join(bad))
    return EmbeddingVector(params, e, n, m, c2, c3, (cn, cm), tuple(violations))


def consistency_report(kind, r: int, t: int, p: int) -> dict:
    vec = embedding_vector(kind, r, t, p)
    return {"ok": not vec.violations, **vec.to_json()}


def distance_from_cross_ratio(a, b, c, d, p: int):
    """Distance between the paths (a, b) and (c, d), read off as v([a, b; c, d] - 1).

    A negative valuation means the two paths overlap, so the result is clipped at 0.
    """
    t = cross_ratio(a, b, c, d)
    val = _vp_rational(t - 1, p)
    if val == INF:
        raise PreconditionError("cross-ratio equal to 1")
    return max(0, val)
