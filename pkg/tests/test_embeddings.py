from fractions import Fraction
import json
import random

import pytest

from btbranches.bttree import INFINITY, path_from_ends, tree_distance
from btbranches.embeddings import (
    EichlerParams,
    ExtensionKind,
    ThickPathModel,
    burnside_violations,
    census_walks,
    chi,
    chi3,
    consistency_report,
    distance_from_cross_ratio,
    embedding_vector,
    existence,
    formula_vector,
    model_for,
    table1,
    walk_census,
)
from btbranches.errors import NonexistenceError, PreconditionError

from oracles import brute_chi, turning_point_count

U, R = ExtensionKind.UNRAMIFIED, ExtensionKind.RAMIFIED


def cells(primes=(2, 3), rmax=6, tmax=4):
    for p in primes:
        for kind in ExtensionKind:
            for r in range(rmax + 1):
                for t in range(tmax + 1):
                    if existence(kind, r, t):
                        yield kind, r, t, p


@pytest.mark.parametrize(
    "kind, r, t, expected",
    [(U, 3, 1, False), (R, 3, 1, True), (U, 0, 0, True), (R, 0, 0, True), (U, 2, 1, True), (R, 4, 1, False)],
)
def test_existence(kind, r, t, expected):
    assert existence(kind, r, t) is expected


def test_kind_parsing():
    assert ExtensionKind.parse("unram") is U
    assert ExtensionKind.parse("Ramified") is R
    with pytest.raises(PreconditionError):
        ExtensionKind.parse("split")


def test_params_derived_quantities():
    prm = EichlerParams(U, 5, 2, 3)
    assert (prm.h, prm.v, prm.returning_point) == (2, 3, 3)
    with pytest.raises(PreconditionError):
        EichlerParams(U, -1, 0, 3)


def test_chi_examples():
    assert chi(4, 0, 7, 5) == 1
    assert chi(2, 1, 1, 3) == 1
    assert chi(2, 1, 1, 2) == 0
    with pytest.raises(PreconditionError):
        chi(2, 2, 1, 3)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_chi_matches_lift_oracle(p):
    for r in range(8):
        for t in range(6):
            for u in range(max(0, r - t), r // 2 + 1):
                assert chi(r, u, t, p) == brute_chi(r, u, t, p)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_chi_odd_prime_support(p):
    for r in range(9):
        for t in range(7):
            for u in range(max(0, r - t), r // 2 + 1):
                c = chi(r, u, t, p)
                assert c in (0, 1)
                assert (c == 1) == (u == 0 or u == r - t)


def test_chi3_examples():
    assert chi3(2, 1, 3) == 1
    assert chi3(2, 5, 3) == chi(2, 0, 5, 3) + chi(2, 1, 5, 3)
    assert chi3(5, 1, 3) == 0


def test_table1_examples():
    assert table1(U, 2, 1, 3) == (3, 1)
    assert table1(R, 3, 1, 3)[0] == 3
    assert table1(U, 1, 2, 3) == (0, 0)
    assert table1(R, 1, 2, 5) == (0, 0)
    assert table1(U, 4, 3, 5) == (4 * 5, chi(4, 2, 3, 5))
    assert table1(R, 4, 2, 3) == (2 * 3, chi(4, 2, 2, 3))
    with pytest.raises(NonexistenceError):
        table1(U, 3, 1, 3)


def test_census_small_cases():
    assert walk_census(ThickPathModel(0, 1, 2), 2)[0] == 2
    for model in (ThickPathModel(0, 3, 2), ThickPathModel(1, 2, 5)):
        assert walk_census(model, 0) == (1, 1)
    assert walk_census(ThickPathModel(1, 1, 3), 3) == (3, table1(R, 3, 1, 3)[0])
    with pytest.raises(PreconditionError):
        walk_census(ThickPathModel(0, 1, 2, max_length=4), 5)


def test_model_neighbour_counts():
    for stem in (0, 1):
        model = ThickPathModel(stem, 2, 3)
        assert len(model.neighbors((0, ()))) == 4
        assert len(model.neighbors((0, (1,)))) == 4
        assert len(model.neighbors((0, (1, 2)))) == 1


@pytest.mark.parametrize("q", [2, 3, 5])
def test_census_matches_turning_point_count(q):
    for stem in (0, 1):
        for t in range(5):
            for r in range(8):
                assert walk_census(ThickPathModel(stem, t, q), r) == turning_point_count(stem, t, q, r)


@pytest.mark.parametrize("kind, r, t, p", list(cells()))
def test_census_against_table(kind, r, t, p):
    n, m = walk_census(model_for(kind, t, p), r)
    assert n == p ** (r // 2)
    assert m == table1(kind, r, t, p)[0]


@pytest.mark.parametrize("kind, r, t, p", list(cells(primes=(3,))))
def test_returning_point_law(kind, r, t, p):
    r0 = EichlerParams(kind, r, t, p).returning_point
    model = model_for(kind, t, p)
    for walk in census_walks(model, r):
        depth = [model.depth - model.distance(v) for v in walk]
        steps = [b - a for a, b in zip(depth, depth[1:])]
        falling = [k for k, s in enumerate(steps) if s < 0]
        if falling:
            first = falling[0]
            assert all(s <= 0 for s in steps[first:])
            assert first >= r0


def test_embedding_vector_examples():
    for kind in ExtensionKind:
        vec = embedding_vector(kind, 0, 2, 3)
        assert vec.e == (1, 1, 1, 1) and vec.integral and vec.consistent
    vec = embedding_vector(U, 2, 1, 3)
    assert vec.e == (3, 2, 2, 2)
    assert vec.integral and vec.consistent and not vec.violations
    with pytest.raises(NonexistenceError):
        embedding_vector(U, 3, 1, 3)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_unramified_level_one_is_not_integral(p):
    vec = embedding_vector(U, 1, 1, p)
    assert vec.e[3] == Fraction(3, 4)
    assert not vec.integral
    assert vec.consistent
    assert any(v.startswith("integrality") for v in vec.violations)


def test_formula_reduces_to_burnside():
    rng = random.Random(3)
    for _ in range(200):
        n, m, c2, c3 = (rng.randint(0, 40) for _ in range(4))
        assert burnside_violations(formula_vector(n, m, c2, c3), n, m, c2, c3) == []
    assert burnside_violations((Fraction(1),) * 4, 2, 1, 0, 0)


@pytest.mark.parametrize("kind, r, t, p", list(cells()))
def test_burnside_with_census_on_integral_outputs(kind, r, t, p):
    vec = embedding_vector(kind, r, t, p)
    assert vec.census == (vec.n, vec.m)
    if vec.integral:
        n, m = vec.census
        e1, e2, e3, e4 = vec.e
        assert e1 == 2 * n - m
        assert e2 == Fraction(e1 + vec.chi2, 2)
        assert e3 == Fraction(e1 + vec.chi3, 2)
        assert e4 == Fraction(e1 + vec.chi2 + vec.chi3 + m, 4)
        assert e2 <= e1 and e4 <= e3 <= e1


def test_report_json_schema():
    rep = consistency_report(U, 1, 1, 3)
    back = json.loads(json.dumps(rep))
    assert set(back) >= {"params", "e", "n", "m", "chi2", "chi3", "flags", "census"}
    assert back["e"] == [2, 1, "3/2", "3/4"]
    assert back["flags"] == {"integral": False, "consistent": True}
    assert back["ok"] is False
    assert consistency_report(U, 2, 1, 3)["ok"] is True
    assert consistency_report(R, 0, 0, 5)["ok"] is True


def test_distance_from_cross_ratio_examples():
    assert distance_from_cross_ratio(INFINITY, 0, 1, 1 + Fraction(5), 5) == 1
    assert distance_from_cross_ratio(INFINITY, 0, 1, Fraction(3), 5) == 0
    with pytest.raises(PreconditionError):
        distance_from_cross_ratio(0, 0, 1, 2, 5)


def path_distance(a, b, c, d, p, span=40):
    """min tree distance between vertices of the two paths, scanning positions."""
    w1, w2 = path_from_ends(a, b, p), path_from_ends(c, d, p)
    best = min(w1.distance_to(w2.vertex(n)) for n in range(-span, span + 1))
    # cross-check the projection with a pairwise scan near the minimum
    near = [w2.vertex(n) for n in range(-span, span + 1)]
    pair = min(tree_distance(v, w1.vertex(k)) for v in near[::8] for k in range(-span, span + 1, 4))
    assert pair >= best
    return best


@pytest.mark.parametrize("p", [2, 3, 5])
def test_distance_from_cross_ratio_matches_tree(p):
    rng = random.Random(70 + p)
    done = 0
    while done < 100:
        pts = [Fraction(rng.randint(-200, 200), rng.choice([1, 1, p, p * p])) for _ in range(4)]
        if len(set(pts)) < 4:
            continue
        if rng.random() < 0.2:
            pts[rng.randrange(4)] = INFINITY
        assert distance_from_cross_ratio(*pts, p) == path_distance(*pts, p)
        done += 1
