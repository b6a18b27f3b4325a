"""Acceptance suite: one pass/fail line per criterion, printed in the terminal summary."""
from fractions import Fraction
import random
import time

from btbranches import matrices as mx
from btbranches.branches import (
    _window_centers,
    branch_compare,
    branch_predict,
    oracle_relative_position,
    relative_position,
)
from btbranches.bttree import (
    INFINITY,
    QuadField,
    galois_image,
    make_ball,
    moebius_image,
    order_contains_at,
    path_from_ends,
)
from btbranches.cli import main as cli_main
from btbranches.embeddings import (
    ExtensionKind,
    embedding_vector,
    existence,
    model_for,
    table1,
    walk_census,
)
from btbranches.localfield import INF, SquareClassTag, nu2, quadratic_defect, square_class_reps
from btbranches.quaternions import (
    QuaternionPairSpec,
    SplitStatus,
    construct_pair,
    cross_ratio,
    find_witness,
    lambda_from_t,
    pure_from_conjugate_ends,
    split_check,
    symmetric_product,
    t_from_lambda,
)
from btbranches.embeddings import distance_from_cross_ratio

from acceptance_log import record
from oracles import brute_defect, vp


def reps(p):
    return [c.representative for c in square_class_reps(p)]


def test_criterion_1_defect_table():
    t0 = time.perf_counter()
    bad = []
    computed = {}
    for p in (2, 3, 5):
        e = nu2(p)
        classes = square_class_reps(p)
        n_ram = sum(c.tag is SquareClassTag.RAMIFIED_UNIT for c in classes)
        if len(classes) != 2 * n_ram + 4:
            bad.append(f"p={p}: {len(classes)} classes")
        for c in classes:
            d = quadratic_defect(c.representative, p)
            computed[p, c.representative] = d
            expected = {
                SquareClassTag.ONE: lambda: d == INF,
                SquareClassTag.DELTA: lambda: d == 2 * e,
                SquareClassTag.UNIFORMIZER: lambda: d == 1,
                SquareClassTag.RAMIFIED_UNIT: lambda: d % 2 == 1 and 0 <= (d - 1) // 2 < e,
            }[c.tag]()
            if not expected:
                bad.append(f"p={p} rep={c.representative} tag={c.tag.value} defect={d}")
    took = time.perf_counter() - t0
    # independent brute-force cross-check, outside the timed part
    for (p, x), d in computed.items():
        if d != brute_defect(x, p):
            bad.append(f"p={p} rep={x}: brute force disagrees with {d}")
    ok = not bad and took < 1.0
    record(1, ok, f"defect of every class rep for p in (2,3,5) matches its tag and brute force; {len(bad)} mismatches; table built in {took:.3f}s")
    assert ok, bad


def test_criterion_2_branch_oracle():
    t0 = time.perf_counter()
    rng = random.Random(2024)
    runs, bad = 0, []
    for p, radius in ((3, 4), (5, 4), (2, 3)):
        for alpha in reps(p):
            cases = [(Fraction(0), Fraction(1))]
            cases += [
                (Fraction(rng.randint(-40, 40), rng.choice([1, p])), Fraction(rng.randint(1, 40), rng.choice([1, p, p * p])))
                for _ in range(3)
            ]
            for a, b in cases:
                i = pure_from_conjugate_ends(alpha, a, b)
                for center in (branch_predict(i, p).anchor(), make_ball(0, 0, p)):
                    runs += 1
                    report = branch_compare([i.matrix], center, radius)
                    if not report.agreement:
                        bad.append((p, alpha, a, b, report.mismatches[:3]))
    took = time.perf_counter() - t0
    ok = not bad and took < 30
    record(2, ok, f"{runs - len(bad)}/{runs} containment windows equal the predicted thick path", t0)
    assert ok, bad[:5]


def lambda_grid(p):
    units = [u for u in range(1, 3 * p) if u % p]
    return [s * Fraction(u) * Fraction(p) ** v for v in range(-3, 4) for u in units for s in (1, -1)]


def test_criterion_3_relative_position_sweep():
    t0 = time.perf_counter()
    total, bad, thin = 0, [], []
    for p in (3, 5):
        for al in reps(p):
            for be in reps(p):
                used = 0
                for lam in lambda_grid(p):
                    triple = QuaternionPairSpec.normalized(p, al, be, lam)
                    status = split_check(triple)
                    if status is not SplitStatus.SPLITS:
                        continue
                    used += 1
                    pair = construct_pair(triple)
                    ti, tj = branch_predict(pair.i, p), branch_predict(pair.j, p)
                    got = oracle_relative_position([pair.i.matrix], [pair.j.matrix], p, _window_centers(ti, tj), (4, 6))
                    want = relative_position(triple)
                    if got is None or not got.same_as(want):
                        bad.append((p, al, be, lam, want, got))
                total += used
                if used < 25:
                    thin.append((p, al, be, used))
    took = time.perf_counter() - t0
    ok = not bad and not thin and took < 600
    record(3, ok, f"{total - len(bad)}/{total} split pairs agree with the oracle; pairs with < 25 lambdas: {len(thin)}", t0)
    assert ok, (bad[:5], thin)


def census_cells():
    for p in (2, 3):
        for kind in ExtensionKind:
            for r in range(7):
                for t in range(5):
                    if existence(kind, r, t):
                        yield kind, r, t, p


def test_criterion_4_walk_census():
    t0 = time.perf_counter()
    cells = list(census_cells())
    bad = []
    for kind, r, t, p in cells:
        n, m = walk_census(model_for(kind, t, p), r)
        if n != p ** (r // 2) or m != table1(kind, r, t, p)[0]:
            bad.append((kind.value, r, t, p, n, m))
    ok = not bad
    record(4, ok, f"{len(cells) - len(bad)}/{len(cells)} cells: census n = q^[r/2] and m = table m", t0)
    assert ok, bad


def test_criterion_5_embedding_vector(capsys):
    t0 = time.perf_counter()
    checks = {}
    checks["r=0"] = all(embedding_vector(k, 0, t, p).e == (1, 1, 1, 1) for k in ExtensionKind for t in range(3) for p in (2, 3, 5))
    v = embedding_vector(ExtensionKind.UNRAMIFIED, 2, 1, 3)
    checks["(U,2,1,3)"] = v.e == (3, 2, 2, 2) and v.integral and v.consistent
    flagged = embedding_vector(ExtensionKind.UNRAMIFIED, 1, 1, 3)
    code = cli_main(["embed", "--p", "3", "Unramified", "1", "1"])
    ok_code = cli_main(["embed", "--p", "3", "Unramified", "2", "1"])
    capsys.readouterr()
    checks["(U,1) flagged"] = (not flagged.integral) and code not in (0, ok_code) and ok_code == 0
    ok = all(checks.values())
    record(5, ok, "; ".join(f"{k}: {'ok' if v else 'bad'}" for k, v in checks.items()) + f"; exit code {code}", t0)
    assert ok, checks


def test_criterion_6_burnside():
    t0 = time.perf_counter()
    integral, bad = 0, []
    for kind, r, t, p in census_cells():
        vec = embedding_vector(kind, r, t, p)
        if not vec.integral:
            continue
        integral += 1
        n, m = vec.census
        e1, e2, e3, e4 = vec.e
        if not (
            e1 == 2 * n - m
            and e2 == Fraction(e1 + vec.chi2, 2)
            and e3 == Fraction(e1 + vec.chi3, 2)
            and e4 == Fraction(e1 + vec.chi2 + vec.chi3 + m, 4)
        ):
            bad.append((kind.value, r, t, p))
    ok = not bad
    record(6, ok, f"Burnside identities hold on {integral - len(bad)}/{integral} integral outputs", t0)
    assert ok, bad


def walk_distance(a, b, c, d, p, span=40):
    w1, w2 = path_from_ends(a, b, p), path_from_ends(c, d, p)
    return min(w1.distance_to(w2.vertex(n)) for n in range(-span, span + 1))


def test_criterion_7_cross_ratio_geometry():
    t0 = time.perf_counter()
    bad, count = [], 0
    for p in (2, 3, 5):
        rng = random.Random(700 + p)
        done = 0
        while done < 100:
            pts = [Fraction(rng.randint(-300, 300), rng.choice([1, 1, p, p * p])) for _ in range(4)]
            if len(set(pts)) < 4:
                continue
            if rng.random() < 0.2:
                pts[rng.randrange(4)] = INFINITY
            a, b, c, d = pts
            t = cross_ratio(a, b, c, d)
            if distance_from_cross_ratio(a, b, c, d, p) != walk_distance(a, b, c, d, p):
                bad.append(("distance", p, pts))
            if t != cross_ratio(b, a, d, c):
                bad.append(("symmetry", p, pts))
            if lambda_from_t(t_from_lambda(t)) != t or t_from_lambda(lambda_from_t(t)) != t:
                bad.append(("round trip", p, pts))
            done += 1
            count += 1
    ok = not bad
    record(7, ok, f"{count - len(bad)}/{count} quadruples: l = v(t-1), lambda<->t round trip, [a,b;c,d] = [b,a;d,c]", t0)
    assert ok, bad[:5]


def test_criterion_8_splitting_coherence():
    t0 = time.perf_counter()
    bad, witnessed, seen = [], 0, 0
    for p in (2, 3, 5):
        rng = random.Random(800 + p)
        n = 0
        while n < 200:
            al = rng.choice(reps(p)) * rng.choice([1, p * p, Fraction(1, p * p)])
            be = rng.choice(reps(p))
            lam = Fraction(rng.randint(-60, 60), rng.randint(1, 9)) * Fraction(p) ** rng.randint(-3, 3)
            triple = QuaternionPairSpec.normalized(p, al, be, lam)
            status = split_check(triple)
            if status is SplitStatus.DEGENERATE:
                continue
            n += 1
            seen += 1
            if find_witness(triple) is None:
                continue
            witnessed += 1
            if status is not SplitStatus.SPLITS:
                bad.append(("witness without splitting", p, triple))
                continue
            pair = construct_pair(triple)
            i, j = pair.i.matrix, pair.j.matrix
            sym = symmetric_product(i, j)
            err = pair.lambda_error_valuation(triple.lam)
            floor = (vp(triple.lam, p) if triple.lam else 0) + 15
            if mx.mul(i, i) != mx.scalar(triple.alpha) or mx.mul(j, j) != mx.scalar(triple.beta) or not mx.is_scalar(sym) or err < floor:
                bad.append(("construction", p, triple, err))
    ok = not bad
    record(8, ok, f"{witnessed} witnesses among {seen} triples; all split, with i^2, j^2 exact and ij+ji = 2*lambda to >= 15 digits", t0)
    assert ok, bad[:5]


def test_criterion_9_equivariance():
    t0 = time.perf_counter()
    bad = []
    rng = random.Random(900)
    n_conj = 0
    while n_conj < 100:
        p = rng.choice([2, 3, 5])
        m = mx.mat(*(Fraction(rng.randint(-9, 9), rng.choice([1, p])) for _ in range(4)))
        if mx.det(m) == 0:
            continue
        g = mx.mat(*(Fraction(rng.randint(-9, 9), rng.choice([1, p])) for _ in range(4)))
        v = make_ball(Fraction(rng.randint(-50, 50), rng.choice([1, p, p * p])), rng.randint(-3, 4), p)
        n_conj += 1
        if order_contains_at(moebius_image(m, v), mx.conjugate(m, g)) != order_contains_at(v, g):
            bad.append(("conjugation", p, m, g, v))
    n_gal = 0
    for _ in range(100):
        p, alpha = rng.choice([(5, 5), (5, 2), (3, 3), (3, 2), (2, 3), (2, 5), (2, 2)])
        f = QuadField(p, alpha)
        z = f.element(Fraction(rng.randint(-40, 40), rng.choice([1, p])), Fraction(rng.randint(-40, 40), rng.choice([1, p])))
        v = make_ball(z, Fraction(rng.randint(-4, 8), f.e), p, f)
        n_gal += 1
        if galois_image(galois_image(v)) != v:
            bad.append(("galois", p, alpha, v))
    ok = not bad
    record(9, ok, f"{n_conj} conjugation cases and {n_gal} Galois involution cases; {len(bad)} failures", t0)
    assert ok, bad[:5]


if __name__ == "__main__":
    import sys

    import pytest

    sys.exit(pytest.main([__file__, "-q"]))
