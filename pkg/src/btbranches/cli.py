"""Command-line front-end.

Exit codes: 0 success, 2 bad input or nonexistence, 3 precision exhausted,
4 an oracle disagrees with a formula (or cannot confirm it).
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import __version__
from .branches import (
    StemClass,
    _window_centers,
    branch_compare,
    branch_predict,
    oracle_relative_position,
    relative_position,
)
from .embeddings import chi, consistency_report, existence, ExtensionKind
from .errors import DegenerateError, NonexistenceError, PrecisionError, PreconditionError
from .localfield import INF, hilbert_symbol, quadratic_defect, square_class_reps
from .quaternions import (
    QuaternionPairSpec,
    SplitStatus,
    construct_pair,
    pure_from_conjugate_ends,
    split_check,
)

EXIT_OK, EXIT_INPUT, EXIT_PRECISION, EXIT_MISMATCH = 0, 2, 3, 4
MAX_RADIUS = 8


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


@dataclass(frozen=True)
class RunConfig:
    p: int = 5
    prec: int = 24
    radius: int = 4
    format: str = "json"
    seed: int = 0

    def __post_init__(self):
        if not _is_prime(self.p):
            raise PreconditionError(f"p = {self.p} is not prime")
        if not 1 <= self.radius <= MAX_RADIUS:
            raise PreconditionError(f"radius must lie in [1, {MAX_RADIUS}]")
        if self.prec < 4:
            raise PreconditionError("precision must be at least 4 digits")


def rational(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}") from exc


def _enc(x):
    if x == INF:
        return "infinity"
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    return x


# -- commands: each returns (payload, exit code) ----------------------------


def cmd_defect(cfg: RunConfig, value: Fraction):
    d = quadratic_defect(value, cfg.p, cfg.prec)
    return {"p": cfg.p, "value": str(value), "defect_exponent": _enc(d)}, EXIT_OK


def cmd_classes(cfg: RunConfig):
    rows = [
        {"representative": _enc(c.representative), "tag": c.tag.value, "defect_exponent": _enc(c.defect)}
        for c in square_class_reps(cfg.p)
    ]
    return {"p": cfg.p, "classes": rows}, EXIT_OK


def cmd_hilbert(cfg: RunConfig, a: Fraction, b: Fraction):
    return {"p": cfg.p, "a": str(a), "b": str(b), "symbol": hilbert_symbol(a, b, cfg.p, cfg.prec)}, EXIT_OK


def cmd_chi(cfg: RunConfig, r: int, u: int, t: int):
    return {"p": cfg.p, "r": r, "u": u, "t": t, "chi": chi(r, u, t, cfg.p)}, EXIT_OK


def cmd_branch(cfg: RunConfig, alpha: Fraction, a: Fraction = Fraction(0), b: Fraction = Fraction(1)):
    i = pure_from_conjugate_ends(alpha, a, b)
    tp = branch_predict(i, cfg.p, cfg.prec)
    report = branch_compare([i.matrix], tp.anchor(), cfg.radius, cfg.prec)
    payload = {"p": cfg.p, "alpha": str(alpha), "a": str(a), "b": str(b), **report.to_json()}
    if tp.stem_class is StemClass.SPLIT:
        payload["note"] = "alpha is a square; split stem"
    payload["_dot"] = report.to_dot()
    return payload, EXIT_OK if report.agreement else EXIT_MISMATCH


def cmd_pair(cfg: RunConfig, alpha: Fraction, beta: Fraction, lam: Fraction):
    triple = QuaternionPairSpec.normalized(cfg.p, alpha, beta, lam, prec=cfg.prec)
    status = split_check(triple)
    if status is SplitStatus.DEGENERATE:
        raise DegenerateError("lambda^2 = alpha*beta; i and j do not span a quaternion algebra")
    rp = relative_position(triple)
    payload = {
        "p": cfg.p,
        "normalized": triple.to_json(),
        "split": status.value,
        "relative_position": rp.to_json(),
        "oracle": None,
        "agreement": None,
    }
    if status is not SplitStatus.SPLITS:
        payload["note"] = "the algebra is a division algebra; no pair of matrices realizes it"
        return payload, EXIT_OK
    pair = construct_pair(triple)
    ti, tj = branch_predict(pair.i, cfg.p, cfg.prec), branch_predict(pair.j, cfg.p, cfg.prec)
    radii = sorted({min(4, cfg.radius), max(6, cfg.radius)})
    got = oracle_relative_position([pair.i.matrix], [pair.j.matrix], cfg.p, _window_centers(ti, tj), radii)
    payload["oracle"] = got.to_json() if got else "inconclusive"
    payload["agreement"] = bool(got and got.same_as(rp))
    payload["generators"] = {"i": _mat_json(pair.i.matrix), "j": _mat_json(pair.j.matrix)}
    return payload, EXIT_OK if payload["agreement"] else EXIT_MISMATCH


def _mat_json(m):
    return [[str(x) for x in row] for row in m]


def cmd_embed(cfg: RunConfig, kind: str, r: int, t: int):
    rep = consistency_report(kind, r, t, cfg.p)
    return rep, EXIT_OK if rep["ok"] else EXIT_MISMATCH


def cmd_oracle_sweep(cfg: RunConfig, count: int = 20):
    """Random formula-vs-oracle checks for branches, pairs and embedding cells."""
    rng = random.Random(cfg.seed)
    p = cfg.p
    reps = [c.representative for c in square_class_reps(p)]
    radius = min(cfg.radius, 3 if p == 2 else 4)
    failures: list[str] = []
    branch_runs = 0
    for alpha in reps:
        for _ in range(max(1, count // len(reps))):
            a = Fraction(rng.randint(-30, 30), rng.choice([1, p]))
            b = Fraction(rng.randint(1, 30), rng.choice([1, p, p * p]))
            i = pure_from_conjugate_ends(alpha, a, b)
            report = branch_compare([i.matrix], branch_predict(i, p, cfg.prec).anchor(), radius, cfg.prec)
            branch_runs += 1
            if not report.agreement:
                failures.append(f"branch alpha={alpha} a={a} b={b}")
    pair_runs = 0
    while pair_runs < count:
        lam = rng.choice([1, -1]) * Fraction(rng.randint(1, 3 * p)) * Fraction(p) ** rng.randint(-3, 3)
        triple = QuaternionPairSpec.normalized(p, rng.choice(reps), rng.choice(reps), lam, prec=cfg.prec)
        if split_check(triple) is not SplitStatus.SPLITS:
            continue
        pair_runs += 1
        pair = construct_pair(triple)
        ti, tj = branch_predict(pair.i, p, cfg.prec), branch_predict(pair.j, p, cfg.prec)
        got = oracle_relative_position([pair.i.matrix], [pair.j.matrix], p, _window_centers(ti, tj))
        if got is None or not got.same_as(relative_position(triple)):
            failures.append(f"pair alpha={triple.alpha} beta={triple.beta} lambda={triple.lam}")
    embed_cells = 0
    for kind in ExtensionKind:
        for r in range(7):
            for t in range(5):
                if not existence(kind, r, t):
                    continue
                embed_cells += 1
                rep = consistency_report(kind, r, t, p)
                if not rep["flags"]["consistent"]:
                    failures.append(f"embed {kind.value} r={r} t={t}")
    payload = {
        "p": p,
        "seed": cfg.seed,
        "branch_runs": branch_runs,
        "pair_runs": pair_runs,
        "embed_cells": embed_cells,
        "failures": failures,
    }
    return payload, EXIT_MISMATCH if failures else EXIT_OK


# -- argument parsing ---------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=5, help="the prime (default 5)")
    common.add_argument("--prec", type=int, default=24, help="p-adic digits (default 24)")
    common.add_argument("--radius", type=int, default=4, help="enumeration radius, 1..8 (default 4)")
    common.add_argument("--format", choices=["json", "dot", "text"], default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write output here instead of stdout")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="btbranches", description="Branches of quaternion orders on the Bruhat-Tits tree.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()

    def add(name: str, func: Callable, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(func=func)
        return sp

    sp = add("defect", lambda c, a: cmd_defect(c, a.value), "exponent of the quadratic defect")
    sp.add_argument("value", type=rational)
    add("classes", lambda c, a: cmd_classes(c), "square-class representatives")
    sp = add("hilbert", lambda c, a: cmd_hilbert(c, a.a, a.b), "Hilbert symbol (a, b)_p")
    sp.add_argument("a", type=rational)
    sp.add_argument("b", type=rational)
    sp = add("branch", lambda c, a: cmd_branch(c, a.alpha, a.a, a.b), "predicted branch against containment")
    sp.add_argument("alpha", type=rational)
    sp.add_argument("a", type=rational, nargs="?", default=Fraction(0))
    sp.add_argument("b", type=rational, nargs="?", default=Fraction(1))
    sp = add("pair", lambda c, a: cmd_pair(c, a.alpha, a.beta, a.lam), "relative position of two branches")
    sp.add_argument("alpha", type=rational)
    sp.add_argument("beta", type=rational)
    sp.add_argument("lam", type=rational, metavar="lambda")
    sp = add("embed", lambda c, a: cmd_embed(c, a.kind, a.r, a.t), "embedding numbers and their checks")
    sp.add_argument("kind", choices=["Unramified", "Ramified", "unramified", "ramified"])
    sp.add_argument("r", type=int)
    sp.add_argument("t", type=int)
    sp = add("chi", lambda c, a: cmd_chi(c, a.r, a.u, a.t), "the count chi(r, u, t)")
    sp.add_argument("r", type=int)
    sp.add_argument("u", type=int)
    sp.add_argument("t", type=int)
    sp = add("oracle-sweep", lambda c, a: cmd_oracle_sweep(c, a.count), "random formula-vs-oracle sweep")
    sp.add_argument("--count", type=int, default=20)
    return parser


def render(payload: dict, fmt: str) -> str:
    dot = payload.pop("_dot", None)
    if fmt == "dot":
        if dot is None:
            raise PreconditionError("DOT output is only available for the branch command")
        return dot
    if fmt == "text":
        return "\n".join(f"{k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}" for k, v in payload.items()) + "\n"
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.p, args.prec, args.radius, args.format, args.seed)
        payload, code = args.func(cfg, args)
        text = render(payload, cfg.format)
    except (NonexistenceError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PrecisionError as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
