"""Sweep the relative-position formula against the containment oracle.

For every pair of square-class representatives and a grid of lambda values,
build a realizing pair of matrices, measure the two branches by brute force
and compare with the predicted stem distance or intersection length.

    python scripts/relative_position_sweep.py --primes 3 5 --out sweep.json
"""
from __future__ import annotations

import argparse
import json
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from btbranches.branches import (
    _window_centers,
    branch_predict,
    oracle_relative_position,
    relative_position,
)
from btbranches.localfield import square_class_reps
from btbranches.quaternions import QuaternionPairSpec, SplitStatus, construct_pair, split_check


@dataclass
class SweepConfig:
    primes: list[int] = field(default_factory=lambda: [3, 5])
    min_val: int = -3
    max_val: int = 3
    unit_span: int = 3  # units u in [1, unit_span * p) prime to p
    radii: tuple[int, ...] = (4, 6)
    out: str | None = None


def lambda_grid(p: int, cfg: SweepConfig) -> list[Fraction]:
    units = [u for u in range(1, cfg.unit_span * p) if u % p]
    return [s * Fraction(u) * Fraction(p) ** v for v in range(cfg.min_val, cfg.max_val + 1) for u in units for s in (1, -1)]


def run(cfg: SweepConfig) -> dict:
    rows = []
    for p in cfg.primes:
        reps = [c.representative for c in square_class_reps(p)]
        for al in reps:
            for be in reps:
                tally = Counter()
                for lam in lambda_grid(p, cfg):
                    triple = QuaternionPairSpec.normalized(p, al, be, lam)
                    status = split_check(triple)
                    tally[status.value] += 1
                    if status is not SplitStatus.SPLITS:
                        continue
                    pair = construct_pair(triple)
                    ti, tj = branch_predict(pair.i, p), branch_predict(pair.j, p)
                    got = oracle_relative_position([pair.i.matrix], [pair.j.matrix], p, _window_centers(ti, tj), cfg.radii)
                    want = relative_position(triple)
                    if got is None:
                        tally["inconclusive"] += 1
                    elif got.same_as(want):
                        tally["agree"] += 1
                    else:
                        tally["disagree"] += 1
                rows.append({"p": p, "alpha": al, "beta": be, **tally})
                print(f"p={p} alpha={al} beta={be} {dict(tally)}", flush=True)
    return {"config": asdict(cfg), "rows": rows}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--primes", type=int, nargs="+", default=[3, 5])
    ap.add_argument("--min-val", type=int, default=-3)
    ap.add_argument("--max-val", type=int, default=3)
    ap.add_argument("--out")
    args = ap.parse_args()
    cfg = SweepConfig(primes=args.primes, min_val=args.min_val, max_val=args.max_val, out=args.out)
    t0 = time.perf_counter()
    result = run(cfg)
    total = sum(r.get("agree", 0) + r.get("disagree", 0) + r.get("inconclusive", 0) for r in result["rows"])
    agree = sum(r.get("agree", 0) for r in result["rows"])
    print(f"{agree}/{total} split pairs agree ({time.perf_counter() - t0:.1f}s)")
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump(result, fh, indent=2, default=str)


if __name__ == "__main__":
    main()
