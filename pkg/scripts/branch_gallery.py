"""Predicted branch of every square class, checked against containment, with DOT pictures.

    python scripts/branch_gallery.py --primes 2 3 5 --outdir gallery/
"""
from __future__ import annotations

import argparse
import json
import os
from dataclasses import dataclass, field

from btbranches.branches import branch_compare, branch_predict
from btbranches.localfield import square_class_reps
from btbranches.quaternions import pure_from_conjugate_ends


@dataclass
class GalleryConfig:
    primes: list[int] = field(default_factory=lambda: [2, 3, 5])
    radius: int = 3
    outdir: str | None = None


def run(cfg: GalleryConfig) -> list[dict]:
    rows = []
    for p in cfg.primes:
        for cls in square_class_reps(p):
            i = pure_from_conjugate_ends(cls.representative, 0, 1)
            tp = branch_predict(i, p)
            report = branch_compare([i.matrix], tp.anchor(), cfg.radius)
            rows.append(
                {
                    "p": p,
                    "alpha": cls.representative,
                    "class": cls.tag.value,
                    "stem": tp.stem_class.value,
                    "depth": tp.depth,
                    "vertices": len(report.oracle),
                    "agreement": report.agreement,
                }
            )
            if cfg.outdir:
                os.makedirs(cfg.outdir, exist_ok=True)
                with open(os.path.join(cfg.outdir, f"branch_p{p}_a{cls.representative}.dot"), "w") as fh:
                    fh.write(report.to_dot())
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--primes", type=int, nargs="+", default=[2, 3, 5])
    ap.add_argument("--radius", type=int, default=3)
    ap.add_argument("--outdir")
    args = ap.parse_args()
    rows = run(GalleryConfig(args.primes, args.radius, args.outdir))
    for row in rows:
        print(json.dumps(row))


if __name__ == "__main__":
    main()
