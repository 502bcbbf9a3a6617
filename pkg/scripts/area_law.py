"""Random-edge model on a cycle: mean Renyi-2 entropy against boundary size.

Writes plot-ready CSV (one row per partition and engine) plus the fitted
slope of S2 versus |dA|.

    python scripts/area_law.py --L 12 --k 2 --samples 4000 --out runs/area
"""

import argparse
import json

from typent.experiment import ExperimentConfig, GraphConfig, Partition, area_law_scan


def partitions(L):
    # arcs have two boundary edges; a pair of arcs has four, three arcs six
    third = L // 3
    return [
        Partition(0, 2),
        Partition(0, L // 2),
        Partition(vertices=[0, 1, L // 2, L // 2 + 1]),
        Partition(vertices=[0, third, 2 * third]),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--L", type=int, default=12)
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--k", type=int, nargs="+", default=[1, 2, 4])
    ap.add_argument("--samples", type=int, default=4000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args()
    cfg = ExperimentConfig(
        model="random-edge",
        graph=GraphConfig("cycle", args.L, args.d),
        partitions=partitions(args.L),
        k=args.k,
        samples=args.samples,
        seed=args.seed,
        out=args.out,
    )
    rep = area_law_scan(cfg)
    print(rep.to_csv(), end="")
    print(json.dumps(rep.extras["area_law_fit"], indent=2))


if __name__ == "__main__":
    main()
