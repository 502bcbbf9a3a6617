"""Mean and variance of one-qudit purity after a single Haar gate, for several d."""

import argparse

from typent import closed_forms as cf
from typent.ensemble import EnsembleSpec
from typent.graph import build_chain
from typent.montecarlo import run_ensemble


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    print("d,mean,stderr,exact_mean,var,var_stderr")
    for d in args.d:
        spec = EnsembleSpec("single-edge", build_chain(2, d), 0b01, 1)
        s = run_ensemble(spec, args.samples, args.seed)
        print(f"{d},{s.mean:.17g},{s.stderr:.3g},{cf.single_edge_purity(d):.17g},{s.var:.17g},{s.var_stderr:.3g}")


if __name__ == "__main__":
    main()
