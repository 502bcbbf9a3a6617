"""Chain model: entropy of the left half against depth.

Exact algebra values for every k, with the light-cone closed form and the
fully mixed value alongside.

    python scripts/volume_law.py --L 10 --kmax 30
"""

import argparse
import math

from typent import closed_forms as cf
from typent.experiment import ExperimentConfig, GraphConfig, Partition, volume_law_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--L", type=int, default=8)
    ap.add_argument("--L-A", type=int, dest="L_A")
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--kmax", type=int, default=20)
    ap.add_argument("--ordering", default="least-entangling")
    args = ap.parse_args()
    L_A = args.L_A or args.L // 2
    cfg = ExperimentConfig(
        model="chain",
        graph=GraphConfig("chain", args.L, args.d),
        partitions=[Partition(0, L_A)],
        k=list(range(args.kmax + 1)),
        ordering=args.ordering,
        engines=["algebra", "closed-form"],
        prune_eps=0.0,
    )
    rep = volume_law_scan(cfg)
    limit = -math.log(cf.chain_asymptotic_purity(args.d, args.L, L_A))
    print("k,s2_algebra,s2_closed_form,closed_form_kind,s2_mixed_limit")
    alg = {r.k: r for r in rep.rows if r.engine == "algebra"}
    cfr = {r.k: r for r in rep.rows if r.engine == "closed-form"}
    for k in sorted(alg):
        c = cfr.get(k)
        print(f"{k},{alg[k].s2_of_mean:.17g},{c.s2_of_mean if c else ''},{c.kind if c else ''},{limit:.17g}")
    for chk in rep.checks:
        if not chk.passed:
            print("FAIL", chk.name, chk.detail)


if __name__ == "__main__":
    main()
