"""Leading eigenvalue and spectral gap of the random-edge transfer matrix on chains."""

import argparse

from typent import algebra as al
from typent.graph import build_chain, uniform_edge_distribution


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--Lmax", type=int, default=12)
    ap.add_argument("--d", type=int, default=2)
    args = ap.parse_args()
    print("L,basis_dimension,leading,leading_multiplicity,gap")
    for L in range(2, args.Lmax + 1):
        g = build_chain(L, args.d)
        sup = al.Mixture(g, uniform_edge_distribution(g))
        sr = al.spectral_analysis(al.transfer_matrix(sup, al.chain_interval_basis(L)))
        print(f"{L},{sr.dimension},{sr.leading:.17g},{sr.leading_multiplicity},{sr.gap:.17g}")


if __name__ == "__main__":
    main()
