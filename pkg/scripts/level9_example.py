"""Field bound and expansion of the weight-3 level-9 newform at the cusp 0/1 moved by (0 -1; 1 3).

    python3 scripts/level9_example.py [--prec P]
"""

import argparse

from cuspfields.cli_io import load_form
from cuspfields.cyclotomic import cyclotomic_field, zeta
from cuspfields.expansion_engine import slash_expand, sturm_bound
from cuspfields.field_bounds import FormMetadata, c_chi_g, expansion_in_module, field_bound
from cuspfields.modmatrix import MatZ


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--prec", type=int, default=None)
    args = ap.parse_args(argv)

    f = load_form("9a")
    g = MatZ(0, -1, 1, 3)
    rep = field_bound(FormMetadata.from_input(f), g)
    print(rep.render())
    for j in range(1, 4):
        print(f"c_(chi,g) with zeta_9^{j}: {c_chi_g(f.chi, g, rep.Gprime, j)}")

    prec = args.prec or sturm_bound(f.N, f.k)
    F = slash_expand(f, g, prec)
    print(f"\nf|g to {F.prec} terms in q^(1/{F.width}):")
    for n in F.support()[:8]:
        print(f"  q^({n}/{F.width}): {F.coeff(n)}")
    inside = expansion_in_module(F, zeta(9, 2), cyclotomic_field(3))
    print(f"every coefficient in zeta_9^2 * Q(zeta_3): {inside}")


if __name__ == "__main__":
    main()
