"""Survey the cusps of X_0(36) for the weight-2 newform 36a.

For each cusp: predicted field, observed field of f|g, the optimiser's route and
whether replaying that route reproduces the direct expansion.
"""

import time

from cuspfields.cli_io import load_form
from cuspfields.expansion_engine import express_in_basis, slash_expand, sturm_bound
from cuspfields.field_bounds import certify_exact_field, optimization_plan, replay_plan
from cuspfields.modmatrix import cusp_of, cusps_x0


def main():
    f = load_form("36a")
    dec = express_in_basis(f)
    prec = sturm_bound(f.N, f.k)
    print(f"{'cusp':>6} {'width':>5} {'predicted':>14} {'verdict':>16} {'Q':>3} {'M_opt':>5}  replay")
    for g in cusps_x0(f.N):
        t = time.perf_counter()
        cusp = cusp_of(g, f.N)
        cert = certify_exact_field(f, g, prec, decomposition=dec)
        plan = optimization_plan(f.N, g, 1)
        lam = f.al_eigenvalues.get(plan.Q)
        rebuilt = replay_plan(plan, dec, f.k, lam.value if lam else 1, prec)
        same = cert.expansion.agrees_with(rebuilt)
        print(
            f"{str(cusp):>6} {cusp.width:>5} {cert.predicted.describe():>14} {cert.verdict.value:>16} "
            f"{plan.Q:>3} {plan.Mprime:>5}  {'identical' if same else 'DIFFERENT'}  ({time.perf_counter() - t:.1f}s)"
        )


if __name__ == "__main__":
    main()
