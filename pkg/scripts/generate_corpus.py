"""Regenerate the bundled newform files from their recipes.

Coefficients come from cuspfields.corpus; Atkin-Lehner pseudo-eigenvalues are read off
the expansion engine (f|h_Q) and checked against f|W_Q = lambda * conj(f) before writing.
"""

import argparse
import math
import sys
import time

from cuspfields.characters import factorize
from cuspfields.cli_io.formfile import DATA_DIR, FormFile
from cuspfields.corpus import ETA_RECIPES, LEVEL9_CHARACTER, RECIPE_TEXT, recipe_coefficients
from cuspfields.expansion_engine import ModularFormInput, express_in_basis, gamma1_sturm_bound, slash_expand, sturm_bound
from cuspfields.field_bounds import atkin_li_lambda, engine_lambda
from cuspfields.modmatrix import atkin_lehner_matrices, is_maximal_divisor
from cuspfields.qseries import QExpansion

SPECS = {
    "9a": (9, 3, LEVEL9_CHARACTER, 3),
    **{lab: (N, 2, None, 1) for lab, (N, _) in ETA_RECIPES.items()},
}


def check_al(f, Q, lam, fh):
    """f|h_Q must equal Q^(-k/2) lambda conj(f)(tau/Q), up to the computed precision."""
    if fh.width % Q:
        fh = fh.rescale_width(fh.width * Q // math.gcd(fh.width, Q))
    w = fh.width
    a = fh.coeff(w // Q)
    for n in range(min(fh.prec, f.expansion.prec * w // Q)):
        c = fh.coeff(n)
        m, r = divmod(n * Q, w)
        if r:
            if not c.is_zero():
                return False
            continue
        if c != a * f.coefficient(m).conjugate():
            return False
    return True


def build(label, factor):
    N, k, chi, mod = SPECS[label]
    required = max(-(-sturm_bound(N, k) // N), gamma1_sturm_bound(N, k))
    P = factor * required
    coeffs = recipe_coefficients(label, P)
    f = ModularFormInput(N, k, QExpansion.from_coeffs(1, coeffs, modulus=mod), character=chi,
                         coeff_modulus=mod, is_newform=True, label=label)
    dec = express_in_basis(f)
    al, notes = {}, []
    for Q in sorted(q for q in range(2, N + 1) if is_maximal_divisor(q, N)):
        _, h = atkin_lehner_matrices(Q, N)
        fh = slash_expand(f, h, sturm_bound(N, k), decomposition=dec)
        lam = engine_lambda(f, Q, fh)
        if not check_al(f, Q, lam, fh):
            raise SystemExit(f"{label}: f|W_{Q} is not a multiple of the conjugate form")
        al[Q] = lam
        primes = factorize(Q)
        if len(primes) == 1 and not f.coefficient(Q).is_zero():
            formula = atkin_li_lambda(f, next(iter(primes)))
            if formula != lam:
                raise SystemExit(f"{label}: engine and Gauss-sum values of lambda_{Q} disagree")
            notes.append(f"lambda_{Q} from the engine agrees with Q^(k/2-1) G(chi_Q) / a_Q")
        else:
            notes.append(f"lambda_{Q} read off the expansion of f|h_{Q}")
    f.al_eigenvalues = al
    comments = [
        f"weight-{k} newform of level {N}" + (" with character chi" if chi is not None else ""),
        f"recipe: {RECIPE_TEXT[label]}",
        f"coefficients a_0..a_{P - 1} ({factor}x the required precision {required})",
        *notes,
        "regenerate with scripts/generate_corpus.py",
    ]
    return FormFile.from_input(f, comments)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("labels", nargs="*", default=sorted(SPECS))
    ap.add_argument("--factor", type=int, default=4, help="multiple of the required precision to store")
    ap.add_argument("--out", default=str(DATA_DIR))
    ap.add_argument("--check", action="store_true", help="compare with the files on disk instead of writing")
    args = ap.parse_args(argv)
    bad = 0
    for label in args.labels:
        t = time.time()
        ff = build(label, args.factor)
        path = f"{args.out}/{label}.form"
        if args.check:
            same = FormFile.load(path).to_text() == ff.to_text()
            bad += not same
            print(f"{label}: {'matches' if same else 'DIFFERS'}")
        else:
            ff.save(path)
            print(f"{label}: wrote {ff.precision} coefficients to {path} ({time.time() - t:.1f}s)")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
