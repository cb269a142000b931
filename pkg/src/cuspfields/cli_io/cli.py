"""Command line front end: ``cuspfields {expand,bound,optimize,verify,cache}``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 internal invariant breach.
Defaults for any long option may be given in an INI file (``--config``), section ``[cuspfields]``.
"""

from __future__ import annotations

import argparse
import configparser
import inspect
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from ..characters import DirichletCharacter
from ..cyclotomic import AbelianFieldDescriptor, UnitSubgroup
from ..expansion_engine import (
    NotModularError,
    UnsupportedWeightError,
    express_in_basis,
    gamma1_sturm_bound,
    slash_expand,
    sturm_bound,
)
from ..field_bounds import (
    FormMetadata,
    Verdict,
    certify_exact_field,
    denominator_property,
    expansion_in_module,
    field_bound,
    optimization_plan,
    replay_plan,
)
from ..modmatrix import MatZ, cusp_matrix, cusp_of, cusps_x0, parse_matrix
from .cache import BasisCache
from .formfile import FormFileError, load_form
from .suites import SUITES, run_suite

log = logging.getLogger("cuspfields")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _matrix(text: str) -> MatZ:
    try:
        g = parse_matrix(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not g.is_sl2():
        raise UsageError(f"matrix {g} is not in SL2(Z)")
    return g


def _field_text(text: str) -> AbelianFieldDescriptor:
    """'M' for Q(zeta_M), or 'M/h1,h2' for the fixed field of <h1, h2> inside Q(zeta_M)."""
    head, _, gens = text.partition("/")
    M = int(head)
    els = [int(x) for x in gens.split(",") if x.strip()] if gens else [1]
    return AbelianFieldDescriptor(M, UnitSubgroup.from_elements(M, els))


def _metadata(args) -> tuple[FormMetadata, object]:
    if args.form:
        f = load_form(args.form)
        return FormMetadata.from_input(f), f
    if args.level is None or args.weight is None:
        raise UsageError("give --form, or --level and --weight for metadata-only mode")
    chi = DirichletCharacter.from_text(args.character) if args.character else None
    K = _field_text(args.field) if args.field else None
    return FormMetadata(args.level, args.weight, chi, K), None


# ---------------------------------------------------------------------------


def cmd_expand(args) -> int:
    f = load_form(args.form)
    g = _matrix(args.matrix)
    prec = args.prec or 4 * sturm_bound(f.N, f.k)
    dec = express_in_basis(f)
    F = slash_expand(f, g, prec, decomposition=dec)
    meta = FormMetadata.from_input(f)
    rep = field_bound(meta, g)
    cert = certify_exact_field(f, g, expansion=F)
    if args.output:
        Path(args.output).write_text(F.to_text())
    print(f"form {f.label or args.form}: level {f.N}, weight {f.k}; g = {g}; {F.prec} coefficients in q^(1/{F.width})")
    print(rep.render())
    in_module = expansion_in_module(F, rep.c, rep.base_field)
    print(f"membership in the predicted module: {'yes' if in_module else 'NO'}")
    print(f"predicted field {cert.predicted.describe()}, observed {cert.observed.describe()}: {cert.verdict.value}")
    if f.has_integral_coefficients():
        ok, primes = denominator_property(F, f.N)
        print(f"denominator primes {sorted(primes)} divide N: {'yes' if ok else 'NO'}")
    if not in_module or cert.verdict is Verdict.NOT_CONTAINED:
        return EXIT_FAIL
    return EXIT_OK


def cmd_bound(args) -> int:
    meta, _ = _metadata(args)
    if args.sweep:
        m = args.m or meta.chi.conductor
        print(f"cusps of X_0({meta.N}), weight {meta.k}")
        for g in cusps_x0(meta.N):
            rep = field_bound(meta, g)
            plan = optimization_plan(meta.N, g, m)
            cusp = cusp_of(g, meta.N)
            print(
                f"  cusp {cusp} (width {cusp.width}): g = {g}, N' = {rep.nprime}, "
                f"field {rep.composite_field.describe()}; optimiser: Q = {plan.Q}, u = {plan.v}, "
                f"working field K_f(zeta_{plan.Mprime})"
            )
        return EXIT_OK
    if not args.matrix:
        raise UsageError("give --matrix or --sweep")
    rep = field_bound(meta, _matrix(args.matrix))
    if args.machine:
        print(rep.to_text(), end="")
    else:
        print(rep.render())
    return EXIT_OK


def _cusp(text: str) -> tuple[int, int]:
    if text in ("oo", "inf", "infinity"):
        return 1, 0
    try:
        fr = Fraction(text)
    except ValueError:
        raise UsageError(f"malformed cusp {text!r}") from None
    if "/" in text:
        a, c = (int(x) for x in text.split("/"))
        if a * fr.denominator != fr.numerator * c:
            raise UsageError("cusp must be in lowest terms")
        return a, c
    return fr.numerator, 1


def cmd_optimize(args) -> int:
    a, c = _cusp(args.cusp)
    try:
        g = cusp_matrix(a, c)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    plan = optimization_plan(args.level, g, args.conductor)
    print(f"level {args.level}, cusp {args.cusp}, character conductor {args.conductor}")
    for i, step in enumerate(plan.steps(), 1):
        print(f"  {i}. {step}")
    print(f"delta = {plan.delta}, Q = {plan.Q}, M' = {plan.Mprime}")
    if args.replay:
        f = load_form(args.replay)
        if f.N != args.level:
            raise UsageError("replay form has a different level")
        if plan.Q > 1 and not f.chi.is_trivial():
            raise UsageError("replay through W_Q needs a trivial character (f|W_Q is then +-f)")
        lam = f.al_eigenvalues.get(plan.Q)
        if plan.Q > 1 and lam is None:
            raise UsageError(f"form has no Atkin-Lehner eigenvalue for Q = {plan.Q}")
        if lam is not None and lam.radical != 1:
            raise UsageError("replay needs a pseudo-eigenvalue without a square-root factor")
        lam_value = lam.value if lam is not None else 1
        dec = express_in_basis(f)
        prec = args.prec or 4 * sturm_bound(f.N, f.k)
        direct = slash_expand(f, g, prec, decomposition=dec)
        rebuilt = replay_plan(plan, dec, f.k, lam_value, prec)
        same = direct.agrees_with(rebuilt)
        print(f"replay against the direct expansion ({prec} coefficients): {'identical' if same else 'DIFFERENT'}")
        return EXIT_OK if same else EXIT_FAIL
    return EXIT_OK


def _run_named(item):
    name, caps = item
    return run_suite(name, **caps)


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    caps = {}
    if args.max_level is not None:
        caps["max_level"] = args.max_level
    if args.count is not None:
        caps["count"] = args.count
    if args.seed is not None:
        caps["seed"] = args.seed
    if args.label:
        caps["label"] = args.label
        caps["labels"] = [args.label]
    items = []
    for name in names:
        params = inspect.signature(SUITES[name]).parameters
        items.append((name, {k: v for k, v in caps.items() if k in params}))
    if args.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_run_named, items))
    else:
        results = [_run_named(it) for it in items]
    bad = 0
    for r in results:
        print(r.summary())
        for msg in r.failures[:10]:
            print(f"    {msg}")
        bad += not r.ok
    return EXIT_FAIL if bad else EXIT_OK


def cmd_cache(args) -> int:
    cache = BasisCache(args.cache_dir)
    if args.action == "purge":
        print(f"removed {cache.purge()} entries from {cache.dir}")
        return EXIT_OK
    if args.action == "inspect":
        rows = cache.inspect()
        print(f"cache directory {cache.dir}: {len(rows)} entries")
        for row in rows:
            print("  " + " ".join(f"{k}={v}" for k, v in row.items()))
        return EXIT_FAIL if any(not r["valid"] for r in rows) else EXIT_OK
    if args.level is None or args.weight is None:
        raise UsageError("cache build needs --level and --weight")
    kind = args.kind
    N, k = args.level, args.weight
    if args.prec:
        prec = args.prec
    elif kind == "Gamma":
        prec = sturm_bound(N, k)
    else:
        prec = gamma1_sturm_bound(N, k)
    b, hit, dt = cache.build(kind, N, k, prec)
    print(f"{kind} basis N={N} k={k} prec={prec}: rank {b.rank}, {'loaded from cache' if hit else 'built'} in {dt:.3f}s")
    if not hit:
        b2, hit2, dt2 = cache.build(kind, N, k, prec)
        same = [e.to_text() for e in b.expansions] == [e.to_text() for e in b2.expansions]
        speed = dt / dt2 if dt2 > 0 else float("inf")
        print(f"warm reload in {dt2:.3f}s ({speed:.1f}x), identical expansions: {'yes' if same else 'NO'}")
        if not same:
            return EXIT_INTERNAL
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cuspfields", description="Fourier expansions of modular forms at cusps.")
    ap.add_argument("--config", help="INI file with defaults in a [cuspfields] section")
    ap.add_argument("--cache-dir", help="basis cache directory (default: $CUSPFIELDS_CACHE_DIR or ~/.cache/cuspfields)")
    ap.add_argument("--no-cache", action="store_true", help="do not read or write the basis cache")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", help="expand f|g and compare its field with the prediction")
    p.add_argument("form", help="form file or bundled label (9a, 11a, 27a, 32a, 36a)")
    p.add_argument("--matrix", "-g", required=True, help="A,B,C,D")
    p.add_argument("--prec", type=int, help="coefficients in q^(1/N) (default: 4x the Gamma(N) Sturm bound)")
    p.add_argument("--output", "-o", help="write the expansion here")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("bound", help="field bound for f|g (needs no q-expansion)")
    p.add_argument("--form")
    p.add_argument("--level", "-N", type=int)
    p.add_argument("--weight", "-k", type=int)
    p.add_argument("--character", help="e.g. '9: 2->1/6'")
    p.add_argument("--field", help="K_f as M or M/h1,h2 (default: Q(chi))")
    p.add_argument("--matrix", "-g")
    p.add_argument("--sweep", action="store_true", help="all cusps of X_0(N) with optimiser suggestions")
    p.add_argument("--m", type=int, help="character conductor used by the sweep")
    p.add_argument("--machine", action="store_true", help="machine-readable report")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("optimize", help="plan the cheapest route to f|g for a cusp of X_0(N)")
    p.add_argument("--level", "-N", type=int, required=True)
    p.add_argument("--cusp", required=True, help="A/C in lowest terms, or oo")
    p.add_argument("--conductor", type=int, default=1)
    p.add_argument("--replay", help="form file: execute the plan and compare with the direct expansion")
    p.add_argument("--prec", type=int)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument("suite", choices=[*SUITES, "all"])
    p.add_argument("--max-level", type=int)
    p.add_argument("--count", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--label", help="bundled form for form-based suites")
    p.add_argument("--jobs", "-j", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("cache", help="build, inspect or purge the basis cache")
    p.add_argument("action", choices=["build", "inspect", "purge"])
    p.add_argument("--level", "-N", type=int)
    p.add_argument("--weight", "-k", type=int)
    p.add_argument("--prec", type=int)
    p.add_argument("--kind", choices=["Gamma", "Gamma1"], default="Gamma1")
    p.set_defaults(func=cmd_cache)
    return ap


def _apply_config(ap: argparse.ArgumentParser, argv) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    cp = configparser.ConfigParser()
    if not cp.read(known.config):
        raise UsageError(f"cannot read config file {known.config}")
    if "cuspfields" in cp:
        defaults = {k.replace("-", "_"): v for k, v in cp["cuspfields"].items()}
        ap.set_defaults(**defaults)
        for action in ap._subparsers._group_actions:
            for sp in action.choices.values():
                typed = {}
                for a in sp._actions:
                    if a.dest in defaults:
                        v = defaults[a.dest]
                        try:
                            typed[a.dest] = a.type(v) if callable(a.type) else v
                        except ValueError:
                            raise UsageError(f"bad value {v!r} for {a.dest} in {known.config}") from None
                sp.set_defaults(**typed)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    ap = build_parser()
    try:
        _apply_config(ap, argv)
    except UsageError as exc:
        print(f"cuspfields: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    if not args.no_cache and args.command != "cache":
        BasisCache(args.cache_dir).install()
    t = time.perf_counter()
    try:
        code = args.func(args)
    except (UsageError, FormFileError, FileNotFoundError, NotModularError, UnsupportedWeightError, ValueError) as exc:
        print(f"cuspfields: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AssertionError, RuntimeError) as exc:
        print(f"cuspfields: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    log.info("done in %.2fs", time.perf_counter() - t)
    return code


if __name__ == "__main__":
    sys.exit(main())
