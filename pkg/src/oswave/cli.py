"""Command-line front end: ``oswave <subcommand> [options]``.

Every subcommand writes CSV (header row, '.' decimal, 17 significant digits)
to ``--out`` or standard output.  Exit codes: 0 success, 1 when a computation
raises, 2 for usage errors.  ``OSWAVE_THREADS`` caps the BLAS thread pool.
"""

import argparse
import csv
import hashlib
import io
import math
import os
import sys
import time

import numpy as np
from threadpoolctl import threadpool_limits

from . import acceptance, adjoint, extensions, oracle, orrsommerfeld, specfun
from .errors import OSWaveError
from .grid import PanelGrid
from .profile import BUILTINS, make_builtin

SUBCOMMANDS = ("specfun-table", "dispersion", "eigenmode", "adjoint", "oracle", "compare",
               "navier", "rotation", "compressible", "selftest")


# ------------------------------------------------------------------ CSV

def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return "%.16e" % float(x)


def csv_text(header, rows, footer=()):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    for k, v in footer:
        buf.write(f"{k}={fmt(v)}\n")
    return buf.getvalue()


def emit(args, text):
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cplx(name):
    return (f"re_{name}", f"im_{name}")


def split(*values):
    out = []
    for v in values:
        out += [complex(v).real, complex(v).imag]
    return out


# ------------------------------------------------------------------ arguments

def float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")


def positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def viscosity(text):
    v = float(text)
    if not 0 < v <= 1e-2:
        raise argparse.ArgumentTypeError("nu must lie in (0, 1e-2]")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file; explicit flags win")
    common.add_argument("--profile", choices=BUILTINS, default="exponential")
    common.add_argument("--uplus", type=positive, default=1.0, help="far-field velocity U+")
    common.add_argument("--out", default="-", help="output path, '-' for stdout")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="oswave", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    s = sub.add_parser("specfun-table", parents=[common], help="Airy primitives or Ti on a grid")
    s.add_argument("--radius", type=positive, default=6.0, help="half width of the z square")
    s.add_argument("--points", type=int, default=21, help="points per axis")
    s.add_argument("--tietjens", action="store_true", help="tabulate Ti(s) instead")
    s.add_argument("--s-min", type=positive, default=0.5)
    s.add_argument("--s-max", type=positive, default=20.0)

    s = sub.add_parser("dispersion", parents=[common], help="growth curve sigma(alpha0)")
    s.add_argument("--alpha0-min", type=positive, default=0.5)
    s.add_argument("--alpha0-max", type=positive, default=6.0)
    s.add_argument("--n", type=int, default=200)
    s.add_argument("--nu", type=viscosity, default=None,
                   help="also report the finite-nu residual at each root")

    s = sub.add_parser("eigenmode", parents=[common], help="sampled psi, u, v, omega")
    s.add_argument("--alpha0", type=positive, default=3.0)
    s.add_argument("--nu", type=viscosity, default=1e-6)
    s.add_argument("--zmax", type=positive, default=10.0)
    s.add_argument("--points", type=int, default=2001)

    s = sub.add_parser("adjoint", parents=[common], help="adjoint slow-mode pieces")
    s.add_argument("--alpha0", type=positive, default=3.0)
    s.add_argument("--nu", type=viscosity, default=1e-6)

    s = sub.add_parser("oracle", parents=[common], help="collocation spectrum")
    s.add_argument("--alpha0", type=positive, default=3.0)
    s.add_argument("--nu", type=viscosity, default=1e-6)
    s.add_argument("--n", type=int, default=256, help="Chebyshev degree N")
    s.add_argument("--length", type=positive, default=50.0)
    s.add_argument("--kind", choices=oracle.KINDS, default="direct")
    s.add_argument("--eta", type=float, default=0.0, help="rotation rate for coupled_rotation")
    s.add_argument("--beta0", type=float, default=0.0, help="scaled slip length")

    s = sub.add_parser("compare", parents=[common], help="asymptotic root against the oracle")
    s.add_argument("--alpha0-list", type=float_list, default=[2.0, 3.0])
    s.add_argument("--nu-list", type=float_list, default=[1e-4, 1e-6])
    s.add_argument("--n", type=int, default=256)
    s.add_argument("--length", type=positive, default=50.0)

    s = sub.add_parser("navier", parents=[common], help="slip branch and its margin")
    s.add_argument("--alpha0", type=positive, default=None, help="default: alpha_M")
    s.add_argument("--beta0", type=float_list, default=None,
                   help="slip lengths; default 41 points up to 2 beta0*")

    s = sub.add_parser("rotation", parents=[common], help="c(eta) against c0 + eta^2 c1")
    s.add_argument("--alpha0", type=positive, default=3.0)
    s.add_argument("--nu", type=viscosity, default=1e-6)
    s.add_argument("--eta-list", type=float_list, default=None,
                   help="rotation rates; default nu^(1/4) times 1e-3 .. 3e-2")
    s.add_argument("--n", type=int, default=256)

    s = sub.add_parser("compressible", parents=[common], help="leading low-Mach correction")
    s.add_argument("--alpha0", type=positive, default=2.7159)
    s.add_argument("--nu", type=viscosity, default=1e-4)
    s.add_argument("--mach", type=positive, default=1e-2)

    s = sub.add_parser("selftest", parents=[common], help="acceptance suite")
    s.add_argument("--quick", action="store_true", help="reduced oracle resolution")
    # --out names a directory here; '-' means ./selftest-out
    s.add_argument("--only", type=int_list, default=None, help="criteria to run, e.g. 1,2")
    return parser


def read_config(path):
    out = {}
    with open(path, encoding="utf-8") as fh:
        for i, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{i}: expected key=value")
            k, v = line.split("=", 1)
            out[k.strip().replace("-", "_")] = v.strip()
    return out


def parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            cfg = read_config(args.config)
        except (OSError, ValueError) as exc:
            parser.error(str(exc))
        sub = parser._subparsers._group_actions[0].choices[args.subcommand]
        known = {a.dest: a for a in sub._actions}
        defaults = {}
        for k, v in cfg.items():
            if k not in known or k in ("config", "help"):
                parser.error(f"unknown config key {k!r}")
            act = known[k]
            if act.const is True and act.nargs == 0:
                defaults[k] = v.lower() in ("1", "true", "yes", "on")
            else:
                try:
                    defaults[k] = act.type(v) if act.type else v
                except (argparse.ArgumentTypeError, ValueError) as exc:
                    parser.error(f"config key {k}: {exc}")
                if act.choices and defaults[k] not in act.choices:
                    parser.error(f"config key {k}: {v!r} not in {act.choices}")
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    for name in ("n", "points"):
        if getattr(args, name, None) is not None and getattr(args, name) < 2:
            parser.error(f"--{name} must be at least 2")
    return args


# ------------------------------------------------------------------ commands

def profile_of(args):
    return make_builtin(args.profile, args.uplus)


def cmd_specfun_table(args):
    if args.tietjens:
        s = np.linspace(args.s_min, args.s_max, args.points)
        rows = [(v, *split(specfun.tietjens(v))) for v in s]
        return csv_text(("s", "re_ti", "im_ti"), rows)
    x = np.linspace(-args.radius, args.radius, args.points)
    rows = []
    for k in specfun.ORDERS:
        for re in x:
            for im in x:
                z = complex(re, im)
                rows.append((k, re, im, *split(specfun.airy(k, z))))
    return csv_text(("k", "re_z", "im_z", "re_ai", "im_ai"), rows)


def cmd_dispersion(args):
    p = profile_of(args)
    pts, alpha_c, alpha_m = orrsommerfeld.growth_curve(p, args.alpha0_min, args.alpha0_max, args.n)
    rows = []
    for q in pts:
        res = q.residual
        if args.nu is not None:
            sp = orrsommerfeld.ScaledParameters(args.nu, q.alpha0, q.c0, p)
            res = abs(orrsommerfeld.full_residual(sp, p))
        rows.append((q.alpha0, q.c0.real, q.c0.imag, q.sigma, res))
    footer = (("alpha_c", alpha_c), ("alpha_M", alpha_m))
    return csv_text(("alpha0", "re_c0", "im_c0", "sigma", "residual"), rows, footer)


def cmd_eigenmode(args):
    p = profile_of(args)
    c0 = orrsommerfeld.solve_c0(args.alpha0, p).c0
    sp = orrsommerfeld.ScaledParameters(args.nu, args.alpha0, c0, p)
    z = np.linspace(0.0, args.zmax, args.points)
    em = orrsommerfeld.assemble_eigenmode(sp, p, z)
    rows = [(zi, *split(a, b, c, d)) for zi, a, b, c, d in zip(z, em.psi, em.u, em.v, em.omega)]
    header = ("z",) + cplx("psi") + cplx("u") + cplx("v") + cplx("omega")
    footer = (("re_a", em.a_coeff.real), ("im_a", em.a_coeff.imag),
              ("wall_residual", em.wall_residual))
    return csv_text(header, rows, footer)


def cmd_adjoint(args):
    p = profile_of(args)
    c0 = orrsommerfeld.solve_c0(args.alpha0, p).c0
    sp = orrsommerfeld.ScaledParameters(args.nu, args.alpha0, c0, p)
    pc = adjoint.build_adjoint_slow_mode(sp, p)
    fast = adjoint.fast_wall_ratio(sp)
    rows = [(zi, *split(a, b, c, d)) for zi, a, b, c, d in
            zip(pc.base.z, pc.base.values, pc.g1.values, pc.psi3.values, pc.assembled.values)]
    header = ("z",) + cplx("base") + cplx("g1") + cplx("psi3") + cplx("assembled")
    footer = (("re_f1_zc", pc.f1_at_zc.real), ("im_f1_zc", pc.f1_at_zc.imag),
              ("re_slow_ratio", pc.wall_ratio.real), ("im_slow_ratio", pc.wall_ratio.imag),
              ("re_fast_ratio", fast.real), ("im_fast_ratio", fast.imag))
    return csv_text(header, rows, footer)


def cmd_oracle(args):
    p = profile_of(args)
    alpha = args.alpha0 * args.nu ** 0.25
    beta = args.beta0 * args.nu ** 0.25
    pair = oracle.build_pencil(p, alpha, args.nu, args.n, args.length, args.kind,
                               eta=args.eta, beta=beta)
    spec = oracle.solve_spectrum(pair, vectors=False)
    rows = [(c.real, c.imag, bool(r)) for c, r in zip(spec.values, spec.retained)]
    return csv_text(("re_c", "im_c", "retained"), rows)


def cmd_compare(args):
    p = profile_of(args)
    rows = []
    for a0 in args.alpha0_list:
        c0 = orrsommerfeld.solve_c0(a0, p).c0
        for nu in args.nu_list:
            c = oracle.leading_unstable(p, a0, nu, N=args.n, L=args.length)
            rows.append((a0, nu, *split(c0, c), abs(c - c0)))
    return csv_text(("alpha0", "nu") + cplx("c0") + cplx("oracle") + ("distance",), rows)


def cmd_navier(args):
    p = profile_of(args)
    a0 = args.alpha0
    if a0 is None:
        a0 = orrsommerfeld.growth_curve(p, 0.5, 10.0, 100)[2]
    bstar = extensions.navier_instability_margin(p, a0)
    betas = args.beta0
    if betas is None:
        top = 2 * bstar if math.isfinite(bstar) else extensions.BETA0_MAX
        betas = list(np.linspace(0.0, top, 41))
    branch = extensions.navier_branch(p, a0, betas)
    rows = [(b, c.real, c.imag, a0 * c.imag) for b, c in zip(betas, branch)]
    return csv_text(("beta0", "re_c0", "im_c0", "sigma"), rows,
                    (("alpha0", a0), ("beta0_star", bstar)))


def cmd_rotation(args):
    p = profile_of(args)
    ctx = extensions.OracleContext(N=args.n)
    lead = oracle.leading_unstable(p, args.alpha0, args.nu, N=ctx.N, L=ctx.L)
    sp = orrsommerfeld.ScaledParameters(args.nu, args.alpha0, lead, p)
    r = extensions.rotation_first_order(sp, p, ctx)
    etas = args.eta_list
    if etas is None:
        etas = [f * args.nu ** 0.25 for f in acceptance.ETA_FACTORS]
    rows = []
    for eta in etas:
        c = extensions.rotation_eigenvalue(sp, p, eta, r.c0, ctx)
        approx = r.c_of(eta)
        rows.append((eta, *split(c, approx), abs(c - approx)))
    footer = (("re_c0", r.c0.real), ("im_c0", r.c0.imag), ("re_c1", r.c1.real),
              ("im_c1", r.c1.imag), ("re_c1_perturbation", r.c1_perturbation.real),
              ("im_c1_perturbation", r.c1_perturbation.imag))
    return csv_text(("eta",) + cplx("c") + cplx("expansion") + ("remainder",), rows, footer)


def cmd_compressible(args):
    p = profile_of(args)
    c0 = orrsommerfeld.solve_c0(args.alpha0, p).c0
    sp = orrsommerfeld.ScaledParameters(args.nu, args.alpha0, c0, p)
    h = 0.5 * args.nu ** 0.25
    g = PanelGrid.clustered(30.0, (0.0, max(sp.zc.zc.real, 0.0)), (h, h), growth=0.5)
    em = orrsommerfeld.assemble_eigenmode(sp, p, g)
    corr = extensions.compressible_leading_order(em, p, args.mach)
    rows = [(zi, *split(a, b, c)) for zi, a, b, c in
            zip(g.nodes, corr.rho2.values, corr.theta2.values, corr.p0.values)]
    footer = (("mach", args.mach), ("continuity_residual", extensions.continuity_residual(corr, p)))
    return csv_text(("z",) + cplx("rho2") + cplx("theta2") + cplx("p0"), rows, footer)


def _artifacts(results):
    return {f"criterion_{r.number:02d}.csv": csv_text(r.header, r.rows) for r in results}


def cmd_selftest(args):
    numbers = sorted(acceptance.CHECKS)
    if args.only:
        numbers = [k for k in args.only if k in acceptance.CHECKS]
    want_determinism = not args.only or 10 in args.only
    results = []
    for k in numbers:
        r = acceptance.run_check(k, quick=args.quick, seed=args.seed)
        print(r.line(), flush=True)
        results.append(r)
    files = _artifacts(results)
    if want_determinism:
        t0 = time.perf_counter()
        again = _artifacts([acceptance.run_check(k, quick=args.quick, seed=args.seed)
                            for k in numbers])
        same = again == files
        digest = hashlib.sha256("".join(files[k] for k in sorted(files)).encode()).hexdigest()
        r = acceptance.CriterionResult(10, "determinism", same,
                                       f"second pass byte-identical: {same}, sha256 {digest[:16]}")
        r.seconds = time.perf_counter() - t0
        print(r.line(), flush=True)
        results.append(r)
    out_dir = "selftest-out" if args.out in (None, "-") else args.out
    os.makedirs(out_dir, exist_ok=True)
    for name, text in files.items():
        with open(os.path.join(out_dir, name), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    summary = csv_text(("criterion", "title", "passed"),
                       [(r.number, r.title, r.passed) for r in results])
    with open(os.path.join(out_dir, "summary.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write(summary)
    print()
    print(f"{'#':>3}  {'result':6}  {'seconds':>8}  title")
    for r in results:
        print(f"{r.number:>3}  {'PASS' if r.passed else 'FAIL':6}  {r.seconds:8.1f}  {r.title}")
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} passed" + (f"; failed: {failed}" if failed else ""))
    return None if not failed else 1


COMMANDS = {
    "specfun-table": cmd_specfun_table,
    "dispersion": cmd_dispersion,
    "eigenmode": cmd_eigenmode,
    "adjoint": cmd_adjoint,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
    "navier": cmd_navier,
    "rotation": cmd_rotation,
    "compressible": cmd_compressible,
    "selftest": cmd_selftest,
}


def run(argv=None):
    """Parse argv, run the subcommand and return the exit code."""
    try:
        args = parse(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    threads = os.environ.get("OSWAVE_THREADS")
    limit = int(threads) if threads and threads.isdigit() and int(threads) > 0 else None
    try:
        with threadpool_limits(limits=limit):
            out = COMMANDS[args.subcommand](args)
    except OSWaveError as exc:
        print(f"oswave: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"oswave: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if isinstance(out, str):
        emit(args, out)
        return 0
    return 0 if out is None else out


def main():
    sys.exit(run())
