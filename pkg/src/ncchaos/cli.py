"""Command-line front end: ``ncchaos <command> <subcommand> [options]``.

Exit codes: 0 success, 1 paper-suite failure, 2 usage or input error,
3 resource limit exceeded, 4 domain error.  CSV goes to stdout unless
``--out`` is given; ``--format json`` wraps results in an envelope with a
``schema_version`` field.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__
from .chebyshev import IDENTITY, Polynomial, cheb_u, coefficient_table, pushforward_moment
from .errors import DomainError, NCChaosError, ResourceLimitError, ValidationError, limits
from .freedist import cumulants_from_moments, law_from_name, spectral_radius_estimate
from .kernels import (
    FAMILIES,
    ChebyshevSumSpec,
    Kernel,
    LiftedKernel,
    contract,
    contraction_norm,
    family,
    influence_profile,
    lifted_contraction_norm,
    lifted_midpoint_defect,
    parse_orders,
    star_contract,
    star_norm,
    tau,
    validate,
)
from .ncpart import catalan, count_nc_no_singleton, enumerate_nc, enumerate_nc2, riordan

SCHEMA_VERSION = 1
EXIT_OK, EXIT_SUITE, EXIT_USAGE, EXIT_RESOURCE, EXIT_DOMAIN = 0, 1, 2, 3, 4


class UsageError(NCChaosError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- value formatting and output ----------------------------------------------

def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else str(x)
    if isinstance(x, float):
        return "%.12g" % x
    if x is None:
        return ""
    return str(x)


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item"):
        return x.item()
    return x


class Output:
    def __init__(self, args):
        self.format = args.format
        self.path = args.out

    def emit(self, header, rows, meta=None):
        if self.format == "json":
            obj = {"schema_version": SCHEMA_VERSION}
            obj.update(_jsonable(meta or {}))
            obj["rows"] = [dict(zip(header, _jsonable(list(r)))) for r in rows]
            text = json.dumps(obj, indent=1) + "\n"
        else:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([fmt(v) for v in r])
            text = buf.getvalue()
        self.write(text)

    def emit_json(self, obj):
        obj = {"schema_version": SCHEMA_VERSION, **_jsonable(obj)}
        self.write(json.dumps(obj, indent=1) + "\n")

    def write(self, text):
        if self.path:
            with open(self.path, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


# -- argument helpers ----------------------------------------------------------

def parse_range(text: str) -> list:
    """'4..10', '4,6,8' or '5'."""
    try:
        if ".." in text:
            a, b = text.split("..")
            return list(range(int(a), int(b) + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad N range {text!r}") from exc


def parse_ints(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad integer list {text!r}") from exc


def parse_transform(text: str) -> Polynomial:
    t = text.strip()
    if t in ("", "x", "X", "U1"):
        return IDENTITY
    if t[0] in "Uu" and t[1:].isdigit():
        return cheb_u(int(t[1:]))
    try:
        return Polynomial(tuple(Fraction(c) for c in t.split(";")))
    except ValueError as exc:
        raise UsageError(f"bad transform {text!r}; use x, U<h> or c0;c1;...") from exc


def parse_word(text: str):
    """Letters 'var[:transform]' separated by commas or spaces, e.g. '1,2:U2,1:0;0;1'."""
    from .freemoments import Letter, Word

    letters = []
    for tok in text.replace(",", " ").split():
        var, _, tr = tok.partition(":")
        try:
            v = int(var)
        except ValueError as exc:
            raise UsageError(f"bad variable id in {tok!r}") from exc
        letters.append(Letter(v, parse_transform(tr)))
    return Word(tuple(letters))


def _kernel_for(args, N=None) -> Kernel:
    if getattr(args, "kernel", None):
        try:
            return Kernel.load(args.kernel)
        except OSError as exc:
            raise UsageError(f"cannot read kernel file: {exc}") from exc
    if not getattr(args, "family", None):
        raise UsageError("give --kernel FILE or --family NAME")
    if N is None:
        Ns = parse_range(args.N) if args.N else []
        if len(Ns) != 1:
            raise UsageError("this command needs a single --N")
        N = Ns[0]
    params = {"lam": args.family_lambda} if args.family == "poisson-block" else {}
    return family(args.family, N, **params)


def _N_list(args):
    if getattr(args, "kernel", None):
        return [Kernel.load(args.kernel).N]
    if not args.N:
        raise UsageError("--N is required")
    return parse_range(args.N)


def _spec_factory(args, strict=True):
    orders = parse_orders(args.orders)

    def make(N):
        return ChebyshevSumSpec(_kernel_for(args, N), orders, strict=strict)

    return make


def _threads(args):
    if args.threads:
        return args.threads
    env = os.environ.get("NCCHAOS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"NCCHAOS_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


# -- commands --------------------------------------------------------------------

def cmd_nc(args, out):
    if args.action == "count":
        n = args.n
        parts = enumerate_nc2(n) if args.pairings else enumerate_nc(n)
        if args.format == "json":
            out.emit_json({"n": n, "pairings": args.pairings, "count": len(parts)})
        else:
            out.write(f"{len(parts)}\n")
    elif args.action == "list":
        parts = enumerate_nc2(args.n) if args.pairings else enumerate_nc(args.n)
        if args.format == "json":
            out.emit_json({"n": args.n, "partitions": [p.to_list() for p in parts]})
        else:
            out.emit(["index", "blocks"],
                     [(k, json.dumps(p.to_list(), separators=(",", ":")))
                      for k, p in enumerate(parts, 1)])
    elif args.action == "riordan":
        rows = [(m, j, count_nc_no_singleton(m, j)) for m in range(1, args.n + 1)
                for j in range(1, m + 1)]
        out.emit(["m", "j", "R_mj"], rows, {"riordan": [riordan(m) for m in range(args.n + 1)]})
    elif args.action == "catalan":
        out.emit(["m", "catalan"], [(m, catalan(m)) for m in range(args.n + 1)])


def cmd_law(args, out):
    law = law_from_name(args.law, order=args.order) if args.law else None
    if args.action == "moments":
        rows = [(k, law.cumulant(k), law.moment(k)) for k in range(1, args.k + 1)]
        out.emit(["k", "cumulant", "moment"], rows, {"law": law.to_json(), "exact": law.exact})
    elif args.action == "cumulants":
        if not args.moments:
            raise UsageError("--moments m1,m2,... is required")
        try:
            ms = [Fraction(x) for x in args.moments.split(",")]
        except ValueError as exc:
            raise UsageError(f"bad moment list {args.moments!r}") from exc
        res = cumulants_from_moments(ms)
        out.emit(["k", "cumulant"], list(enumerate(res.cumulants, 1)), {"law": res.to_json()})
    elif args.action == "radius":
        rows = [(k, spectral_radius_estimate(law, k)) for k in range(1, args.k + 1)]
        out.emit(["k", "radius_estimate"], rows, {"law": law.label})


def cmd_cheb(args, out):
    if args.action == "coeffs":
        table = coefficient_table(args.h)
        width = args.h + 1
        rows = [[h] + row + [0] * (width - len(row)) for h, row in enumerate(table)]
        out.emit(["h"] + [f"c{k}" for k in range(width)], rows)
    elif args.action == "moments":
        law = law_from_name(args.law, order=args.order)
        u = cheb_u(args.h)
        rows = [(k, pushforward_moment(law, u, k)) for k in range(1, args.k + 1)]
        out.emit(["k", "moment"], rows, {"law": law.label, "h": args.h})


def cmd_kernel(args, out):
    act = args.action
    if act == "validate":
        f = _kernel_for(args)
        rep = validate(f)
        out.emit(["mirror", "diagonal_free", "variance", "symmetric"],
                 [(rep.mirror, rep.diagonal_free, rep.variance, rep.symmetric)],
                 {"kernel": f.label})
    elif act == "influence":
        f = _kernel_for(args)
        prof = influence_profile(f)
        out.emit(["i", "influence"], [(i, float(v)) for i, v in enumerate(prof, 1)],
                 {"kernel": f.label, "tau": tau(f)})
    elif act == "contract":
        f = _kernel_for(args)
        g = contract(f, args.q) if not args.star else star_contract(f, args.q)
        out.emit(["idx", "value"],
                 [(" ".join(map(str, idx)), val) for idx, val in g.entries()],
                 {"kernel": f.label, "q": args.q, "star": args.star, "norm": g.norm()})
    elif act == "sweep":
        rows = []
        header = None
        for N in _N_list(args):
            f = _kernel_for(args, N)
            qs = list(range(1, f.d))
            rs = list(range(1, f.d + 1))
            header = header or (["N", "variance", "tau"] + [f"contraction_{q}" for q in qs]
                                + [f"star_{r}" for r in rs])
            rows.append([N, f.variance(), tau(f)] + [contraction_norm(f, q) for q in qs]
                        + [star_norm(f, r) for r in rs])
        out.emit(header, rows)
    elif act == "lifted":
        f = _kernel_for(args)
        k = LiftedKernel(f, parse_orders(args.orders))
        rows = [(r, lifted_contraction_norm(k, r)) for r in range(1, k.m)]
        meta = {"kernel": f.label, "orders": k.orders, "m": k.m}
        if k.m % 2 == 0:
            meta["midpoint_defect"] = lifted_midpoint_defect(k)
        out.emit(["r", "norm"], rows, meta)
    elif act == "export":
        f = _kernel_for(args)
        if args.out:
            f.save(args.out)
        else:
            sys.stdout.write(json.dumps(f.to_json(), indent=1) + "\n")


def cmd_moment(args, out):
    from .freemoments import VariableFamily, sum_joint_moment, wick_moment, word_moment, word_moment_recursive

    if args.action == "word":
        law = law_from_name(args.law, order=args.order)
        w = parse_word(args.word)
        fn = word_moment_recursive if args.recursive else word_moment
        val = fn(VariableFamily.iid(law), w)
        if args.format == "json":
            exact = isinstance(val, (int, Fraction))
            out.emit_json({"value": fmt(val) if exact else float(val), "exact": exact,
                           "patterns_evaluated": 1, "tuples_visited": 0})
        else:
            out.write(fmt(val) + "\n")
    elif args.action == "wick":
        try:
            cov = [[Fraction(x) for x in row.split(",")] for row in args.cov.split(";")]
        except ValueError as exc:
            raise UsageError(f"bad covariance {args.cov!r}") from exc
        val = wick_moment(cov, parse_ints(args.indices))
        out.write(fmt(val) + "\n")
    elif args.action == "sum":
        law = law_from_name(args.law, order=args.order)
        make = _spec_factory(args, strict=not args.loose)
        rows = []
        for N in _N_list(args):
            spec = make(N)
            for m in parse_ints(args.m):
                res = sum_joint_moment([(spec, m)], law, chebyshev=not args.plain,
                                       method=args.method, threads=_threads(args), detail=True)
                rows.append((N, m, res.value, res.exact, res.patterns_evaluated, res.tuples_visited))
        out.emit(["N", "m", "value", "exact", "patterns_evaluated", "tuples_visited"], rows,
                 {"law": law.label, "orders": parse_orders(args.orders)})


def _report_out(report, out, args):
    if args.format == "json":
        out.emit_json(report.to_json())
        return
    qs = sorted({q for r in report.rows for q in r.contraction_norms})
    rs = sorted({q for r in report.rows for q in r.star_norms})
    header = (["N", "second_moment", "third_moment", "fourth_moment"]
              + [f"contraction_{q}" for q in qs] + [f"star_{r}" for r in rs]
              + ["midpoint_defect", "statistic", "verdict"])
    rows = []
    for r in report.rows:
        rows.append([r.N, r.second_moment, r.third_moment, r.fourth_moment]
                    + [r.contraction_norms.get(q) for q in qs]
                    + [r.star_norms.get(x) for x in rs]
                    + [r.midpoint_defect, r.statistic, report.verdict])
    out.emit(header, rows)


def cmd_diag(args, out):
    from . import diagnostics as dg

    th = dg.Thresholds(args.threshold, args.threshold)
    if args.action == "semicircle":
        law = law_from_name(args.law, order=args.order)
        rep = dg.semicircular_criterion(_spec_factory(args), _N_list(args), law=law,
                                        thresholds=th, threads=_threads(args))
        _report_out(rep, out, args)
    elif args.action == "poisson":
        rep = dg.free_poisson_criterion(_spec_factory(args, strict=False), Fraction(args.lam),
                                        _N_list(args), thresholds=th, threads=_threads(args))
        _report_out(rep, out, args)
    elif args.action == "lindeberg":
        lawX = law_from_name(args.lawX, order=args.order)
        lawY = law_from_name(args.lawY, order=args.order)
        make = _spec_factory(args)
        rows = []
        for m in parse_ints(args.m):
            gaps = dg.lindeberg_gap(lambda N: [(make(N), m)], lawX, lawY, _N_list(args),
                                    threads=_threads(args))
            rows += [(m, g.N, g.moment_x, g.moment_y, g.gap, g.tau_max, g.ratio) for g in gaps]
        out.emit(["m", "N", "moment_x", "moment_y", "gap", "tau_max", "ratio"], rows,
                 {"lawX": lawX.label, "lawY": lawY.label})
    elif args.action == "cs":
        trials = dg.random_cs_trials(args.n, args.trials, args.dim, args.seed)
        rows = [(t, c.lhs, c.rhs, c.holds) for t, c in enumerate(trials, 1)]
        out.emit(["trial", "lhs", "rhs", "holds"], rows,
                 {"violations": sum(not c.holds for c in trials)})
    elif args.action == "plan":
        plan = dg.iterated_cs_plan(args.n)
        rows = [(l, " ".join(map(str, I)), " ".join(fmt(w) for w in W))
                for l, (I, W) in enumerate(zip(plan.multisets, plan.weights), 1)]
        out.emit(["l", "exponents", "powers"], rows)


def cmd_simulate(args, out):
    from .matrixmodel import MatrixEnsembleSpec, empirical_sum_moment, sample_family, TrialSummary

    make = _spec_factory(args, strict=not args.loose)
    N_list = _N_list(args)
    if len(N_list) != 1:
        raise UsageError("simulate needs a single --N (or a --kernel file)")
    spec = make(N_list[0])
    ens = MatrixEnsembleSpec(args.dim, spec.N, args.kind, args.seed, float(Fraction(args.lam)))
    m = parse_ints(args.m)
    if len(m) != 1:
        raise UsageError("simulate takes a single --m")
    vals = [empirical_sum_moment(spec, sample_family(ens, t), m[0], chebyshev=not args.plain)
            for t in range(args.trials)]
    summ = TrialSummary.of(vals)
    rows = [(t, v) for t, v in enumerate(vals, 1)] + [("mean", summ.mean), ("std_error", summ.std_error)]
    out.emit(["trial", "value"], rows, {"kind": ens.kind, "dim": ens.dim, "seed": ens.seed})


def cmd_paper_suite(args, out):
    from .suite import run_suite

    t0 = time.perf_counter()
    checks = run_suite()
    rows = [(c.group, c.name, "PASS" if c.passed else "FAIL", c.detail) for c in checks]
    failed = sum(not c.passed for c in checks)
    out.emit(["group", "check", "result", "detail"], rows,
             {"passed": len(checks) - failed, "failed": failed,
              "seconds": round(time.perf_counter() - t0, 3)})
    return EXIT_SUITE if failed else EXIT_OK


# -- parser ----------------------------------------------------------------------

def _common(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="write output to this path instead of stdout")
    p.add_argument("--threads", type=int, help="worker count (env NCCHAOS_THREADS)")
    p.add_argument("--nc-cap", type=int, help="largest n for NC enumeration (default 14)")
    p.add_argument("--tuple-budget", type=int, help="index-tuple budget for --method tuples")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--order", type=int, default=16, help="cumulant order of named laws")


def _kernel_opts(p, orders=True):
    p.add_argument("--kernel", help="kernel JSON file")
    p.add_argument("--family", choices=sorted(FAMILIES))
    p.add_argument("--family-lambda", type=int, default=1, help="block count for poisson-block")
    p.add_argument("--N", help="N, a..b range or comma list")
    if orders:
        p.add_argument("--orders", default="1,1", help="order vector h1,h2,...")


def build_parser():
    top = _Parser(prog="ncchaos", description="Free probability workbench for Chebyshev sums.")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    nc = sub.add_parser("nc", help="non-crossing partitions")
    nc.add_argument("action", choices=("count", "list", "riordan", "catalan"))
    nc.add_argument("--n", type=int, required=True)
    nc.add_argument("--pairings", action="store_true")
    _common(nc)

    law = sub.add_parser("law", help="free cumulants and moments of a law",
                         description="CSV columns: k, cumulant, moment (moments); k, cumulant "
                                     "(cumulants); k, radius_estimate (radius).")
    law.add_argument("action", choices=("moments", "cumulants", "radius"))
    law.add_argument("--law", default="semicircular")
    law.add_argument("--k", type=int, default=8)
    law.add_argument("--moments")
    _common(law)

    ch = sub.add_parser("cheb", help="Chebyshev polynomials U_h",
                        description="CSV columns: h, c0..ch (coeffs); k, moment (moments).")
    ch.add_argument("action", choices=("coeffs", "moments"))
    ch.add_argument("--h", type=int, default=4)
    ch.add_argument("--k", type=int, default=4)
    ch.add_argument("--law", default="semicircular")
    _common(ch)

    ke = sub.add_parser("kernel", help="kernel validation, influences and contractions",
                        description="CSV columns: i, influence (influence); idx, value (contract); "
                                    "N, variance, tau, contraction_q.., star_r.. (sweep); r, norm (lifted).")
    ke.add_argument("action", choices=("validate", "influence", "contract", "sweep", "lifted", "export"))
    ke.add_argument("--q", type=int, default=1)
    ke.add_argument("--star", action="store_true", help="star contraction of order q")
    _kernel_opts(ke)
    _common(ke)

    mo = sub.add_parser("moment", help="exact moments of words and Chebyshev sums",
                        description="Words: letters var[:x|U<h>|c0;c1;..] separated by commas. "
                                    "sum CSV columns: N, m, value, exact, patterns_evaluated, tuples_visited.")
    mo.add_argument("action", choices=("word", "sum", "wick"))
    mo.add_argument("--law", default="semicircular")
    mo.add_argument("--word", default="")
    mo.add_argument("--recursive", action="store_true", help="use the centring recursion")
    mo.add_argument("--cov", default="1", help="covariance rows 'a,b;c,d'")
    mo.add_argument("--indices", default="")
    mo.add_argument("--m", default="4")
    mo.add_argument("--method", choices=("auto", "contraction", "tuples"), default="auto")
    mo.add_argument("--plain", action="store_true", help="letters X_i instead of U_h(X_i)")
    mo.add_argument("--loose", action="store_true", help="allow non-unit kernel variance")
    _kernel_opts(mo)
    _common(mo)

    dg = sub.add_parser("diag", help="convergence criteria and gap measurements",
                        description="semicircle/poisson CSV columns: N, moments, contraction_q, "
                                    "star_r, midpoint_defect, statistic, verdict.")
    dg.add_argument("action", choices=("semicircle", "poisson", "lindeberg", "cs", "plan"))
    dg.add_argument("--law", default="semicircular")
    dg.add_argument("--lambda", dest="lam", default="1")
    dg.add_argument("--lawX", default="semicircular")
    dg.add_argument("--lawY", default="free-poisson:1")
    dg.add_argument("--m", default="4")
    dg.add_argument("--n", type=int, default=5)
    dg.add_argument("--trials", type=int, default=100)
    dg.add_argument("--dim", type=int, default=4)
    dg.add_argument("--threshold", type=float, default=0.15)
    _kernel_opts(dg)
    _common(dg)

    si = sub.add_parser("simulate", help="random-matrix estimate of phi(Q^m)",
                        description="CSV columns: trial, value; last rows carry mean and std_error.")
    si.add_argument("--kind", default="gue", choices=("gue", "gaussian-hermitian", "wishart",
                                                      "shifted-wishart"))
    si.add_argument("--dim", type=int, default=300)
    si.add_argument("--lambda", dest="lam", default="1")
    si.add_argument("--spec", dest="kernel", help="kernel JSON file")
    si.add_argument("--family", choices=sorted(FAMILIES))
    si.add_argument("--family-lambda", type=int, default=1)
    si.add_argument("--N")
    si.add_argument("--orders", default="1,1")
    si.add_argument("--m", default="4")
    si.add_argument("--trials", type=int, default=10)
    si.add_argument("--plain", action="store_true")
    si.add_argument("--loose", action="store_true")
    _common(si)

    ps = sub.add_parser("paper-suite", help="run the reproduction checks")
    _common(ps)
    return top


COMMANDS = {
    "nc": cmd_nc,
    "law": cmd_law,
    "cheb": cmd_cheb,
    "kernel": cmd_kernel,
    "moment": cmd_moment,
    "diag": cmd_diag,
    "simulate": cmd_simulate,
    "paper-suite": cmd_paper_suite,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        overrides = {}
        for name in ("nc_cap", "tuple_budget"):
            val = getattr(args, name, None)
            if val is not None:
                if val <= 0:
                    raise UsageError(f"--{name.replace('_', '-')} must be positive")
                overrides[name] = val
        with limits(**overrides):
            code = COMMANDS[args.command](args, Output(args))
        return code or EXIT_OK
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValidationError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())
