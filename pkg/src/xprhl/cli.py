"""Command-line front end.

Every subcommand reads explicit input files, echoes a reproducibility
header (tool version, configuration, input digest) into its output, and
communicates success through the exit code: 0 for accepted/ok, 1 for
rejected/refuted, 2 for usage or resource errors.  Diagnostics go to
stderr; structured output goes to stdout or the ``-o`` target.
"""

import argparse
import ast
import csv
import hashlib
import io
import json
import sys
from fractions import Fraction

from . import __version__
from .assertions import StateSpace
from .lang import normalize, fmt_cmd, parse_var, seq
from .parser import parse_expr, parse_program, ParseError
from .semantics import EvalError, Memory, ResourceError, exec_exact
from .sampler import exec_sample
from .hostfuncs import HostError
from .kernel import CheckContext, check, validate_product
from .kernel.rules import KernelError, normalize_product
from .kernel.serialize import deriv_from_json
from .analysis import (
    AnalysisError, ConvergenceQuery, PathCouplingCert, check_path_coupling,
    closed_form_bounds, estimate_failure,
)
from .cases import get_case, get_env, list_cases

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_USAGE = 2

DEFAULT_UNROLL = 64
DEFAULT_SEED = 0xC0FFEE
DEFAULT_SAMPLES = 10 ** 5
DEFAULT_CAP = 10 ** 6


class CliError(Exception):
    """Usage or input problem; maps to exit code 2."""


def _read_bytes(path):
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError("cannot read %s: %s" % (path, exc))


def _load_json(path):
    data = _read_bytes(path)
    try:
        return json.loads(data), hashlib.sha256(data).hexdigest()
    except json.JSONDecodeError as exc:
        raise CliError("%s: invalid JSON: %s" % (path, exc))


def _header(args, input_path=None, sha256=None):
    cfg = {}
    for key in ("unroll", "tol", "seed", "samples", "cap", "strict",
                "assume_lossless", "mode"):
        if hasattr(args, key):
            val = getattr(args, key)
            cfg[key] = str(val) if isinstance(val, Fraction) else val
    h = {"tool": "xprhl", "version": __version__, "config": cfg}
    if input_path is not None:
        h["input"] = str(input_path)
    if sha256 is not None:
        h["input_sha256"] = sha256
    return h


def _emit(args, text):
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, payload):
    _emit(args, json.dumps(payload, sort_keys=True, indent=2, default=str) + "\n")


def _header_lines(header):
    cfg = " ".join("%s=%s" % (k, v) for k, v in sorted(header["config"].items()))
    lines = ["# %s %s" % (header["tool"], header["version"])]
    if "input" in header:
        lines.append("# input %s sha256=%s" % (header["input"],
                                               header.get("input_sha256", "-")))
    lines.append("# config %s" % cfg)
    return lines


def _number(v):
    """JSON-friendly rendering of exact and floating-point quantities."""
    if isinstance(v, Fraction):
        return {"exact": str(v), "float": float(v)}
    return v


# -- bundle loading ----------------------------------------------------------


class Bundle:
    """A derivation file: environment name, derivation tree, state spaces."""

    def __init__(self, env_name, derivation, check_space, validate_space, meta):
        self.env_name = env_name
        self.derivation = derivation
        self.check_space = check_space
        self.validate_space = validate_space
        self.meta = meta

    @property
    def env(self):
        return get_env(self.env_name)


def load_bundle(path):
    data, sha = _load_json(path)
    try:
        deriv = deriv_from_json(data["derivation"])
        check_space = StateSpace.from_json(data["check_space"])
        vspec = data.get("validate_space", data["check_space"])
        validate_space = StateSpace.from_json(vspec)
    except KeyError as exc:
        raise CliError("%s: missing field %s" % (path, exc))
    except (ParseError, KernelError) as exc:
        raise CliError("%s: %s" % (path, exc))
    bundle = Bundle(data.get("env", "basic"), deriv, check_space,
                    validate_space, data.get("meta", {}))
    return bundle, sha


def _check_bundle(bundle, args):
    kw = dict(bundle.meta.get("check_args", {}))
    if args.assume_lossless:
        kw["assume_lossless"] = True
    ctx = CheckContext(bundle.check_space, bundle.env, unroll=args.unroll,
                       tol=args.tol, support_cap=args.cap, **kw)
    return check(bundle.derivation, ctx)


def _status_exit(rep, strict):
    if rep.status == "accepted":
        return EXIT_OK
    if rep.status == "accepted-with-evidence":
        return EXIT_REJECTED if strict else EXIT_OK
    return EXIT_REJECTED


# -- subcommands -------------------------------------------------------------


def cmd_check(args):
    bundle, sha = load_bundle(args.input)
    rep = _check_bundle(bundle, args)
    lines = _header_lines(_header(args, args.input, sha))
    for ob in rep.obligations:
        lines.append(str(ob))
    if rep.error is not None:
        lines.append("error: %s" % rep.error)
    lines.append("status: %s" % rep.status)
    _emit(args, "\n".join(lines) + "\n")
    return _status_exit(rep, args.strict)


def cmd_product(args):
    bundle, sha = load_bundle(args.input)
    rep = _check_bundle(bundle, args)
    if rep.product is None:
        print("no product: %s" % rep.status, file=sys.stderr)
        for ob in rep.failures():
            print(str(ob), file=sys.stderr)
        if rep.error is not None:
            print("error: %s" % rep.error, file=sys.stderr)
        return EXIT_REJECTED
    prod = normalize_product(rep.product) if args.normalize else rep.product
    _emit(args, fmt_cmd(prod) + "\n")
    if not rep.accepted:
        print("warning: derivation rejected (%s); product is unverified"
              % rep.status, file=sys.stderr)
        return EXIT_REJECTED
    return _status_exit(rep, args.strict)


def cmd_validate(args):
    bundle, sha = load_bundle(args.input)
    rep = _check_bundle(bundle, args)
    lines = _header_lines(_header(args, args.input, sha))
    if not rep.accepted:
        lines.append("status: %s (derivation rejected; nothing to validate)"
                     % rep.status)
        _emit(args, "\n".join(lines) + "\n")
        return EXIT_REJECTED
    sound = validate_product(bundle.derivation.concl, rep.product,
                             bundle.validate_space, bundle.env,
                             unroll=args.unroll, support_cap=args.cap,
                             max_states=args.max_states)
    lines.append("check: %s" % rep.status)
    lines.append("states: %d (exhaustive=%s, converged=%s)"
                 % (sound.states_checked, sound.exhaustive, sound.converged))
    fail = sound.first_failure()
    if fail is not None:
        lines.append("failure at %r: %s" % (fail.state, fail.detail))
    lines.append("validate: %s" % ("ok" if sound.ok else "failed"))
    _emit(args, "\n".join(lines) + "\n")
    if not sound.ok:
        return EXIT_REJECTED
    return _status_exit(rep, args.strict)


def _parse_state(pairs):
    mem = {}
    for item in pairs:
        if "=" not in item:
            raise CliError("--state expects name=value, got %r" % item)
        name, _, raw = item.partition("=")
        try:
            val = ast.literal_eval(raw)
        except (ValueError, SyntaxError):
            val = raw
        mem[parse_var(name.strip())] = val
    return Memory(mem)


def cmd_run(args):
    data = _read_bytes(args.input)
    try:
        prog = parse_program(data.decode())
    except ParseError as exc:
        raise CliError("%s: %s" % (args.input, exc))
    env = get_env(args.env)
    m = _parse_state(args.state or [])
    sha = hashlib.sha256(data).hexdigest()
    lines = _header_lines(_header(args, args.input, sha))
    if args.mode == "exact":
        res = exec_exact(prog, m, env, unroll=args.unroll, support_cap=args.cap)
        lines.append("converged: %s residual: %s"
                     % (res.converged, res.dist.residual))
        for out, p in sorted(res.dist.masses.items(), key=lambda kv: repr(kv[0])):
            lines.append("%s\t%r" % (p, out))
    else:
        trace = exec_sample(prog, m, env, seed=args.seed)
        lines.append("steps: %d terminated: %s" % (trace.steps, trace.terminated))
        lines.append("final: %r" % (trace.final,))
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _query_product(spec, base_dir_hint=None):
    """Resolve the coupled program of an estimate/sweep query."""
    env_name = spec.get("env")
    if "case" in spec:
        case = get_case(spec["case"])
        rep = case.check()
        if not rep.accepted:
            raise CliError("case %s rejected; refusing to analyse its product"
                           % spec["case"])
        prod = rep.product
        env_name = env_name or case.env_name
        spec.setdefault("failure_event", case.meta.get("failure_event"))
    elif "product" in spec:
        try:
            prod = parse_program(_read_bytes(spec["product"]).decode())
        except ParseError as exc:
            raise CliError("%s: %s" % (spec["product"], exc))
    else:
        raise CliError("query needs either 'case' or 'product'")
    if "prelude" in spec:
        prod = seq(parse_program(spec["prelude"]), prod)
    if env_name is None:
        raise CliError("query needs 'env' when 'product' is a file")
    return prod, get_env(env_name)


def _query_pre_states(spec):
    pre = spec.get("pre_states")
    if pre is None:
        raise CliError("query needs 'pre_states'")
    if isinstance(pre, dict):
        return StateSpace.from_json(pre)
    states = []
    for d in pre:
        states.append(Memory({parse_var(k): v for k, v in d.items()}))
    return states


def _run_estimate(spec, args):
    prod, env = _query_product(spec)
    event = spec.get("failure_event")
    if event is None:
        raise CliError("query needs 'failure_event'")
    q = ConvergenceQuery(
        product=prod,
        pre_states=_query_pre_states(spec),
        failure_event=parse_expr(event),
        mode=spec.get("mode", "exact"),
        samples=int(spec.get("samples", args.samples)),
        seed=int(spec.get("seed", args.seed)),
    )
    fr = estimate_failure(q, env, unroll=args.unroll, support_cap=args.cap)
    return fr


def cmd_estimate(args):
    spec, sha = _load_json(args.input)
    fr = _run_estimate(spec, args)
    payload = {
        "header": _header(args, args.input, sha),
        "bound": _number(fr.bound),
        "stderr": _number(fr.stderr),
        "mode": fr.method,
        "residual": _number(fr.residual),
        "samples": fr.samples,
        "states": len(fr.per_state),
    }
    if "closed_form" in spec:
        cf = spec["closed_form"]
        payload["closed_form"] = _number(
            closed_form_bounds(cf["name"], cf.get("params", {})))
    _emit_json(args, payload)
    return EXIT_OK


def _parse_metric(text):
    e = parse_expr(text)
    try:
        name = e.fn
        v1, v2 = (a.var for a in e.args)
    except (AttributeError, ValueError):
        raise CliError("metric must look like dist(x_1, x_2), got %r" % text)
    return name, v1, v2


def cmd_pathcoupling(args):
    spec, sha = _load_json(args.input)
    if "case" in spec:
        case = get_case(spec["case"])
        rep = case.check()
        if not rep.accepted:
            raise CliError("case %s rejected; refusing to certify its product"
                           % spec["case"])
        base = dict(case.meta.get("path_coupling", {}))
        base.update(spec)
        spec = base
        step = rep.product
        env = case.env
    else:
        try:
            step = parse_program(_read_bytes(spec["step"]).decode())
        except KeyError:
            raise CliError("certificate needs either 'case' or 'step'")
        except ParseError as exc:
            raise CliError("%s: %s" % (spec["step"], exc))
        env = get_env(spec["env"])
    try:
        metric, v1, v2 = _parse_metric(spec["metric"])
        beta = Fraction(*spec["beta"]) if isinstance(spec["beta"], list) \
            else Fraction(spec["beta"])
        states = list(env.generator(spec["states"])(env))
        adjacent = (list(env.generator(spec["adjacent"])(env))
                    if "adjacent" in spec else None)
        cert = PathCouplingCert(
            states, metric, v1, v2, step, beta, int(spec["t"]),
            delta=spec.get("delta"), extra=None, adjacent=adjacent)
    except KeyError as exc:
        raise CliError("certificate missing field %s" % exc)
    rep = check_path_coupling(cert, env, metric_pairs=spec.get("metric_pairs", 400),
                              seed=args.seed)
    payload = {
        "header": _header(args, args.input, sha),
        "ok": rep.ok,
        "metric_verdict": rep.metric_verdict,
        "metric_checked": rep.metric_checked,
        "beta": _number(rep.beta),
        "beta_checked": rep.failure is None,
        "pairs_checked": rep.pairs_checked,
        "worst_pair": repr(rep.worst_pair),
        "worst_expectation": _number(rep.worst_expectation),
        "delta": rep.delta,
        "t": rep.t,
        "global_bound": _number(rep.global_bound),
    }
    if rep.failure is not None:
        pair, exp = rep.failure
        payload["failure"] = {"pair": repr(pair),
                              "expectation": _number(exp) if exp is not None else None}
    _emit_json(args, payload)
    return EXIT_OK if rep.ok else EXIT_REJECTED


def cmd_sweep(args):
    spec, sha = _load_json(args.input)
    sweep = spec.get("sweep")
    if not sweep or "var" not in sweep or "values" not in sweep:
        raise CliError("sweep query needs 'sweep': {'var': name, 'values': [...]}")
    var = sweep["var"]
    cf = spec.get("closed_form")
    rows = []
    for value in sweep["values"]:
        one = {k: v for k, v in spec.items() if k not in ("sweep",)}
        pre = []
        for d in spec.get("pre_states", [{}]):
            d = dict(d)
            d["%s_1" % var] = value
            d["%s_2" % var] = value
            pre.append(d)
        one["pre_states"] = pre
        fr = _run_estimate(one, args)
        bound = ""
        if cf is not None:
            params = dict(cf.get("params", {}))
            params[var] = value
            bound = float(closed_form_bounds(cf["name"], params))
        rows.append((value, bound, float(fr.bound), float(fr.stderr)))

    out = io.StringIO()
    header = _header(args, args.input, sha)
    w = csv.writer(out, lineterminator="\n")
    for line in _header_lines(header):
        out.write(line + "\n")
    w.writerow(["param", "bound", "empirical", "stderr"])
    for row in rows:
        w.writerow(row)
    _emit(args, out.getvalue())

    png = args.png
    if png is None and args.output:
        png = args.output.rsplit(".", 1)[0] + ".png"
    if png:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        xs = [r[0] for r in rows]
        fig, ax = plt.subplots(figsize=(6, 4))
        if cf is not None:
            ax.plot(xs, [r[1] for r in rows], "o-", label="closed-form bound")
        ax.errorbar(xs, [r[2] for r in rows],
                    yerr=[3 * r[3] for r in rows], fmt="s-",
                    label="empirical (3 s.e.)")
        ax.set_xlabel(var)
        ax.set_ylabel("failure probability")
        ax.legend()
        fig.tight_layout()
        fig.savefig(png, dpi=120)
        plt.close(fig)
    return EXIT_OK


def cmd_cases(args):
    names = list_cases()
    if args.action == "list" or (args.action == "run" and not names):
        for n in names:
            print(n)
        return EXIT_OK
    if args.name:
        if args.name not in names:
            raise CliError("unknown case %r (try 'xprhl cases list')" % args.name)
        names = [args.name]
    worst = EXIT_OK
    for name in names:
        case = get_case(name)
        rep = case.check(unroll=args.unroll, support_cap=args.cap)
        golden = case.matches_golden(rep.product) if rep.product is not None else False
        code = _status_exit(rep, args.strict)
        ok = rep.accepted and golden
        if args.validate and ok:
            sound = case.validate(rep.product, unroll=args.unroll,
                                  max_states=args.max_states)
            ok = sound.ok
            extra = " validate=%s" % ("ok" if sound.ok else "failed")
        else:
            extra = ""
        if not ok:
            code = EXIT_REJECTED
        print("%-22s %-24s golden=%s%s" % (name, rep.status, golden, extra))
        worst = max(worst, code)
    return worst


# -- argument parsing --------------------------------------------------------


def _add_common(p, samples=False):
    p.add_argument("--unroll", type=int, default=DEFAULT_UNROLL,
                   help="loop unrolling bound for exact execution")
    p.add_argument("--tol", type=Fraction, default=Fraction(0),
                   help="numeric tolerance for probability comparisons")
    p.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED,
                   help="PRNG seed for sampled checks")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP,
                   help="support-size cap for exact execution")
    p.add_argument("--strict", action="store_true",
                   help="treat evidence-grade verdicts as failures")
    p.add_argument("--assume-lossless", action="store_true",
                   help="accept losslessness side conditions without proof")
    p.add_argument("-o", "--output", help="write output to this file")
    if samples:
        p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES,
                       help="Monte Carlo sample count")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="xprhl",
        description="Check relational derivations, extract coupled product "
                    "programs, and certify convergence bounds.")
    ap.add_argument("--version", action="version", version="xprhl " + __version__)
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("check", help="check a derivation file")
    p.add_argument("input")
    _add_common(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("product", help="extract the product program")
    p.add_argument("input")
    p.add_argument("--raw", dest="normalize", action="store_false",
                   help="keep internal loop counters in the output")
    _add_common(p)
    p.set_defaults(fn=cmd_product)

    p = sub.add_parser("validate", help="validate the product's marginals")
    p.add_argument("input")
    p.add_argument("--max-states", type=int, default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("run", help="execute a program from a given state")
    p.add_argument("input")
    p.add_argument("--env", default="basic")
    p.add_argument("--state", action="append", metavar="NAME=VALUE")
    p.add_argument("--mode", choices=("exact", "sample"), default="exact")
    _add_common(p)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("estimate", help="bound a failure probability")
    p.add_argument("input")
    _add_common(p, samples=True)
    p.set_defaults(fn=cmd_estimate)

    p = sub.add_parser("pathcoupling", help="check a contraction certificate")
    p.add_argument("input")
    _add_common(p)
    p.set_defaults(fn=cmd_pathcoupling)

    p = sub.add_parser("sweep", help="sweep a parameter; emit CSV and a plot")
    p.add_argument("input")
    p.add_argument("--png", help="figure path (default: next to the CSV)")
    _add_common(p, samples=True)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("cases", help="list or run the bundled case studies")
    p.add_argument("action", nargs="?", choices=("list", "run"), default="list")
    p.add_argument("name", nargs="?")
    p.add_argument("--no-validate", dest="validate", action="store_false")
    p.add_argument("--max-states", type=int, default=40)
    _add_common(p)
    p.set_defaults(fn=cmd_cases)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.fn(args)
    except CliError as exc:
        print("xprhl: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except (ResourceError,) as exc:
        print("xprhl: resource limit: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except (KernelError, AnalysisError, EvalError, HostError, ParseError) as exc:
        print("xprhl: %s" % exc, file=sys.stderr)
        return EXIT_REJECTED


if __name__ == "__main__":
    sys.exit(main())
