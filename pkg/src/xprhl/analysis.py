"""Quantitative analysis of product programs.

A product whose postcondition forces the coupled outputs to agree outside a
failure event turns convergence into probability estimation: the total
variation distance between the two marginal output distributions is at most
the probability of the failure event under the product.  This module
estimates that probability exactly or by Monte Carlo, evaluates the known
closed-form bounds for the shipped case studies, and certifies path-coupling
contraction (per-step expected-distance bound beta for every pair at
distance 1, hence a global bound beta^t * diameter).
"""

import math
import random
from fractions import Fraction

from .lang import Call, VarE
from .sampler import DEFAULT_BUDGET, compile_runner, enumerate_exact
from .semantics import (
    DEFAULT_SUPPORT_CAP, DEFAULT_UNROLL, Memory, eval_expr,
    exec_exact, value_marginal,
)
from .coupling import tv_distance

DEFAULT_SEED = 0xC0FFEE
DEFAULT_SAMPLES = 10 ** 5
MC_PARTITIONS = 16


class AnalysisError(Exception):
    pass


# ---------------------------------------------------------------------------
# Failure-probability estimation

class ConvergenceQuery:
    """What to estimate: Pr[failure_event] after running ``product`` from
    each state of ``pre_states``."""

    def __init__(self, product, pre_states, failure_event, mode="exact",
                 samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED):
        self.product = product
        self.pre_states = pre_states
        self.failure_event = failure_event
        self.mode = mode
        self.samples = samples
        self.seed = seed


class FailureReport:
    def __init__(self, method, bound, stderr, per_state, residual, samples=0,
                 failures=0):
        self.method = method
        self.bound = bound
        self.stderr = stderr
        self.per_state = per_state
        self.residual = residual  # worst unconverged mass (exact mode)
        self.samples = samples
        self.failures = failures

    def __repr__(self):
        return "FailureReport(%s, bound=%s, stderr=%s)" % (
            self.method, self.bound, self.stderr)


def _mc_seeds(seed, parts=MC_PARTITIONS):
    # fixed partitioning keeps results byte-identical for a given seed
    return [(seed << 8) ^ (0x9E37 + 31 * i) for i in range(parts)]


def estimate_failure(q, env, unroll=DEFAULT_UNROLL,
                     support_cap=DEFAULT_SUPPORT_CAP, budget=DEFAULT_BUDGET):
    """Upper bound on Pr[failure] over all declared pre-states.

    Exact mode counts everything that is not provably a success — failure
    states, truncated residual, and aborted mass — so the bound is
    conservative.  Monte Carlo mode reports the worst per-state frequency
    with its binomial standard error; non-terminated runs count as failures.
    """
    pre = q.pre_states
    states = list(pre.states(env)) if hasattr(pre, "states") else list(pre)
    if not states:
        raise AnalysisError("no pre-states to analyse")
    if q.mode == "exact":
        per_state = []
        worst = Fraction(0)
        worst_res = Fraction(0)
        for m in states:
            res = exec_exact(q.product, m, env, unroll=unroll,
                             support_cap=support_cap)
            ok_mass = Fraction(0)
            for mm, pr in res.dist.masses.items():
                if not eval_expr(q.failure_event, mm, env):
                    ok_mass += pr
            fail = 1 - ok_mass
            per_state.append((m, fail))
            if fail > worst:
                worst = fail
            if res.dist.residual > worst_res:
                worst_res = res.dist.residual
        return FailureReport("exact", worst, Fraction(0), per_state, worst_res)
    if q.mode != "montecarlo":
        raise AnalysisError("unknown estimation mode %r" % q.mode)

    fn = compile_runner(q.product, env)
    per_state = []
    worst = 0.0
    worst_err = 0.0
    tot_n = tot_f = 0
    for m in states:
        mdict = dict(m.items())
        fails = 0
        n = 0
        seeds = _mc_seeds(q.seed)
        base, extra = divmod(q.samples, len(seeds))
        for i, s in enumerate(seeds):
            rng = random.Random(s)
            runs = base + (1 if i < extra else 0)
            for _ in range(runs):
                out, _steps, ok = fn(dict(mdict), rng, budget)
                if not ok or eval_expr(q.failure_event, Memory(out), env):
                    fails += 1
            n += runs
        p = fails / n
        err = math.sqrt(p * (1 - p) / n)
        per_state.append((m, p))
        tot_n += n
        tot_f += fails
        if p > worst:
            worst, worst_err = p, err
    return FailureReport("montecarlo", worst, worst_err, per_state,
                         Fraction(0), samples=tot_n, failures=tot_f)


# ---------------------------------------------------------------------------
# Closed-form bounds for the shipped case studies

def closed_form_bounds(name, params):
    """Known analytic convergence/contraction bound for a case study.

    Out-of-regime parameters are rejected with the violated hypothesis
    named.  Returns an exact Fraction where the formula is rational and a
    float otherwise.
    """
    fn = _BOUNDS.get(name)
    if fn is None:
        raise AnalysisError("no closed-form bound named %r (have %s)"
                            % (name, ", ".join(sorted(_BOUNDS))))
    return fn(dict(params))


def _require(cond, hypothesis):
    if not cond:
        raise AnalysisError("out of regime: requires %s" % hypothesis)


def _bound_rwalk(p):
    k, T = p["k"], p["T"]
    _require(T >= 1, "T >= 1")
    _require(k >= 0, "k >= 0")
    return k * math.e * math.sqrt(2) / (math.pi * math.sqrt(T))


def _bound_dynkin(p):
    N = p["N"]
    _require(N > 10, "N > 10")
    if N % 5 == 0:
        return Fraction(9, 10) ** (N // 5 - 2)
    return (9 / 10) ** (N / 5 - 2)


def _bound_glauber(p):
    n, k, D = p["n"], p["k"], p["D"]
    _require(n >= 1, "n >= 1")
    _require(k >= D, "k >= D")
    # 1 - 1/n + 2D/(kn)
    return Fraction(k * (n - 1) + 2 * D, k * n)


def _bound_chlg(p):
    s, n, D = p["s"], p["n"], p["D"]
    _require(s >= 1, "s >= 1")
    _require(3 * (D + 1) * (s - 1) <= n, "s <= n / (3(D+1)) + 1")
    # (1 - 1/s) * 3(D+1)/n
    return Fraction(s - 1, s) * Fraction(3 * (D + 1), n)


_BOUNDS = {
    "rwalk": _bound_rwalk,
    "dynkin": _bound_dynkin,
    "glauber": _bound_glauber,
    "chlg": _bound_chlg,
}


# ---------------------------------------------------------------------------
# Empirical total variation

def empirical_tv(c, m1, m2, observable, env, mode="exact",
                 unroll=DEFAULT_UNROLL, support_cap=DEFAULT_SUPPORT_CAP,
                 samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED,
                 budget=DEFAULT_BUDGET):
    """TV distance between the observable's distributions after running
    ``c`` from ``m1`` versus from ``m2``.

    Exact mode enumerates; Monte Carlo mode compares histograms (biased
    upward, so still safe against upper bounds)."""
    if mode == "exact":
        d1 = value_marginal(exec_exact(c, m1, env, unroll=unroll,
                                       support_cap=support_cap).dist, observable)
        d2 = value_marginal(exec_exact(c, m2, env, unroll=unroll,
                                       support_cap=support_cap).dist, observable)
        return tv_distance(d1, d2)
    if mode != "montecarlo":
        raise AnalysisError("unknown TV mode %r" % mode)
    fn = compile_runner(c, env)
    hists = []
    for m in (m1, m2):
        mdict = dict(m.items())
        h = {}
        for s in _mc_seeds(seed):
            rng = random.Random(s)
            for _ in range(samples // MC_PARTITIONS):
                out, _steps, ok = fn(dict(mdict), rng, budget)
                if not ok:
                    raise AnalysisError("non-terminated run while estimating TV")
                v = out.get(observable)
                h[v] = h.get(v, 0) + 1
        hists.append(h)
    n = sum(hists[0].values())
    keys = set(hists[0]) | set(hists[1])
    return sum(abs(hists[0].get(k, 0) - hists[1].get(k, 0)) for k in keys) / (2 * n)


# ---------------------------------------------------------------------------
# Path coupling

class PathCouplingCert:
    """One-step contraction certificate.

    ``states`` enumerates the chain's state values; ``metric_fn`` names a
    host distance function on them; ``step`` is the coupled one-step product
    over the pair of variables ``(var1, var2)``; adjacency means distance 1.
    """

    def __init__(self, states, metric_fn, var1, var2, step, beta, t,
                 delta=None, extra=None, adjacent=None):
        self.states = list(states)
        self.metric_fn = metric_fn
        self.var1 = var1
        self.var2 = var2
        self.step = step
        self.beta = beta
        self.t = t
        self.delta = delta
        self.extra = dict(extra or {})
        self.adjacent = adjacent  # optional precomputed pairs at distance 1

    def memory(self, v1, v2):
        d = dict(self.extra)
        d[self.var1] = v1
        d[self.var2] = v2
        return Memory(d)


class CertReport:
    def __init__(self, metric_verdict, metric_checked, pairs_checked, worst_pair,
                 worst_expectation, beta, delta, t, global_bound, failure=None):
        self.metric_verdict = metric_verdict  # 'proved' | 'evidence' | 'refuted'
        self.metric_checked = metric_checked
        self.pairs_checked = pairs_checked
        self.worst_pair = worst_pair
        self.worst_expectation = worst_expectation
        self.beta = beta
        self.delta = delta
        self.t = t
        self.global_bound = global_bound
        self.failure = failure  # (pair, expectation) exceeding beta, if any

    @property
    def ok(self):
        return self.failure is None and self.metric_verdict != "refuted"


def expected_distance(step, m, env, metric_expr, budget=DEFAULT_BUDGET):
    """Exact E[d] over one coupled step from memory ``m``."""
    acc = Fraction(0)
    for out, p in enumerate_exact(step, m, env, budget=budget):
        acc += p * Fraction(eval_expr(metric_expr, Memory(out), env))
    return acc


def check_path_coupling(cert, env, metric_pairs=400, seed=DEFAULT_SEED,
                        budget=DEFAULT_BUDGET, progress=None):
    """Certify contraction: every pair at distance 1 has E[d'] <= beta.

    The path-metric property (any pair at distance > 1 is split by a state
    at distance 1 from one end) is verified on all state pairs when the
    enumeration is small, else on a seeded sample, which downgrades the
    verdict to evidence.  The returned global bound is beta^t * diameter.
    """
    dist = env.funcs[cert.metric_fn] if cert.metric_fn in env.funcs else None
    if dist is None:
        raise AnalysisError("unknown metric function %r" % cert.metric_fn)
    states = cert.states
    n = len(states)

    # 1. path-metric property
    all_pairs = n * (n - 1) // 2
    exhaustive = all_pairs <= metric_pairs
    if exhaustive:
        pairs = [(a, b) for i, a in enumerate(states) for b in states[i + 1:]]
    else:
        rng = random.Random(seed)
        pairs = [(states[rng.randrange(n)], states[rng.randrange(n)])
                 for _ in range(metric_pairs)]
    metric_verdict = "proved" if exhaustive else "evidence"
    checked = 0
    witness_fail = None
    for a, b in pairs:
        d = dist(a, b)
        checked += 1
        if d <= 1:
            continue
        if not any(c != a and c != b and dist(a, c) + dist(c, b) == d
                   for c in states):
            metric_verdict = "refuted"
            witness_fail = (a, b)
            break

    # 2. per-adjacent-pair contraction
    metric_expr = Call(cert.metric_fn, (VarE(cert.var1), VarE(cert.var2)))
    if cert.adjacent is not None:
        adjacent = cert.adjacent
    else:
        adjacent = [(a, b) for i, a in enumerate(states)
                    for b in states[i + 1:] if dist(a, b) == 1]
    worst = Fraction(-1)
    worst_pair = None
    failure = None
    count = 0
    for a, b in adjacent:
        e = expected_distance(cert.step, cert.memory(a, b), env, metric_expr,
                              budget=budget)
        count += 1
        if e > worst:
            worst, worst_pair = e, (a, b)
        if e > cert.beta and failure is None:
            failure = ((a, b), e)
        if progress is not None and count % 5000 == 0:
            progress(count)

    # 3. global bound
    delta = cert.delta
    if delta is None:
        delta = max((dist(a, b) for a, b in pairs), default=0)
    beta = cert.beta
    if isinstance(beta, Fraction) and isinstance(delta, int):
        global_bound = beta ** cert.t * delta
    else:
        global_bound = float(beta) ** cert.t * float(delta)
    if failure is None and witness_fail is not None:
        failure = (witness_fail, None)
    return CertReport(metric_verdict, checked, count, worst_pair, worst,
                      beta, delta, cert.t, global_bound, failure=failure)


def iterate_chain_mc(step, m, env, event_expr, t, samples=10 ** 4,
                     seed=DEFAULT_SEED, budget=DEFAULT_BUDGET):
    """Run the coupled chain for t steps many times; frequency of the event
    on the final pair, with binomial standard error."""
    fn = compile_runner(step, env)
    mdict = dict(m.items())
    hits = 0
    n = 0
    for s in _mc_seeds(seed):
        rng = random.Random(s)
        for _ in range(samples // MC_PARTITIONS):
            cur = dict(mdict)
            for _i in range(t):
                cur, _steps, ok = fn(cur, rng, budget)
                if not ok:
                    raise AnalysisError("non-terminated step while iterating")
            if eval_expr(event_expr, Memory(cur), env):
                hits += 1
            n += 1
    p = hits / n
    return p, math.sqrt(p * (1 - p) / n)
