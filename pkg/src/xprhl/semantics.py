"""Exact semantics: memories, sub-distributions and the interpreter.

All enumeration is done with exact rationals.  A sub-distribution keeps an
explicit residual: probability mass that a truncated loop has not yet
resolved.  Mass lost to ``abort`` is discarded (weight drops, residual does
not grow), so ``weight + residual <= 1`` and the gap is exactly the abort
mass.
"""

from fractions import Fraction

from .lang import (
    Abort, Assign, BinOp, Call, Cond, Coupled, Dirac, Index, Lit, ListLit,
    NamedDist, Sample, Seq, SetLit, Skip, Store, UnOp, Uniform, VarE, While,
)

ONE = Fraction(1)
ZERO = Fraction(0)

DEFAULT_UNROLL = 64
DEFAULT_SUPPORT_CAP = 10 ** 6


class EvalError(Exception):
    pass


class ResourceError(Exception):
    pass


class Memory:
    """Immutable finite map from Var to value, hashable for use as a
    sub-distribution outcome."""

    __slots__ = ("_d", "_key", "_hash")

    def __init__(self, d=None):
        self._d = dict(d) if d else {}
        self._key = None
        self._hash = None

    def _mkkey(self):
        if self._key is None:
            self._key = frozenset(self._d.items())
            self._hash = hash(self._key)
        return self._key

    def __getitem__(self, var):
        try:
            return self._d[var]
        except KeyError:
            raise EvalError("unbound variable %s" % var) from None

    def get(self, var, default=None):
        return self._d.get(var, default)

    def __contains__(self, var):
        return var in self._d

    def __iter__(self):
        return iter(self._d)

    def __len__(self):
        return len(self._d)

    def items(self):
        return self._d.items()

    def set(self, var, value):
        d = dict(self._d)
        d[var] = value
        m = Memory.__new__(Memory)
        m._d = d
        m._key = None
        m._hash = None
        return m

    def set_many(self, pairs):
        d = dict(self._d)
        for var, value in pairs:
            d[var] = value
        m = Memory.__new__(Memory)
        m._d = d
        m._key = None
        m._hash = None
        return m

    def restrict(self, vars):
        return Memory({v: x for v, x in self._d.items() if v in vars})

    def disjoint_union(self, other):
        overlap = set(self._d) & set(other._d)
        if overlap:
            raise EvalError("memories overlap on %s" % sorted(map(str, overlap)))
        d = dict(self._d)
        d.update(other._d)
        return Memory(d)

    def __eq__(self, other):
        return isinstance(other, Memory) and self._d == other._d

    def __hash__(self):
        if self._hash is None:
            self._mkkey()
        return self._hash

    def __repr__(self):
        inner = ", ".join("%s=%r" % (v, x) for v, x in sorted(self._d.items(), key=lambda p: p[0]))
        return "{%s}" % inner


class SubDist:
    """Finite-support sub-distribution with exact rational masses.

    Zero masses are never stored.  ``residual`` is unresolved truncation
    mass; weight + residual <= 1 for distributions arising from programs.
    """

    __slots__ = ("masses", "residual")

    def __init__(self, masses=None, residual=ZERO):
        self.masses = {}
        if masses:
            for k, p in (masses.items() if isinstance(masses, dict) else masses):
                if p < 0:
                    raise EvalError("negative mass")
                if p != 0:
                    self.masses[k] = self.masses.get(k, ZERO) + p
        self.residual = Fraction(residual)

    @classmethod
    def dirac(cls, outcome):
        return cls({outcome: ONE})

    @classmethod
    def null(cls):
        return cls()

    @property
    def weight(self):
        return sum(self.masses.values(), ZERO)

    def support(self):
        return self.masses.keys()

    def __getitem__(self, k):
        return self.masses.get(k, ZERO)

    def __len__(self):
        return len(self.masses)

    def __eq__(self, other):
        return (
            isinstance(other, SubDist)
            and self.masses == other.masses
            and self.residual == other.residual
        )

    def __repr__(self):
        return "SubDist(%d outcomes, weight=%s, residual=%s)" % (
            len(self.masses), self.weight, self.residual)

    def scale(self, c):
        c = Fraction(c)
        return SubDist({k: p * c for k, p in self.masses.items()}, self.residual * c)

    def bind(self, f):
        """Monadic bind; f maps an outcome to a SubDist.  Residuals are
        accumulated: result.residual = residual + sum mass * f(x).residual."""
        out = {}
        res = self.residual
        for k, p in self.masses.items():
            d = f(k)
            res += p * d.residual
            for k2, p2 in d.masses.items():
                q = out.get(k2)
                out[k2] = p * p2 if q is None else q + p * p2
        r = SubDist.__new__(SubDist)
        r.masses = {k: v for k, v in out.items() if v != 0}
        r.residual = res
        return r

    def map(self, f):
        out = {}
        for k, p in self.masses.items():
            k2 = f(k)
            q = out.get(k2)
            out[k2] = p if q is None else q + p
        r = SubDist.__new__(SubDist)
        r.masses = out
        r.residual = self.residual
        return r

    def add(self, other):
        out = dict(self.masses)
        for k, p in other.masses.items():
            q = out.get(k)
            out[k] = p if q is None else q + p
        return SubDist(out, self.residual + other.residual)

    def product(self, other):
        """Independent product of two sub-distributions of equal weight,
        normalised so that the marginals are exactly the two factors."""
        w1, w2 = self.weight, other.weight
        if w1 != w2:
            raise EvalError("product of sub-distributions of unequal weight")
        if w1 == 0:
            return SubDist()
        out = {}
        for a, p in self.masses.items():
            for b, q in other.masses.items():
                out[(a, b)] = p * q / w1
        return SubDist(out)


class ExactResult:
    def __init__(self, dist, unroll_depth, converged):
        self.dist = dist
        self.unroll_depth = unroll_depth
        self.converged = converged

    def __repr__(self):
        return "ExactResult(%r, unroll=%d, converged=%s)" % (
            self.dist, self.unroll_depth, self.converged)


# ---------------------------------------------------------------------------
# Expression evaluation


def _as_int(v, ctx):
    if isinstance(v, bool) or not isinstance(v, int):
        raise EvalError("%s: expected an integer, got %r" % (ctx, v))
    return v


def _as_bool(v, ctx):
    if not isinstance(v, bool):
        raise EvalError("%s: expected a boolean, got %r" % (ctx, v))
    return v


def _as_list(v, ctx):
    if not isinstance(v, tuple):
        raise EvalError("%s: expected a list, got %r" % (ctx, v))
    return v


def eval_expr(e, m, env):
    t = type(e)
    if t is Lit:
        return e.value
    if t is VarE:
        return m[e.var]
    if t is BinOp:
        op = e.op
        if op == "and":
            return _as_bool(eval_expr(e.a, m, env), "and") and _as_bool(eval_expr(e.b, m, env), "and")
        if op == "or":
            return _as_bool(eval_expr(e.a, m, env), "or") or _as_bool(eval_expr(e.b, m, env), "or")
        if op == "=>":
            return (not _as_bool(eval_expr(e.a, m, env), "=>")) or _as_bool(eval_expr(e.b, m, env), "=>")
        a = eval_expr(e.a, m, env)
        b = eval_expr(e.b, m, env)
        if op == "+":
            return _as_int(a, "+") + _as_int(b, "+")
        if op == "-":
            return _as_int(a, "-") - _as_int(b, "-")
        if op == "*":
            return _as_int(a, "*") * _as_int(b, "*")
        if op == "/":
            if b == 0:
                raise EvalError("division by zero")
            return _as_int(a, "/") // _as_int(b, "/")
        if op == "%":
            if b == 0:
                raise EvalError("modulo by zero")
            return _as_int(a, "%") % _as_int(b, "%")
        if op == "=":
            return a == b
        if op == "!=":
            return a != b
        if op == "<":
            return _as_int(a, "<") < _as_int(b, "<")
        if op == "<=":
            return _as_int(a, "<=") <= _as_int(b, "<=")
        if op == ">":
            return _as_int(a, ">") > _as_int(b, ">")
        if op == ">=":
            return _as_int(a, ">=") >= _as_int(b, ">=")
        if op == "in":
            return a in _as_list(b, "in")
        raise EvalError("unknown operator %s" % op)
    if t is UnOp:
        if e.op == "not":
            return not _as_bool(eval_expr(e.a, m, env), "not")
        if e.op == "-":
            return -_as_int(eval_expr(e.a, m, env), "negate")
        raise EvalError("unknown operator %s" % e.op)
    if t is Call:
        return env.call(e.fn, [eval_expr(a, m, env) for a in e.args])
    if t is ListLit or t is SetLit:
        return tuple(eval_expr(a, m, env) for a in e.items)
    if t is Index:
        w = _as_list(eval_expr(e.map, m, env), "index")
        k = _as_int(eval_expr(e.key, m, env), "index")
        if not (0 <= k < len(w)):
            raise EvalError("index %d out of range" % k)
        return w[k]
    if t is Store:
        w = _as_list(eval_expr(e.map, m, env), "store")
        k = _as_int(eval_expr(e.key, m, env), "store")
        if not (0 <= k < len(w)):
            raise EvalError("store index %d out of range" % k)
        v = eval_expr(e.val, m, env)
        return w[:k] + (v,) + w[k + 1:]
    raise EvalError("cannot evaluate %r" % (e,))


def eval_dist(d, m, env):
    """Evaluate a distribution expression to a SubDist over values (over
    pairs of values for coupled distributions)."""
    t = type(d)
    if t is Uniform:
        elems = _as_list(eval_expr(d.set, m, env), "uniform")
        distinct = []
        seen = set()
        for x in elems:
            if x not in seen:
                seen.add(x)
                distinct.append(x)
        if not distinct:
            raise EvalError("uniform over an empty set")
        p = Fraction(1, len(distinct))
        return SubDist({x: p for x in distinct})
    if t is Dirac:
        return SubDist.dirac(eval_expr(d.expr, m, env))
    if t is NamedDist:
        fn = env.funcs.get("dist$" + d.name)
        if fn is None:
            raise EvalError("unknown primitive distribution %r" % d.name)
        got = fn(*[eval_expr(a, m, env) for a in d.args])
        return got if isinstance(got, SubDist) else SubDist(got)
    if t is Coupled:
        from .coupling import realize

        return realize(d.spec, m, env)
    raise EvalError("cannot evaluate distribution %r" % (d,))


# ---------------------------------------------------------------------------
# Exact interpreter


class _Exec:
    def __init__(self, env, unroll, cap):
        self.env = env
        self.unroll = unroll
        self.cap = cap

    def _check_cap(self, n):
        if n > self.cap:
            raise ResourceError(
                "support size %d exceeds cap %d; raise the cap or shrink the space" % (n, self.cap))

    def run(self, c, dist):
        """dist: dict Memory -> Fraction.  Returns (dict, residual)."""
        t = type(c)
        if t is Skip:
            return dist, ZERO
        if t is Abort:
            return {}, ZERO
        if t is Assign:
            out = {}
            for m, p in dist.items():
                m2 = m.set(c.var, eval_expr(c.expr, m, self.env))
                q = out.get(m2)
                out[m2] = p if q is None else q + p
            return out, ZERO
        if t is Sample:
            out = {}
            for m, p in dist.items():
                mu = eval_dist(c.dist, m, self.env)
                if c.is_pair:
                    x, y = c.target
                    for v, q in mu.masses.items():
                        m2 = m.set_many(((x, v[0]), (y, v[1])))
                        r = out.get(m2)
                        out[m2] = p * q if r is None else r + p * q
                else:
                    for v, q in mu.masses.items():
                        m2 = m.set(c.target, v)
                        r = out.get(m2)
                        out[m2] = p * q if r is None else r + p * q
            self._check_cap(len(out))
            return out, ZERO
        if t is Seq:
            d1, r1 = self.run(c.first, dist)
            d2, r2 = self.run(c.second, d1)
            return d2, r1 + r2
        if t is Cond:
            dt, df = {}, {}
            for m, p in dist.items():
                if _as_bool(eval_expr(c.guard, m, self.env), "if-guard"):
                    dt[m] = p
                else:
                    df[m] = p
            out1, r1 = self.run(c.then, dt) if dt else ({}, ZERO)
            out2, r2 = self.run(c.els, df) if df else ({}, ZERO)
            for m, p in out2.items():
                q = out1.get(m)
                out1[m] = p if q is None else q + p
            return out1, r1 + r2
        if t is While:
            done = {}
            active = dict(dist)
            residual = ZERO
            for _ in range(self.unroll):
                if not active:
                    break
                nxt = {}
                for m, p in active.items():
                    if _as_bool(eval_expr(c.guard, m, self.env), "while-guard"):
                        nxt[m] = p
                    else:
                        q = done.get(m)
                        done[m] = p if q is None else q + p
                if not nxt:
                    active = {}
                    break
                active, r = self.run(c.body, nxt)
                residual += r
                self._check_cap(len(done) + len(active))
            # whatever is still active is unresolved truncation mass
            for m, p in active.items():
                if _as_bool(eval_expr(c.guard, m, self.env), "while-guard"):
                    residual += p
                else:
                    q = done.get(m)
                    done[m] = p if q is None else q + p
            return done, residual
        raise EvalError("cannot execute %r" % (c,))


def exec_exact(c, m, env, unroll=DEFAULT_UNROLL, tol=ZERO, support_cap=DEFAULT_SUPPORT_CAP):
    """Exact iterative-deepening-free truncation semantics at a fixed unroll
    budget.  Increasing ``unroll`` only moves mass from residual to
    outcomes (monotone refinement)."""
    ex = _Exec(env, unroll, support_cap)
    if isinstance(m, Memory):
        init = {m: ONE}
    else:
        init = {Memory(m): ONE}
    out, residual = ex.run(c, init)
    dist = SubDist.__new__(SubDist)
    dist.masses = {k: v for k, v in out.items() if v != 0}
    dist.residual = residual
    return ExactResult(dist, unroll, residual <= tol)


def project_marginal(dist, vars):
    """Image of a memory sub-distribution under restriction to ``vars``."""
    vs = frozenset(vars)
    return dist.map(lambda m: m.restrict(vs))


def value_marginal(dist, var):
    return dist.map(lambda m: m[var])


class LosslessReport:
    def __init__(self, verdict, states_checked, worst_weight, witness=None):
        self.verdict = verdict  # 'proved' | 'evidence' | 'failed'
        self.states_checked = states_checked
        self.worst_weight = worst_weight
        self.witness = witness

    def __repr__(self):
        return "LosslessReport(%s, states=%d, worst_weight=%s)" % (
            self.verdict, self.states_checked, self.worst_weight)


def check_lossless(c, states, env, unroll=DEFAULT_UNROLL, tol=ZERO,
                   support_cap=DEFAULT_SUPPORT_CAP, exhaustive=True):
    """Check that c terminates with probability one from every given state.

    Verdict 'proved' needs exhaustive states and exact weight 1 everywhere;
    weight >= 1 - tol downgrades to 'evidence'; anything lower fails.
    """
    worst = ONE
    witness = None
    n = 0
    ok_exact = True
    for m in states:
        n += 1
        res = exec_exact(c, m, env, unroll=unroll, support_cap=support_cap)
        w = res.dist.weight
        if w < worst:
            worst = w
            witness = m
        if w != 1:
            ok_exact = False
            if w < 1 - tol:
                return LosslessReport("failed", n, w, m)
    if ok_exact and exhaustive:
        return LosslessReport("proved", n, worst, witness)
    return LosslessReport("evidence", n, worst, witness)
