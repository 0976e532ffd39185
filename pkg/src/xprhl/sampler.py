"""Operational sampling semantics.

Commands are compiled to Python source once and the generated function is
reused across runs; Monte-Carlo estimation over 10^5 runs is far too slow
for a tree-walking interpreter.  The exact interpreter in semantics.py is
the reference; sampler/enumerator agreement is enforced by the conformance
tests.

Runs are deterministic per seed.  ``abort`` and an exhausted step budget
terminate the run with ``terminated=False``; such runs count as failures
for conservative estimates.
"""

import random

from .lang import (
    Abort, Assign, BinOp, Call, Cond, Coupled, Dirac, Index, Lit, ListLit,
    NamedDist, Sample, Seq, SetLit, Skip, Store, UnOp, Uniform, VarE, While,
    cmd_vars,
)
from .semantics import EvalError, Memory

DEFAULT_BUDGET = 10 ** 6
DEFAULT_SEED = 0xC0FFEE


class _Stop(Exception):
    pass


class _Missing:
    def __repr__(self):
        return "<unbound>"


_MISSING = _Missing()


def _div(a, b):
    if b == 0:
        raise EvalError("division by zero")
    return a // b


def _mod(a, b):
    if b == 0:
        raise EvalError("modulo by zero")
    return a % b


def _idx(w, k):
    if not (0 <= k < len(w)):
        raise EvalError("index %d out of range" % k)
    return w[k]


def _store(w, k, v):
    if not (0 <= k < len(w)):
        raise EvalError("store index %d out of range" % k)
    return w[:k] + (v,) + w[k + 1:]


def _choice(rng, elems):
    # uniform over the distinct elements, preserving first-occurrence order
    if len(elems) == 0:
        raise EvalError("uniform over an empty set")
    if len(set(elems)) != len(elems):
        seen = set()
        uniq = []
        for x in elems:
            if x not in seen:
                seen.add(x)
                uniq.append(x)
        elems = uniq
    return elems[rng.randrange(len(elems))]


class RunTrace:
    def __init__(self, final, steps, terminated, seed):
        self.final = final
        self.steps = steps
        self.terminated = terminated
        self.seed = seed

    def __repr__(self):
        return "RunTrace(steps=%d, terminated=%s, seed=%s)" % (
            self.steps, self.terminated, self.seed)


class _Compiler:
    def __init__(self, cmd, env):
        self.env = env
        self.vars = sorted(cmd_vars(cmd))
        self.slot = {v: "V_%d" % i for i, v in enumerate(self.vars)}
        self.lines = []
        self.consts = {}

    def const(self, value, hint="K"):
        name = "_%s%d" % (hint, len(self.consts))
        self.consts[name] = value
        return name

    def emit(self, depth, text):
        self.lines.append("    " * depth + text)

    # -- expressions --------------------------------------------------------

    def expr(self, e):
        t = type(e)
        if t is Lit:
            return repr(e.value)
        if t is VarE:
            s = self.slot.get(e.var)
            if s is None:
                s = self.slot.setdefault(e.var, "V_%d" % len(self.slot))
                self.vars.append(e.var)
            return s
        if t is BinOp:
            a, op = self.expr(e.a), e.op
            if op in ("and", "or"):
                return "(%s %s %s)" % (a, op, self.expr(e.b))
            if op == "=>":
                return "((not %s) or %s)" % (a, self.expr(e.b))
            b = self.expr(e.b)
            if op == "=":
                return "(%s == %s)" % (a, b)
            if op == "/":
                return "_div(%s, %s)" % (a, b)
            if op == "%":
                return "_mod(%s, %s)" % (a, b)
            if op == "in":
                return "(%s in %s)" % (a, b)
            return "(%s %s %s)" % (a, op, b)
        if t is UnOp:
            if e.op == "not":
                return "(not %s)" % self.expr(e.a)
            return "(-%s)" % self.expr(e.a)
        if t is Call:
            fn = self.const(self.env.funcs[e.fn] if e.fn in self.env.funcs else self._hostfail(e.fn), "F")
            return "%s(%s)" % (fn, ", ".join(self.expr(a) for a in e.args))
        if t in (ListLit, SetLit):
            inner = ", ".join(self.expr(a) for a in e.items)
            return "(%s%s)" % (inner, "," if len(e.items) == 1 else "")
        if t is Index:
            return "_idx(%s, %s)" % (self.expr(e.map), self.expr(e.key))
        if t is Store:
            return "_store(%s, %s, %s)" % (self.expr(e.map), self.expr(e.key), self.expr(e.val))
        raise EvalError("cannot compile %r" % (e,))

    def _hostfail(self, name):
        raise EvalError("unknown host function %r" % name)

    # -- sampling -----------------------------------------------------------

    def draw(self, depth, dist, tmp):
        """Emit code assigning one draw from ``dist`` to local ``tmp``."""
        t = type(dist)
        if t is Uniform:
            self.emit(depth, "%s = _choice(_rng, %s)" % (tmp, self.expr(dist.set)))
        elif t is Dirac:
            self.emit(depth, "%s = %s" % (tmp, self.expr(dist.expr)))
        elif t is NamedDist:
            fn = self.const(self._named_sampler(dist), "D")
            self.emit(depth, "%s = %s(_rng, %s)" % (
                tmp, fn, ", ".join(self.expr(a) for a in dist.args)))
        else:
            raise EvalError("cannot compile a draw from %r" % (dist,))

    def _named_sampler(self, dist):
        fn = self.env.funcs.get("dist$" + dist.name)
        if fn is None:
            raise EvalError("unknown primitive distribution %r" % dist.name)

        def sample(rng, *args):
            mu = fn(*args)
            masses = mu.masses if hasattr(mu, "masses") else dict(mu)
            u = rng.random()
            acc = 0.0
            outcome = None
            for v, p in masses.items():
                acc += float(p)
                outcome = v
                if u < acc:
                    return v
            if acc < 1.0 - 1e-12:
                raise EvalError("cannot sample a sub-distribution operationally")
            return outcome

        return sample

    def stmt(self, depth, c):
        t = type(c)
        if t is Skip:
            return
        if t is Abort:
            self.emit(depth, "_terminated = False")
            self.emit(depth, "raise _Stop")
            return
        if t is Assign:
            self.emit(depth, "%s = %s" % (self.slot_of(c.var), self.expr(c.expr)))
            return
        if t is Sample:
            if not c.is_pair:
                self.draw(depth, c.dist, self.slot_of(c.target))
                return
            x, y = c.target
            if not isinstance(c.dist, Coupled):
                raise EvalError("pair sample needs a coupled distribution")
            s = c.dist.spec
            if s.kind == "id":
                self.draw(depth, s.left, self.slot_of(x))
                self.emit(depth, "%s = %s" % (self.slot_of(y), self.slot_of(x)))
            elif s.kind == "bij":
                fwd, _inv, argnames = self.env.bijection(s.fn)
                fc = self.const(fwd, "B")
                self.draw(depth, s.left, self.slot_of(x))
                args = "".join(", " + self.slot_of(_pv(a)) for a in argnames)
                self.emit(depth, "%s = %s(%s%s)" % (self.slot_of(y), fc, self.slot_of(x), args))
            elif s.kind == "prod":
                self.draw(depth, s.left, self.slot_of(x))
                self.draw(depth, s.right, self.slot_of(y))
            elif s.kind == "table":
                gen = self.env.table(s.table)
                fc = self.const(self._table_sampler(gen), "T")
                self.emit(depth, "%s, %s = %s(_rng, _mem())" % (
                    self.slot_of(x), self.slot_of(y), fc))
            else:
                raise EvalError("cannot compile coupling kind %r" % s.kind)
            return
        if t is Seq:
            self.stmt(depth, c.first)
            self.stmt(depth, c.second)
            return
        if t is Cond:
            self.emit(depth, "if %s:" % self.expr(c.guard))
            self.emit(depth + 1, "pass")
            self.stmt(depth + 1, c.then)
            self.emit(depth, "else:")
            self.emit(depth + 1, "pass")
            self.stmt(depth + 1, c.els)
            return
        if t is While:
            self.emit(depth, "while %s:" % self.expr(c.guard))
            self.emit(depth + 1, "if _steps >= _budget:")
            self.emit(depth + 2, "_terminated = False")
            self.emit(depth + 2, "raise _Stop")
            self.emit(depth + 1, "_steps += 1")
            self.stmt(depth + 1, c.body)
            if isinstance(c.body, Skip):
                self.emit(depth + 1, "pass")
            return
        raise EvalError("cannot compile %r" % (c,))

    def _table_sampler(self, gen):
        env = self.env

        def sample(rng, mem):
            entries = list(gen(mem, env))
            u = rng.random()
            acc = 0.0
            for (pair, p) in entries:
                acc += float(p)
                if u < acc:
                    return pair
            return entries[-1][0]

        return sample

    def slot_of(self, v):
        s = self.slot.get(v)
        if s is None:
            s = "V_%d" % len(self.slot)
            self.slot[v] = s
            self.vars.append(v)
        return s

    def build(self, cmd):
        self.stmt(1, cmd)
        body = self.lines
        self.lines = []
        # prologue/epilogue refer to the final variable set
        head = ["def _run(_m, _rng, _budget):",
                "    _steps = 0",
                "    _terminated = True"]
        needs_mem = any("_mem()" in ln for ln in body)
        for v in list(self.vars):
            head.append("    %s = _m.get(%s, _MISSING)" % (self.slot[v], self.const(v, "V")))
        if needs_mem:
            pairs = ", ".join("(%s, %s)" % (self.const(v, "V"), self.slot[v]) for v in self.vars)
            head.append("    _mem = lambda: _mkmem([%s])" % pairs)
        head.append("    try:")
        body = body or ["        pass"]
        body = ["    " + ln for ln in body]
        tail = ["    except _Stop:",
                "        pass",
                "    _out = {}"]
        for v in self.vars:
            tail.append("    if %s is not _MISSING: _out[%s] = %s" % (
                self.slot[v], self.const(v, "V"), self.slot[v]))
        tail.append("    return _out, _steps, _terminated")
        src = "\n".join(head + body + tail)
        glb = {
            "_MISSING": _MISSING, "_Stop": _Stop, "_choice": _choice,
            "_div": _div, "_mod": _mod, "_idx": _idx, "_store": _store,
            "_mkmem": _mkmem,
        }
        glb.update(self.consts)
        exec(compile(src, "<xprhl-sampler>", "exec"), glb)
        fn = glb["_run"]
        fn._source = src
        return fn


def _mkmem(pairs):
    return Memory({v: x for v, x in pairs if x is not _MISSING})


def _pv(name):
    from .lang import parse_var

    return parse_var(name)


_CACHE = {}


def compile_runner(cmd, env):
    """Compiled function (memory-dict, rng, budget) -> (dict, steps, ok)."""
    key = (cmd, id(env))
    fn = _CACHE.get(key)
    if fn is None:
        fn = _Compiler(cmd, env).build(cmd)
        _CACHE[key] = fn
    return fn


def exec_sample(cmd, m, env, seed=DEFAULT_SEED, budget=DEFAULT_BUDGET):
    """One operational run; deterministic for a fixed seed."""
    fn = compile_runner(cmd, env)
    rng = random.Random(seed)
    mdict = dict(m.items()) if isinstance(m, Memory) else dict(m)
    out, steps, ok = fn(mdict, rng, budget)
    return RunTrace(Memory(out), steps, ok, seed)


class _TrailRng:
    """Replays a fixed prefix of choices and records branching factors, so
    that every random-choice path of a compiled run can be enumerated."""

    __slots__ = ("trail", "factors", "i")

    def __init__(self, trail):
        self.trail = trail
        self.factors = []
        self.i = 0

    def randrange(self, n):
        i = self.i
        if i < len(self.trail):
            v = self.trail[i]
        else:
            v = 0
            self.trail.append(0)
        self.factors.append(n)
        self.i = i + 1
        return v

    def random(self):
        raise EvalError("cannot enumerate draws from a non-uniform sampler")


def enumerate_exact(cmd, m, env, budget=DEFAULT_BUDGET):
    """All (final-memory-dict, probability) paths of ``cmd`` from ``m``.

    Depth-first enumeration over the compiled runner's random choices; every
    path must terminate within the budget.  Probabilities are exact
    fractions.  Equivalent to the exact semantics on terminating programs,
    much faster on wide loop-free products.
    """
    from fractions import Fraction

    fn = compile_runner(cmd, env)
    mdict = dict(m.items()) if isinstance(m, Memory) else dict(m)
    out = []
    trail = []
    while True:
        rng = _TrailRng(trail)
        final, _steps, ok = fn(dict(mdict), rng, budget)
        if not ok:
            raise EvalError("non-terminating path during exact enumeration")
        p = Fraction(1)
        for f in rng.factors:
            p /= f
        out.append((final, p))
        # advance to the next untried choice path, deepest position first
        j = len(trail) - 1
        while j >= 0 and trail[j] + 1 >= rng.factors[j]:
            j -= 1
        if j < 0:
            break
        trail[j] += 1
        del trail[j + 1:]
    return out
