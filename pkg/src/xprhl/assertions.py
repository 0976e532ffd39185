"""Relational assertions and the finite state spaces they are checked over.

An assertion is an ordinary boolean expression over the paired memory.
Obligations are discharged by enumeration (verdict 'proved' when the
declared space is exhaustive) or by seeded random sampling (verdict
'evidence'); a counterexample always downgrades to 'refuted' and carries
the witness memory.
"""

import itertools
import random

from .lang import parse_var
from .parser import parse_expr
from .semantics import Memory, eval_expr

PROVED = "proved"
EVIDENCE = "evidence"
REFUTED = "refuted"


class SpaceError(Exception):
    pass


class VarDomain:
    """Finite domain for one variable: explicit values, an int range, or
    bounded-length lists over an element domain."""

    def __init__(self, values=None, list_elems=None, max_len=None):
        if values is not None:
            self.kind = "values"
            self.values = list(values)
        else:
            self.kind = "lists"
            self.elems = list(list_elems)
            self.max_len = max_len

    def enumerate(self):
        if self.kind == "values":
            return list(self.values)
        out = []
        for n in range(self.max_len + 1):
            for combo in itertools.product(self.elems, repeat=n):
                out.append(tuple(combo))
        return out

    def sample(self, rng):
        if self.kind == "values":
            return self.values[rng.randrange(len(self.values))]
        n = rng.randrange(self.max_len + 1)
        return tuple(self.elems[rng.randrange(len(self.elems))] for _ in range(n))

    @classmethod
    def from_json(cls, spec):
        if "const" in spec:
            return cls(values=[_load_value(spec["const"])])
        if "bool" in spec:
            return cls(values=[False, True])
        if "int" in spec:
            v = spec["int"]
            if isinstance(v, dict):
                return cls(values=list(range(v["lo"], v["hi"] + 1)))
            return cls(values=list(v))
        if "values" in spec:
            return cls(values=[_load_value(x) for x in spec["values"]])
        if "list" in spec:
            return cls(list_elems=spec["list"]["elems"], max_len=spec["list"]["max_len"])
        raise SpaceError("bad domain spec %r" % (spec,))


def _load_value(v):
    if isinstance(v, list):
        return tuple(_load_value(x) for x in v)
    return v


class StateSpace:
    """Declared per-variable domains plus an optional filter assertion.

    mode 'enumerate' is exhaustive; mode 'sample' draws ``samples`` states
    with a seeded RNG and can only ever yield evidence-grade verdicts.
    A host ``generator`` (name resolved through the environment) may
    replace per-variable enumeration for correlated domains.
    """

    def __init__(self, domains=None, filter=None, mode="enumerate",
                 samples=2000, seed=0xC0FFEE, generator=None, exhaustive_generator=True):
        self.domains = dict(domains or {})
        self.filter = filter
        self.mode = mode
        self.samples = samples
        self.seed = seed
        self.generator = generator
        self.exhaustive_generator = exhaustive_generator

    @property
    def exhaustive(self):
        if self.generator is not None:
            return self.exhaustive_generator
        return self.mode == "enumerate"

    @classmethod
    def from_json(cls, spec):
        doms = {parse_var(name): VarDomain.from_json(d)
                for name, d in spec.get("vars", {}).items()}
        filt = parse_expr(spec["filter"]) if spec.get("filter") else None
        mode = spec.get("mode", "enumerate")
        return cls(
            domains=doms,
            filter=filt,
            mode=mode,
            samples=spec.get("samples", 2000),
            seed=spec.get("seed", 0xC0FFEE),
            generator=spec.get("generator"),
            exhaustive_generator=spec.get("exhaustive_generator", True),
        )

    def raw_states(self, env):
        """States before the filter is applied."""
        if self.generator is not None:
            yield from env.generator(self.generator)(env)
            return
        names = sorted(self.domains, key=lambda v: (v.name, v.tag or ""))
        if self.mode == "enumerate":
            doms = [self.domains[v].enumerate() for v in names]
            for combo in itertools.product(*doms):
                yield Memory(dict(zip(names, combo)))
        elif self.mode == "sample":
            rng = random.Random(self.seed)
            for _ in range(self.samples):
                yield Memory({v: self.domains[v].sample(rng) for v in names})
        else:
            raise SpaceError("unknown mode %r" % self.mode)

    def states(self, env, extra_filter=None):
        for m in self.raw_states(env):
            if self.filter is not None and not eval_expr(self.filter, m, env):
                continue
            if extra_filter is not None and not eval_expr(extra_filter, m, env):
                continue
            yield m


class ValidityReport:
    def __init__(self, verdict, checked, counterexample=None, detail=None):
        self.verdict = verdict
        self.checked = checked
        self.counterexample = counterexample
        self.detail = detail

    @property
    def ok(self):
        return self.verdict in (PROVED, EVIDENCE)

    def __repr__(self):
        if self.counterexample is not None:
            return "ValidityReport(%s, checked=%d, cex=%r)" % (
                self.verdict, self.checked, self.counterexample)
        return "ValidityReport(%s, checked=%d)" % (self.verdict, self.checked)


def eval_assertion(phi, m, env):
    v = eval_expr(phi, m, env)
    if not isinstance(v, bool):
        raise SpaceError("assertion did not evaluate to a boolean: %r" % (v,))
    return v


def check_implication(phi, psi, space, env):
    """phi ==> psi over the declared space."""
    n = 0
    for m in space.states(env, extra_filter=phi):
        n += 1
        if not eval_assertion(psi, m, env):
            return ValidityReport(REFUTED, n, counterexample=m)
    return ValidityReport(PROVED if space.exhaustive else EVIDENCE, n)


def check_valid(phi, space, env):
    n = 0
    for m in space.states(env):
        n += 1
        if not eval_assertion(phi, m, env):
            return ValidityReport(REFUTED, n, counterexample=m)
    return ValidityReport(PROVED if space.exhaustive else EVIDENCE, n)


def check_unsat(phi, space, env):
    """No state of the space satisfies phi."""
    n = 0
    for m in space.states(env):
        n += 1
        if eval_assertion(phi, m, env):
            return ValidityReport(REFUTED, n, counterexample=m)
    return ValidityReport(PROVED if space.exhaustive else EVIDENCE, n)


def check_exclusive(preds, phi, space, env):
    """Exactly one of ``preds`` holds in every phi-state of the space."""
    n = 0
    for m in space.states(env, extra_filter=phi):
        n += 1
        holds = sum(1 for p in preds if eval_assertion(p, m, env))
        if holds != 1:
            return ValidityReport(
                REFUTED, n, counterexample=m,
                detail="%d of the predicates hold" % holds)
    return ValidityReport(PROVED if space.exhaustive else EVIDENCE, n)
