"""Semantic validation of extracted products.

For every pre-state in the declared space, the product must be a coupling
of the two sides: its left marginal (projected onto the left program's
variables) must equal the left program run on the left half of the memory,
symmetrically on the right, and every memory in its support must satisfy
the postcondition.  All comparisons are exact.
"""

from ..lang import LEFT, RIGHT, cmd_vars
from ..assertions import eval_assertion
from ..semantics import (
    DEFAULT_SUPPORT_CAP, DEFAULT_UNROLL, exec_exact, project_marginal,
)


class StateResult:
    def __init__(self, state, ok, detail=None):
        self.state = state
        self.ok = ok
        self.detail = detail

    def __repr__(self):
        return "StateResult(ok=%s%s)" % (self.ok, ", " + self.detail if self.detail else "")


class SoundnessReport:
    def __init__(self, results, exhaustive, converged):
        self.results = results
        self.exhaustive = exhaustive
        self.converged = converged

    @property
    def ok(self):
        return all(r.ok for r in self.results) and self.converged

    @property
    def states_checked(self):
        return len(self.results)

    def first_failure(self):
        for r in self.results:
            if not r.ok:
                return r
        return None

    def __repr__(self):
        return "SoundnessReport(ok=%s, states=%d, converged=%s)" % (
            self.ok, self.states_checked, self.converged)


def _side_vars(c, side):
    return {v for v in cmd_vars(c) if v.tag == side}


def validate_product(judgment, product, space, env, unroll=DEFAULT_UNROLL,
                     support_cap=DEFAULT_SUPPORT_CAP, max_states=None):
    """Exact marginal and support validation of a product program."""
    v1 = cmd_vars(judgment.c1)
    v2 = cmd_vars(judgment.c2)
    results = []
    converged = True
    truncated = False
    for m in space.states(env, extra_filter=judgment.pre):
        if max_states is not None and len(results) >= max_states:
            truncated = True
            break
        m1 = m.restrict({v for v in m if v.tag == LEFT})
        m2 = m.restrict({v for v in m if v.tag == RIGHT})
        rp = exec_exact(product, m, env, unroll=unroll, support_cap=support_cap)
        r1 = exec_exact(judgment.c1, m1, env, unroll=unroll, support_cap=support_cap)
        r2 = exec_exact(judgment.c2, m2, env, unroll=unroll, support_cap=support_cap)
        if not (rp.converged and r1.converged and r2.converged):
            converged = False
            results.append(StateResult(m, False, "not converged at unroll %d" % unroll))
            continue
        ok = True
        detail = None
        got1 = project_marginal(rp.dist, v1)
        want1 = project_marginal(r1.dist, v1)
        if got1.masses != want1.masses:
            ok, detail = False, "left marginal differs"
        if ok:
            got2 = project_marginal(rp.dist, v2)
            want2 = project_marginal(r2.dist, v2)
            if got2.masses != want2.masses:
                ok, detail = False, "right marginal differs"
        if ok:
            for out in rp.dist.support():
                if not eval_assertion(judgment.post, out, env):
                    ok, detail = False, "support memory %r violates the post" % (out,)
                    break
        results.append(StateResult(m, ok, detail))
    return SoundnessReport(results, space.exhaustive and not truncated, converged)
