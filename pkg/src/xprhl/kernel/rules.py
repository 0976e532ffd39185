"""The relational proof checker: rule-by-rule validation and product
extraction.

A derivation is a tree of nodes, each carrying its full conclusion
(left/right commands, pre- and post-assertion), a rule name, a payload and
children.  ``check`` validates every node against its rule, discharges the
side conditions over the ambient state space and assembles the product
program encoded by the derivation.  The result is a report whose status is
``accepted`` (all obligations proved), ``accepted-with-evidence`` (some
obligation only sampled/approximate) or ``rejected``.
"""

from ..lang import (
    LEFT, RIGHT, Assign, BinOp, Cond, Coupled, CouplingSpec, Lit, Sample,
    Skip, While, cmd_vars, conj, desugar_bounded_for, expr_vars,
    flatten, fmt_cmd, fmt_expr, fresh_counter, neg, normalize, seq,
    subst_expr,
)
from ..assertions import (
    EVIDENCE, PROVED, REFUTED, check_exclusive,
    check_implication, check_unsat, eval_assertion,
)
from ..coupling import CouplingError, realize
from ..semantics import (
    DEFAULT_SUPPORT_CAP, DEFAULT_UNROLL, check_lossless, eval_dist,
    exec_exact, project_marginal,
)
from .equiv import EquivError, Rewriter, refl

ACCEPTED = "accepted"
ACCEPTED_EVIDENCE = "accepted-with-evidence"
REJECTED = "rejected"

KERNEL_RULES = ("Conseq", "False", "Struct", "Case", "Assg", "Rand", "Seq", "While")
DERIVED_RULES = ("Skip", "AssgL", "AssgR", "RandL", "RandR",
                 "CondL", "CondR", "CondS", "WhileL", "WhileR", "WhileS")


class KernelError(Exception):
    pass


class Judgment:
    def __init__(self, c1, c2, pre, post):
        self.c1 = normalize(c1)
        self.c2 = normalize(c2)
        self.pre = pre
        self.post = post

    def __eq__(self, o):
        return (isinstance(o, Judgment) and o.c1 == self.c1 and o.c2 == self.c2
                and o.pre == self.pre and o.post == self.post)

    def __repr__(self):
        return "Judgment(%s ~ %s : %s => %s)" % (
            fmt_cmd(self.c1).replace("\n", " "), fmt_cmd(self.c2).replace("\n", " "),
            fmt_expr(self.pre), fmt_expr(self.post))


class Derivation:
    def __init__(self, rule, concl, payload=None, children=None):
        self.rule = rule
        self.concl = concl
        self.payload = payload or {}
        self.children = children or []

    def __repr__(self):
        return "Derivation(%s, %r, %d children)" % (self.rule, self.concl, len(self.children))


class Obligation:
    def __init__(self, path, desc, verdict, detail=None, checked=0):
        self.path = path
        self.desc = desc
        self.verdict = verdict  # proved | evidence | refuted
        self.detail = detail
        self.checked = checked

    def __repr__(self):
        s = "[%s] %s: %s" % (self.path, self.desc, self.verdict)
        if self.detail:
            s += " (%s)" % (self.detail,)
        return s


class CheckReport:
    def __init__(self, judgment, product, obligations, error=None):
        self.judgment = judgment
        self.product = product
        self.obligations = obligations
        self.error = error

    @property
    def status(self):
        if self.error is not None:
            return REJECTED
        if any(o.verdict == REFUTED for o in self.obligations):
            return REJECTED
        if any(o.verdict == EVIDENCE for o in self.obligations):
            return ACCEPTED_EVIDENCE
        return ACCEPTED

    @property
    def accepted(self):
        return self.status in (ACCEPTED, ACCEPTED_EVIDENCE)

    def failures(self):
        return [o for o in self.obligations if o.verdict == REFUTED]

    def __repr__(self):
        return "CheckReport(%s, %d obligations)" % (self.status, len(self.obligations))


class CheckContext:
    def __init__(self, space, env, unroll=DEFAULT_UNROLL, tol=0,
                 support_cap=DEFAULT_SUPPORT_CAP, assume_lossless=False,
                 semantic_struct=True, semantic_states=50, depth=0):
        self.space = space
        self.env = env
        self.unroll = unroll
        self.tol = tol
        self.support_cap = support_cap
        self.assume_lossless = assume_lossless
        self.semantic_struct = semantic_struct
        self.semantic_states = semantic_states
        self.depth = depth

    def deeper(self):
        c = CheckContext(self.space, self.env, self.unroll, self.tol,
                         self.support_cap, self.assume_lossless,
                         self.semantic_struct, self.semantic_states,
                         self.depth + 1)
        return c


def _from_validity(path, desc, rep):
    return Obligation(path, desc, rep.verdict, detail=(
        "counterexample %r" % rep.counterexample if rep.counterexample is not None else rep.detail),
        checked=rep.checked)


def _expect(cond, msg):
    if not cond:
        raise KernelError(msg)


def _expect_judgment(path, child, expected):
    if child.concl != expected:
        raise KernelError(
            "%s: child conclusion mismatch:\n  stated   %r\n  expected %r"
            % (path, child.concl, expected))


def check(deriv, ctx, path="root", toplevel=True):
    """Validate a derivation and extract its product program."""
    if toplevel:
        j = deriv.concl
        shared = cmd_vars(j.c1) & cmd_vars(j.c2)
        if shared:
            return CheckReport(j, None, [], error="programs are not separable; shared variables: %s"
                               % sorted(map(str, shared)))
        try:
            product, obs = _check(deriv, ctx, path)
        except (KernelError, EquivError, CouplingError) as e:
            return CheckReport(j, None, [], error=str(e))
        return CheckReport(j, product, obs)
    return _check(deriv, ctx, path)


def _check(deriv, ctx, path):
    fn = _RULES.get(deriv.rule)
    if fn is None:
        raise KernelError("%s: unknown rule %r" % (path, deriv.rule))
    return fn(deriv, ctx, path)


def _check_child(deriv, i, expected, ctx, path):
    _expect(len(deriv.children) > i, "%s: missing child %d" % (path, i))
    child = deriv.children[i]
    cpath = "%s/%s[%d]" % (path, deriv.rule, i)
    if expected is not None:
        _expect_judgment(cpath, child, expected)
    return _check(child, ctx, cpath)


# -- leaf rules -------------------------------------------------------------

def _rule_assg(deriv, ctx, path, left=True, right=True):
    j = deriv.concl
    subst = {}
    parts = []
    if left:
        _expect(isinstance(j.c1, Assign), "%s: left command must be an assignment" % path)
        subst[j.c1.var] = j.c1.expr
        parts.append(j.c1)
    else:
        _expect(isinstance(j.c1, Skip), "%s: left command must be skip" % path)
    if right:
        _expect(isinstance(j.c2, Assign), "%s: right command must be an assignment" % path)
        subst[j.c2.var] = j.c2.expr
        parts.append(j.c2)
    else:
        _expect(isinstance(j.c2, Skip), "%s: right command must be skip" % path)
    want = subst_expr(j.post, subst)
    obs = []
    if j.pre != want:
        # allow any pre that entails the substituted post
        obs.append(_from_validity(path, "pre implies substituted post",
                                  check_implication(j.pre, want, ctx.space, ctx.env)))
    return seq(*parts), obs


def _rule_rand_one_sided(deriv, ctx, path, side):
    j = deriv.concl
    c, other = (j.c1, j.c2) if side == LEFT else (j.c2, j.c1)
    _expect(isinstance(c, Sample) and not c.is_pair,
            "%s: expected a single-variable sample" % path)
    _expect(isinstance(other, Skip), "%s: other side must be skip" % path)
    x, g = c.target, c.dist
    n = 0
    bad = None
    for m in ctx.space.states(ctx.env, extra_filter=j.pre):
        n += 1
        mu = eval_dist(g, m, ctx.env)
        if mu.weight != 1:
            bad = (m, "distribution has weight %s (must be lossless)" % mu.weight)
            break
        stop = False
        for v in mu.support():
            if not eval_assertion(j.post, m.set(x, v), ctx.env):
                bad = (m, "support value %r violates the postcondition" % (v,))
                stop = True
                break
        if stop:
            break
    if bad is not None:
        ob = Obligation(path, "one-sided sampling establishes the post", REFUTED,
                        detail="%s in state %r" % (bad[1], bad[0]), checked=n)
    else:
        ob = Obligation(path, "one-sided sampling establishes the post",
                        PROVED if ctx.space.exhaustive else EVIDENCE, checked=n)
    return c, [ob]


def _rule_rand(deriv, ctx, path):
    j = deriv.concl
    _expect(isinstance(j.c1, Sample) and not j.c1.is_pair,
            "%s: left command must be a sample" % path)
    _expect(isinstance(j.c2, Sample) and not j.c2.is_pair,
            "%s: right command must be a sample" % path)
    x1, g1 = j.c1.target, j.c1.dist
    x2, g2 = j.c2.target, j.c2.dist
    p = deriv.payload
    spec = CouplingSpec(p["kind"], g1, g2, fn=p.get("fn"), table=p.get("table"))
    n = 0
    bad = None
    for m in ctx.space.states(ctx.env, extra_filter=j.pre):
        n += 1
        try:
            joint = realize(spec, m, ctx.env)
        except CouplingError as e:
            bad = (m, str(e))
            break
        stop = False
        for (v1, v2) in joint.support():
            if not eval_assertion(j.post, m.set_many(((x1, v1), (x2, v2))), ctx.env):
                bad = (m, "coupled pair (%r, %r) violates the postcondition" % (v1, v2))
                stop = True
                break
        if stop:
            break
    if bad is not None:
        ob = Obligation(path, "coupling is valid and supported in the post", REFUTED,
                        detail="%s in state %r" % (bad[1], bad[0]), checked=n)
    else:
        ob = Obligation(path, "coupling is valid and supported in the post",
                        PROVED if ctx.space.exhaustive else EVIDENCE, checked=n)
    return Sample((x1, x2), Coupled(spec)), [ob]


def _rule_skip(deriv, ctx, path):
    j = deriv.concl
    _expect(isinstance(j.c1, Skip) and isinstance(j.c2, Skip),
            "%s: both commands must be skip" % path)
    obs = []
    if j.pre != j.post:
        obs.append(_from_validity(path, "pre implies post",
                                  check_implication(j.pre, j.post, ctx.space, ctx.env)))
    return Skip(), obs


def _rule_false(deriv, ctx, path):
    j = deriv.concl
    if j.pre == Lit(False):
        return Skip(), []
    rep = check_unsat(j.pre, ctx.space, ctx.env)
    return Skip(), [_from_validity(path, "precondition is unsatisfiable", rep)]


# -- structural rules -------------------------------------------------------

def _rule_conseq(deriv, ctx, path):
    j = deriv.concl
    _expect(len(deriv.children) == 1, "%s: Conseq needs one child" % path)
    child = deriv.children[0]
    cj = child.concl
    _expect(cj.c1 == j.c1 and cj.c2 == j.c2,
            "%s: Conseq must not change the programs" % path)
    product, obs = _check(child, ctx, path + "/Conseq[0]")
    obs = list(obs)
    if j.pre != cj.pre:
        obs.append(_from_validity(path, "stronger pre implies child pre",
                                  check_implication(j.pre, cj.pre, ctx.space, ctx.env)))
    if j.post != cj.post:
        obs.append(_from_validity(path, "child post implies weaker post",
                                  check_implication(cj.post, j.post, ctx.space, ctx.env)))
    return product, obs


def _rule_case(deriv, ctx, path):
    j = deriv.concl
    e = deriv.payload["e"]
    _expect(len(deriv.children) == 2, "%s: Case needs two children" % path)
    p1, o1 = _check_child(deriv, 0, Judgment(j.c1, j.c2, conj(j.pre, e), j.post), ctx, path)
    p2, o2 = _check_child(deriv, 1, Judgment(j.c1, j.c2, conj(j.pre, neg(e)), j.post), ctx, path)
    return Cond(e, p1, p2), o1 + o2


def _rule_seq(deriv, ctx, path):
    j = deriv.concl
    _expect(len(deriv.children) == 2, "%s: Seq needs two children" % path)
    a, b = deriv.children
    ja, jb = a.concl, b.concl
    _expect(ja.pre == j.pre, "%s: first child pre must be the conclusion pre" % path)
    _expect(jb.post == j.post, "%s: second child post must be the conclusion post" % path)
    _expect(ja.post == jb.pre, "%s: children must agree on the midpoint assertion" % path)
    _expect(flatten(ja.c1) + flatten(jb.c1) == flatten(j.c1),
            "%s: left commands do not compose to the conclusion" % path)
    _expect(flatten(ja.c2) + flatten(jb.c2) == flatten(j.c2),
            "%s: right commands do not compose to the conclusion" % path)
    pa, oa = _check(a, ctx, path + "/Seq[0]")
    pb, ob = _check(b, ctx, path + "/Seq[1]")
    return seq(pa, pb), oa + ob


def _rule_struct(deriv, ctx, path):
    j = deriv.concl
    _expect(len(deriv.children) == 1, "%s: Struct needs one child" % path)
    child = deriv.children[0]
    cj = child.concl
    _expect(cj.pre == j.pre and cj.post == j.post,
            "%s: Struct must preserve the pre and post" % path)
    product, obs = _check(child, ctx, path + "/Struct[0]")
    obs = list(obs)
    p = deriv.payload
    eq1 = p.get("c1_equiv") or refl()
    eq2 = p.get("c2_equiv") or refl()
    eqc = p.get("c_equiv") or refl()
    phi = j.pre
    for desc, node, src, want in (
        ("left program rewrite", eq1, cj.c1, j.c1),
        ("right program rewrite", eq2, cj.c2, j.c2),
    ):
        obs.extend(_do_rewrite(path, desc, node, phi, src, want, ctx))
    rw = Rewriter(ctx.space, ctx.env)
    new_product = normalize(rw.apply(eqc, phi, product))
    for d, rep in rw.obligations:
        obs.append(_from_validity(path, "product rewrite: " + d, rep))
    if ctx.semantic_struct:
        obs.append(_semantic_equiv_ob(path, "product rewrite preserves semantics",
                                      phi, product, new_product, ctx))
    return new_product, obs


def _do_rewrite(path, desc, node, phi, src, want, ctx):
    obs = []
    rw = Rewriter(ctx.space, ctx.env)
    got = normalize(rw.apply(node, phi, src))
    for d, rep in rw.obligations:
        obs.append(_from_validity(path, "%s: %s" % (desc, d), rep))
    if got != normalize(want):
        raise KernelError("%s: %s does not produce the conclusion program:\n  got      %s\n  expected %s"
                          % (path, desc, fmt_cmd(got), fmt_cmd(normalize(want))))
    if ctx.semantic_struct:
        obs.append(_semantic_equiv_ob(path, desc + " preserves semantics", phi, src, got, ctx))
    return obs


def _semantic_equiv_ob(path, desc, phi, c1, c2, ctx):
    """Defense in depth: exact agreement of the two programs on a bounded
    prefix of the reachable phi-states."""
    if normalize(c1) == normalize(c2):
        return Obligation(path, desc, PROVED, detail="syntactically equal", checked=0)
    n = 0
    for m in ctx.space.states(ctx.env, extra_filter=phi):
        if n >= ctx.semantic_states:
            break
        n += 1
        # fresh loop counters are bookkeeping, not program state
        obs_vars = frozenset(v for v in m if not v.name.startswith("__for"))
        r1 = exec_exact(c1, m, ctx.env, unroll=ctx.unroll, support_cap=ctx.support_cap)
        r2 = exec_exact(c2, m, ctx.env, unroll=ctx.unroll, support_cap=ctx.support_cap)
        if not (r1.converged and r2.converged):
            continue
        d1 = project_marginal(r1.dist, obs_vars)
        d2 = project_marginal(r2.dist, obs_vars)
        if d1.masses != d2.masses:
            return Obligation(path, desc, REFUTED,
                              detail="semantic disagreement from state %r" % (m,), checked=n)
    # a bounded semantic check is never a proof by itself
    return Obligation(path, desc, EVIDENCE, checked=n)


# -- conditionals -----------------------------------------------------------

def _rule_cond_l(deriv, ctx, path):
    j = deriv.concl
    _expect(isinstance(j.c1, Cond), "%s: left command must be a conditional" % path)
    e = j.c1.guard
    p1, o1 = _check_child(deriv, 0, Judgment(j.c1.then, j.c2, conj(j.pre, e), j.post), ctx, path)
    p2, o2 = _check_child(deriv, 1, Judgment(j.c1.els, j.c2, conj(j.pre, neg(e)), j.post), ctx, path)
    return Cond(e, p1, p2), o1 + o2


def _rule_cond_r(deriv, ctx, path):
    j = deriv.concl
    _expect(isinstance(j.c2, Cond), "%s: right command must be a conditional" % path)
    e = j.c2.guard
    p1, o1 = _check_child(deriv, 0, Judgment(j.c1, j.c2.then, conj(j.pre, e), j.post), ctx, path)
    p2, o2 = _check_child(deriv, 1, Judgment(j.c1, j.c2.els, conj(j.pre, neg(e)), j.post), ctx, path)
    return Cond(e, p1, p2), o1 + o2


def _rule_cond_s(deriv, ctx, path):
    j = deriv.concl
    _expect(isinstance(j.c1, Cond) and isinstance(j.c2, Cond),
            "%s: both commands must be conditionals" % path)
    e1, e2 = j.c1.guard, j.c2.guard
    obs = [_from_validity(path, "guards agree under the pre",
                          check_implication(j.pre, BinOp("=", e1, e2), ctx.space, ctx.env))]
    p1, o1 = _check_child(deriv, 0, Judgment(j.c1.then, j.c2.then, conj(j.pre, e1), j.post), ctx, path)
    p2, o2 = _check_child(deriv, 1, Judgment(j.c1.els, j.c2.els, conj(j.pre, neg(e1)), j.post), ctx, path)
    return Cond(e1, p1, p2), obs + o1 + o2


# -- loops ------------------------------------------------------------------

def _lossless_ob(path, desc, loop, inv, ctx):
    states = ctx.space.states(ctx.env, extra_filter=inv)
    rep = check_lossless(loop, states, ctx.env, unroll=ctx.unroll,
                         support_cap=ctx.support_cap, exhaustive=ctx.space.exhaustive)
    if rep.verdict == "proved":
        return Obligation(path, desc, PROVED, checked=rep.states_checked)
    if rep.verdict == "evidence" and ctx.assume_lossless:
        return Obligation(path, desc, EVIDENCE, checked=rep.states_checked,
                          detail="worst weight %s (accepted under --assume-lossless)" % rep.worst_weight)
    return Obligation(path, desc, REFUTED, checked=rep.states_checked,
                      detail="worst weight %s at %r" % (rep.worst_weight, rep.witness))


def _rule_while_l(deriv, ctx, path, side=LEFT):
    j = deriv.concl
    loop, other = (j.c1, j.c2) if side == LEFT else (j.c2, j.c1)
    _expect(isinstance(loop, While), "%s: expected a loop" % path)
    _expect(isinstance(other, Skip), "%s: other side must be skip" % path)
    e1, b1 = loop.guard, loop.body
    psi = j.pre
    _expect(j.post == conj(psi, neg(e1)),
            "%s: post must be the invariant plus loop exit" % path)
    expected = (Judgment(b1, Skip(), conj(psi, e1), psi) if side == LEFT
                else Judgment(Skip(), b1, conj(psi, e1), psi))
    p, obs = _check_child(deriv, 0, expected, ctx.deeper(), path)
    obs = obs + [_lossless_ob(path, "one-sided loop is lossless under the invariant",
                              loop, psi, ctx)]
    return While(e1, p), obs


def _rule_while_s(deriv, ctx, path):
    j = deriv.concl
    _expect(isinstance(j.c1, While) and isinstance(j.c2, While),
            "%s: both commands must be loops" % path)
    e1, b1 = j.c1.guard, j.c1.body
    e2, b2 = j.c2.guard, j.c2.body
    psi = j.pre
    _expect(j.post == conj(psi, neg(e1)),
            "%s: post must be the invariant plus loop exit" % path)
    obs = [_from_validity(path, "guards agree under the invariant",
                          check_implication(psi, BinOp("=", e1, e2), ctx.space, ctx.env))]
    p, o = _check_child(deriv, 0, Judgment(b1, b2, conj(psi, e1), psi), ctx.deeper(), path)
    return While(e1, p), obs + o


def _rule_while(deriv, ctx, path):
    j = deriv.concl
    _expect(isinstance(j.c1, While) and isinstance(j.c2, While),
            "%s: both commands must be loops" % path)
    e1, b1 = j.c1.guard, j.c1.body
    e2, b2 = j.c2.guard, j.c2.body
    psi = j.pre
    p = deriv.payload
    e, p0, p1, p2 = p["e"], p["p0"], p["p1"], p["p2"]
    k1, k2 = p["k1"], p["k2"]
    _expect(j.post == conj(psi, neg(e1), neg(e2)),
            "%s: post must be the invariant plus both loop exits" % path)
    obs = [
        _from_validity(path, "iteration counts are positive",
                       check_implication(psi, conj(BinOp(">", k1, Lit(0)), BinOp(">", k2, Lit(0))),
                                         ctx.space, ctx.env)),
        _from_validity(path, "combined guard agrees with the disjunction",
                       check_implication(psi, BinOp("=", BinOp("or", e1, e2), e),
                                         ctx.space, ctx.env)),
        _from_validity(path, "exactly one phase predicate holds",
                       check_exclusive([p0, p1, p2], conj(psi, e), ctx.space, ctx.env)),
        _from_validity(path, "synchronous phase has equal guards",
                       check_implication(conj(psi, p0, e), BinOp("=", e1, e2), ctx.space, ctx.env)),
        _from_validity(path, "left phase has the left guard",
                       check_implication(conj(psi, p1, e), e1, ctx.space, ctx.env)),
        _from_validity(path, "right phase has the right guard",
                       check_implication(conj(psi, p2, e), e2, ctx.space, ctx.env)),
        _lossless_ob(path, "left one-sided phase loop is lossless",
                     While(BinOp("and", e1, p1), b1), psi, ctx),
        _lossless_ob(path, "right one-sided phase loop is lossless",
                     While(BinOp("and", e2, p2), b2), psi, ctx),
    ]
    depth = ctx.depth + 1
    ctr1 = fresh_counter(depth, LEFT)
    ctr2 = fresh_counter(depth, RIGHT)
    for1 = desugar_bounded_for(b1, e1, k1, ctr1)
    for2 = desugar_bounded_for(b2, e2, k2, ctr2)
    dctx = ctx.deeper()
    # Note: the synchronous child is taken under psi & p0 & e.  The loop
    # body only runs when the combined guard holds, so this is what
    # soundness needs; it also makes guard-dependent rewrites inside the
    # child derivable.
    c0, o0 = _check_child(deriv, 0, Judgment(for1, for2, conj(psi, p0, e), psi), dctx, path)
    c1p, o1 = _check_child(deriv, 1, Judgment(b1, Skip(), conj(psi, e1, p1), psi), dctx, path)
    c2p, o2 = _check_child(deriv, 2, Judgment(Skip(), b2, conj(psi, e2, p2), psi), dctx, path)
    product = While(e, Cond(p0, c0, Cond(p1, c1p, c2p)))
    return product, obs + o0 + o1 + o2


_RULES = {
    "Assg": lambda d, c, p: _rule_assg(d, c, p, True, True),
    "AssgL": lambda d, c, p: _rule_assg(d, c, p, True, False),
    "AssgR": lambda d, c, p: _rule_assg(d, c, p, False, True),
    "Rand": _rule_rand,
    "RandL": lambda d, c, p: _rule_rand_one_sided(d, c, p, LEFT),
    "RandR": lambda d, c, p: _rule_rand_one_sided(d, c, p, RIGHT),
    "Skip": _rule_skip,
    "False": _rule_false,
    "Conseq": _rule_conseq,
    "Case": _rule_case,
    "Seq": _rule_seq,
    "Struct": _rule_struct,
    "CondL": _rule_cond_l,
    "CondR": _rule_cond_r,
    "CondS": _rule_cond_s,
    "WhileL": lambda d, c, p: _rule_while_l(d, c, p, LEFT),
    "WhileR": lambda d, c, p: _rule_while_l(d, c, p, RIGHT),
    "WhileS": _rule_while_s,
    "While": _rule_while,
}


def seq_compose(d1, d2):
    """Interleave a left-only derivation with a right-only one.

    From d1 : c1 ~ skip : pre => mid and d2 : skip ~ c2 : mid => post,
    build the Seq derivation concluding c1 ~ c2 : pre => post.
    """
    j1, j2 = d1.concl, d2.concl
    _expect(isinstance(j1.c2, Skip), "seq_compose: first derivation must have skip on the right")
    _expect(isinstance(j2.c1, Skip), "seq_compose: second derivation must have skip on the left")
    _expect(j1.post == j2.pre, "seq_compose: derivations must agree on the midpoint assertion")
    return Derivation("Seq", Judgment(j1.c1, j2.c2, j1.pre, j2.post),
                      children=[d1, d2])


# ---------------------------------------------------------------------------
# Product normalization for golden comparisons


def _counter_vars(c):
    return {v for v in cmd_vars(c) if v.name.startswith("__for")}


def _reads(c, acc):
    """Variables read anywhere, except in the right-hand side of an
    assignment to the same variable (self-increments do not keep a counter
    alive)."""
    t = type(c)
    if t is Assign:
        acc |= {v for v in expr_vars(c.expr) if v != c.var}
    elif t is Sample:
        from ..lang import dist_vars
        acc |= dist_vars(c.dist)
    elif t is Cond:
        acc |= expr_vars(c.guard)
        _reads(c.then, acc)
        _reads(c.els, acc)
    elif t is While:
        acc |= expr_vars(c.guard)
        _reads(c.body, acc)
    elif hasattr(c, "first"):
        _reads(c.first, acc)
        _reads(c.second, acc)
    return acc


def _drop_assigns(c, dead):
    t = type(c)
    if t is Assign and c.var in dead:
        return Skip()
    if t is Cond:
        return Cond(c.guard, _drop_assigns(c.then, dead), _drop_assigns(c.els, dead))
    if t is While:
        return While(c.guard, _drop_assigns(c.body, dead))
    if hasattr(c, "first"):
        from ..lang import Seq as _Seq
        return _Seq(_drop_assigns(c.first, dead), _drop_assigns(c.second, dead))
    return c


def normalize_product(c):
    """Canonical form for comparing products against golden listings:
    write-only bounded-for counters are removed (they are artifacts of the
    counter construction), and the remaining ones are renamed in order of
    first appearance."""
    c = normalize(c)
    reads = _reads(c, set())
    dead = {v for v in _counter_vars(c) if v not in reads}
    if dead:
        c = normalize(_drop_assigns(c, dead))
    order = []

    def visit(v):
        if v.name.startswith("__for") and v not in order:
            order.append(v)
        return v

    from ..lang import map_cmd_vars
    map_cmd_vars(c, visit)
    ren = {v: type(v)("__for%d" % (i + 1), v.tag) for i, v in enumerate(order)}
    if ren:
        c = map_cmd_vars(c, lambda v: ren.get(v, v))
    return normalize(c)
