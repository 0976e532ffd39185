"""Program-equivalence rewriting used by the structural rule.

An equivalence derivation is a tree of directed rewrite steps applied to a
command under a context assertion.  Side conditions (guard truth, trivial
assignments) are discharged over the ambient state space.  Sequencing is
normalized throughout (skip units and associativity are definitional), so
the skip-unit equivalences are represented but trivial.

Rewriting a non-head position of a sequence, per the congruence rules,
only carries the trivial context ``true``; the head position keeps the
full context assertion.
"""

from ..lang import (
    Assign, BinOp, Cond, Coupled, Dirac, Lit, Sample, Seq,
    Skip, TRUE, VarE, While, cmd_vars, conj, dist_vars, expr_vars, flatten,
    neg, normalize, seq,
)
from ..assertions import check_implication


class EquivError(Exception):
    pass


class EquivNode:
    def __init__(self, kind, sub=None, subs=None, then=None, els=None,
                 at=None, target=None):
        self.kind = kind
        self.sub = sub
        self.subs = subs
        self.then = then
        self.els = els
        self.at = at
        self.target = target  # explicit result, needed for 'sym'

    def __repr__(self):
        return "EquivNode(%s)" % self.kind


def refl():
    return EquivNode("refl")


def chain(*subs):
    subs = [s for s in subs if s.kind != "refl"]
    if not subs:
        return refl()
    if len(subs) == 1:
        return subs[0]
    return EquivNode("chain", subs=list(subs))


def sym(sub, target):
    return EquivNode("sym", sub=sub, target=target)


def seq_cong(at, sub):
    return EquivNode("seq_cong", at=at, sub=sub)


def cond_cong(then, els):
    return EquivNode("cond_cong", then=then, els=els)


def while_cong(sub):
    return EquivNode("while_cong", sub=sub)


def rule(kind):
    return EquivNode(kind)


def _match_bounded_for(c):
    """Match ctr := 0; while (ctr < k && e) { body; ctr := ctr + 1 } with a
    literal iteration count k.  Returns (ctr, k, e, body) or None."""
    stmts = flatten(c)
    if len(stmts) != 2:
        return None
    init, loop = stmts
    if not (isinstance(init, Assign) and init.expr == Lit(0) and isinstance(loop, While)):
        return None
    ctr = init.var
    g = loop.guard
    if not (isinstance(g, BinOp) and g.op == "and"):
        return None
    lt, e = g.a, g.b
    if not (isinstance(lt, BinOp) and lt.op == "<" and lt.a == VarE(ctr)
            and isinstance(lt.b, Lit) and isinstance(lt.b.value, int)):
        return None
    k = lt.b.value
    body_stmts = flatten(loop.body)
    if not body_stmts:
        return None
    inc = body_stmts[-1]
    if not (isinstance(inc, Assign) and inc.var == ctr
            and inc.expr == BinOp("+", VarE(ctr), Lit(1))):
        return None
    body = seq(*body_stmts[:-1])
    if ctr in cmd_vars(body) or ctr in expr_vars(e):
        return None
    return ctr, k, e, body


class Rewriter:
    """Applies equivalence derivations; collects side-condition obligations
    as (description, ValidityReport) pairs."""

    def __init__(self, space, env):
        self.space = space
        self.env = env
        self.obligations = []

    def _side(self, desc, phi, psi):
        rep = check_implication(phi, psi, self.space, self.env)
        self.obligations.append((desc, rep))
        if not rep.ok:
            raise EquivError("side condition failed: %s (%r)" % (desc, rep))

    def apply(self, node, phi, c):
        c = normalize(c)
        k = node.kind
        if k == "refl":
            return c
        if k == "chain":
            for s in node.subs:
                c = self.apply(s, phi, c)
            return c
        if k == "sym":
            # c' ~ c from c ~ c': check that applying the sub-derivation to
            # the declared target gives back the input
            if node.target is None:
                raise EquivError("sym needs an explicit target program")
            tgt = normalize(node.target)
            back = normalize(self.apply(node.sub, phi, tgt))
            if back != c:
                raise EquivError("sym: target does not rewrite back to the input")
            return tgt
        if k in ("seq_skip_left", "seq_skip_right"):
            # definitional under sequence normalization
            return c
        if k == "sample_unit":
            # x <$ dirac(x)  ~  skip
            if (isinstance(c, Sample) and not c.is_pair
                    and isinstance(c.dist, Dirac) and c.dist.expr == VarE(c.target)):
                return Skip()
            raise EquivError("sample_unit: expected x <$ dirac(x), got %r" % (c,))
        if k == "assign_skip":
            # x <- e ~ skip when phi |= x = e
            if not isinstance(c, Assign):
                raise EquivError("assign_skip: expected an assignment")
            self._side("assignment %s <- %s is trivial" % (c.var, c.expr),
                       phi, BinOp("=", VarE(c.var), c.expr))
            return Skip()
        if k == "guard_true":
            if not isinstance(c, Cond):
                raise EquivError("guard_true: expected a conditional")
            self._side("guard is true", phi, c.guard)
            return c.then
        if k == "guard_false":
            if not isinstance(c, Cond):
                raise EquivError("guard_false: expected a conditional")
            self._side("guard is false", phi, neg(c.guard))
            return c.els
        if k == "cond_cong":
            if not isinstance(c, Cond):
                raise EquivError("cond_cong: expected a conditional")
            t = self.apply(node.then, conj(phi, c.guard), c.then)
            e = self.apply(node.els, conj(phi, neg(c.guard)), c.els)
            return Cond(c.guard, t, e)
        if k == "while_cong":
            if not isinstance(c, While):
                raise EquivError("while_cong: expected a loop")
            return While(c.guard, self.apply(node.sub, c.guard, c.body))
        if k == "seq_cong":
            stmts = flatten(c)
            i = node.at
            if not (0 <= i < len(stmts)):
                raise EquivError("seq_cong: position %r out of range" % (i,))
            # only the head of a sequence keeps the context assertion
            ctx = phi if i == 0 else TRUE
            stmts[i] = self.apply(node.sub, ctx, stmts[i])
            return seq(*stmts)
        if k == "unroll":
            if not isinstance(c, While):
                raise EquivError("unroll: expected a loop")
            return Cond(c.guard, seq(c.body, c), Skip())
        if k == "for_unfold":
            m = _match_bounded_for(c)
            if m is None:
                raise EquivError("for_unfold: not a literal-count bounded loop")
            ctr, count, e, body = m
            return seq(*[Cond(e, body, Skip()) for _ in range(count)])
        if k == "prod_split":
            # (x, y) <$ prod_coupling(g1, g2)  ~  x <$ g1; y <$ g2
            if not (isinstance(c, Sample) and c.is_pair
                    and isinstance(c.dist, Coupled) and c.dist.spec.kind == "prod"):
                raise EquivError("prod_split: expected a pair sample of a product coupling")
            x, y = c.target
            s = c.dist.spec
            if x in dist_vars(s.right) or y in dist_vars(s.left) or x == y:
                raise EquivError("prod_split: components are not independent")
            return seq(Sample(x, s.left), Sample(y, s.right))
        raise EquivError("unknown equivalence rule %r" % k)


def apply_equiv(node, phi, c, space, env):
    rw = Rewriter(space, env)
    out = rw.apply(node, phi, c)
    return normalize(out), rw.obligations


def check_equiv(node, phi, lhs, rhs, space, env):
    """Verify lhs rewrites to rhs under phi; returns the obligations."""
    out, obs = apply_equiv(node, phi, lhs, space, env)
    if out != normalize(rhs):
        raise EquivError(
            "rewrite result does not match:\n  got      %r\n  expected %r"
            % (out, normalize(rhs)))
    return obs
