"""Macro expansion of derived rules into kernel derivations.

Each derived rule is checked natively by the kernel (rules.py), but is
also definable from the eight kernel rules.  Expansion makes that
concrete: expanding a derived node and checking the result yields the same
product program (up to product normalization) and equivalent obligations.
One-sided rules need an auxiliary variable from the opposite side to stand
in for the missing program.
"""

from ..lang import (
    LEFT, RIGHT, Assign, Cond, Dirac, Lit, Sample, Skip, VarE, While,
    conj, desugar_bounded_for, fresh_counter, neg, seq,
)
from .equiv import chain, rule, seq_cong, sym, while_cong
from .rules import Derivation, Judgment, KernelError

FALSE_ = Lit(False)
TRUE_ = Lit(True)


def expand_derived(deriv, aux=None, depth=0):
    """One-step expansion of a derived-rule node into kernel rules.

    ``aux``: auxiliary variable(s) for the rules that need one (Skip needs
    a pair (left, right); AssgL/RandL need a right variable; AssgR/RandR a
    left variable).  ``depth`` numbers the bounded-for counters, matching
    the checker's loop-nesting discipline.
    """
    fn = _EXPANSIONS.get(deriv.rule)
    if fn is None:
        raise KernelError("rule %r has no expansion (kernel rule?)" % deriv.rule)
    return fn(deriv, aux, depth)


def _expand_skip(d, aux, depth):
    z1, z2 = aux
    if z1.tag != LEFT or z2.tag != RIGHT:
        raise KernelError("Skip expansion needs a (left, right) auxiliary pair")
    j = d.concl
    a1, a2 = Assign(z1, VarE(z1)), Assign(z2, VarE(z2))
    assg = Derivation("Assg", Judgment(a1, a2, j.post, j.post))
    struct = Derivation(
        "Struct", Judgment(Skip(), Skip(), j.post, j.post),
        payload={
            "c1_equiv": rule("assign_skip"),
            "c2_equiv": rule("assign_skip"),
            "c_equiv": chain(seq_cong(0, rule("assign_skip")),
                             seq_cong(0, rule("assign_skip"))),
        },
        children=[assg])
    return Derivation("Conseq", j, children=[struct])


def _expand_assg_one_sided(d, aux, depth, side):
    z = aux
    j = d.concl
    if side == LEFT:
        if z is None or z.tag != RIGHT:
            raise KernelError("AssgL expansion needs a right auxiliary variable")
        a, zk = j.c1, Assign(z, VarE(z))
        kernel = Derivation("Assg", Judgment(a, zk, j.pre, j.post))
        payload = {"c2_equiv": rule("assign_skip"),
                   "c_equiv": seq_cong(1, rule("assign_skip"))}
        struct_j = Judgment(a, Skip(), j.pre, j.post)
    else:
        if z is None or z.tag != LEFT:
            raise KernelError("AssgR expansion needs a left auxiliary variable")
        a, zk = j.c2, Assign(z, VarE(z))
        kernel = Derivation("Assg", Judgment(zk, a, j.pre, j.post))
        payload = {"c1_equiv": rule("assign_skip"),
                   "c_equiv": seq_cong(0, rule("assign_skip"))}
        struct_j = Judgment(Skip(), a, j.pre, j.post)
    return Derivation("Struct", struct_j, payload=payload, children=[kernel])


def _expand_rand_one_sided(d, aux, depth, side):
    z = aux
    j = d.concl
    zs = Sample(z, Dirac(VarE(z)))
    if side == LEFT:
        if z is None or z.tag != RIGHT:
            raise KernelError("RandL expansion needs a right auxiliary variable")
        s = j.c1
        kernel = Derivation("Rand", Judgment(s, zs, j.pre, j.post), payload={"kind": "prod"})
        payload = {"c2_equiv": rule("sample_unit"),
                   "c_equiv": chain(rule("prod_split"), seq_cong(1, rule("sample_unit")))}
        struct_j = Judgment(s, Skip(), j.pre, j.post)
    else:
        if z is None or z.tag != LEFT:
            raise KernelError("RandR expansion needs a left auxiliary variable")
        s = j.c2
        kernel = Derivation("Rand", Judgment(zs, s, j.pre, j.post), payload={"kind": "prod"})
        payload = {"c1_equiv": rule("sample_unit"),
                   "c_equiv": chain(rule("prod_split"), seq_cong(0, rule("sample_unit")))}
        struct_j = Judgment(Skip(), s, j.pre, j.post)
    return Derivation("Struct", struct_j, payload=payload, children=[kernel])


def _expand_cond_l(d, aux, depth):
    j = d.concl
    e = j.c1.guard
    wrapped = []
    for child, guard_rule, phi in ((d.children[0], "guard_true", conj(j.pre, e)),
                                   (d.children[1], "guard_false", conj(j.pre, neg(e)))):
        cj = child.concl
        wrapped.append(Derivation(
            "Struct", Judgment(j.c1, cj.c2, phi, j.post),
            payload={"c1_equiv": sym(rule(guard_rule), target=j.c1)},
            children=[child]))
    return Derivation("Case", j, payload={"e": e}, children=wrapped)


def _expand_cond_r(d, aux, depth):
    j = d.concl
    e = j.c2.guard
    wrapped = []
    for child, guard_rule, phi in ((d.children[0], "guard_true", conj(j.pre, e)),
                                   (d.children[1], "guard_false", conj(j.pre, neg(e)))):
        cj = child.concl
        wrapped.append(Derivation(
            "Struct", Judgment(cj.c1, j.c2, phi, j.post),
            payload={"c2_equiv": sym(rule(guard_rule), target=j.c2)},
            children=[child]))
    return Derivation("Case", j, payload={"e": e}, children=wrapped)


def _expand_cond_s(d, aux, depth):
    j = d.concl
    e1 = j.c1.guard
    wrapped = []
    for child, guard_rule, phi in ((d.children[0], "guard_true", conj(j.pre, e1)),
                                   (d.children[1], "guard_false", conj(j.pre, neg(e1)))):
        wrapped.append(Derivation(
            "Struct", Judgment(j.c1, j.c2, phi, j.post),
            payload={"c1_equiv": sym(rule(guard_rule), target=j.c1),
                     "c2_equiv": sym(rule(guard_rule), target=j.c2)},
            children=[child]))
    return Derivation("Case", j, payload={"e": e1}, children=wrapped)


def _false_child(c1, c2, pre, post):
    return Derivation("False", Judgment(c1, c2, pre, post))


def _expand_while_one_sided(d, aux, depth, side):
    j = d.concl
    psi = j.pre
    loop = j.c1 if side == LEFT else j.c2
    e1, b1 = loop.guard, loop.body
    nd = depth + 1
    ctr_l, ctr_r = fresh_counter(nd, LEFT), fresh_counter(nd, RIGHT)
    dead = While(FALSE_, Skip())
    if side == LEFT:
        wj = Judgment(loop, dead, psi, conj(psi, neg(e1), neg(FALSE_)))
        p0, p1, p2 = FALSE_, TRUE_, FALSE_
        for1 = desugar_bounded_for(b1, e1, Lit(1), ctr_l)
        for2 = desugar_bounded_for(Skip(), FALSE_, Lit(1), ctr_r)
        d0 = _false_child(for1, for2, conj(psi, p0, e1), psi)
        d1 = d.children[0]
        d2 = _false_child(Skip(), Skip(), conj(psi, FALSE_, p2), psi)
        payload = {"e": e1, "p0": p0, "p1": p1, "p2": p2, "k1": Lit(1), "k2": Lit(1)}
        kernel = Derivation("While", wj, payload=payload, children=[d0, d1, d2])
        body_fix = while_cong(chain(rule("guard_false"), rule("guard_true")))
        struct = Derivation(
            "Struct", Judgment(loop, Skip(), psi, wj.post),
            payload={"c2_equiv": chain(rule("unroll"), rule("guard_false")),
                     "c_equiv": body_fix},
            children=[kernel])
    else:
        wj = Judgment(dead, loop, psi, conj(psi, neg(FALSE_), neg(e1)))
        p0, p1, p2 = FALSE_, FALSE_, TRUE_
        for1 = desugar_bounded_for(Skip(), FALSE_, Lit(1), ctr_l)
        for2 = desugar_bounded_for(b1, e1, Lit(1), ctr_r)
        d0 = _false_child(for1, for2, conj(psi, p0, e1), psi)
        d1 = _false_child(Skip(), Skip(), conj(psi, FALSE_, p1), psi)
        d2 = d.children[0]
        payload = {"e": e1, "p0": p0, "p1": p1, "p2": p2, "k1": Lit(1), "k2": Lit(1)}
        kernel = Derivation("While", wj, payload=payload, children=[d0, d1, d2])
        body_fix = while_cong(chain(rule("guard_false"), rule("guard_false")))
        struct = Derivation(
            "Struct", Judgment(Skip(), loop, psi, wj.post),
            payload={"c1_equiv": chain(rule("unroll"), rule("guard_false")),
                     "c_equiv": body_fix},
            children=[kernel])
    return Derivation("Conseq", j, children=[struct])


def _expand_while_s(d, aux, depth):
    j = d.concl
    psi = j.pre
    e1, b1 = j.c1.guard, j.c1.body
    e2, b2 = j.c2.guard, j.c2.body
    nd = depth + 1
    for1 = desugar_bounded_for(b1, e1, Lit(1), fresh_counter(nd, LEFT))
    for2 = desugar_bounded_for(b2, e2, Lit(1), fresh_counter(nd, RIGHT))
    child = d.children[0]
    d0 = Derivation(
        "Struct", Judgment(for1, for2, conj(psi, e1), psi),
        payload={
            "c1_equiv": sym(chain(rule("for_unfold"), rule("guard_true")), target=for1),
            "c2_equiv": sym(chain(rule("for_unfold"), rule("guard_true")), target=for2),
        },
        children=[child])
    d1 = _false_child(b1, Skip(), conj(psi, e1, FALSE_), psi)
    d2 = _false_child(Skip(), b2, conj(psi, e2, FALSE_), psi)
    payload = {"e": e1, "p0": TRUE_, "p1": FALSE_, "p2": FALSE_,
               "k1": Lit(1), "k2": Lit(1)}
    wj = Judgment(j.c1, j.c2, psi, conj(psi, neg(e1), neg(e2)))
    kernel = Derivation("While", wj, payload=payload, children=[d0, d1, d2])
    struct = Derivation(
        "Struct", wj,
        payload={"c_equiv": while_cong(rule("guard_true"))},
        children=[kernel])
    return Derivation("Conseq", j, children=[struct])


_EXPANSIONS = {
    "Skip": _expand_skip,
    "AssgL": lambda d, a, n: _expand_assg_one_sided(d, a, n, LEFT),
    "AssgR": lambda d, a, n: _expand_assg_one_sided(d, a, n, RIGHT),
    "RandL": lambda d, a, n: _expand_rand_one_sided(d, a, n, LEFT),
    "RandR": lambda d, a, n: _expand_rand_one_sided(d, a, n, RIGHT),
    "CondL": _expand_cond_l,
    "CondR": _expand_cond_r,
    "CondS": _expand_cond_s,
    "WhileL": lambda d, a, n: _expand_while_one_sided(d, a, n, LEFT),
    "WhileR": lambda d, a, n: _expand_while_one_sided(d, a, n, RIGHT),
    "WhileS": _expand_while_s,
}
