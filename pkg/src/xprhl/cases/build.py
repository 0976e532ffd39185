"""Construction of the shipped fixture derivations.

Each builder returns a bundle with the derivation itself, the state spaces
used for discharging obligations and for validating the extracted product,
the expected product listing, and metadata consumed by the analysis
pipeline.  ``write_fixtures`` serializes the bundles into the package's
fixture directory.
"""

import json
import os

from ..kernel import (
    Derivation, Judgment, chain, deriv_to_json, rule, seq_cong, sym,
    while_cong,
)
from ..lang import (
    LEFT, RIGHT, Assign, Cond, Lit, Skip, While, conj,
    desugar_bounded_for, fresh_counter, neg, seq, subst_expr,
)
from ..parser import parse_expr, parse_program

E = parse_expr
P = parse_program


# -- small constructors ------------------------------------------------------

def _cmd(c):
    if c is None:
        return Skip()
    return P(c) if isinstance(c, str) else c


def _expr(e):
    return E(e) if isinstance(e, str) else e


def leaf(rule_name, c1, c2, pre, post, payload=None, children=None):
    return Derivation(rule_name, Judgment(_cmd(c1), _cmd(c2), _expr(pre), _expr(post)),
                      payload=payload, children=children)


def assg(c1, c2, post, pre=None):
    """Assignment leaf; the pre defaults to the substituted post, which
    discharges without any obligation."""
    l, r = _cmd(c1), _cmd(c2)
    sub = {}
    for c in (l, r):
        if isinstance(c, Assign):
            sub[c.var] = c.expr
    post = _expr(post)
    want = subst_expr(post, sub)
    name = ("Assg" if isinstance(l, Assign) and isinstance(r, Assign)
            else "AssgL" if isinstance(l, Assign) else "AssgR")
    return Derivation(name, Judgment(l, r, want if pre is None else _expr(pre), post))


def rand_id(c1, c2, pre, post):
    return leaf("Rand", c1, c2, pre, post, payload={"kind": "id"})


def rand_bij(fn, c1, c2, pre, post):
    return leaf("Rand", c1, c2, pre, post, payload={"kind": "bij", "fn": fn})


def rand_table(table, c1, c2, pre, post):
    return leaf("Rand", c1, c2, pre, post, payload={"kind": "table", "table": table})


def chain_seq(derivs):
    """Right-nested Seq derivation over already-aligned derivations."""
    out = derivs[-1]
    for d in reversed(derivs[:-1]):
        ja, jb = d.concl, out.concl
        out = Derivation("Seq",
                         Judgment(seq(ja.c1, jb.c1), seq(ja.c2, jb.c2), ja.pre, jb.post),
                         children=[d, out])
    return out


def ints(lo, hi):
    return {"int": {"lo": lo, "hi": hi}}


def const(v):
    return {"const": v}


def space(vars_, **kw):
    out = {"vars": vars_}
    out.update(kw)
    return out


# -- unit fixtures -----------------------------------------------------------

def build_assg_linear():
    d = assg("x_1 <- x_1 + 1", "y_2 <- 2 * y_2", "x_1 = y_2")
    sp = space({"x_1": ints(0, 6), "y_2": ints(0, 3)})
    return {
        "name": "assg_linear", "env": "basic", "derivation": d,
        "check_space": sp, "validate_space": sp,
        "golden": "x_1 <- x_1 + 1;\ny_2 <- 2 * y_2",
        "meta": {"description": "paired assignments related by substitution"},
    }


def build_rand_table():
    d = rand_table("anti", "x_1 <$ uniform({0, 1})", "x_2 <$ uniform({0, 1})",
                   "true", "x_1 != x_2")
    sp = space({"x_1": ints(0, 1), "x_2": ints(0, 1)})
    return {
        "name": "rand_table", "env": "basic", "derivation": d,
        "check_space": sp, "validate_space": sp,
        "golden": "(x_1, x_2) <$ table_coupling(anti, uniform({0, 1}), uniform({0, 1}))",
        "meta": {"description": "anticorrelated fair bits via an explicit joint table"},
    }


def build_case_mirror():
    pre = E("true")
    post = E("b_1 = b_2 => x_1 = x_2")
    e = E("b_1 = b_2")
    c1, c2 = "x_1 <$ uniform({0, 1})", "x_2 <$ uniform({0, 1})"
    d = leaf("Case", c1, c2, pre, post, payload={"e": e}, children=[
        rand_id(c1, c2, conj(pre, e), post),
        rand_bij("flip", c1, c2, conj(pre, neg(e)), post),
    ])
    sp = space({"b_1": ints(0, 1), "b_2": ints(0, 1),
                "x_1": ints(0, 1), "x_2": ints(0, 1)})
    return {
        "name": "case_mirror", "env": "basic", "derivation": d,
        "check_space": sp, "validate_space": sp,
        "golden": ("if b_1 = b_2 then {\n"
                   "  (x_1, x_2) <$ id_coupling(uniform({0, 1}))\n"
                   "} else {\n"
                   "  (x_1, x_2) <$ bij_coupling(flip, uniform({0, 1}))\n"
                   "}"),
        "meta": {"description": "coupling chosen by a case split on the pre-state"},
    }


def build_seq_affine():
    second = assg("a_1 <- 2 * a_1", "b_2 <- b_2 + 2", "a_1 = b_2")
    first = assg("a_1 <- a_1 + 1", "b_2 <- 2 * b_2", second.concl.pre)
    d = chain_seq([first, second])
    sp = space({"a_1": ints(0, 4), "b_2": ints(0, 4)})
    return {
        "name": "seq_affine", "env": "basic", "derivation": d,
        "check_space": sp, "validate_space": sp,
        "golden": ("a_1 <- a_1 + 1;\nb_2 <- 2 * b_2;\n"
                   "a_1 <- 2 * a_1;\nb_2 <- b_2 + 2"),
        "meta": {"description": "two-step assignment chain with computed midpoint"},
    }


def build_conseq_skip():
    inner = leaf("Skip", None, None, "x_1 = x_2", "x_1 = x_2")
    d = Derivation("Conseq",
                   Judgment(Skip(), Skip(), E("x_1 = x_2 and x_1 > 0"), E("x_1 >= x_2")),
                   children=[inner])
    sp = space({"x_1": ints(0, 3), "x_2": ints(0, 3)})
    return {
        "name": "conseq_skip", "env": "basic", "derivation": d,
        "check_space": sp, "validate_space": sp,
        "golden": "skip",
        "meta": {"description": "pre strengthening and post weakening around skip"},
    }


def build_while_left():
    psi = E("n_1 >= 0")
    e1 = E("n_1 > 0")
    body = "n_1 <- n_1 - 1"
    d = Derivation("WhileL",
                   Judgment(While(e1, P(body)), Skip(), psi, conj(psi, neg(e1))),
                   children=[assg(body, None, psi, pre=conj(psi, e1))])
    sp = space({"n_1": ints(0, 5)})
    return {
        "name": "while_left", "env": "basic", "derivation": d,
        "check_space": sp, "validate_space": sp,
        "golden": "while n_1 > 0 do {\n  n_1 <- n_1 - 1\n}",
        "meta": {"description": "one-sided loop under an invariant"},
    }


def build_while_sync():
    psi = E("n_1 = n_2 and n_1 >= 0")
    e1, e2 = E("n_1 > 0"), E("n_2 > 0")
    d = Derivation("WhileS",
                   Judgment(While(e1, P("n_1 <- n_1 - 1")), While(e2, P("n_2 <- n_2 - 1")),
                            psi, conj(psi, neg(e1))),
                   children=[assg("n_1 <- n_1 - 1", "n_2 <- n_2 - 1", psi,
                                  pre=conj(psi, e1))])
    sp = space({"n_1": ints(0, 5), "n_2": ints(0, 5)})
    return {
        "name": "while_sync", "env": "basic", "derivation": d,
        "check_space": sp, "validate_space": sp,
        "golden": "while n_1 > 0 do {\n  n_1 <- n_1 - 1;\n  n_2 <- n_2 - 1\n}",
        "meta": {"description": "lockstep loops with equal guards"},
    }


def build_struct_unroll():
    pre = E("z_1 = z_2")
    loop = While(E("false"), P("t_1 <- t_1 + 1"))
    inner = leaf("Skip", None, None, pre, pre)
    d = Derivation("Struct", Judgment(loop, Skip(), pre, pre),
                   payload={"c1_equiv": sym(chain(rule("unroll"), rule("guard_false")),
                                            loop)},
                   children=[inner])
    sp = space({"z_1": ints(0, 1), "z_2": ints(0, 1), "t_1": ints(0, 1)})
    return {
        "name": "struct_unroll", "env": "basic", "derivation": d,
        "check_space": sp, "validate_space": sp,
        "golden": "skip",
        "meta": {"description": "dead loop removed by unrolling against a false guard"},
    }


# -- mirror-coupled random walk ----------------------------------------------

def build_rwalk():
    phi = E("i_1 = i_2 and T_1 = T_2")
    e1, e2 = E("i_1 < T_1"), E("i_2 < T_2")
    draw1, draw2 = "r_1 <$ uniform({0, 1})", "r_2 <$ uniform({0, 1})"
    b1 = P(draw1 + "; s_1 <- s_1 + r_1; i_1 <- i_1 + 1")
    b2 = P(draw2 + "; s_2 <- s_2 + r_2; i_2 <- i_2 + 1")

    body_pre = conj(phi, e1)
    ipair = assg("i_1 <- i_1 + 1", "i_2 <- i_2 + 1", phi)
    spair = assg("s_1 <- s_1 + r_1", "s_2 <- s_2 + r_2", ipair.concl.pre)
    met = E("s_1 = s_2")
    case = leaf("Case", draw1, draw2, body_pre, spair.concl.pre,
                payload={"e": met}, children=[
                    rand_id(draw1, draw2, conj(body_pre, met), spair.concl.pre),
                    rand_bij("flip", draw1, draw2, conj(body_pre, neg(met)),
                             spair.concl.pre),
                ])
    body = chain_seq([case, spair, ipair])
    loops = Derivation("WhileS",
                       Judgment(While(e1, b1), While(e2, b2), phi, conj(phi, neg(e1))),
                       children=[body])
    init = assg("i_1 <- 0", "i_2 <- 0", phi)
    inner = chain_seq([init, loops])
    top = Derivation("Conseq",
                     Judgment(inner.concl.c1, inner.concl.c2, E("T_1 = T_2"),
                              inner.concl.post),
                     children=[inner])
    sp = space({"i_1": ints(0, 3), "i_2": ints(0, 3),
                "T_1": ints(0, 3), "T_2": ints(0, 3),
                "s_1": ints(0, 2), "s_2": ints(0, 2)})
    vsp = space({"i_1": const(0), "i_2": const(0), "T_1": const(4), "T_2": const(4),
                 "s_1": ints(0, 1), "s_2": ints(0, 1)})
    golden = (
        "i_1 <- 0;\n"
        "i_2 <- 0;\n"
        "while i_1 < T_1 do {\n"
        "  if s_1 = s_2 then {\n"
        "    (r_1, r_2) <$ id_coupling(uniform({0, 1}))\n"
        "  } else {\n"
        "    (r_1, r_2) <$ bij_coupling(flip, uniform({0, 1}))\n"
        "  };\n"
        "  s_1 <- s_1 + r_1;\n"
        "  s_2 <- s_2 + r_2;\n"
        "  i_1 <- i_1 + 1;\n"
        "  i_2 <- i_2 + 1\n"
        "}")
    return {
        "name": "rwalk_mirror", "env": "rwalk", "derivation": top,
        "check_space": sp, "validate_space": vsp, "golden": golden,
        "meta": {
            "description": "lazy walks glued by the mirror coupling after meeting",
            "failure_event": "not (s_1 = s_2)",
            "closed_form": {"name": "rwalk", "params": {"k": 1}},
        },
    }


# -- coupled card race -------------------------------------------------------

def build_dynkin():
    psi = E("N_1 = N_2")
    e1, e2 = E("x_1 < N_1"), E("x_2 < N_2")
    draw1, draw2 = "r_1 <$ uniform(intv(1, 10))", "r_2 <$ uniform(intv(1, 10))"
    b1 = P(draw1 + "; x_1 <- x_1 + r_1")
    b2 = P(draw2 + "; x_2 <- x_2 + r_2")
    e = E("x_1 < N_1 or x_2 < N_2")
    p0, p1, p2 = E("x_1 = x_2"), E("x_1 < x_2"), E("x_2 < x_1")

    pre0 = conj(psi, p0, e)
    sync_pair = assg("x_1 <- x_1 + r_1", "x_2 <- x_2 + r_2", psi)
    sync = chain_seq([rand_id(draw1, draw2, pre0, sync_pair.concl.pre), sync_pair])
    ctr1, ctr2 = fresh_counter(1, LEFT), fresh_counter(1, RIGHT)
    for1 = desugar_bounded_for(b1, e1, Lit(1), ctr1)
    for2 = desugar_bounded_for(b2, e2, Lit(1), ctr2)
    d0 = Derivation("Struct", Judgment(for1, for2, pre0, psi),
                    payload={"c1_equiv": sym(chain(rule("for_unfold"), rule("guard_true")), for1),
                             "c2_equiv": sym(chain(rule("for_unfold"), rule("guard_true")), for2)},
                    children=[sync])
    d1 = chain_seq([
        leaf("RandL", draw1, None, conj(psi, e1, p1), psi),
        assg("x_1 <- x_1 + r_1", None, psi),
    ])
    d2 = chain_seq([
        leaf("RandR", None, draw2, conj(psi, e2, p2), psi),
        assg(None, "x_2 <- x_2 + r_2", psi),
    ])
    top = Derivation("While",
                     Judgment(While(e1, b1), While(e2, b2), psi,
                              conj(psi, neg(e1), neg(e2))),
                     payload={"e": e, "p0": p0, "p1": p1, "p2": p2,
                              "k1": Lit(1), "k2": Lit(1)},
                     children=[d0, d1, d2])
    sp = space({"x_1": ints(1, 21), "x_2": ints(1, 21),
                "N_1": const(12), "N_2": const(12)})
    vsp = space({"x_1": {"int": [1, 2, 5, 9]}, "x_2": {"int": [1, 2, 5, 9]},
                 "N_1": const(12), "N_2": const(12)})
    golden = (
        "while x_1 < N_1 or x_2 < N_2 do {\n"
        "  if x_1 = x_2 then {\n"
        "    (r_1, r_2) <$ id_coupling(uniform(intv(1, 10)));\n"
        "    x_1 <- x_1 + r_1;\n"
        "    x_2 <- x_2 + r_2\n"
        "  } else {\n"
        "    if x_1 < x_2 then {\n"
        "      r_1 <$ uniform(intv(1, 10));\n"
        "      x_1 <- x_1 + r_1\n"
        "    } else {\n"
        "      r_2 <$ uniform(intv(1, 10));\n"
        "      x_2 <- x_2 + r_2\n"
        "    }\n"
        "  }\n"
        "}")
    return {
        "name": "dynkin_race", "env": "dynkin", "derivation": top,
        "check_space": sp, "validate_space": vsp, "golden": golden,
        "meta": {
            "description": "card races glued when the laggard lands on the leader",
            "failure_event": "not (x_1 = x_2)",
            "closed_form": {"name": "dynkin", "params": {}},
        },
    }


# -- single site update of a graph coloring ----------------------------------

def _update_step(draws, wpair, guard1, guard2, mids, psi):
    """Shared skeleton of the single-site update couplings: coupled draws,
    candidate construction, then the two guarded commits one side at a time."""
    x3, x4 = mids
    g1 = _cmd("if %s then { w_1 <- w'_1 }" % guard1)
    g2 = _cmd("if %s then { w_2 <- w'_2 }" % guard2)
    commit1 = leaf("CondL", g1, None, x3, x4, children=[
        assg("w_1 <- w'_1", None, x4, pre=conj(x3, g1.guard)),
        leaf("Skip", None, None, conj(x3, neg(g1.guard)), x4),
    ])
    commit2 = leaf("CondR", None, g2, x4, psi, children=[
        assg(None, "w_2 <- w'_2", psi, pre=conj(x4, g2.guard)),
        leaf("Skip", None, None, conj(x4, neg(g2.guard)), psi),
    ])
    return chain_seq(list(draws) + [wpair, commit1, commit2])


def build_glauber():
    psi = E("valid_G(w_1) and valid_G(w_2) and hamming(w_1, w_2) <= 2")
    theta = E("hamming(w_1, w_2) = 1 and valid_G(w_1) and valid_G(w_2)")
    t1 = E("hamming(w_1, w_2) = 1 and valid_G(w_1) and valid_G(w_2) and v_1 = v_2")
    x3 = E(
        "valid_G(w_1) and valid_G(w_2)"
        " and (valid_G(w'_1) and valid_G(w'_2) => hamming(w'_1, w'_2) <= 2)"
        " and (valid_G(w'_1) and not valid_G(w'_2) => hamming(w'_1, w_2) <= 2)"
        " and (not valid_G(w'_1) and valid_G(w'_2) => hamming(w_1, w'_2) <= 2)"
        " and (not valid_G(w'_1) and not valid_G(w'_2) => hamming(w_1, w_2) <= 2)")
    x4 = E(
        "valid_G(w_1) and valid_G(w_2)"
        " and (valid_G(w'_2) => hamming(w_1, w'_2) <= 2)"
        " and (not valid_G(w'_2) => hamming(w_1, w_2) <= 2)")

    vdraw1, vdraw2 = "v_1 <$ uniform(vertices())", "v_2 <$ uniform(vertices())"
    cdraw1, cdraw2 = "c_1 <$ uniform(colors())", "c_2 <$ uniform(colors())"
    wpair = assg("w'_1 <- w_1[v_1 -> c_1]", "w'_2 <- w_2[v_2 -> c_2]", x3)
    near = E("nbr_of_diff(w_1, w_2, v_1)")
    cdraws = leaf("Case", cdraw1, cdraw2, t1, wpair.concl.pre,
                  payload={"e": near}, children=[
                      rand_bij("transpose_diff", cdraw1, cdraw2, conj(t1, near),
                               wpair.concl.pre),
                      rand_id(cdraw1, cdraw2, conj(t1, neg(near)), wpair.concl.pre),
                  ])
    vdraws = rand_id(vdraw1, vdraw2, theta, t1)
    d = _update_step([vdraws, cdraws], wpair, "valid_G(w'_1)", "valid_G(w'_2)",
                     (x3, x4), psi)
    sp = space({}, generator="check_states", exhaustive_generator=False)
    vsp = space({}, generator="adjacent_pair_states")
    golden = (
        "(v_1, v_2) <$ id_coupling(uniform(vertices()));\n"
        "if nbr_of_diff(w_1, w_2, v_1) then {\n"
        "  (c_1, c_2) <$ bij_coupling(transpose_diff, uniform(colors()))\n"
        "} else {\n"
        "  (c_1, c_2) <$ id_coupling(uniform(colors()))\n"
        "};\n"
        "w'_1 <- w_1[v_1 -> c_1];\n"
        "w'_2 <- w_2[v_2 -> c_2];\n"
        "if valid_G(w'_1) then {\n  w_1 <- w'_1\n};\n"
        "if valid_G(w'_2) then {\n  w_2 <- w'_2\n}")
    return {
        "name": "glauber_cycle5", "env": "glauber_c5", "derivation": d,
        "check_space": sp, "validate_space": vsp, "golden": golden,
        "meta": {
            "description": "single-site recoloring step under the transposition coupling",
            "path_coupling": {
                "metric": "hamming(w_1, w_2)", "beta": [14, 15], "delta": 5, "t": 20,
                "states": "valid_colorings", "adjacent": "adjacent_valid_pairs",
            },
            "closed_form": {"name": "glauber", "params": {"k": 6, "n": 5, "D": 2}},
        },
    }


def build_chlg():
    psi = E("safe_G(w_1) and safe_G(w_2) and hamming(w_1, w_2) <= 2")
    theta = E("hamming(w_1, w_2) = 1 and safe_G(w_1) and safe_G(w_2)")
    t1 = E("hamming(w_1, w_2) = 1 and safe_G(w_1) and safe_G(w_2) and p_1 = p_2")
    x3 = E(
        "safe_G(w_1) and safe_G(w_2)"
        " and (safe_G(w'_1) and safe_G(w'_2) => hamming(w'_1, w'_2) <= 2)"
        " and (safe_G(w'_1) and not safe_G(w'_2) => hamming(w'_1, w_2) <= 2)"
        " and (not safe_G(w'_1) and safe_G(w'_2) => hamming(w_1, w'_2) <= 2)"
        " and (not safe_G(w'_1) and not safe_G(w'_2) => hamming(w_1, w_2) <= 2)")
    x4 = E(
        "safe_G(w_1) and safe_G(w_2)"
        " and (safe_G(w'_2) => hamming(w_1, w'_2) <= 2)"
        " and (not safe_G(w'_2) => hamming(w_1, w_2) <= 2)")

    pdraw1, pdraw2 = "p_1 <$ uniform(particles())", "p_2 <$ uniform(particles())"
    vdraw1, vdraw2 = "v_1 <$ uniform(vertices())", "v_2 <$ uniform(vertices())"
    wpair = assg("w'_1 <- w_1[p_1 -> v_1]", "w'_2 <- w_2[p_2 -> v_2]", x3)
    pdraws = rand_id(pdraw1, pdraw2, theta, t1)
    vdraws = rand_id(vdraw1, vdraw2, t1, wpair.concl.pre)
    step = _update_step([pdraws, vdraws], wpair, "safe_G(w'_1)", "safe_G(w'_2)",
                        (x3, x4), psi)
    sp = space({}, generator="check_states", exhaustive_generator=False)
    vsp = space({}, generator="adjacent_pair_states")
    golden = (
        "(p_1, p_2) <$ id_coupling(uniform(particles()));\n"
        "(v_1, v_2) <$ id_coupling(uniform(vertices()));\n"
        "w'_1 <- w_1[p_1 -> v_1];\n"
        "w'_2 <- w_2[p_2 -> v_2];\n"
        "if safe_G(w'_1) then {\n  w_1 <- w'_1\n};\n"
        "if safe_G(w'_2) then {\n  w_2 <- w'_2\n}")
    return {
        "name": "chlg_cycle12", "env": "chlg_c12", "derivation": step,
        "check_space": sp, "validate_space": vsp, "golden": golden,
        "meta": {
            "description": "particle relocation step under the identity coupling",
            "path_coupling": {
                "metric": "hamming(w_1, w_2)", "beta": [3, 8], "delta": 2, "t": 10,
                "states": "safe_placements", "adjacent": "adjacent_safe_pairs",
            },
            "closed_form": {"name": "chlg", "params": {"s": 2, "n": 12, "D": 2}},
        },
    }


# -- loop transformations ----------------------------------------------------

def build_stripmine():
    psi = E("x_1 = x_2 and l_2 = i_1 * M_1 and M_1 = M_2 and N_1 = N_2"
            " and 0 <= i_1 and i_1 <= N_1 and M_1 >= 1")
    e1, e2 = E("i_1 < N_1"), E("l_2 < N_2 * M_2")
    inner1 = P("l_1 <- i_1 * M_1 + j_1; r_1 <$ mu(); x_1 <- f(l_1, x_1, r_1);"
               " j_1 <- j_1 + 1")
    b1 = seq(P("j_1 <- 0"), While(E("j_1 < M_1"), inner1), P("i_1 <- i_1 + 1"))
    b2 = P("r_2 <$ mu(); x_2 <- f(l_2, x_2, r_2); l_2 <- l_2 + 1")
    e, p0, p1, p2 = e1, E("true"), E("false"), E("false")

    ctr1, ctr2 = fresh_counter(1, LEFT), fresh_counter(1, RIGHT)
    for1 = desugar_bounded_for(b1, e1, Lit(1), ctr1)
    for2 = desugar_bounded_for(b2, e2, E("M_2"), ctr2)
    pre0 = conj(psi, p0, e)

    jinv = E("x_1 = x_2 and M_1 = M_2 and N_1 = N_2 and 0 <= j_1 and j_1 <= M_1"
             " and j_1 = __for1_2 and l_2 = i_1 * M_1 + j_1"
             " and 0 <= i_1 and i_1 < N_1 and M_1 >= 1")
    xmid = E("x_1 = x_2 and l_1 = l_2 and M_1 = M_2 and N_1 = N_2"
             " and 0 <= j_1 and j_1 < M_1 and j_1 = __for1_2"
             " and l_2 = i_1 * M_1 + j_1 and 0 <= i_1 and i_1 < N_1 and M_1 >= 1")
    g1 = E("j_1 < M_1")

    ctr_bump = assg(None, "__for1_2 <- __for1_2 + 1", jinv)
    idx_pair = assg("j_1 <- j_1 + 1", "l_2 <- l_2 + 1", ctr_bump.concl.pre)
    fpair = assg("x_1 <- f(l_1, x_1, r_1)", "x_2 <- f(l_2, x_2, r_2)",
                 idx_pair.concl.pre)
    draws = rand_id("r_1 <$ mu()", "r_2 <$ mu()", xmid, fpair.concl.pre)
    lassg = assg("l_1 <- i_1 * M_1 + j_1", None, xmid, pre=conj(jinv, g1))
    inner_body = chain_seq([lassg, draws, fpair, idx_pair, ctr_bump])
    inner_sync = Derivation("WhileS",
                            Judgment(While(g1, inner1), for2.second, jinv,
                                     conj(jinv, neg(g1))),
                            children=[inner_body])
    bump = assg("i_1 <- i_1 + 1", None, psi, pre=conj(jinv, neg(g1)))
    init = assg("j_1 <- 0", "__for1_2 <- 0", jinv, pre=pre0)
    child = chain_seq([init, inner_sync, bump])
    d0 = Derivation("Struct", Judgment(for1, for2, pre0, psi),
                    payload={"c1_equiv": sym(chain(rule("for_unfold"), rule("guard_true")),
                                             for1)},
                    children=[child])
    post = conj(psi, neg(e1), neg(e2))
    loops = Derivation("While",
                       Judgment(While(e1, b1), While(e2, b2), psi, post),
                       payload={"e": e, "p0": p0, "p1": p1, "p2": p2,
                                "k1": Lit(1), "k2": E("M_2")},
                       children=[d0,
                                 leaf("False", b1, None, conj(psi, e1, p1), psi),
                                 leaf("False", None, b2, conj(psi, e2, p2), psi)])
    # drop the vacuous synchronous-phase dispatch from the product
    clean = Derivation("Struct", Judgment(loops.concl.c1, loops.concl.c2, psi, post),
                       payload={"c_equiv": while_cong(rule("guard_true"))},
                       children=[loops])
    init_top = assg("i_1 <- 0", "l_2 <- 0", psi)
    body_top = chain_seq([init_top, clean])
    top = Derivation("Conseq",
                     Judgment(body_top.concl.c1, body_top.concl.c2,
                              E("x_1 = x_2 and N_1 = N_2 and M_1 = M_2"
                                " and M_1 >= 1 and N_1 >= 0"),
                              body_top.concl.post),
                     children=[body_top])
    sp = space({}, generator="stripmine_states", exhaustive_generator=False)
    vsp = space({"N_1": const(2), "N_2": const(2), "M_1": const(2), "M_2": const(2),
                 "i_1": const(0), "l_2": const(0),
                 "x_1": ints(0, 4), "x_2": ints(0, 4)})
    golden = (
        "i_1 <- 0;\n"
        "l_2 <- 0;\n"
        "while i_1 < N_1 do {\n"
        "  j_1 <- 0;\n"
        "  while j_1 < M_1 do {\n"
        "    l_1 <- i_1 * M_1 + j_1;\n"
        "    (r_1, r_2) <$ id_coupling(mu());\n"
        "    x_1 <- f(l_1, x_1, r_1);\n"
        "    x_2 <- f(l_2, x_2, r_2);\n"
        "    j_1 <- j_1 + 1;\n"
        "    l_2 <- l_2 + 1\n"
        "  };\n"
        "  i_1 <- i_1 + 1\n"
        "}")
    return {
        "name": "loop_stripmine", "env": "loops", "derivation": top,
        "check_space": sp, "validate_space": vsp, "golden": golden,
        "meta": {
            "description": "nested blocked loop against its flat counterpart",
            "equiv_claim": "x_1 = x_2",
            # the phase loops are vacuous but their losslessness can only be
            # sampled over the generator space
            "check_args": {"assume_lossless": True},
        },
    }


def build_perforation():
    psi = E("i_1 = 2 * i_2 - 1 and n_1 = n_2")
    e1, e2 = E("i_1 <= 2 * n_1"), E("i_2 <= n_2")
    b1 = P("x_1 <$ mu(); s_1 <- s_1 + x_1; i_1 <- i_1 + 1")
    b2 = P("x_2 <$ mu(); s_2 <- s_2 + x_2; i_2 <- i_2 + 1")
    e, p0, p1, p2 = e1, E("true"), E("false"), E("false")
    pre0 = conj(psi, p0, e)

    ctr1, ctr2 = fresh_counter(1, LEFT), fresh_counter(1, RIGHT)
    for1 = desugar_bounded_for(b1, e1, Lit(2), ctr1)
    for2 = desugar_bounded_for(b2, e2, Lit(1), ctr2)

    bump2 = assg(None, "i_2 <- i_2 + 1", psi)
    theta4 = bump2.concl.pre
    theta3 = E("i_1 = 2 * i_2 and n_1 = n_2 and i_2 <= n_2")
    second = Cond(e1, b1, Skip())
    half_bump = assg("i_1 <- i_1 + 1", None, theta4)
    half_s = assg("s_1 <- s_1 + x_1", None, half_bump.concl.pre)
    then_child = chain_seq([
        leaf("RandL", "x_1 <$ mu()", None, conj(theta3, e1), half_s.concl.pre),
        half_s, half_bump,
    ])
    cond_half = leaf("CondL", second, None, theta3, theta4, children=[
        then_child,
        leaf("False", None, None, conj(theta3, neg(e1)), theta4),
    ])
    bump1 = assg("i_1 <- i_1 + 1", None, theta3)
    spair = assg("s_1 <- s_1 + x_1", "s_2 <- s_2 + x_2", bump1.concl.pre)
    draws = rand_id("x_1 <$ mu()", "x_2 <$ mu()", pre0, spair.concl.pre)
    child = chain_seq([draws, spair, bump1, cond_half, bump2])
    d0 = Derivation("Struct", Judgment(for1, for2, pre0, psi),
                    payload={"c1_equiv": sym(chain(rule("for_unfold"),
                                                   seq_cong(0, rule("guard_true"))),
                                             for1),
                             "c2_equiv": sym(chain(rule("for_unfold"), rule("guard_true")),
                                             for2)},
                    children=[child])
    post = conj(psi, neg(e1), neg(e2))
    loops = Derivation("While",
                       Judgment(While(e1, b1), While(e2, b2), psi, post),
                       payload={"e": e, "p0": p0, "p1": p1, "p2": p2,
                                "k1": Lit(2), "k2": Lit(1)},
                       children=[d0,
                                 leaf("False", b1, None, conj(psi, e1, p1), psi),
                                 leaf("False", None, b2, conj(psi, e2, p2), psi)])
    clean = Derivation("Struct", Judgment(loops.concl.c1, loops.concl.c2, psi, post),
                       payload={"c_equiv": while_cong(rule("guard_true"))},
                       children=[loops])
    init = assg("i_1 <- 1", "i_2 <- 1", psi)
    body_top = chain_seq([init, clean])
    top = Derivation("Conseq",
                     Judgment(body_top.concl.c1, body_top.concl.c2,
                              E("n_1 = n_2"), body_top.concl.post),
                     children=[body_top])
    sp = space({"n_1": const(2), "n_2": const(2),
                "i_1": ints(1, 5), "i_2": ints(1, 3),
                "x_1": ints(0, 1), "x_2": ints(0, 1),
                "s_1": const(0), "s_2": const(0)})
    vsp = space({"n_1": const(2), "n_2": const(2),
                 "s_1": ints(0, 1), "s_2": ints(0, 1)})
    golden = (
        "i_1 <- 1;\n"
        "i_2 <- 1;\n"
        "while i_1 <= 2 * n_1 do {\n"
        "  (x_1, x_2) <$ id_coupling(mu());\n"
        "  s_1 <- s_1 + x_1;\n"
        "  s_2 <- s_2 + x_2;\n"
        "  i_1 <- i_1 + 1;\n"
        "  if i_1 <= 2 * n_1 then {\n"
        "    x_1 <$ mu();\n"
        "    s_1 <- s_1 + x_1;\n"
        "    i_1 <- i_1 + 1\n"
        "  };\n"
        "  i_2 <- i_2 + 1\n"
        "}")
    return {
        "name": "loop_perforation", "env": "loops", "derivation": top,
        "check_space": sp, "validate_space": vsp, "golden": golden,
        "meta": {
            "description": "full accumulation loop against its half-rate perforation",
            "claimed_post": "s_1 = s_2",
        },
    }


def build_perforation_rate():
    psi = E("n_1 = n_2 and k_2 >= 1 and (n_2 % k_2) = 0 and (i_2 % k_2) = 0"
            " and 0 <= i_1 and i_1 <= i_2 and i_2 <= n_2")
    e1, e2 = E("i_1 < n_1"), E("i_2 < n_2")
    b1 = P("x_1 <$ mu(); s_1 <- s_1 + x_1; i_1 <- i_1 + 1")
    b2 = P("x_2 <$ mu(); s_2 <- s_2 + x_2; i_2 <- i_2 + k_2")
    e = E("i_1 < n_1 or i_2 < n_2")
    p0, p1, p2 = E("i_1 = i_2"), E("i_1 < i_2"), E("i_2 < i_1")
    pre0 = conj(psi, p0, e)

    ctr1, ctr2 = fresh_counter(1, LEFT), fresh_counter(1, RIGHT)
    for1 = desugar_bounded_for(b1, e1, Lit(1), ctr1)
    for2 = desugar_bounded_for(b2, e2, Lit(1), ctr2)

    ipair = assg("i_1 <- i_1 + 1", "i_2 <- i_2 + k_2", psi)
    spair = assg("s_1 <- s_1 + x_1", "s_2 <- s_2 + x_2", ipair.concl.pre)
    sync = chain_seq([rand_id("x_1 <$ mu()", "x_2 <$ mu()", pre0, spair.concl.pre),
                      spair, ipair])
    d0 = Derivation("Struct", Judgment(for1, for2, pre0, psi),
                    payload={"c1_equiv": sym(chain(rule("for_unfold"), rule("guard_true")),
                                             for1),
                             "c2_equiv": sym(chain(rule("for_unfold"), rule("guard_true")),
                                             for2)},
                    children=[sync])
    lag_bump = assg("i_1 <- i_1 + 1", None, psi)
    lag_s = assg("s_1 <- s_1 + x_1", None, lag_bump.concl.pre)
    d1 = chain_seq([
        leaf("RandL", "x_1 <$ mu()", None, conj(psi, e1, p1), lag_s.concl.pre),
        lag_s, lag_bump,
    ])
    d2 = leaf("False", None, b2, conj(psi, e2, p2), psi)
    post = conj(psi, neg(e1), neg(e2))
    loops = Derivation("While",
                       Judgment(While(e1, b1), While(e2, b2), psi, post),
                       payload={"e": e, "p0": p0, "p1": p1, "p2": p2,
                                "k1": Lit(1), "k2": Lit(1)},
                       children=[d0, d1, d2])
    init = assg("i_1 <- 0", "i_2 <- 0", psi)
    kdraw = leaf("RandR", None, "k_2 <$ uniform(factors(n_2))",
                 E("n_1 = n_2 and n_2 >= 1"), init.concl.pre)
    top = chain_seq([kdraw, init, loops])
    sp = space({"n_1": const(4), "n_2": const(4), "k_2": {"int": [1, 2, 4]},
                "i_1": ints(0, 4), "i_2": ints(0, 4),
                "x_1": ints(0, 1), "x_2": ints(0, 1),
                "s_1": const(0), "s_2": const(0)})
    vsp = space({"n_1": const(4), "n_2": const(4),
                 "s_1": const(0), "s_2": const(0)})
    golden = (
        "k_2 <$ uniform(factors(n_2));\n"
        "i_1 <- 0;\n"
        "i_2 <- 0;\n"
        "while i_1 < n_1 or i_2 < n_2 do {\n"
        "  if i_1 = i_2 then {\n"
        "    (x_1, x_2) <$ id_coupling(mu());\n"
        "    s_1 <- s_1 + x_1;\n"
        "    s_2 <- s_2 + x_2;\n"
        "    i_1 <- i_1 + 1;\n"
        "    i_2 <- i_2 + k_2\n"
        "  } else {\n"
        "    if i_1 < i_2 then {\n"
        "      x_1 <$ mu();\n"
        "      s_1 <- s_1 + x_1;\n"
        "      i_1 <- i_1 + 1\n"
        "    }\n"
        "  }\n"
        "}")
    return {
        "name": "loop_perforation_rate", "env": "loops", "derivation": top,
        "check_space": sp, "validate_space": vsp, "golden": golden,
        "meta": {
            "description": "full loop against a randomly-rated perforated loop",
        },
    }


# -- assembly ----------------------------------------------------------------

_BUILDERS = (
    build_assg_linear, build_rand_table, build_case_mirror, build_seq_affine,
    build_conseq_skip, build_while_left, build_while_sync, build_struct_unroll,
    build_rwalk, build_dynkin, build_glauber, build_chlg,
    build_stripmine, build_perforation, build_perforation_rate,
)


def build_all():
    out = {}
    for b in _BUILDERS:
        bundle = b()
        out[bundle["name"]] = bundle
    return out


def fixture_root():
    return os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                        "fixtures", "v1")


def write_fixtures(root=None):
    """Materialize every bundle as fixture.json + golden.pw on disk."""
    root = root or fixture_root()
    for name, bundle in build_all().items():
        d = os.path.join(root, name)
        os.makedirs(d, exist_ok=True)
        doc = {
            "name": name,
            "env": bundle["env"],
            "derivation": deriv_to_json(bundle["derivation"]),
            "check_space": bundle["check_space"],
            "validate_space": bundle["validate_space"],
            "meta": bundle["meta"],
        }
        with open(os.path.join(d, "fixture.json"), "w") as f:
            json.dump(doc, f, indent=2, sort_keys=False)
            f.write("\n")
        with open(os.path.join(d, "golden.pw"), "w") as f:
            f.write(bundle["golden"])
            f.write("\n")
    return root
