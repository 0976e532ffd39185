"""Derivation checking: primitive rules, derived-rule expansion, program
equivalences, and product normalization."""

import pytest

from xprhl.assertions import StateSpace
from xprhl.lang import Lit, cmd_equal, fmt_cmd, normalize, seq
from xprhl.parser import parse_expr, parse_program
from xprhl.hostfuncs import HostEnv
from xprhl.kernel import CheckContext, Derivation, Judgment, check, seq_compose
from xprhl.kernel.equiv import (
    EquivError, chain, check_equiv, refl, rule, seq_cong, sym, while_cong,
)
from xprhl.kernel.expand import expand_derived
from xprhl.kernel.rules import KernelError, normalize_product
from xprhl.kernel.serialize import deriv_from_json, deriv_to_json
from xprhl.cases.build import assg, chain_seq, ints, leaf, rand_id, space
from xprhl.cases import get_case

E = parse_expr
P = parse_program

ENV = HostEnv(bijections={"flip": (lambda v: 1 - v, lambda v: 1 - v, ())})


def ctx(sp=None, **kw):
    sp = sp if sp is not None else space({"x_1": ints(0, 3), "x_2": ints(0, 3)})
    return CheckContext(StateSpace.from_json(sp), ENV, **kw)


# -- primitive rules ---------------------------------------------------------

def test_assg_discharges_by_substitution():
    d = assg("x_1 <- x_1 + 1", "x_2 <- x_2 + 1", "x_1 = x_2")
    rep = check(d, ctx())
    assert rep.status == "accepted"
    assert rep.obligations == []
    assert cmd_equal(rep.product, P("x_1 <- x_1 + 1;\nx_2 <- x_2 + 1"))


def test_assg_with_wrong_pre_is_refuted():
    d = assg("x_1 <- x_1 + 1", "x_2 <- x_2 + 1", "x_1 = x_2", pre="x_1 < x_2")
    rep = check(d, ctx())
    assert rep.status == "rejected"
    assert rep.failures()


def test_assg_with_weaker_pre_is_proved():
    # pre need not be syntactically subst(post) if it implies it
    d = assg("x_1 <- x_1 + 1", "x_2 <- x_2 + 1", "x_1 <= x_2 + 2",
             pre="x_1 = x_2")
    rep = check(d, ctx())
    assert rep.status == "accepted"
    assert all(o.verdict == "proved" for o in rep.obligations)


def test_rand_id_coupling_accepted():
    d = rand_id("x_1 <$ uniform(intv(0, 3))", "x_2 <$ uniform(intv(0, 3))",
                "true", "x_1 = x_2")
    rep = check(d, ctx(space({})))
    assert rep.status == "accepted"
    assert "id_coupling" in fmt_cmd(rep.product)


def test_rand_coupling_violating_post_is_refuted():
    d = rand_id("x_1 <$ uniform(intv(0, 3))", "x_2 <$ uniform(intv(0, 3))",
                "true", "x_1 < x_2")
    rep = check(d, ctx(space({})))
    assert rep.status == "rejected"


def test_rand_bij_coupling():
    d = leaf("Rand", "x_1 <$ uniform({0, 1})", "x_2 <$ uniform({0, 1})",
             E("true"), E("x_1 != x_2"), payload={"kind": "bij", "fn": "flip"})
    rep = check(d, ctx(space({})))
    assert rep.status == "accepted"


def test_seq_requires_matching_interface():
    a = assg("x_1 <- 0", "x_2 <- 0", "x_1 = x_2")
    b = assg("x_1 <- x_1 + 1", "x_2 <- x_2 + 1", "x_1 = x_2", pre="x_1 = x_2")
    rep = check(chain_seq([a, b]), ctx())
    assert rep.status == "accepted"
    # b's pre (x_1 = x_2 after substitution) != a's post when the post is changed
    bad = Derivation("Seq", Judgment(
        seq(a.concl.c1, b.concl.c1), seq(a.concl.c2, b.concl.c2),
        a.concl.pre, E("x_1 < x_2")), children=[a, b])
    rep = check(bad, ctx())
    assert rep.status == "rejected"
    assert rep.error is not None


def test_conseq_checks_both_implications():
    inner = assg("x_1 <- x_1 + 1", "x_2 <- x_2 + 1", "x_1 = x_2")
    d = leaf("Conseq", inner.concl.c1, inner.concl.c2,
             E("x_1 = x_2 and x_1 = 0"), E("x_1 <= x_2"), children=[inner])
    rep = check(d, ctx())
    assert rep.status == "accepted"
    bad = leaf("Conseq", inner.concl.c1, inner.concl.c2,
               E("x_1 <= x_2"), E("x_1 = x_2"), children=[inner])
    rep = check(bad, ctx())
    assert rep.status == "rejected"


def test_false_rule_needs_unsat_pre():
    d = leaf("False", "x_1 <- 0", "abort", E("x_1 < 0 and x_1 > 0"), E("false"))
    assert check(d, ctx()).status == "accepted"
    d = leaf("False", "x_1 <- 0", "abort", E("x_1 = 0"), E("false"))
    assert check(d, ctx()).status == "rejected"


def test_case_splits_on_a_predicate():
    then = rand_id("x_1 <$ uniform({0, 1})", "x_2 <$ uniform({0, 1})",
                   E("b_1 = 0 and b_2 = 0"), E("x_1 = x_2"))
    els = leaf("Rand", "x_1 <$ uniform({0, 1})", "x_2 <$ uniform({0, 1})",
               E("not (b_1 = 0 and b_2 = 0)"), E("x_1 = x_2"),
               payload={"kind": "id"})
    d = leaf("Case", then.concl.c1, then.concl.c2, E("true"), E("x_1 = x_2"),
             payload={"e": E("b_1 = 0 and b_2 = 0")}, children=[then, els])
    sp = space({"b_1": ints(0, 1), "b_2": ints(0, 1)})
    rep = check(d, ctx(sp))
    assert rep.status == "accepted"
    assert isinstance(rep.product.guard, type(E("b_1 = 0")))  # product conditions on e


def test_evidence_space_downgrades_status():
    sp = {"vars": {"x_1": {"int": {"lo": 0, "hi": 10 ** 6}}, "x_2": {"int": {"lo": 0, "hi": 10 ** 6}}},
          "mode": "sample", "samples": 30}
    d = assg("x_1 <- x_1 + 1", "x_2 <- x_2 + 1", "x_1 <= x_2 + 2",
             pre="x_1 = x_2")
    rep = check(d, ctx(sp))
    assert rep.status == "accepted-with-evidence"
    assert rep.accepted


# -- derived rules expand to the primitive core ------------------------------

def _conservative(derived, aux=None, sp=None):
    """Native check and check-after-expansion agree (status and product)."""
    c = ctx(sp)
    native = check(derived, c)
    assert native.accepted, native.failures() or native.error
    rep = check(expand_derived(derived, aux=aux), c)
    assert rep.accepted, rep.failures() or rep.error
    assert cmd_equal(normalize_product(rep.product),
                     normalize_product(native.product))
    return native, rep


def test_expand_skip_is_conservative():
    from xprhl.lang import parse_var
    d = leaf("Skip", "skip", "skip", E("x_1 = x_2"), E("x_1 = x_2"))
    _conservative(d, aux=(parse_var("x_1"), parse_var("x_2")))


def test_expand_assg_left_is_conservative():
    from xprhl.lang import parse_var
    d = leaf("AssgL", "x_1 <- x_2 + 1", "skip",
             E("x_2 + 1 = x_2 + 1"), E("x_1 = x_2 + 1"))
    _conservative(d, aux=parse_var("x_2"))


def test_expand_rand_right_is_conservative():
    from xprhl.lang import parse_var
    d = leaf("RandR", "skip", "x_2 <$ uniform(intv(0, 3))",
             E("true"), E("0 <= x_2"))
    _conservative(d, aux=parse_var("x_1"))


def test_expand_cond_l_is_conservative():
    then = assg("y_1 <- 1", "y_2 <- 1", "y_1 = y_2",
                pre="x_1 = 0")
    els = assg("y_1 <- 1", "y_2 <- 1", "y_1 = y_2",
               pre="not (x_1 = 0)")
    d = leaf("CondL", "if x_1 = 0 then {\n  y_1 <- 1\n} else {\n  y_1 <- 1\n}",
             "y_2 <- 1", E("true"), E("y_1 = y_2"), children=[then, els])
    _conservative(d)


def test_seq_compose_interleaves_one_sided_proofs():
    a = leaf("AssgL", "x_1 <- 1", "skip", E("1 = 1"), E("x_1 = 1"))
    b = leaf("AssgR", "skip", "x_2 <- 1", E("x_1 = 1"), E("x_1 = x_2"))
    d = seq_compose(a, b)
    rep = check(d, ctx(space({})))
    assert rep.status == "accepted"
    assert d.concl.c1 == normalize(P("x_1 <- 1"))
    assert d.concl.c2 == normalize(P("x_2 <- 1"))
    assert cmd_equal(normalize(rep.product), P("x_1 <- 1;\nx_2 <- 1"))


def test_seq_compose_rejects_mismatched_interface():
    a = leaf("AssgL", "x_1 <- 1", "skip", E("1 = 1"), E("x_1 = 1"))
    b = leaf("AssgR", "skip", "x_2 <- 1", E("x_1 = 2"), E("x_1 = x_2"))
    with pytest.raises(KernelError):
        seq_compose(a, b)


# -- program equivalences ----------------------------------------------------

EQ_SPACE = StateSpace.from_json({"vars": {"x": ints(0, 3)}})


def _equiv(node, lhs, rhs, phi="true"):
    return check_equiv(node, E(phi), P(lhs), P(rhs), EQ_SPACE, ENV)


def test_unroll_rewrites_a_loop_once():
    obs = _equiv(rule("unroll"),
                 "while x < 2 do {\n  x <- x + 1\n}",
                 "if x < 2 then {\n  x <- x + 1;\n"
                 "  while x < 2 do {\n    x <- x + 1\n  }\n}")
    assert all(rep.verdict == "proved" for _, rep in obs)


def test_unroll_then_guard_false_removes_a_dead_loop():
    obs = _equiv(chain(rule("unroll"), rule("guard_false")),
                 "while x < 0 do {\n  x <- x + 1\n}", "skip", phi="x >= 0")
    assert all(rep.verdict == "proved" for _, rep in obs)


def test_guard_true_strips_a_vacuous_conditional():
    obs = _equiv(rule("guard_true"),
                 "if 0 <= x then {\n  x <- x + 1\n} else {\n  abort\n}",
                 "x <- x + 1", phi="0 <= x")
    assert all(rep.verdict == "proved" for _, rep in obs)


def test_guard_true_fails_when_phi_is_too_weak():
    with pytest.raises(EquivError):
        _equiv(rule("guard_true"),
               "if 1 <= x then {\n  x <- x + 1\n} else {\n  abort\n}",
               "x <- x + 1", phi="true")


def test_sym_runs_a_rewrite_backwards():
    loop = "while x < 2 do {\n  x <- x + 1\n}"
    unrolled = ("if x < 2 then {\n  x <- x + 1;\n"
                "  while x < 2 do {\n    x <- x + 1\n  }\n}")
    obs = check_equiv(sym(rule("unroll"), P(loop)), E("true"),
                      P(unrolled), P(loop), EQ_SPACE, ENV)
    assert all(rep.verdict == "proved" for _, rep in obs)


def test_chain_and_seq_cong_compose_rewrites():
    node = chain(rule("unroll"), seq_cong(0, refl()))
    obs = _equiv(node,
                 "while x < 1 do {\n  x <- x + 1\n}",
                 "if x < 1 then {\n  x <- x + 1;\n"
                 "  while x < 1 do {\n    x <- x + 1\n  }\n}")
    assert all(rep.verdict == "proved" for _, rep in obs)


def test_equiv_mismatch_raises():
    with pytest.raises(EquivError):
        _equiv(rule("unroll"), "x <- 1", "x <- 1")


def test_for_unfold_expands_bounded_loops():
    lhs = ("c <- 0;\n"
           "while c < 2 and true do {\n  x <- x + 1;\n  c <- c + 1\n}")
    rhs = ("if true then {\n  x <- x + 1\n};\n"
           "if true then {\n  x <- x + 1\n}")
    obs = _equiv(rule("for_unfold"), lhs, rhs)
    assert all(rep.verdict == "proved" for _, rep in obs)


# -- product normalization ---------------------------------------------------

def test_normalize_product_drops_dead_counters():
    c = P("__for1_2 <- 0;\nx_1 <- 1;\n__for1_2 <- __for1_2 + 1")
    out = normalize_product(c)
    assert cmd_equal(out, P("x_1 <- 1"))


def test_normalize_product_renames_survivors_in_order():
    c = P("__for7_2 <- 0;\nwhile __for7_2 < 3 do {\n"
          "  x_2 <- x_2 + 1;\n  __for7_2 <- __for7_2 + 1\n}")
    out = normalize_product(c)
    assert "__for1_2" in fmt_cmd(out)
    assert "__for7_2" not in fmt_cmd(out)


# -- serialization -----------------------------------------------------------

def test_derivation_json_round_trip():
    d = get_case("rwalk_mirror").derivation
    blob = deriv_to_json(d)
    back = deriv_from_json(blob)
    assert deriv_to_json(back) == blob
