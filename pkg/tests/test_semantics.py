"""Exact truncation semantics: sub-distributions, loops, marginals."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from xprhl.lang import parse_var
from xprhl.parser import parse_expr, parse_program
from xprhl.semantics import (
    EvalError, Memory, SubDist, eval_expr, exec_exact, project_marginal,
    value_marginal,
)
from xprhl.hostfuncs import HostEnv

from helpers import mem

ENV = HostEnv()


# -- SubDist algebra ---------------------------------------------------------

def test_subdist_drops_zero_masses():
    d = SubDist({1: Fraction(1, 2), 2: Fraction(0), 3: Fraction(1, 2)})
    assert set(d.support()) == {1, 3}
    assert d.weight == 1


def test_subdist_rejects_negative_mass():
    with pytest.raises(EvalError):
        SubDist({1: Fraction(-1, 2)})


def test_bind_accumulates_residual():
    d = SubDist({0: Fraction(1, 2)}, residual=Fraction(1, 2))
    out = d.bind(lambda _: SubDist({1: Fraction(1, 2)}, residual=Fraction(1, 2)))
    assert out[1] == Fraction(1, 4)
    assert out.residual == Fraction(3, 4)


def test_product_marginals_are_factors():
    a = SubDist({0: Fraction(1, 3), 1: Fraction(2, 3)})
    b = SubDist({5: Fraction(1, 2), 6: Fraction(1, 2)})
    j = a.product(b)
    assert j.map(lambda p: p[0]).masses == a.masses
    assert j.map(lambda p: p[1]).masses == b.masses


# -- straight-line programs --------------------------------------------------

def test_assignment_is_dirac():
    res = exec_exact(parse_program("x <- 2 + 3"), mem(), ENV)
    assert res.dist.masses == {mem(x=5): Fraction(1)}
    assert res.converged


def test_uniform_sampling_is_uniform():
    res = exec_exact(parse_program("x <$ uniform(intv(1, 4))"), mem(), ENV)
    assert all(p == Fraction(1, 4) for p in res.dist.masses.values())
    assert len(res.dist) == 4


def test_seq_composes_as_bind():
    a = parse_program("x <$ uniform({0, 1})")
    b = parse_program("y <- x * 10")
    both = exec_exact(parse_program("x <$ uniform({0, 1});\ny <- x * 10"), mem(), ENV)
    composed = exec_exact(a, mem(), ENV).dist.bind(
        lambda m: exec_exact(b, m, ENV).dist)
    assert both.dist == composed


def test_abort_discards_mass():
    res = exec_exact(parse_program("x <$ uniform({0, 1});\n"
                                   "if x = 0 then {\n  abort\n}"), mem(), ENV)
    assert res.dist.weight == Fraction(1, 2)
    assert res.dist.residual == 0


def test_cond_splits_mass():
    res = exec_exact(parse_program(
        "x <$ uniform(intv(1, 6));\n"
        "if x <= 2 then {\n  y <- 0\n} else {\n  y <- 1\n}"), mem(), ENV)
    assert value_marginal(res.dist, parse_var("y")).masses == {
        0: Fraction(1, 3), 1: Fraction(2, 3)}


# -- loops and truncation ----------------------------------------------------

GEOMETRIC = parse_program(
    "n <- 0;\nstop <- 0;\n"
    "while stop = 0 do {\n  stop <$ uniform({0, 1});\n  n <- n + 1\n}")


def test_geometric_loop_masses():
    res = exec_exact(GEOMETRIC, mem(), ENV, unroll=10)
    assert value_marginal(res.dist, parse_var("n"))[1] == Fraction(1, 2)
    assert value_marginal(res.dist, parse_var("n"))[3] == Fraction(1, 8)
    assert res.dist.residual == Fraction(1, 2) ** 10


@given(st.integers(1, 12), st.integers(0, 6))
@settings(max_examples=30, deadline=None)
def test_unroll_refinement_is_monotone(u, extra):
    lo = exec_exact(GEOMETRIC, mem(), ENV, unroll=u)
    hi = exec_exact(GEOMETRIC, mem(), ENV, unroll=u + extra)
    assert hi.dist.residual <= lo.dist.residual
    for out, p in lo.dist.masses.items():
        assert hi.dist[out] >= p
    assert lo.dist.weight + lo.dist.residual <= 1


def test_nonterminating_loop_is_all_residual():
    res = exec_exact(parse_program("while true do {\n  x <- x + 1\n}"),
                     mem(x=0), ENV, unroll=8)
    assert res.dist.weight == 0
    assert res.dist.residual == 1
    assert not res.converged


def test_bounded_loop_converges():
    res = exec_exact(parse_program("i <- 0;\nwhile i < 5 do {\n  i <- i + 1\n}"),
                     mem(), ENV, unroll=10)
    assert res.converged
    assert res.dist.masses == {mem(i=5): Fraction(1)}


# -- marginals and expressions -----------------------------------------------

def test_project_marginal_groups_outcomes():
    res = exec_exact(parse_program(
        "x <$ uniform({0, 1});\ny <$ uniform({0, 1})"), mem(), ENV)
    marg = project_marginal(res.dist, {parse_var("x")})
    assert marg.masses == {mem(x=0): Fraction(1, 2), mem(x=1): Fraction(1, 2)}


@pytest.mark.parametrize("text,val", [
    ("2 + 3 * 4", 14),
    ("7 % 5", 2),
    ("true => false", False),
    ("false => false", True),
    ("1 <= 2 and 2 < 3", True),
    ("min(4, 2)", 2),
    ("abs(0 - 3)", 3),
    ("sum(intv(1, 4))", 10),
    ("len([5, 5, 5])", 3),
])
def test_eval_expr_operators(text, val):
    assert eval_expr(parse_expr(text), mem(), ENV) == val


def test_eval_expr_store_and_index():
    m = mem(w=(1, 2, 3))
    assert eval_expr(parse_expr("w[1]"), m, ENV) == 2
    assert eval_expr(parse_expr("w[1 -> 9]"), m, ENV) == (1, 9, 3)


def test_eval_expr_unbound_variable_raises():
    with pytest.raises(EvalError):
        eval_expr(parse_expr("nope + 1"), mem(), ENV)
