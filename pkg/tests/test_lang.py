"""Syntax layer: variables, expression printing/parsing, command utilities."""

import pytest
from hypothesis import given, strategies as st

from xprhl.lang import (
    LEFT, RIGHT, BinOp, Cond, Lit, Seq, Skip, Var, VarE, While,
    cmd_equal, cmd_vars, conj, flatten, fmt_cmd, fmt_expr, lit, neg,
    normalize, parse_var, read_vars, seq, subst_expr, ve, written_vars,
)
from xprhl.parser import ParseError, parse_expr, parse_program


# -- variables ---------------------------------------------------------------

def test_parse_var_tags():
    assert parse_var("x_1") == Var("x", LEFT)
    assert parse_var("x_2") == Var("x", RIGHT)
    assert parse_var("x") == Var("x", None)
    assert parse_var("w'_1").name == "w'"


def test_var_str_round_trip():
    for name in ("x", "x_1", "w'_2", "__for1_2"):
        assert str(parse_var(name)) == name


# -- expression round trip ---------------------------------------------------

_names = st.sampled_from(["x", "y_1", "z_2", "w'_1", "n"])


def _mkvar(name):
    v = parse_var(name)
    return ve(v)


def _exprs():
    atoms = st.one_of(
        st.integers(-20, 20).map(lit),
        st.booleans().map(lit),
        _names.map(_mkvar),
    )

    def extend(children):
        bins = st.sampled_from(["+", "-", "*", "<", "<=", "=", "and", "or", "=>", "%"])
        return st.one_of(
            st.tuples(bins, children, children).map(lambda t: BinOp(t[0], t[1], t[2])),
            children.map(neg),
        )
    return st.recursive(atoms, extend, max_leaves=12)


@given(_exprs())
def test_fmt_parse_expr_round_trip(e):
    assert parse_expr(fmt_expr(e)) == e


@pytest.mark.parametrize("text", [
    "x + y * 2", "(x + y) * 2", "a and b or c", "not (x = y)",
    "x <= y => y <= z", "f(x, y) + g()", "w[3]", "w[v -> c]",
    "[1, 2, 3]", "{1, 2}", "x % 5", "-x + 1",
])
def test_parse_expr_reprints_stably(text):
    e = parse_expr(text)
    assert parse_expr(fmt_expr(e)) == e


def test_parse_expr_rejects_garbage():
    with pytest.raises(ParseError):
        parse_expr("x +")
    with pytest.raises(ParseError):
        parse_expr("if x")


# -- program round trip ------------------------------------------------------

PROGRAMS = [
    "skip",
    "abort",
    "x <- 1",
    "x <$ uniform(intv(1, 6))",
    "x <$ dirac(y + 1)",
    "(x, y) <$ id_coupling(uniform({0, 1}))",
    "(x, y) <$ bij_coupling(opp, uniform({0, 1}))",
    "(x, y) <$ prod_coupling(uniform({0, 1}), uniform({0, 1}))",
    "x <- 1;\ny <- x + 1",
    "if x < 3 then {\n  x <- x + 1\n} else {\n  skip\n}",
    "if x < 3 then {\n  x <- x + 1\n}",
    "while x < 10 do {\n  x <- x + 1\n}",
]


@pytest.mark.parametrize("text", PROGRAMS)
def test_fmt_parse_program_round_trip(text):
    c = parse_program(text)
    assert cmd_equal(normalize(parse_program(fmt_cmd(c))), normalize(c))


# -- command utilities -------------------------------------------------------

def test_conj_drops_trivial_true():
    x = parse_expr("x = 1")
    assert conj(Lit(True), x) == x
    assert conj(x, Lit(True)) == x
    assert conj() == Lit(True)


def test_normalize_flattens_nested_seq():
    a, b, c = (parse_program(s) for s in ("x <- 1", "y <- 2", "z <- 3"))
    nested = Seq(Seq(a, b), c)
    assert flatten(nested) == [a, b, c]
    assert normalize(nested) == normalize(seq(a, b, c))


def test_normalize_drops_skip():
    c = parse_program("skip;\nx <- 1;\nskip")
    assert normalize(c) == parse_program("x <- 1")


def test_subst_expr_replaces_variable():
    e = parse_expr("x_1 + y_1")
    out = subst_expr(e, {parse_var("x_1"): parse_expr("z_1 * 2")})
    assert out == parse_expr("z_1 * 2 + y_1")


def test_cmd_vars_and_written_vars():
    c = parse_program("x <- y + 1;\nif x < 2 then {\n  z <$ uniform({0, 1})\n}")
    vs = {str(v) for v in cmd_vars(c)}
    assert vs == {"x", "y", "z"}
    assert {str(v) for v in written_vars(c)} == {"x", "z"}
    assert {str(v) for v in read_vars(c)} == {"y", "x"}
