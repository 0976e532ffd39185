"""Compiled operational runner: path enumeration and sampling agree with the
exact semantics."""

import random
from fractions import Fraction

import pytest
import scipy.stats

from xprhl.parser import parse_program
from xprhl.semantics import EvalError, Memory, exec_exact
from xprhl.sampler import compile_runner, enumerate_exact, exec_sample
from xprhl.hostfuncs import HostEnv

from helpers import mem

ENV = HostEnv()

PROGRAMS = [
    "x <- 4",
    "x <$ uniform(intv(1, 6))",
    "x <$ uniform({0, 1});\ny <$ uniform({0, 1});\nz <- x + y",
    "x <$ uniform(intv(0, 3));\nif x < 2 then {\n  y <- 0\n} else {\n  y <- x\n}",
    "i <- 0;\nwhile i < 4 do {\n  i <- i + 1;\n  x <$ uniform({0, 1})\n}",
    "(x, y) <$ id_coupling(uniform(intv(1, 3)))",
    "(x, y) <$ bij_coupling(opp, uniform({-1, 1}))",
    "(x, y) <$ prod_coupling(uniform({0, 1}), uniform({0, 1}))",
]


@pytest.mark.parametrize("text", PROGRAMS)
def test_enumerate_matches_exact_semantics(text):
    prog = parse_program(text)
    want = exec_exact(prog, mem(), ENV).dist
    got = {}
    for out, p in enumerate_exact(prog, mem(), ENV):
        m = Memory(out)
        got[m] = got.get(m, Fraction(0)) + p
    assert got == want.masses


def test_enumerate_rejects_nontermination():
    prog = parse_program("while true do {\n  x <$ uniform({0, 1})\n}")
    with pytest.raises(EvalError):
        enumerate_exact(prog, mem(x=0), ENV, budget=200)


def test_exec_sample_is_deterministic_per_seed():
    prog = parse_program("x <$ uniform(intv(1, 1000))")
    a = exec_sample(prog, mem(), ENV, seed=7)
    b = exec_sample(prog, mem(), ENV, seed=7)
    c = exec_sample(prog, mem(), ENV, seed=8)
    assert a.final == b.final
    assert a.terminated and b.terminated
    assert (a.final, c.final) != (b.final, a.final) or a.final != c.final


def test_sample_outcome_lies_in_exact_support():
    prog = parse_program(PROGRAMS[3])
    support = set(exec_exact(prog, mem(), ENV).dist.support())
    for seed in range(25):
        assert exec_sample(prog, mem(), ENV, seed=seed).final in support


@pytest.mark.parametrize("text,var", [
    ("x <$ uniform(intv(1, 6))", "x"),
    ("x <$ uniform({0, 1});\ny <$ uniform({0, 1});\nz <- x + y", "z"),
])
def test_sampler_frequencies_match_exact_chisquare(text, var):
    """Goodness of fit of the compiled sampler against the exact law."""
    prog = parse_program(text)
    exact = exec_exact(prog, mem(), ENV).dist
    law = {}
    for out, p in exact.masses.items():
        v = out[[w for w in out if w.name == var][0]]
        law[v] = law.get(v, Fraction(0)) + p

    fn = compile_runner(prog, ENV)
    rng = random.Random(0xC0FFEE)
    n = 6000
    counts = {v: 0 for v in law}
    for _ in range(n):
        out, _steps, ok = fn({}, rng, 10 ** 6)
        assert ok
        counts[out[[w for w in out if w.name == var][0]]] += 1

    keys = sorted(law)
    stat, pvalue = scipy.stats.chisquare(
        [counts[k] for k in keys], [float(law[k]) * n for k in keys])
    assert pvalue > 1e-4, "sampler disagrees with exact law (p=%g)" % pvalue


def test_budget_stops_runaway_loop():
    prog = parse_program("while true do {\n  x <- x + 1\n}")
    trace = exec_sample(prog, mem(x=0), ENV, seed=1, budget=50)
    assert not trace.terminated
