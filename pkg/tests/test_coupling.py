"""Coupling realization and the coupling inequality for TV distance."""

import random
from fractions import Fraction

import pytest

from xprhl.coupling import (
    CouplingError, check_marginals, coupling_tv_bound, joint_from_entries,
    realize, tv_distance,
)
from xprhl.lang import CouplingSpec
from xprhl.parser import parse_dist
from xprhl.semantics import SubDist
from xprhl.hostfuncs import HostEnv

from helpers import mem


def random_joint(rng, nvals=4, cells=6, denom=60):
    """Random rational joint over pairs from a small value set."""
    entries = {}
    total = 0
    for _ in range(cells):
        pair = (rng.randrange(nvals), rng.randrange(nvals))
        w = rng.randrange(1, 8)
        entries[pair] = entries.get(pair, 0) + w
        total += w
    return SubDist({k: Fraction(w, total) for k, w in entries.items()})


def marginal(joint, i):
    return joint.map(lambda pair: pair[i])


def test_coupling_inequality_on_random_tables():
    """TV(mu1, mu2) <= Pr[(x, y) ~ joint, x != y] for any joint table:
    every coupling witnesses an upper bound on the distance of its
    marginals."""
    rng = random.Random(0xC0FFEE)
    for i in range(1000):
        joint = random_joint(rng)
        mu1, mu2 = marginal(joint, 0), marginal(joint, 1)
        tv = tv_distance(mu1, mu2)
        bound = coupling_tv_bound(joint)
        assert tv <= bound, "table %d: tv %s > bound %s" % (i, tv, bound)


def test_identity_coupling_is_tight():
    rng = random.Random(17)
    for _ in range(100):
        mu = marginal(random_joint(rng), 0)
        diag = SubDist({(v, v): p for v, p in mu.masses.items()})
        assert coupling_tv_bound(diag) == 0
        assert tv_distance(marginal(diag, 0), marginal(diag, 1)) == 0


# -- realize -----------------------------------------------------------------

UNIF01 = parse_dist("uniform({0, 1})")


def test_realize_id_is_diagonal():
    spec = CouplingSpec("id", UNIF01)
    joint = realize(spec, mem(), HostEnv())
    assert joint.masses == {(0, 0): Fraction(1, 2), (1, 1): Fraction(1, 2)}


def test_realize_id_rejects_unequal_distributions():
    spec = CouplingSpec("id", UNIF01, parse_dist("uniform({0, 2})"))
    with pytest.raises(CouplingError):
        realize(spec, mem(), HostEnv())


def test_realize_bij_pairs_through_the_function():
    env = HostEnv(bijections={"flip": (lambda v: 1 - v, lambda v: 1 - v, ())})
    spec = CouplingSpec("bij", UNIF01, fn="flip")
    joint = realize(spec, mem(), env)
    assert joint.masses == {(0, 1): Fraction(1, 2), (1, 0): Fraction(1, 2)}


def test_realize_bij_rejects_non_bijection():
    env = HostEnv(bijections={"c0": (lambda v: 0, lambda v: 0, ())})
    spec = CouplingSpec("bij", UNIF01, fn="c0")
    with pytest.raises(CouplingError):
        realize(spec, mem(), env)


def test_realize_prod_is_independent():
    spec = CouplingSpec("prod", UNIF01, UNIF01)
    joint = realize(spec, mem(), HostEnv())
    assert joint.masses == {(a, b): Fraction(1, 4) for a in (0, 1) for b in (0, 1)}


def test_realize_table_checks_marginals():
    good = lambda m, env: (((0, 1), Fraction(1, 2)), ((1, 0), Fraction(1, 2)))
    bad = lambda m, env: (((0, 0), Fraction(1, 2)), ((1, 0), Fraction(1, 2)))
    env = HostEnv(tables={"good": good, "bad": bad})
    joint = realize(CouplingSpec("table", UNIF01, table="good"), mem(), env)
    assert coupling_tv_bound(joint) == 1
    with pytest.raises(CouplingError):
        realize(CouplingSpec("table", UNIF01, table="bad"), mem(), env)


def test_check_marginals_names_the_mismatch():
    joint = joint_from_entries([((0, 0), Fraction(1, 2)), ((1, 1), Fraction(1, 2))])
    mu = marginal(joint, 0)
    skew = SubDist({0: Fraction(1, 4), 1: Fraction(3, 4)})
    check_marginals(joint, mu, mu)
    with pytest.raises(CouplingError):
        check_marginals(joint, mu, skew)
