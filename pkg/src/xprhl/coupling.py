"""Couplings: realizing joint distributions and total-variation bounds.

``realize`` turns a CouplingSpec into a joint sub-distribution over value
pairs and verifies the two marginal equations exactly before returning;
a spec whose marginals do not match raises CouplingError with the first
discrepancy.
"""

from fractions import Fraction

from .lang import Coupled, CouplingSpec
from .semantics import SubDist, eval_dist

ZERO = Fraction(0)


class CouplingError(Exception):
    pass


def _marginal(joint, side):
    i = 0 if side == "left" else 1
    return joint.map(lambda pair: pair[i])


def check_marginals(joint, mu1, mu2, context=""):
    """Verify pi_1(joint) == mu1 and pi_2(joint) == mu2 exactly."""
    for side, mu in (("left", mu1), ("right", mu2)):
        got = _marginal(joint, side)
        if got.masses != mu.masses:
            keys = set(got.masses) | set(mu.masses)
            for k in sorted(keys, key=repr):
                if got[k] != mu[k]:
                    raise CouplingError(
                        "%s%s marginal mismatch at %r: joint gives %s, expected %s"
                        % (context and context + ": ", side, k, got[k], mu[k]))


def realize(spec, m, env):
    """Joint distribution over (v1, v2) prescribed by the spec in memory m.

    The marginal equations are always verified exactly; identity coupling
    additionally requires the two sides to be the same full distribution.
    """
    mu1 = eval_dist(spec.left, m, env)
    mu2 = eval_dist(spec.right, m, env)
    if spec.kind == "id":
        if mu1.masses != mu2.masses:
            raise CouplingError("identity coupling of unequal distributions")
        if mu1.weight != 1:
            raise CouplingError("identity coupling of a sub-distribution (weight %s)" % mu1.weight)
        joint = SubDist({(v, v): p for v, p in mu1.masses.items()})
    elif spec.kind == "bij":
        fwd, inv, argnames = env.bijection(spec.fn)
        args = [m[_var(a)] for a in argnames]
        if mu1.weight != 1:
            raise CouplingError("bijection coupling of a sub-distribution")
        masses = {}
        for v, p in mu1.masses.items():
            w = fwd(v, *args)
            if inv(w, *args) != v:
                raise CouplingError("%r is not an involution-paired bijection at %r" % (spec.fn, v))
            key = (v, w)
            if key in masses:
                raise CouplingError("bijection %r is not injective on the support" % spec.fn)
            masses[key] = p
        joint = SubDist(masses)
    elif spec.kind == "prod":
        try:
            joint = mu1.product(mu2)
        except Exception as e:
            raise CouplingError("product coupling: %s" % e) from None
    elif spec.kind == "table":
        gen = env.table(spec.table)
        joint = SubDist(dict(gen(m, env)))
    else:
        raise CouplingError("unknown coupling kind %r" % spec.kind)
    check_marginals(joint, mu1, mu2, context=spec.kind + " coupling")
    return joint


def joint_from_entries(entries):
    """Joint distribution from explicit table entries ((v1,v2), mass)."""
    return SubDist(dict(entries))


def tv_distance(mu1, mu2):
    """Total variation distance (1/2) sum |mu1(a) - mu2(a)| as a Fraction."""
    keys = set(mu1.masses) | set(mu2.masses)
    return sum((abs(mu1[k] - mu2[k]) for k in keys), ZERO) / 2


def coupling_tv_bound(joint):
    """Pr[(x, x') ~ joint, x != x'] - by the fundamental theorem this
    bounds the TV distance of the marginals."""
    return sum((p for (a, b), p in joint.masses.items() if a != b), ZERO)


def coupled_dist(spec_kind, g1, g2=None, fn=None, table=None):
    return Coupled(CouplingSpec(spec_kind, g1, g2, fn=fn, table=table))


def _var(name):
    from .lang import parse_var

    return parse_var(name)
