"""Shared helpers for the test suite."""

from fractions import Fraction

from xprhl.lang import parse_var
from xprhl.semantics import Memory
from xprhl.hostfuncs import HostEnv


def mem(**kv):
    """Memory literal from keyword arguments; keys are parsed as variables."""
    return Memory({parse_var(k): v for k, v in kv.items()})


def masses_of(result, **kv):
    """Probability of the outcome given by keyword arguments."""
    return result.dist[mem(**kv)]


def frac(a, b=1):
    return Fraction(a, b)


def plain_env(**kw):
    return HostEnv(**kw)
