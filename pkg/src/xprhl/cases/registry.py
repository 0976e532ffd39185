"""Registry of the shipped fixture derivations.

Fixtures live on disk as ``fixture.json`` (serialized derivation plus the
state spaces) next to a ``golden.pw`` product listing; they are loaded
lazily and cached by name.
"""

import json
import os

from ..assertions import StateSpace
from ..kernel import (
    CheckContext, check, deriv_from_json, normalize_product, validate_product,
)
from ..lang import normalize
from ..parser import parse_program
from .envs import get_env


def fixture_root():
    return os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                        "fixtures", "v1")


class Case:
    """A shipped derivation with its environment, spaces and golden product."""

    def __init__(self, name, doc, golden_text):
        self.name = name
        self.env_name = doc["env"]
        self.derivation = deriv_from_json(doc["derivation"])
        self.check_space = StateSpace.from_json(doc["check_space"])
        self.validate_space = StateSpace.from_json(doc["validate_space"])
        self.meta = doc.get("meta", {})
        self.golden_text = golden_text

    @property
    def env(self):
        return get_env(self.env_name)

    @property
    def judgment(self):
        return self.derivation.concl

    @property
    def golden(self):
        return normalize(parse_program(self.golden_text))

    def check(self, **kw):
        args = dict(self.meta.get("check_args") or {})
        args.update(kw)
        ctx = CheckContext(self.check_space, self.env, **args)
        return check(self.derivation, ctx)

    def matches_golden(self, product):
        return normalize_product(product) == normalize_product(self.golden)

    def validate(self, product, **kw):
        return validate_product(self.judgment, product, self.validate_space,
                                self.env, **kw)


_CACHE = {}


def list_cases(root=None):
    root = root or fixture_root()
    if not os.path.isdir(root):
        return []
    return sorted(d for d in os.listdir(root)
                  if os.path.isfile(os.path.join(root, d, "fixture.json")))


def get_case(name, root=None):
    root = root or fixture_root()
    key = (root, name)
    if key not in _CACHE:
        d = os.path.join(root, name)
        path = os.path.join(d, "fixture.json")
        if not os.path.isfile(path):
            raise KeyError("unknown case %r" % name)
        with open(path) as f:
            doc = json.load(f)
        with open(os.path.join(d, "golden.pw")) as f:
            golden = f.read()
        _CACHE[key] = Case(name, doc, golden)
    return _CACHE[key]


CASES = tuple(list_cases())
