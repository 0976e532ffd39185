"""JSON (de)serialization of derivations.

Programs and assertions are stored as DSL text; rule payloads store their
expressions the same way.  A derivation file bundles the judgment tree
with the state spaces used for checking and validation and the host
environment configuration.
"""

from ..lang import fmt_cmd, fmt_expr
from ..parser import parse_expr, parse_program
from .equiv import EquivNode
from .rules import Derivation, Judgment

_EXPR_PAYLOAD_KEYS = ("e", "p0", "p1", "p2", "k1", "k2")


def judgment_to_json(j):
    return {
        "c1": fmt_cmd(j.c1),
        "c2": fmt_cmd(j.c2),
        "pre": fmt_expr(j.pre),
        "post": fmt_expr(j.post),
    }


def judgment_from_json(d):
    return Judgment(
        parse_program(d["c1"]),
        parse_program(d["c2"]),
        parse_expr(d["pre"]),
        parse_expr(d["post"]),
    )


def equiv_to_json(n):
    if n is None:
        return None
    out = {"kind": n.kind}
    if n.sub is not None:
        out["sub"] = equiv_to_json(n.sub)
    if n.subs is not None:
        out["subs"] = [equiv_to_json(s) for s in n.subs]
    if n.then is not None:
        out["then"] = equiv_to_json(n.then)
    if n.els is not None:
        out["els"] = equiv_to_json(n.els)
    if n.at is not None:
        out["at"] = n.at
    if n.target is not None:
        out["target"] = fmt_cmd(n.target)
    return out


def equiv_from_json(d):
    if d is None:
        return None
    return EquivNode(
        d["kind"],
        sub=equiv_from_json(d.get("sub")),
        subs=[equiv_from_json(s) for s in d["subs"]] if "subs" in d else None,
        then=equiv_from_json(d.get("then")),
        els=equiv_from_json(d.get("els")),
        at=d.get("at"),
        target=parse_program(d["target"]) if "target" in d else None,
    )


def payload_to_json(rule, payload):
    out = {}
    for k, v in payload.items():
        if k in ("c1_equiv", "c2_equiv", "c_equiv"):
            out[k] = equiv_to_json(v)
        elif k in _EXPR_PAYLOAD_KEYS:
            out[k] = fmt_expr(v)
        else:
            out[k] = v
    return out


def payload_from_json(rule, d):
    out = {}
    for k, v in (d or {}).items():
        if k in ("c1_equiv", "c2_equiv", "c_equiv"):
            out[k] = equiv_from_json(v)
        elif k in _EXPR_PAYLOAD_KEYS:
            out[k] = parse_expr(v)
        else:
            out[k] = v
    return out


def deriv_to_json(d):
    out = {"rule": d.rule}
    out.update(judgment_to_json(d.concl))
    if d.payload:
        out["payload"] = payload_to_json(d.rule, d.payload)
    if d.children:
        out["children"] = [deriv_to_json(c) for c in d.children]
    return out


def deriv_from_json(d):
    return Derivation(
        d["rule"],
        judgment_from_json(d),
        payload=payload_from_json(d["rule"], d.get("payload")),
        children=[deriv_from_json(c) for c in d.get("children", [])],
    )
