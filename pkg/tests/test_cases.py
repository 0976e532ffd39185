"""The bundled case studies: every derivation checks, reproduces its golden
product, and validates as an exact coupling."""

import json
import os

import pytest

from xprhl.lang import cmd_equal, fmt_cmd, normalize, parse_var
from xprhl.parser import parse_program
from xprhl.kernel.rules import normalize_product
from xprhl.kernel.serialize import deriv_to_json
from xprhl.cases import get_case, list_cases
from xprhl.cases.build import build_all, fixture_root

ALL = list_cases()


def test_corpus_is_complete():
    assert len(ALL) >= 12
    assert set(build_all()) == set(ALL)


@pytest.mark.parametrize("name", ALL)
def test_case_checks_and_matches_golden(name):
    case = get_case(name)
    rep = case.check()
    assert rep.accepted, "%s: %s" % (name, rep.failures() or rep.error)
    assert case.matches_golden(rep.product), (
        "%s: product drifted from the golden file:\n%s"
        % (name, fmt_cmd(normalize_product(rep.product))))


@pytest.mark.parametrize("name", ALL)
def test_case_product_is_a_coupling(name):
    case = get_case(name)
    rep = case.check()
    sound = case.validate(rep.product, max_states=40)
    assert sound.ok, "%s: %r" % (name, sound.first_failure())
    assert sound.converged


FULLY_PROVED = [
    "assg_linear", "rand_table", "case_mirror", "seq_affine", "conseq_skip",
    "while_left", "while_sync", "rwalk_mirror",
]


@pytest.mark.parametrize("name", FULLY_PROVED)
def test_exhaustive_cases_carry_no_evidence_verdicts(name):
    rep = get_case(name).check()
    assert rep.status == "accepted", [
        o for o in rep.obligations if o.verdict != "proved"]


def test_goldens_are_normalized_programs():
    """Golden files must parse and be fixed points of normalization, so a
    textual diff against a printed product is meaningful."""
    for name in ALL:
        case = get_case(name)
        prog = parse_program(case.golden_text)
        assert cmd_equal(normalize(prog), prog), name
        assert fmt_cmd(normalize_product(prog)) == case.golden_text.rstrip("\n"), name


def test_fixture_files_match_the_builders():
    """The shipped fixture JSON is exactly what the builders produce."""
    built = build_all()
    root = fixture_root()
    for name, bundle in built.items():
        with open(os.path.join(root, name, "fixture.json")) as fh:
            on_disk = json.load(fh)
        assert on_disk["derivation"] == deriv_to_json(bundle["derivation"]), name
        assert on_disk["env"] == bundle["env"], name
        with open(os.path.join(root, name, "golden.pw")) as fh:
            assert fh.read() == bundle["golden"] + "\n", name


def test_case_meta_is_well_formed():
    for name in ALL:
        case = get_case(name)
        assert case.meta.get("description"), name
        if "failure_event" in case.meta:
            # events must mention only product variables
            from xprhl.lang import cmd_vars, expr_vars
            from xprhl.parser import parse_expr
            rep = case.check()
            ev = expr_vars(parse_expr(case.meta["failure_event"]))
            assert ev <= cmd_vars(rep.product), name


def test_stripmine_needs_the_lossless_assumption():
    """The vacuous phase loops of the strip-mining proof sit on a sampled
    space, so their losslessness is an explicit assumption, not a theorem."""
    case = get_case("loop_stripmine")
    assert case.meta["check_args"] == {"assume_lossless": True}
    rep = case.check(assume_lossless=False)
    assert rep.status == "rejected"
