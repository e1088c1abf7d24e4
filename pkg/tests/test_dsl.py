import pytest

from ctrlseq.deontic import DEONTIC, FACTUAL, MIXED, OBLIGATION, PERMISSION
from ctrlseq.dsl import BundleError, load_bundle, parse_bundle
from ctrlseq.syntax import TOP, parse_formula

F = parse_formula


def test_full_bundle():
    b = parse_bundle("""\
# comment line
atoms p q r s
fact: p | q          # trailing comment
default: p : q, r => q
oblig-axiom: s
perm-axiom: r
oblig-f: top : p => p
oblig-d: p : q => q
perm-f: q : r => r
schema: symmetric_pair { rule=O1 right="p | q" }
""")
    assert b.W == (F("p | q"),)
    assert b.D[0].justifications == (F("q"), F("r"))
    n = b.normative_system
    assert n.Wo == (F("s"),) and set(n.Wp) == {F("s"), F("r")}
    assert [r.name for r in n.O] == ["O1", "O2"]
    assert [r.name for r in n.P] == ["O1", "O2", "P1"]
    assert n.O[0].condition == TOP and n.O[0].kind == FACTUAL and n.O[1].kind == DEONTIC
    assert n.P[2].mode == PERMISSION
    assert b.atoms == frozenset("pqrs")
    (spec,) = b.schema("symmetric_pair")
    assert spec.get("rule") == "O1" and spec.get("right") == "p | q"
    assert b.rule("D1") is b.D[0]


def test_atoms_line_is_optional_and_top_needs_no_declaration():
    b = parse_bundle("default: top : p => p\n")
    assert b.atoms == {"p"}
    assert parse_bundle("atoms p\ndefault: top : p => p\n").atoms == {"p"}


def test_mixed_norm_and_exceptions():
    b = parse_bundle("oblig-f: top : ~p => ~p unless r, s\noblig-m: p ; ~p : q => q\n")
    o1, o2 = b.normative_system.O
    assert o1.exceptions == (F("r"), F("s"))
    assert o2.kind == MIXED and o2.condition == F("p") and o2.deontic_condition == F("~p")


def test_specificity_rewrite_moves_the_condition_into_exceptions():
    b = parse_bundle("oblig-f: p : ~q => ~q\noblig-f: p & r : q => q\n"
                     "schema: specificity_rewrite { general=O1 specific=O2 }\n")
    assert b.normative_system.O[0].exceptions == (F("p & r"),)
    assert b.rule("O1").exceptions == (F("p & r"),)


def test_fact_compatibility_names():
    b = parse_bundle("oblig-f: top : p => p\noblig-f: p : q => q\nschema: f_pi_constraint\n")
    assert b.fact_compatibility() == {"O1", "O2"}
    assert b.fact_compatibility(PERMISSION) == frozenset()
    c = parse_bundle("oblig-f: top : p => p\noblig-f: p : q => q\nschema: f_pi_constraint { rules=O2 }\n")
    assert c.fact_compatibility(OBLIGATION) == {"O2"}


@pytest.mark.parametrize("text,line", [
    ("atoms p\nfact: q\ndefault: top : p => p\n", 2),
    ("default: top : p => p\nfact: p &\n", 2),
    ("default: top p => p\n", 1),
    ("default: top : p\n", 1),
    ("default: top : p => p unless q\n", 1),
    ("bogus: p\n", 1),
    ("no colon here\n", 1),
    ("default: top : p => p\nschema: nosuch\n", 2),
    ("default: top : p => p\nschema: fcp { broken }\n", 2),
    ("fact: __v\n", 1),
    ("oblig-m: p : q => q\n", 1),
    ("default: top : p & ~p => p\n", 1),
])
def test_errors_name_the_line(text, line):
    with pytest.raises(BundleError) as exc:
        parse_bundle(text)
    assert exc.value.line == line


@pytest.mark.parametrize("text", [
    "fact: p\n",
    "fact: p\nfact: ~p\ndefault: top : q => q\n",
    "oblig-d: p : q => q\n",
    "oblig-f: top : p => p\nschema: specificity_rewrite { general=O1 specific=O7 }\n",
])
def test_whole_theory_errors(text):
    with pytest.raises(BundleError):
        parse_bundle(text)


def test_load_bundle(tmp_path):
    path = tmp_path / "t.nk"
    path.write_text("default: top : p => p\n", encoding="utf-8")
    assert load_bundle(str(path)).D[0].conclusion == F("p")
