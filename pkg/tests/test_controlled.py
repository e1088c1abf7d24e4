import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctrlseq.classical import entails
from ctrlseq.controlled.checker import Checker, check_derivation, compatible, derivation_metrics
from ctrlseq.controlled.model import DEF, OBL, Derivation, DerivationError, control_set, sequent, union
from ctrlseq.controlled.rules import RuleBase, close_rules, generate_rules
from ctrlseq.controlled.search import Prover, prove
from ctrlseq.dsl import parse_bundle
from ctrlseq.scenarios import Builder
from ctrlseq.syntax import TOP, Context, LabelledFormula, big_and, parse_formula
from strategies import formulas

F = parse_formula


def L(text: str, tag: str = "f") -> LabelledFormula:
    return LabelledFormula(F(text), tag)


def cs(*groups):
    return control_set(*([L(x) for x in g] for g in groups))


CYCLIC = "default: top : ~q & p => p\ndefault: top : ~r & q => q\ndefault: top : ~p & r => r\n"


# -- compatibility ------------------------------------------------------------------------


def test_compatibility_examples():
    assert compatible([F("p")], cs(), cs())
    assert compatible([], cs(), cs())
    assert not compatible([F("p"), F("~p")], cs(), cs(["~p"]))
    assert compatible([F("p")], cs(["p"]), cs(["q"]))


labelled = st.builds(LabelledFormula, formulas(max_leaves=3), st.sampled_from("fop"))
control_sets = st.lists(st.lists(labelled, min_size=1, max_size=2), max_size=3).map(lambda gs: control_set(*gs))


@given(st.lists(formulas(max_leaves=3), max_size=3), control_sets, control_sets, control_sets, control_sets)
def test_compatibility_is_antitone_in_the_control_sets(gamma, t, extra_t, s, extra_s):
    if compatible(gamma, union(t, extra_t), union(s, extra_s)):
        assert compatible(gamma, t, s)


@given(st.lists(formulas(max_leaves=3), max_size=2), st.lists(formulas(max_leaves=3), min_size=1, max_size=2),
       control_sets)
def test_compatibility_transfers_along_entailment(gamma, delta, controls):
    if not entails(gamma, big_and(delta)):
        return
    if compatible(delta, controls, control_set()):
        assert compatible(gamma, controls, control_set())
    if compatible(gamma, control_set(), controls):
        assert compatible(delta, control_set(), controls)


# -- rule generation --------------------------------------------------------------------------


def _shape(r):
    return (r.turnstile, r.label, tuple((t, frozenset(c)) for t, c in r.premises), frozenset(r.conclusion),
            r.T_delta, r.S_delta)


def test_zero_ary_default_rule():
    (r,) = generate_rules(parse_bundle("default: top : p => p\n"))
    assert _shape(r) == ("D", "D1", (), frozenset([F("p")]), cs(["top"]), cs(["~p"]))


def test_unary_default_rule():
    (r,) = generate_rules(parse_bundle("default: p | q : ~p => ~p\n"))
    assert _shape(r) == ("D", "D1", (("D", frozenset([F("p"), F("q")])),), frozenset([F("~p")]),
                         cs(["p | q"]), cs(["~~p"]))


def test_factual_obligation_rule():
    rules = generate_rules(parse_bundle("oblig-f: q : s => s\n"))
    (o,) = [r for r in rules if r.turnstile == OBL]
    assert o.premises == (("D", frozenset([F("q")])),)
    assert o.conclusion == frozenset([F("s")])
    assert o.T_delta == cs(["q"])
    assert o.S_delta == control_set([L("~s", "o")])


def test_closure_adds_nothing_for_independent_zero_ary_rules():
    rb = RuleBase(parse_bundle("default: top : p => p\ndefault: top : q => q\n"))
    assert close_rules(rb, DEF, [F("p"), F("q")]) == []
    assert close_rules(rb, DEF, [F("r")]) == []
    assert rb.close_rules(DEF, [F("p"), F("q")]) == rb.close_rules(DEF, [F("p"), F("q")])


def test_closure_combines_rules_whose_conclusions_resolve():
    rb = RuleBase(parse_bundle("default: top : p | q => p | q\ndefault: top : ~q => ~q\n"))
    combined = close_rules(rb, DEF, [F("p")])
    assert combined and all(set(r.sources) == {"D1", "D2"} for r in combined)
    r = combined[0]
    assert r.T_delta == cs(["top"]) and r.S_delta == cs(["~(p | q)"], ["~~q"])


# -- checking ---------------------------------------------------------------------------------


def test_disjunction_of_two_defaults_is_a_paraproof_with_proof_subderivations():
    b = Builder(parse_bundle("default: p : q => r\ndefault: q : s => t\n"))
    left = b.rw(b.delta(DEF, "D1", ["r"], [b.ax(DEF, ["p"], ["p"])], ["p"]), "t")
    right = b.rw(b.delta(DEF, "D2", ["t"], [b.ax(DEF, ["q"], ["q"])], ["q"]), "r")
    d = b.step("L|", ["p | q"], ["r", "t"], [left, right])
    v = check_derivation(d, b.bundle)
    assert v.word() == "paraproof"
    assert v.word((0,)) == "proof" and v.word((1,)) == "proof"
    m = derivation_metrics(d, b.bundle)[()]
    assert m.defaults == ("D1", "D2")


def _cut_example():
    b = Builder(parse_bundle("default: top : p => p\ndefault: p | q : ~p => ~p\n"))
    lor = b.step("L|", ["p | q"], ["p", "q"], [b.rw(b.ax(DEF, ["p"], ["p"]), "q"), b.rw(b.ax(DEF, ["q"], ["q"]), "p")])
    d2 = b.rw(b.delta(DEF, "D2", ["~p"], [lor], ["p | q"]), "q")
    left = b.lw(b.rw(b.delta(DEF, "D1", ["p"]), "q"), "p | q")
    return b, lor, d2, left


def test_cut_example_paraproof_and_proof():
    b, lor, d2, left = _cut_example()
    pi = b.step("cut_asa", ["p | q"], ["q"], [left, d2])
    v = check_derivation(pi, b.bundle)
    assert v.word() == "paraproof"
    assert v.root.cond_sound and not v.root.constr_sound
    rho = b.step("cut_asa", ["p | q"], ["q"], [lor, d2])
    assert check_derivation(rho, b.bundle).word() == "proof"


def test_cut_atom_must_occur_in_the_antecedent_or_facts():
    b = Builder(parse_bundle("atoms p q r\ndefault: top : p => p\n"))
    left = b.rw(b.ax(DEF, ["p"], ["p"]), "r")
    right = b.rw(b.ax(DEF, ["p"], ["p"]), "~r")
    with pytest.raises(DerivationError):
        check_derivation(b.step("cut_asa", ["p"], ["p"], [left, right]), b.bundle)


def test_structural_errors_are_reported():
    b = Builder(parse_bundle("default: top : p => p\n"))
    bad_ax = b.ax(DEF, ["p"], ["q"])
    with pytest.raises(DerivationError):
        check_derivation(bad_ax, b.bundle)
    d = b.delta(DEF, "D1", ["p"])
    forged = Derivation("delta", d.conclusion.with_controls(cs(), cs(), cs()), (), "D1")
    with pytest.raises(DerivationError):
        check_derivation(forged, b.bundle)
    with pytest.raises(DerivationError):
        check_derivation(Derivation("nosuch", d.conclusion), b.bundle)


def test_sigma_verdict_is_a_compatibility_question():
    b = Builder(parse_bundle("fact: q\ndefault: top : p => p\n"))
    d = b.delta(DEF, "D1", ["p"])
    c = d.conclusion
    for extra, expect in ((["q"], "paraproof"), (["r"], "proof")):
        s = union(c.S, cs(extra))
        sig = Derivation("sigma", c.with_controls(c.T, s, c.Sprime), (d,))
        v = check_derivation(sig, b.bundle)
        direct = compatible([F("q"), F("p")], c.T, s)
        assert v.word() == expect and (expect == "proof") == direct
    with pytest.raises(DerivationError):
        check_derivation(Derivation("sigma", c.with_controls(c.T, control_set(), c.Sprime), (d,)), b.bundle)


def test_metrics_without_extra_rules():
    b = Builder(parse_bundle("fact: q\ndefault: top : p => p\n"))
    m = derivation_metrics(b.ax(DEF, ["p"], ["p"]), b.bundle)[()]
    assert m.defaults == () and m.D_f == frozenset() and m.F == F("q")
    empty = Builder(parse_bundle("default: top : p => p\n"))
    assert derivation_metrics(empty.ax(DEF, ["p"], ["p"]), empty.bundle)[()].F == TOP


def test_repository_enters_the_fact_formula():
    b = Builder(parse_bundle("oblig-f: top : p => p\noblig-f: p : q => q\noblig-f: ~p : ~q => ~q\n"))
    d = b.delta(OBL, "O3", ["~q"], [b.ax(DEF, ["~p"], ["~p"])], repository=["~p"])
    assert entails([derivation_metrics(d, b.bundle)[()].F], F("~p"))


# -- proving -----------------------------------------------------------------------------------


def test_blocked_default_has_no_proof():
    assert prove(DEF, [], [F("~p")], F("p"), parse_bundle("default: top : p => p\n")) is None


def test_cyclic_goal_is_proved_by_a_zero_ary_step():
    b = parse_bundle(CYCLIC)
    d = prove(DEF, [], [], F("p"), b)
    assert d.rule == "delta" and d.label == "D1" and not d.children
    assert check_derivation(d, b).is_proof


def test_classical_consequence_needs_no_controls():
    b = parse_bundle("fact: p\ndefault: top : q => q\n")
    d = prove(DEF, [], [], F("p | q"), b)
    assert d.conclusion.T == control_set() and d.conclusion.S == control_set()


def test_prover_results_are_certified():
    b = parse_bundle(CYCLIC)
    pr = Prover(b)
    for goal in ("p", "q", "r", "p | q"):
        res = pr.search(DEF, [], [], [F(goal)])
        assert res.status == "proof" and res.verdict.is_proof
    assert pr.search(DEF, [], [], [F("p & q")]).status == "none"


def test_budget_exhaustion_is_unknown():
    b = parse_bundle(CYCLIC)
    res = Prover(b, budget=1).search(DEF, [], [F("s & t")], [F("p | s")])
    assert res.status == "unknown"
    assert Prover(b).search(DEF, [], [F("s & t")], [F("p | s")]).status == "proof"


def test_obligation_proof_with_repository():
    b = parse_bundle("default: p : p & ~r => q\noblig-f: q : s => s\noblig-f: r : t => t\n")
    d = prove(OBL, [F("p")], [], F("s"), b)
    assert d is not None and d.conclusion.repository == Context([F("p")])
    assert prove(OBL, [F("p"), F("r")], [], F("s"), b) is None
