import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctrlseq.classical import (
    ANTISEQUENT, SEQUENT, AlphabetGuardError, StarSequent, clauses_of, consistent, decide, decompose, entails,
    equivalent, evaluate, families, hash_closure, is_valid, negation_variants, resolution_closure, top_r, top_r_hash,
    top_sets,
)
from ctrlseq.syntax import Context, atom, complement, neg, parse_formula
from oracles import random_formula, truth, tt_entails, tt_sequent_valid
from strategies import formulas, literals

F = parse_formula


def star(ante, succ, kind=SEQUENT):
    return StarSequent.of([F(x) for x in ante], [F(x) for x in succ], kind)


def set_sequent(ante, succ):
    return frozenset(F(x) for x in ante), frozenset(F(x) for x in succ)


EXAMPLE = star(["~(p & q) | r"], ["s | ~t"])

# The 23 expected members of top for the example.
EXAMPLE_TOP = [
    (["~p"], ["s", "~t"]), (["~q"], ["s", "~t"]), (["r"], ["s", "~t"]), (["~p", "~s"], ["~t"]),
    (["~p", "t"], ["s"]), (["~p", "t", "~s"], []), ([], ["s", "~t", "p"]), (["~s"], ["~t", "p"]),
    (["t"], ["s", "p"]), (["t", "~s"], ["p"]), (["~q", "~s"], ["~t"]), (["~q", "~s", "t"], []),
    (["~q", "t"], ["s"]), ([], ["s", "~t", "q"]), (["~s"], ["~t", "q"]), (["~s", "t"], ["q"]),
    (["t"], ["s", "q"]), (["r", "~s"], ["~t"]), (["r", "t"], ["s"]), (["r", "~s", "t"], []),
    (["~s"], ["~t", "~r"]), (["t"], ["s", "~r"]), (["~s", "t"], ["~r"]),
]


# -- decide -------------------------------------------------------------------------


def test_decide_axiom_instance():
    d = decide(star(["p"], ["p"]))
    assert d.valid and d.valuation is None
    assert d.witness.rule == "ax"


def test_decide_unprovable_atom_has_false_valuation():
    d = decide(star([], ["p"]))
    assert not d.valid
    assert d.valuation == {"p": False}


def test_decide_example_is_invalid_with_a_falsifying_valuation():
    d = decide(EXAMPLE)
    assert not d.valid
    assert tt_sequent_valid(EXAMPLE.antecedent, EXAMPLE.succedent) is False
    assert truth(F("~(p & q) | r"), d.valuation) and not truth(F("s | ~t"), d.valuation)


def _check_witness(tree, valid):
    """Every step decomposes exactly one compound and leaves are atomic with the right status."""
    seq = tree.sequent
    assert seq.kind == (SEQUENT if valid else ANTISEQUENT)
    if not tree.children:
        assert seq.is_atomic()
        assert tt_sequent_valid(seq.antecedent, seq.succedent) == valid
        return
    assert len(tree.children) == (len(tree.children) if valid else 1)
    for child in tree.children:
        assert len(child.sequent.antecedent) + len(child.sequent.succedent) >= 1
        _check_witness(child, valid)


@given(st.lists(formulas(max_leaves=4), max_size=2), st.lists(formulas(max_leaves=4), max_size=2))
def test_decide_agrees_with_truth_tables_and_witnesses_are_well_formed(ante, succ):
    s = StarSequent.of(ante, succ)
    d = decide(s)
    assert d.valid == tt_sequent_valid(ante, succ)
    _check_witness(d.witness, d.valid)
    assert d.witness.sequent.antecedent == s.antecedent
    if not d.valid:
        assert all(truth(a, d.valuation) for a in ante)
        assert not any(truth(b, d.valuation) for b in succ)


def test_witness_is_built_lazily_and_cached():
    d = decide(star(["p & q"], ["q & p"]))
    first = d.witness
    assert d.witness is first
    assert [leaf.rule for leaf in first.leaves()] == ["ax", "ax"]


# -- decomposition ---------------------------------------------------------------------


def test_decompose_example():
    leaves = {(l.antecedent, l.succedent) for l in decompose(EXAMPLE)}
    expected = {(Context([F(a)]), Context([F("s"), F("~t")])) for a in ("~p", "~q", "r")}
    assert leaves == expected


def test_decompose_trivial_cases():
    assert decompose(star(["p"], ["q"])) == {star(["p"], ["q"])}
    assert decompose(star([], ["p & q"])) == {star([], ["p"]), star([], ["q"])}


@given(st.lists(formulas(max_leaves=4), max_size=2), st.lists(formulas(max_leaves=4), max_size=2),
       st.integers(0, 10_000))
def test_decompose_is_schedule_independent(ante, succ, seed):
    s = StarSequent.of(ante, succ)
    assert decompose(s, random.Random(seed)) == decompose(s)


# -- families ------------------------------------------------------------------------


def test_example_top_r_is_exactly_the_three_right_sided_sequents():
    fam = families(EXAMPLE)
    got = {(x.antecedent.to_set(), x.succedent.to_set()) for x in fam.top_r}
    assert got == {set_sequent([], ["p", "s", "~t"]), set_sequent([], ["s", "~t", "q"]),
                   set_sequent([], ["~r", "s", "~t"])}


def test_example_top_contains_all_listed_members_and_equals_top_cp():
    fam = families(EXAMPLE)
    top = {(x.antecedent.contracted(), x.succedent.contracted()) for x in fam.top}
    for a, s in EXAMPLE_TOP:
        assert (Context([F(x) for x in a]), Context([F(x) for x in s])) in top
    assert fam.top == fam.top_cp


def test_top_is_closed_under_negation():
    top = top_sets(EXAMPLE)
    for a, s in top:
        assert negation_variants(a, s) <= top


def test_hash_closure_is_idempotent():
    top = top_sets(star(["p | q", "~p | r"], []))
    once = hash_closure(top)
    assert hash_closure(once) == once


def test_families_ignore_the_kind():
    seq = families(EXAMPLE)
    anti = families(StarSequent(EXAMPLE.antecedent, EXAMPLE.succedent, ANTISEQUENT))
    strip = lambda xs: {(x.antecedent, x.succedent) for x in xs}
    for name in ("top", "top_cp", "top_r", "top_hash", "top_cp_hash", "top_r_hash"):
        assert strip(getattr(seq, name)) == strip(getattr(anti, name))


def test_alphabet_guard():
    wide = " | ".join(f"a{i}" for i in range(13))
    with pytest.raises(AlphabetGuardError):
        families(star([], [wide]))


@given(formulas(max_leaves=4))
def test_clause_view_matches_the_right_sided_families(f):
    fam = families(StarSequent.of([], [f]))
    assert top_r([f]) == clauses_of([f]) == {x.succedent.to_set() for x in fam.top_r}
    assert top_r_hash([f]) == {x.succedent.to_set() for x in fam.top_r_hash}


@given(st.lists(formulas(max_leaves=3), min_size=2, max_size=3))
def test_top_r_reads_a_list_as_a_conjunction(fs):
    assert top_r(fs) == set().union(*(clauses_of([f]) for f in fs))
    many = {x.succedent.to_set() for x in families(StarSequent.of([], fs)).top_r}
    assert clauses_of(fs) == many


def test_top_r_of_top_is_empty():
    assert top_r([F("top")]) == set()


# -- entailment --------------------------------------------------------------------------


def test_entails_examples():
    assert entails([], F("p | ~p"))
    assert entails([F("p"), F("~p")], F("q"))
    assert not entails([F("p | q")], F("p"))
    assert not consistent([F("p"), F("~p")])
    assert equivalent(F("~(p & q)"), F("~p | ~q"))


@given(st.lists(formulas(max_leaves=4), max_size=3), formulas(max_leaves=4))
def test_entails_agrees_with_truth_tables(hyps, goal):
    assert entails(hyps, goal) == tt_entails(hyps, goal)


def test_wide_entailment_uses_the_semantic_route_consistently():
    rng = random.Random(3)
    names = [f"a{i}" for i in range(10)]
    for _ in range(20):
        hyps = [random_formula(rng, names, 2) for _ in range(3)]
        goal = random_formula(rng, names, 2)
        assert entails(hyps, goal) == is_valid(hyps, [goal])


@given(formulas(max_leaves=4), st.dictionaries(st.sampled_from("pqr"), st.booleans(), min_size=3))
def test_evaluate_matches_reference(f, val):
    assert evaluate(f, val) == truth(f, val)
