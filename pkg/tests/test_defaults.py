import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctrlseq.classical import consistent, entails, equivalent, is_valid
from ctrlseq.defaults import (
    CapExceeded, DefaultRule, DefaultTheory, TheoryError, applicable, check_semi_monotonicity, m_credulous,
    modified_extensions, validate_witness,
)
from ctrlseq.syntax import TOP, parse_formula
from oracles import brute_extensions, generator_mask, random_formula, random_literal

F = parse_formula


def rule(text: str, name: str = "") -> DefaultRule:
    body, concl = text.split("=>")
    pre, just = body.split(":")
    return DefaultRule(F(pre.strip()), tuple(F(j) for j in just.split(",")), F(concl.strip()), name)


def theory(facts, rules) -> DefaultTheory:
    return DefaultTheory(tuple(F(w) for w in facts), tuple(rule(r, f"D{i + 1}") for i, r in enumerate(rules)))


CYCLIC = theory([], ["top : ~q & p => p", "top : ~r & q => q", "top : ~p & r => r"])


def test_applicable_examples():
    d = rule("top : p => p")
    assert applicable(d, [], [])
    assert not applicable(d, [F("~p")], [])
    assert not applicable(rule("top : ~q & p => p"), [F("q")], [])


def test_cyclic_theory_has_three_extensions():
    ws = modified_extensions(CYCLIC)
    assert len(ws) == 3
    pairs = {(next(iter(w.generators)).key, next(iter(w.support)).key) for w in ws}
    assert pairs == {("p", "~q & p"), ("q", "~r & q"), ("r", "~p & r")}
    assert all(validate_witness(CYCLIC, [], w) for w in ws)


def test_single_default_with_facts():
    t = theory(["p"], ["top : q => q"])
    (w,) = modified_extensions(t)
    assert w.generators == {F("p"), F("q")} and w.support == {F("q")}


def test_blocked_default_leaves_the_assumptions():
    t = theory([], ["top : p => p"])
    (w,) = modified_extensions(t, [F("~p")])
    assert w.generators == {F("~p")} and w.support == frozenset()


def test_m_credulous_examples():
    ok, w = m_credulous(CYCLIC, [], F("p"))
    assert ok and w.generators == {F("p")}
    assert m_credulous(CYCLIC, [], F("p & q")) == (False, None)
    assert m_credulous(CYCLIC, [], F("top"))[0]


def test_semi_monotonicity_examples():
    assert check_semi_monotonicity(CYCLIC, [])
    assert check_semi_monotonicity(CYCLIC, [rule("top : s => s", "D4")])


def test_theory_validation():
    with pytest.raises(TheoryError):
        DefaultTheory((F("p"), F("~p")), (rule("top : q => q"),))
    with pytest.raises(TheoryError):
        DefaultTheory((), ())
    with pytest.raises(TheoryError):
        rule("top : p & ~p => q")
    with pytest.raises(TheoryError):
        rule("top : q => p | ~p")
    with pytest.raises(TheoryError):
        modified_extensions(theory(["p"], ["top : q => q"]), [F("~p")])


def test_cap():
    t = theory([], [f"top : a{i} => a{i}" for i in range(9)])
    with pytest.raises(CapExceeded):
        modified_extensions(t)
    assert len(modified_extensions(t, cap=9)) == 1


def _random_theory(rng, names, normal=False):
    while True:
        rules = []
        for i in range(rng.randint(1, 3)):
            pre = random_formula(rng, names, 1) if rng.random() < 0.6 else TOP
            concl = random_formula(rng, names, 1)
            just = concl if normal or rng.random() < 0.6 else random_formula(rng, names, 1)
            if is_valid([], [concl]) or not consistent([just]):
                continue
            rules.append(DefaultRule(pre, (just,), concl, f"D{i + 1}"))
        facts = [random_formula(rng, names, 1)] if rng.random() < 0.5 else []
        if rules and consistent(facts):
            return DefaultTheory(tuple(facts), tuple(rules))


@given(st.integers(0, 2**32))
def test_extensions_match_the_brute_force_enumerator(seed):
    rng = random.Random(seed)
    names = ["p", "q", "r"]
    t = _random_theory(rng, names)
    got = {generator_mask(w.generators, names) for w in modified_extensions(t)}
    raw = [(d.prerequisite, d.justifications, d.conclusion) for d in t.D]
    assert got == brute_extensions(t.W, raw, names)


@given(st.integers(0, 2**32))
def test_witnesses_revalidate_and_are_pairwise_distinct(seed):
    rng = random.Random(seed)
    t = _random_theory(rng, ["p", "q", "r"])
    ws = modified_extensions(t)
    for w in ws:
        assert validate_witness(t, [], w)
        assert consistent(w.generators) and set(t.W) <= w.generators
    for i, a in enumerate(ws):
        for b in ws[i + 1:]:
            assert not (entails(a.generators, F(" & ".join(f"({g.key})" for g in b.generators)))
                        and entails(b.generators, F(" & ".join(f"({g.key})" for g in a.generators))))
    assert ws == modified_extensions(t)


@given(st.integers(0, 2**32))
def test_normal_theories_always_have_an_extension(seed):
    rng = random.Random(seed)
    assert modified_extensions(_random_theory(rng, ["p", "q", "r"], normal=True))


@given(st.integers(0, 2**32))
def test_semi_monotonicity_holds(seed):
    rng = random.Random(seed)
    t = _random_theory(rng, ["p", "q", "r"])
    extra = _random_theory(rng, ["p", "q", "r"]).D
    extra = tuple(DefaultRule(d.prerequisite, d.justifications, d.conclusion, "X" + d.name) for d in extra)
    assert check_semi_monotonicity(t, extra)


def test_equivalent_generators_are_reported_once():
    t = theory([], ["top : p => p", "top : p & p => p & p"])
    ws = modified_extensions(t)
    assert len(ws) == 1
    assert equivalent(F("p"), F(" & ".join(g.key for g in ws[0].generators)))
