import pytest
from hypothesis import given

from ctrlseq.syntax import (
    BOT, EMPTY, RESERVED_ATOM, TOP, Context, LabelledFormula, ReservedAtomError, SyntaxErrorAt, atom,
    big_and, big_or, complement, complexity, conj, disj, neg, parse_formula, parse_labelled, perp, show,
)
from strategies import formulas, literals

p, q, r = atom("p"), atom("q"), atom("r")


def test_precedence_negation_binds_tightest_then_and_then_or():
    assert parse_formula("~(p & q) | r") == disj(neg(conj(p, q)), r)
    assert parse_formula("p | q & r") == disj(p, conj(q, r))
    assert parse_formula("~p & q") == conj(neg(p), q)


def test_atom_and_constants():
    assert parse_formula("p") == p
    v = atom(RESERVED_ATOM)
    assert parse_formula("top") == disj(v, neg(v)) == TOP
    assert parse_formula("bot") == BOT


def test_reserved_atom_is_rejected_in_user_text():
    with pytest.raises(ReservedAtomError):
        parse_formula("p | __v")
    assert parse_formula("__v", allow_reserved=True) == atom(RESERVED_ATOM)


@pytest.mark.parametrize("text", ["p &", "(p | q", "p q", "P", "p $ q", ""])
def test_malformed_input_reports_position(text):
    with pytest.raises(SyntaxErrorAt):
        parse_formula(text)


@pytest.mark.parametrize("text,expected", [
    ("p", 1), ("~p", 1), ("~(p & q)", 3), ("~~p", 2), ("p & q | r", 5), ("~(p | ~q)", 4), ("~~~p", 2),
])
def test_complexity(text, expected):
    assert complexity(parse_formula(text)) == expected


def test_perp():
    assert perp(Context([p, neg(q)])) == Context([neg(p), q])
    assert perp(EMPTY) == EMPTY
    assert perp(Context([p, p])) == Context([neg(p), neg(p)])
    with pytest.raises(ValueError):
        perp(Context([conj(p, q)]))


def test_big_connectives():
    assert big_and([]) == TOP
    assert big_or([]) == BOT
    assert big_and([p, q]) == conj(p, q)
    assert big_and([q, p]) == conj(p, q)
    assert big_or([p, q]) == disj(p, q)


def test_context_is_a_canonical_multiset():
    assert Context([q, p]) == Context([p, q])
    assert hash(Context([q, p])) == hash(Context([p, q]))
    assert Context([p, p]) != Context([p])
    assert Context([p, p]).contracted() == Context([p])
    assert Context([p, q, p]).remove_one(p) == Context([p, q])
    assert Context([p]).add(q) == Context([p, q])


def test_labelled_formula_round_trip():
    lf = parse_labelled("(p | q)^o")
    assert lf == LabelledFormula(disj(p, q), "o")
    assert parse_labelled(lf.show()) == lf
    assert parse_labelled("top^f").formula == TOP
    with pytest.raises(ValueError):
        parse_labelled("p^x")
    with pytest.raises(ValueError):
        parse_labelled("p")


@given(formulas())
def test_print_then_parse_is_identity(f):
    assert parse_formula(show(f), allow_reserved=True) == f


@given(formulas())
def test_complexity_is_positive(f):
    assert complexity(f) >= 1


@given(formulas(), formulas())
def test_complexity_is_additive_over_contexts(f, g):
    assert Context([f, g]).complexity() == complexity(f) + complexity(g)


@given(literals(), literals(), literals())
def test_perp_is_an_involution_and_distributes_over_union(a, b, c):
    x, y = Context([a, b]), Context([c])
    assert perp(perp(x)) == x
    assert perp(x + y) == perp(x) + perp(y)
    assert complement(complement(a)) == a
