"""Classical G4pn engine: deciding sequents, decomposition, and the closure families."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable

from .syntax import (
    AND,
    ATOM,
    NOT,
    OR,
    Context,
    Formula,
    complement,
    literal_atom,
    neg,
)

SEQUENT = "sequent"
ANTISEQUENT = "antisequent"
FAMILY_ATOM_LIMIT = 12
SEMANTIC_ATOM_THRESHOLD = 8


class AlphabetGuardError(ValueError):
    """Closure computation refused: too many distinct atoms."""


@dataclass(frozen=True)
class StarSequent:
    antecedent: Context
    succedent: Context
    kind: str = SEQUENT

    @staticmethod
    def of(ante: Iterable[Formula], succ: Iterable[Formula], kind: str = SEQUENT) -> "StarSequent":
        return StarSequent(Context(ante), Context(succ), kind)

    def is_atomic(self) -> bool:
        return self.antecedent.is_literal() and self.succedent.is_literal()

    def show(self) -> str:
        turn = "|-" if self.kind == SEQUENT else "-|"
        return f"{self.antecedent.show()} {turn} {self.succedent.show()}".strip()


# -- deciding ----------------------------------------------------------------

# Rule names for the ten decomposition shapes plus axioms.
_LEFT_RULE = {AND: "L&", OR: "L|"}
_RIGHT_RULE = {AND: "R&", OR: "R|"}


def _left_premises(f: Formula) -> tuple[str, list[list[Formula]]]:
    """Premise antecedent additions for a non-literal on the left."""
    if f.kind == AND:
        return "L&", [[f.left, f.right]]
    if f.kind == OR:
        return "L|", [[f.left], [f.right]]
    g = f.left
    if g.kind == NOT:
        return "L~~", [[g.left]]
    if g.kind == AND:
        return "L~&", [[g.left.negated()], [g.right.negated()]]
    return "L~|", [[g.left.negated(), g.right.negated()]]


def _right_premises(f: Formula) -> tuple[str, list[list[Formula]]]:
    if f.kind == AND:
        return "R&", [[f.left], [f.right]]
    if f.kind == OR:
        return "R|", [[f.left, f.right]]
    g = f.left
    if g.kind == NOT:
        return "R~~", [[g.left]]
    if g.kind == AND:
        return "R~&", [[g.left.negated(), g.right.negated()]]
    return "R~|", [[g.left.negated()], [g.right.negated()]]


def _atomic_valid(ante: frozenset[Formula], succ: frozenset[Formula]) -> bool:
    if not ante.isdisjoint(succ):
        return True
    for lit in ante:
        if lit.kind == ATOM and lit.negated() in ante:
            return True
    for lit in succ:
        if lit.kind == ATOM and lit.negated() in succ:
            return True
    return False


Leaf = tuple[frozenset[Formula], frozenset[Formula]]
_MISS = object()


class _Decider:
    """Backward search over set-form sequents; memo scoped to the instance.

    refute returns None for a valid sequent, else an atomic antisequent leaf under it.
    """

    def __init__(self) -> None:
        self.memo: dict[Leaf, Leaf | None] = {}

    def valid(self, ante: frozenset[Formula], succ: frozenset[Formula]) -> bool:
        return self.refute(ante, succ) is None

    def refute(self, ante: frozenset[Formula], succ: frozenset[Formula]) -> Leaf | None:
        key = (ante, succ)
        hit = self.memo.get(key, _MISS)
        if hit is not _MISS:
            return hit  # type: ignore[return-value]
        result = self._refute(ante, succ)
        self.memo[key] = result
        return result

    def _both(self, a: Leaf, b: Leaf) -> Leaf | None:
        return self.refute(*a) or self.refute(*b)

    def _refute(self, ante: frozenset[Formula], succ: frozenset[Formula]) -> Leaf | None:
        for f in ante:
            if not f.lit:
                rest = ante - {f}
                k = f.kind
                if k == AND:
                    return self.refute(rest | {f.left, f.right}, succ)
                if k == OR:
                    return self._both((rest | {f.left}, succ), (rest | {f.right}, succ))
                g = f.left
                if g.kind == NOT:
                    return self.refute(rest | {g.left}, succ)
                if g.kind == AND:
                    return self._both((rest | {g.left.negated()}, succ), (rest | {g.right.negated()}, succ))
                return self.refute(rest | {g.left.negated(), g.right.negated()}, succ)
        for f in succ:
            if not f.lit:
                rest = succ - {f}
                k = f.kind
                if k == OR:
                    return self.refute(ante, rest | {f.left, f.right})
                if k == AND:
                    return self._both((ante, rest | {f.left}), (ante, rest | {f.right}))
                g = f.left
                if g.kind == NOT:
                    return self.refute(ante, rest | {g.left})
                if g.kind == OR:
                    return self._both((ante, rest | {g.left.negated()}), (ante, rest | {g.right.negated()}))
                return self.refute(ante, rest | {g.left.negated(), g.right.negated()})
        return None if _atomic_valid(ante, succ) else (ante, succ)


_SHARED = _Decider()


def is_valid(ante: Iterable[Formula], succ: Iterable[Formula]) -> bool:
    """Fast validity test of the set-form sequent ante |- succ."""
    if len(_SHARED.memo) > 500_000:
        _SHARED.memo.clear()
    return _SHARED.valid(frozenset(ante), frozenset(succ))


@dataclass
class ProofTree:
    """A G4pn derivation (sequent) or refutation (antisequent) witness."""

    rule: str
    sequent: StarSequent
    children: list["ProofTree"] = field(default_factory=list)

    def leaves(self) -> list["ProofTree"]:
        if not self.children:
            return [self]
        out: list[ProofTree] = []
        for c in self.children:
            out.extend(c.leaves())
        return out


class Decision:
    """Verdict plus a witness tree that is built on first access."""

    __slots__ = ("valid", "valuation", "_sequent", "_witness")

    def __init__(self, valid: bool, sequent: StarSequent, valuation: dict[str, bool] | None = None):
        self.valid = valid
        self.valuation = valuation
        self._sequent = sequent
        self._witness: ProofTree | None = None

    @property
    def witness(self) -> ProofTree:
        if self._witness is None:
            self._witness = _build(self._sequent.antecedent, self._sequent.succedent, self.valid)
        return self._witness

    @property
    def outcome(self) -> str:
        return "valid" if self.valid else "invalid"


def _build(ante: Context, succ: Context, valid: bool) -> ProofTree:
    kind = SEQUENT if valid else ANTISEQUENT
    seq = StarSequent(ante, succ, kind)
    for f in ante.items:
        if not f.lit:
            rule, branches = _left_premises(f)
            rest = ante.remove_one(f)
            prem = [rest.add(*b) for b in branches]
            if valid:
                return ProofTree(rule, seq, [_build(a, succ, True) for a in prem])
            succ_set = frozenset(succ.items)
            for a in prem:
                if not _SHARED.valid(frozenset(a.items), succ_set):
                    return ProofTree(rule, seq, [_build(a, succ, False)])
    for f in succ.items:
        if not f.lit:
            rule, branches = _right_premises(f)
            rest = succ.remove_one(f)
            prem = [rest.add(*b) for b in branches]
            if valid:
                return ProofTree(rule, seq, [_build(ante, s, True) for s in prem])
            ante_set = frozenset(ante.items)
            for s in prem:
                if not _SHARED.valid(ante_set, frozenset(s.items)):
                    return ProofTree(rule, seq, [_build(ante, s, False)])
    return ProofTree("ax" if valid else "anti-ax", seq)


def _falsifying(ante: Iterable[Formula], succ: Iterable[Formula]) -> dict[str, bool]:
    val: dict[str, bool] = {}
    for lit in ante:
        val[literal_atom(lit)] = lit.kind == ATOM
    for lit in succ:
        val[literal_atom(lit)] = lit.kind != ATOM
    return val


def decide(s: StarSequent) -> Decision:
    """Decide a sequent; a refutation comes with a falsifying valuation."""
    if len(_SHARED.memo) > 500_000:
        _SHARED.memo.clear()
    leaf = _SHARED.refute(frozenset(s.antecedent.items), frozenset(s.succedent.items))
    if leaf is None:
        return Decision(True, s)
    val = _falsifying(*leaf)
    for a in sorted(s.antecedent.atoms() | s.succedent.atoms()):
        val.setdefault(a, False)
    return Decision(False, s, val)


# -- semantics ---------------------------------------------------------------


def evaluate(f: Formula, val: dict[str, bool]) -> bool:
    if f.kind == ATOM:
        return val.get(f.name, False)  # type: ignore[arg-type]
    if f.kind == NOT:
        return not evaluate(f.left, val)  # type: ignore[arg-type]
    if f.kind == AND:
        return evaluate(f.left, val) and evaluate(f.right, val)  # type: ignore[arg-type]
    return evaluate(f.left, val) or evaluate(f.right, val)  # type: ignore[arg-type]


def semantic_entails(hypotheses: Iterable[Formula], goal: Formula) -> bool:
    hyps = list(hypotheses)
    names = sorted(set().union(goal.atoms(), *(h.atoms() for h in hyps)))
    for bits in itertools.product((False, True), repeat=len(names)):
        val = dict(zip(names, bits))
        if all(evaluate(h, val) for h in hyps) and not evaluate(goal, val):
            return False
    return True


def entails(hypotheses: Iterable[Formula], goal: Formula) -> bool:
    """goal is in Cn(hypotheses)."""
    hyps = frozenset(hypotheses)
    names = set(goal.atoms())
    for h in hyps:
        names |= h.atoms()
    if len(names) > SEMANTIC_ATOM_THRESHOLD:
        return semantic_entails(hyps, goal)
    return is_valid(hyps, (goal,))


def consistent(formulas: Iterable[Formula]) -> bool:
    return not is_valid(frozenset(formulas), ())


def equivalent(a: Formula, b: Formula) -> bool:
    return entails([a], b) and entails([b], a)


# -- decomposition ------------------------------------------------------------


def decompose(s: StarSequent, rng: random.Random | None = None) -> set[StarSequent]:
    """Atomic leaves of the decomposition tree (multiset contexts, kind kept).

    The default schedule picks the first non-literal in canonical order, left side first;
    with `rng`, the principal formula is chosen at random among all candidates.
    """
    out: set[StarSequent] = set()
    stack = [(s.antecedent, s.succedent)]
    while stack:
        ante, succ = stack.pop()
        cands = [("L", f) for f in ante if not f.is_literal()]
        cands += [("R", f) for f in succ if not f.is_literal()]
        if not cands:
            out.add(StarSequent(ante, succ, s.kind))
            continue
        side, f = rng.choice(cands) if rng is not None else cands[0]
        if side == "L":
            _, branches = _left_premises(f)
            rest = ante.remove_one(f)
            stack.extend((rest.add(*b), succ) for b in branches)
        else:
            _, branches = _right_premises(f)
            rest = succ.remove_one(f)
            stack.extend((ante, rest.add(*b)) for b in branches)
    return out


# -- families ------------------------------------------------------------------

SetSequent = tuple[frozenset[Formula], frozenset[Formula]]


def negation_variants(ante: frozenset[Formula], succ: frozenset[Formula]) -> set[SetSequent]:
    """All results of moving literals across the turnstile with complementation."""
    a_items = sorted(ante)
    s_items = sorted(succ)
    out: set[SetSequent] = set()
    for a_mask in range(1 << len(a_items)):
        for s_mask in range(1 << len(s_items)):
            left = {x for i, x in enumerate(a_items) if not a_mask >> i & 1}
            right = {x for i, x in enumerate(s_items) if not s_mask >> i & 1}
            left |= {complement(x) for i, x in enumerate(s_items) if s_mask >> i & 1}
            right |= {complement(x) for i, x in enumerate(a_items) if a_mask >> i & 1}
            out.add((frozenset(left), frozenset(right)))
    return out


def _contraction_step(seqs: set[SetSequent]) -> set[SetSequent]:
    """Drop A-bar on one side when A sits on the other, until nothing changes."""
    todo = list(seqs)
    out = set(seqs)
    while todo:
        ante, succ = todo.pop()
        for lit in ante:
            c = complement(lit)
            if c in succ:
                new = (ante, succ - {c})
                if new not in out:
                    out.add(new)
                    todo.append(new)
        for lit in succ:
            c = complement(lit)
            if c in ante:
                new = (ante - {c}, succ)
                if new not in out:
                    out.add(new)
                    todo.append(new)
    return out


def _cuts(x: SetSequent, y: SetSequent) -> set[SetSequent]:
    """Cut conclusions of x and y over every admissible cut literal (both orders)."""
    out: set[SetSequent] = set()
    for (t, l), (p, s) in ((x, y), (y, x)):
        for a in l:
            if a in p:
                out.add((t | (p - {a}), (l - {a}) | s))
        for a in t:
            c = complement(a)
            if c in p:
                out.add(((t - {a}) | (p - {c}), l | s))
    return out


def _is_complementary(ante: frozenset[Formula], succ: frozenset[Formula]) -> bool:
    if not ante.isdisjoint(succ):
        return False
    for side in (ante, succ):
        for lit in side:
            if lit.kind == ATOM and lit.negated() in side:
                return False
    return True


@dataclass
class DecompositionFamilies:
    top: frozenset[StarSequent]
    top_cp: frozenset[StarSequent]
    top_r: frozenset[StarSequent]
    top_hash: frozenset[StarSequent]
    top_cp_hash: frozenset[StarSequent]
    top_r_hash: frozenset[StarSequent]


def _as_star(seqs: Iterable[SetSequent], kind: str) -> frozenset[StarSequent]:
    return frozenset(StarSequent(Context(a), Context(s), kind) for a, s in seqs)


def top_sets(s: StarSequent) -> set[SetSequent]:
    out: set[SetSequent] = set()
    for leaf in decompose(s):
        out |= negation_variants(leaf.antecedent.to_set(), leaf.succedent.to_set())
    return out


def hash_closure(start: set[SetSequent]) -> set[SetSequent]:
    """Alternate Contraction closure and Cut additions until a fixpoint."""
    current = _contraction_step(start)
    frontier = list(current)
    while frontier:
        fresh: set[SetSequent] = set()
        snapshot = list(current)
        for x in frontier:
            for y in snapshot:
                for z in _cuts(x, y):
                    if z not in current and z not in fresh:
                        fresh.add(z)
        if not fresh:
            break
        grown = _contraction_step(fresh | current) - current
        current |= grown
        frontier = list(grown)
    return current


def families(s: StarSequent) -> DecompositionFamilies:
    names = s.antecedent.atoms() | s.succedent.atoms()
    if len(names) > FAMILY_ATOM_LIMIT:
        raise AlphabetGuardError(f"{len(names)} atoms exceed the limit of {FAMILY_ATOM_LIMIT}")
    top = top_sets(s)
    cp = {x for x in top if _is_complementary(*x)}
    r = {x for x in cp if not x[0]}
    hashed = hash_closure(top)
    cp_h = {x for x in hashed if _is_complementary(*x)}
    r_h = {x for x in cp_h if not x[0]}
    k = s.kind
    return DecompositionFamilies(
        _as_star(top, k), _as_star(cp, k), _as_star(r, k),
        _as_star(hashed, k), _as_star(cp_h, k), _as_star(r_h, k),
    )


# -- clause-level view ----------------------------------------------------------
# A complementary right-sided member is a non-tautological clause; these helpers
# compute the right-sided families directly by resolution, which is what rule
# generation consumes.

Clause = frozenset[Formula]


def is_tautological(clause: Iterable[Formula]) -> bool:
    c = frozenset(clause)
    return any(lit.kind == ATOM and lit.negated() in c for lit in c)


def clauses_of(formulas: Iterable[Formula], antecedent: Iterable[Formula] = ()) -> set[Clause]:
    """top_r of (antecedent |-* formulas): clauses of the decomposition leaves."""
    out: set[Clause] = set()
    seq = StarSequent(Context(antecedent), Context(formulas))
    for leaf in decompose(seq):
        clause = frozenset(leaf.succedent) | frozenset(complement(x) for x in leaf.antecedent)
        if not is_tautological(clause) and leaf.antecedent.to_set().isdisjoint(leaf.succedent.to_set()):
            out.add(clause)
    return out


def resolution_closure(clauses: Iterable[Clause]) -> set[Clause]:
    """Closure under binary resolution, tautologies discarded."""
    known: set[Clause] = {c for c in clauses if not is_tautological(c)}
    frontier = list(known)
    while frontier:
        fresh: set[Clause] = set()
        snapshot = list(known)
        for x in frontier:
            for y in snapshot:
                for lit in x:
                    c = complement(lit)
                    if c in y:
                        r = (x - {lit}) | (y - {c})
                        if not is_tautological(r) and r not in known:
                            fresh.add(r)
        known |= fresh
        frontier = list(fresh)
    return known


def top_r(formulas: Iterable[Formula]) -> set[Clause]:
    """Clauses of the conjunction of the formulas; the empty conjunction has none."""
    out: set[Clause] = set()
    for f in formulas:
        out |= clauses_of([f])
    return out


def top_r_hash(formulas: Iterable[Formula]) -> set[Clause]:
    fs = list(formulas)
    names: set[str] = set()
    for f in fs:
        names |= f.atoms()
    if len(names) > FAMILY_ATOM_LIMIT:
        raise AlphabetGuardError(f"{len(names)} atoms exceed the limit of {FAMILY_ATOM_LIMIT}")
    return resolution_closure(top_r(fs))


def is_axiom_of(ante: Iterable[Formula], succ: Iterable[Formula], closure: set[Clause]) -> bool:
    """Set-form membership of ante |-* succ in top_cp# given the resolution closure."""
    a = frozenset(ante)
    s = frozenset(succ)
    if not all(x.is_literal() for x in a | s) or not _is_complementary(a, s):
        return False
    return (s | frozenset(complement(x) for x in a)) in closure
