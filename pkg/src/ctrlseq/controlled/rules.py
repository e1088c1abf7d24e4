"""Extra-logical rules generated from a theory bundle, with lazy closure under resolution."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from typing import Iterable

from ..classical import Clause, resolution_closure, top_r, top_r_hash
from ..defaults import DefaultRule
from ..deontic import DEONTIC, FACTUAL, MIXED, NormRule
from ..dsl import TheoryBundle
from ..syntax import TOP, Formula, LabelledFormula, big_and, big_or, neg, parse_formula
from .model import DEF, NO_CONTROL, OBL, PERM, ControlSet, control_set, labelled, union

DEFAULT_KIND = "default"
FACTUAL_KINDS = (FACTUAL,)
MAX_SOURCES = 4

BASE = "base"
AXIOM_CLOSURE = "axiom-closure"
COMBINATION = "combination"


def clause_key(c: Clause) -> tuple[str, ...]:
    return tuple(sorted(f.key for f in c))


def premise_key(p: tuple[str, Clause]) -> tuple[str, tuple[str, ...]]:
    return p[0], clause_key(p[1])


@dataclass(frozen=True)
class Source:
    """One default or norm read as a rule for a given turnstile."""

    name: str
    turnstile: str
    kind: str
    rule: DefaultRule | NormRule
    premises: tuple[tuple[str, Clause], ...]
    T_delta: ControlSet
    S_delta: ControlSet
    Sprime_delta: ControlSet
    f_constraint: bool

    @property
    def conclusion(self) -> Formula:
        return self.rule.conclusion


@dataclass(frozen=True)
class ExtraRule:
    turnstile: str
    sources: tuple[str, ...]
    premises: tuple[tuple[str, Clause], ...]
    conclusion: Clause
    T_delta: ControlSet
    S_delta: ControlSet
    Sprime_delta: ControlSet
    provenance: str
    f_constraint: bool = False

    @property
    def label(self) -> str:
        return "+".join(self.sources)

    @property
    def arity(self) -> int:
        return len(self.premises)


def _condition_formula(clauses: Iterable[Clause]) -> Formula:
    cs = sorted(clauses, key=clause_key)
    return big_and(big_or(c) for c in cs) if cs else TOP


def _premises(turnstile: str, formula: Formula | None) -> tuple[tuple[str, Clause], ...]:
    if formula is None:
        return ()
    return tuple(sorted(((turnstile, c) for c in top_r([formula])), key=premise_key))


def _tagged(formulas: Iterable[Formula], *tags: str) -> frozenset[LabelledFormula]:
    out: set[LabelledFormula] = set()
    for t in tags:
        out |= labelled(formulas, t)
    return frozenset(out)


def _or_top(f: Formula | None, premises: tuple) -> Formula:
    return f if premises and f is not None else TOP


def make_source(bundle: TheoryBundle, rule: DefaultRule | NormRule, turnstile: str) -> Source:
    """Premises and control deltas of a single rule, by kind and turnstile."""
    symmetric = [s for s in bundle.schema("symmetric_pair") if s.get("rule") == rule.name]
    sprime = NO_CONTROL
    if symmetric and turnstile != DEF:
        sprime = control_set(*(labelled([parse_formula(s.get("right", ""))], "o") for s in symmetric))
    if isinstance(rule, DefaultRule):
        prem = _premises(DEF, rule.prerequisite)
        T = control_set(labelled([_condition_formula(c for _, c in prem)], "f"))
        S = control_set(labelled([neg(j) for j in rule.justifications], "f"))
        return Source(rule.name, DEF, DEFAULT_KIND, rule, prem, T, S, NO_CONTROL, False)
    negs = [neg(c) for c in rule.constraints]
    S = control_set(_tagged(negs, "o") if turnstile == OBL else _tagged(negs, "p", "o"),
                    *(labelled([e], "f") for e in rule.exceptions))
    if rule.kind == MIXED:
        dprem = _premises(DEF, rule.condition)
        xprem = _premises(turnstile, rule.deontic_condition)
        xtag = "o" if turnstile == OBL else "p"
        T = control_set(labelled([_or_top(rule.condition, dprem)], "f"),
                        labelled([_or_top(rule.deontic_condition, xprem)], xtag))
        prem = tuple(sorted(dprem + xprem, key=premise_key))
    elif rule.kind == DEONTIC:
        prem = _premises(turnstile, rule.condition)
        cond = _or_top(rule.condition, prem)
        T = control_set(_tagged([cond], "o", "p") if turnstile == OBL else _tagged([cond], "p"))
    else:
        prem = _premises(DEF, rule.condition)
        T = control_set(labelled([_or_top(rule.condition, prem)], "f"))
    fpi = turnstile == OBL and rule.name in bundle.fact_compatibility()
    return Source(rule.name, turnstile, rule.kind, rule, prem, T, S, sprime, fpi)


class RuleBase:
    """Sources per turnstile and the memoized closure of their conclusions."""

    def __init__(self, bundle: TheoryBundle, max_sources: int = MAX_SOURCES):
        self.bundle = bundle
        self.max_sources = max_sources
        self.sources: dict[tuple[str, str], Source] = {}
        for d in bundle.D:
            self.sources[(DEF, d.name)] = make_source(bundle, d, DEF)
        n = bundle.normative_system
        if n is not None:
            for r in n.O:
                self.sources[(OBL, r.name)] = make_source(bundle, r, OBL)
            for r in n.P:
                self.sources[(PERM, r.name)] = make_source(bundle, r, PERM)
        self._w_hash: dict[str, frozenset[Clause]] = {}
        self._w_clauses: dict[str, frozenset[Clause]] = {}
        self._conc: dict[tuple[str, tuple[str, ...]], dict[Clause, str]] = {}
        self._single: dict[tuple[str, str], frozenset[Clause]] = {}

    # -- facts and axioms ---------------------------------------------------

    def axioms(self, turnstile: str) -> tuple[Formula, ...]:
        if turnstile == DEF:
            return tuple(self.bundle.W)
        n = self.bundle.normative_system
        if n is None:
            return ()
        return n.Wo if turnstile == OBL else n.Wp

    def axiom_closure(self, turnstile: str) -> frozenset[Clause]:
        if turnstile not in self._w_hash:
            self._w_hash[turnstile] = frozenset(top_r_hash(self.axioms(turnstile)))
            self._w_clauses[turnstile] = frozenset(top_r(self.axioms(turnstile)))
        return self._w_hash[turnstile]

    def names(self, turnstile: str) -> list[str]:
        return [name for (x, name) in self.sources if x == turnstile]

    def source(self, turnstile: str, name: str) -> Source:
        try:
            return self.sources[(turnstile, name)]
        except KeyError:
            raise KeyError(f"no rule {name!r} for turnstile {turnstile}") from None

    # -- conclusions --------------------------------------------------------

    def _with_axioms(self, turnstile: str, phi: Clause) -> set[Clause]:
        """Clauses new relative to the axioms once a conclusion joins them."""
        closed = self.axiom_closure(turnstile)
        return set(resolution_closure({phi} | self._w_clauses[turnstile])) - closed

    def _own(self, turnstile: str, name: str) -> frozenset[Clause]:
        key = (turnstile, name)
        if key not in self._single:
            self._single[key] = frozenset(top_r_hash([self.source(turnstile, name).conclusion]))
        return self._single[key]

    def conclusions(self, turnstile: str, sources: Iterable[str]) -> dict[Clause, str]:
        """Available conclusions of the rule with this source multiset, with their provenance."""
        M = tuple(sorted(sources))
        key = (turnstile, M)
        if key in self._conc:
            return self._conc[key]
        out: dict[Clause, str] = {}
        if len(M) == 1:
            for phi in self._own(turnstile, M[0]):
                out[phi] = BASE
        elif 1 < len(M) <= self.max_sources:
            closed = self.axiom_closure(turnstile)
            seen_splits: set[tuple[tuple[str, ...], tuple[str, ...]]] = set()
            idx = range(len(M))
            for size in range(1, len(M) // 2 + 1):
                for picked in _index_subsets(idx, size):
                    left = tuple(M[i] for i in picked)
                    right = tuple(M[i] for i in idx if i not in picked)
                    split = (left, right) if left <= right else (right, left)
                    if split in seen_splits:
                        continue
                    seen_splits.add(split)
                    for phi1 in self.conclusions(turnstile, left):
                        for phi2 in self.conclusions(turnstile, right):
                            for r in resolution_closure({phi1, phi2}) - {phi1, phi2} - closed:
                                out.setdefault(r, COMBINATION)
        for phi in list(out):
            for extra in self._with_axioms(turnstile, phi):
                out.setdefault(extra, AXIOM_CLOSURE)
        self._conc[key] = out
        return out

    def rule(self, turnstile: str, sources: Iterable[str], conclusion: Iterable[Formula]) -> ExtraRule | None:
        M = tuple(sorted(sources))
        phi = frozenset(conclusion)
        prov = self.conclusions(turnstile, M).get(phi)
        if prov is None:
            return None
        srcs = [self.source(turnstile, n) for n in M]
        premises = tuple(sorted((p for s in srcs for p in s.premises), key=premise_key))
        return ExtraRule(
            turnstile, M, premises, phi,
            union(*(s.T_delta for s in srcs)),
            union(*(s.S_delta for s in srcs)),
            union(*(s.Sprime_delta for s in srcs)),
            prov,
            any(s.f_constraint for s in srcs),
        )

    def multisets(self, turnstile: str, allowed: Iterable[str] | None = None,
                  max_size: int | None = None) -> list[tuple[str, ...]]:
        names = sorted(self.names(turnstile) if allowed is None else set(allowed))
        top = min(self.max_sources, max_size or self.max_sources)
        out: list[tuple[str, ...]] = []
        for k in range(1, top + 1):
            out.extend(combinations_with_replacement(names, k))
        return out

    def generate_rules(self) -> list[ExtraRule]:
        """Rules with a single source: base conclusions and their closure with the axioms."""
        out: list[ExtraRule] = []
        for (x, name) in sorted(self.sources):
            for phi in sorted(self.conclusions(x, (name,)), key=clause_key):
                r = self.rule(x, (name,), phi)
                if r is not None:
                    out.append(r)
        return out

    def close_rules(self, turnstile: str, demanded: Iterable[Formula]) -> list[ExtraRule]:
        """All rules, base or combined, whose conclusion is exactly the demanded clause."""
        phi = frozenset(demanded)
        out: list[ExtraRule] = []
        for M in self.multisets(turnstile):
            if phi in self.conclusions(turnstile, M):
                r = self.rule(turnstile, M, phi)
                if r is not None:
                    out.append(r)
        return out


def _index_subsets(idx: range, size: int):
    return (set(c) for c in combinations(idx, size))


def generate_rules(bundle: TheoryBundle) -> list[ExtraRule]:
    return RuleBase(bundle).generate_rules()


def close_rules(base: RuleBase, turnstile: str, demanded: Iterable[Formula]) -> list[ExtraRule]:
    return base.close_rules(turnstile, demanded)
