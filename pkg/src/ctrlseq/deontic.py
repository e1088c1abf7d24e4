"""Normative systems, deontic extensions and d-credulous consequence."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .classical import consistent, entails, is_valid
from .defaults import (
    DEFAULT_CAP,
    CapExceeded,
    DefaultTheory,
    ExtensionWitness,
    TheoryError,
    modified_extensions,
)
from .syntax import TOP, Formula, big_and, neg

OBLIGATION = "obligation"
PERMISSION = "permission"
FACTUAL = "factual"
DEONTIC = "deontic"
MIXED = "mixed"


@dataclass(frozen=True)
class NormRule:
    """Conditional norm; a mixed norm has a factual and a deontic condition at once."""

    condition: Formula
    constraints: tuple[Formula, ...]
    conclusion: Formula
    kind: str
    mode: str
    name: str = ""
    deontic_condition: Formula | None = None
    exceptions: tuple[Formula, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in (FACTUAL, DEONTIC, MIXED):
            raise TheoryError(f"unknown condition kind {self.kind!r}")
        if self.mode not in (OBLIGATION, PERMISSION):
            raise TheoryError(f"unknown mode {self.mode!r}")
        if (self.kind == MIXED) != (self.deontic_condition is not None):
            raise TheoryError("only mixed norms carry a second, deontic condition")
        if not self.constraints:
            raise TheoryError(f"norm {self.name or self.show()} has no constraint")
        for c in self.constraints:
            if not consistent([c]):
                raise TheoryError(f"norm {self.name or self.show()}: contradictory constraint {c}")
        if is_valid((), (self.conclusion,)):
            raise TheoryError(f"norm {self.name or self.show()}: tautological conclusion {self.conclusion}")

    @property
    def factual_condition(self) -> Formula | None:
        if self.kind == FACTUAL or self.kind == MIXED:
            return self.condition
        return None

    @property
    def normative_condition(self) -> Formula | None:
        if self.kind == DEONTIC:
            return self.condition
        return self.deontic_condition

    def show(self) -> str:
        cons = ", ".join(c.key for c in self.constraints)
        cond = self.condition.key
        if self.kind == MIXED:
            cond = f"{cond} ; {self.deontic_condition.key}"  # type: ignore[union-attr]
        out = f"{cond} : {cons} => {self.conclusion.key}"
        if self.exceptions:
            out += " unless " + ", ".join(e.key for e in self.exceptions)
        return out


@dataclass(frozen=True)
class NormativeSystem:
    Wo: tuple[Formula, ...]
    Wp: tuple[Formula, ...]
    O: tuple[NormRule, ...]
    P: tuple[NormRule, ...]

    def __post_init__(self) -> None:
        if not consistent(self.Wo):
            raise TheoryError("inconsistent obligation axioms")
        if not consistent(self.Wp):
            raise TheoryError("inconsistent permission axioms")
        if not set(self.Wo) <= set(self.Wp):
            missing = ", ".join(f.key for f in self.Wo if f not in set(self.Wp))
            raise TheoryError(f"obligation axioms missing from permission axioms: {missing}")
        if not set(self.O) <= set(self.P):
            missing = ", ".join(r.name or r.show() for r in self.O if r not in set(self.P))
            raise TheoryError(f"obligations missing from permissions: {missing}")
        if not any(r.kind != DEONTIC for r in self.O):
            raise TheoryError("at least one obligation with a factual condition is required")

    @property
    def Of(self) -> tuple[NormRule, ...]:
        return tuple(r for r in self.O if r.kind != DEONTIC)

    @property
    def Od(self) -> tuple[NormRule, ...]:
        return tuple(r for r in self.O if r.kind == DEONTIC)

    def rules(self, mode: str) -> tuple[NormRule, ...]:
        return self.O if mode == OBLIGATION else self.P

    def axioms(self, mode: str) -> tuple[Formula, ...]:
        return self.Wo if mode == OBLIGATION else self.Wp


@dataclass(frozen=True)
class DeonticWitness:
    mode: str
    base: ExtensionWitness
    generators: frozenset[Formula]
    support: frozenset[Formula]
    applied: tuple[NormRule, ...]

    def entails(self, goal: Formula) -> bool:
        return entails(self.generators, goal)

    def show(self) -> str:
        gens = ", ".join(sorted(f.key for f in self.generators))
        sup = ", ".join(sorted(f.key for f in self.support))
        order = ", ".join(r.name or r.show() for r in self.applied)
        return f"{self.mode} generators {{{gens}}}; support {{{sup}}}; applied [{order}]"


def rule_constraints(r: NormRule, base: ExtensionWitness,
                     fact_compatibility: bool | frozenset[str]) -> tuple[Formula, ...]:
    """Constraints of a norm, plus the conjunction of the base facts when it must fit them.

    `fact_compatibility` is either a flag for every norm or the set of norm names it covers.
    """
    if fact_compatibility is True or (not isinstance(fact_compatibility, bool) and r.name in fact_compatibility):
        return r.constraints + (big_and(base.generators),)
    return r.constraints


def norm_fires(r: NormRule, facts: frozenset[Formula], own: frozenset[Formula]) -> bool:
    """Factual conditions consult only the facts; deontic conditions only the own generators."""
    if any(entails(facts, e) for e in r.exceptions):
        return False
    fc = r.factual_condition
    if fc is not None and not entails(facts, fc):
        return False
    nc = r.normative_condition
    if nc is not None and not entails(own, nc):
        return False
    return True


def _norm_applicable(r: NormRule, base: ExtensionWitness, own: frozenset[Formula],
                     support: frozenset[Formula], fact_compatibility: bool | frozenset[str]) -> bool:
    if not norm_fires(r, base.generators, own):
        return False
    after = own | {r.conclusion}
    checks = set(support) | set(rule_constraints(r, base, fact_compatibility))
    return all(not entails(after, neg(a)) for a in checks)


def _extensions_over(base: ExtensionWitness, rules: tuple[NormRule, ...], seed: frozenset[Formula],
                     mode: str, fact_compatibility: bool | frozenset[str]) -> list[DeonticWitness]:
    found: list[DeonticWitness] = []
    seen: set[frozenset[NormRule]] = set()

    def visit(gens: frozenset[Formula], support: frozenset[Formula], applied: tuple[NormRule, ...]) -> None:
        key = frozenset(applied)
        if key in seen:
            return
        seen.add(key)
        moves = [r for r in rules if r not in key and _norm_applicable(r, base, gens, support, fact_compatibility)]
        if not moves:
            if all(not entails(gens, neg(a)) for a in support):
                found.append(DeonticWitness(mode, base, gens, support, applied))
            return
        for r in moves:
            visit(gens | {r.conclusion},
                  support | frozenset(rule_constraints(r, base, fact_compatibility)),
                  applied + (r,))

    visit(seed, frozenset(), ())
    unique: list[DeonticWitness] = []
    for w in found:
        same = [u for u in unique
                if entails(u.generators, big_and(w.generators)) and entails(w.generators, big_and(u.generators))]
        if not same:
            unique.append(w)
    return unique


def base_extensions(t: DefaultTheory, facts: Iterable[Formula], cap: int = DEFAULT_CAP) -> list[ExtensionWitness]:
    return modified_extensions(t, facts, cap)


def deontic_extensions(t: DefaultTheory, n: NormativeSystem, facts: Iterable[Formula] = (),
                       deontic_assumptions: Iterable[Formula] = (), mode: str = OBLIGATION,
                       fact_compatibility: bool | frozenset[str] = False, cap: int = DEFAULT_CAP) -> list[DeonticWitness]:
    rules = n.rules(mode)
    if len(n.P) > cap:
        raise CapExceeded(f"{len(n.P)} norms exceed the enumeration cap {cap}")
    seed = frozenset(n.axioms(mode)) | frozenset(deontic_assumptions)
    if not consistent(seed):
        raise TheoryError(f"{mode} axioms together with the assumptions are inconsistent")
    out: list[DeonticWitness] = []
    for base in base_extensions(t, facts, cap):
        out.extend(_extensions_over(base, rules, seed, mode, fact_compatibility))
    return out


def d_credulous(t: DefaultTheory, n: NormativeSystem, facts: Iterable[Formula],
                deontic_assumptions: Iterable[Formula], goal: Formula, mode: str = OBLIGATION,
                fact_compatibility: bool | frozenset[str] = False) -> tuple[bool, DeonticWitness | None]:
    for w in deontic_extensions(t, n, facts, deontic_assumptions, mode, fact_compatibility):
        if w.entails(goal):
            return True, w
    return False, None


def validate_deontic_witness(n: NormativeSystem, deontic_assumptions: Iterable[Formula], w: DeonticWitness,
                             fact_compatibility: bool | frozenset[str] = False) -> bool:
    """Independent re-check of success, closedness and groundedness of a deontic witness."""
    seed = frozenset(n.axioms(w.mode)) | frozenset(deontic_assumptions)
    if w.generators != seed | frozenset(r.conclusion for r in w.applied):
        return False
    own = set(seed)
    for r in w.applied:
        if not norm_fires(r, w.base.generators, frozenset(own)):
            return False
        own.add(r.conclusion)
    if any(entails(w.generators, neg(a)) for a in w.support):
        return False
    done = set(w.applied)
    return not any(
        _norm_applicable(r, w.base, w.generators, w.support, fact_compatibility)
        for r in n.rules(w.mode) if r not in done
    )


def check_deontic_semi_monotonicity(t: DefaultTheory, n: NormativeSystem, extra: Iterable[NormRule],
                                    facts: Iterable[Formula] = (), mode: str = OBLIGATION) -> bool:
    extra = tuple(extra)
    o_extra = tuple(r for r in extra if r.mode == OBLIGATION and r not in n.O)
    p_extra = tuple(r for r in extra if r not in n.P)
    bigger = NormativeSystem(n.Wo, n.Wp, n.O + o_extra, n.P + p_extra)
    small = deontic_extensions(t, n, facts, (), mode)
    large = deontic_extensions(t, bigger, facts, (), mode)
    for w in small:
        goal = big_and(w.generators)
        if not any(
            v.base == w.base and entails(v.generators, goal) and w.support <= v.support for v in large
        ):
            return False
    return True


UNCONDITIONAL = TOP
