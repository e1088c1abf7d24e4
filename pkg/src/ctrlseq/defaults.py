"""Default theories, modified extensions and m-credulous consequence."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .classical import consistent, entails, is_valid
from .syntax import Formula, big_and, neg

DEFAULT_CAP = 8


class TheoryError(ValueError):
    """A theory invariant is violated."""


class CapExceeded(ValueError):
    """Too many rules for exhaustive enumeration."""


@dataclass(frozen=True)
class DefaultRule:
    prerequisite: Formula
    justifications: tuple[Formula, ...]
    conclusion: Formula
    name: str = ""

    def __post_init__(self) -> None:
        if not self.justifications:
            raise TheoryError(f"default {self.name or self.show()} has no justification")
        for j in self.justifications:
            if not consistent([j]):
                raise TheoryError(f"default {self.name or self.show()}: contradictory justification {j}")
        if is_valid((), (self.conclusion,)):
            raise TheoryError(f"default {self.name or self.show()}: tautological conclusion {self.conclusion}")

    def show(self) -> str:
        just = ", ".join(j.key for j in self.justifications)
        return f"{self.prerequisite.key} : {just} => {self.conclusion.key}"


@dataclass(frozen=True)
class DefaultTheory:
    W: tuple[Formula, ...]
    D: tuple[DefaultRule, ...]
    allow_empty: bool = False

    def __post_init__(self) -> None:
        if not consistent(self.W):
            raise TheoryError("inconsistent facts W")
        if not self.D and not self.allow_empty:
            raise TheoryError("the set of defaults must be nonempty")


@dataclass(frozen=True)
class ExtensionWitness:
    generators: frozenset[Formula]
    support: frozenset[Formula]
    applied: tuple[DefaultRule, ...]

    def entails(self, goal: Formula) -> bool:
        return entails(self.generators, goal)

    def show(self) -> str:
        gens = ", ".join(sorted(f.key for f in self.generators))
        sup = ", ".join(sorted(f.key for f in self.support))
        order = ", ".join(d.name or d.show() for d in self.applied)
        return f"generators {{{gens}}}; support {{{sup}}}; applied [{order}]"


@dataclass
class _Progress:
    generators: frozenset[Formula]
    support: frozenset[Formula] = field(default_factory=frozenset)
    applied: tuple[DefaultRule, ...] = ()


def applicable(d: DefaultRule, generators: Iterable[Formula], support: Iterable[Formula]) -> bool:
    """Prerequisite entailed and every justification (old and new) survives the conclusion."""
    gens = frozenset(generators)
    if not entails(gens, d.prerequisite):
        return False
    after = gens | {d.conclusion}
    return all(not entails(after, neg(a)) for a in set(support) | set(d.justifications))


def succeeds(generators: Iterable[Formula], support: Iterable[Formula]) -> bool:
    gens = frozenset(generators)
    return all(not entails(gens, neg(a)) for a in support)


def is_closed(rules: Iterable[DefaultRule], applied: Iterable[DefaultRule],
              generators: Iterable[Formula], support: Iterable[Formula]) -> bool:
    done = set(applied)
    gens = frozenset(generators)
    sup = frozenset(support)
    return not any(applicable(d, gens, sup) for d in rules if d not in done)


def _mutually_entail(a: frozenset[Formula], b: frozenset[Formula]) -> bool:
    return entails(a, big_and(b)) and entails(b, big_and(a))


def _enumerate(base: frozenset[Formula], rules: tuple[DefaultRule, ...]) -> list[ExtensionWitness]:
    found: list[ExtensionWitness] = []
    seen: set[frozenset[DefaultRule]] = set()

    def visit(state: _Progress) -> None:
        key = frozenset(state.applied)
        if key in seen:
            return
        seen.add(key)
        moves = [d for d in rules if d not in key and applicable(d, state.generators, state.support)]
        if not moves:
            if succeeds(state.generators, state.support):
                found.append(ExtensionWitness(state.generators, state.support, state.applied))
            return
        for d in moves:
            visit(_Progress(state.generators | {d.conclusion},
                            state.support | frozenset(d.justifications),
                            state.applied + (d,)))

    visit(_Progress(base))
    unique: list[ExtensionWitness] = []
    for w in found:
        if not any(_mutually_entail(w.generators, u.generators) for u in unique):
            unique.append(w)
    return unique


def modified_extensions(t: DefaultTheory, assumptions: Iterable[Formula] = (),
                        cap: int = DEFAULT_CAP) -> list[ExtensionWitness]:
    if len(t.D) > cap:
        raise CapExceeded(f"{len(t.D)} defaults exceed the enumeration cap {cap}")
    base = frozenset(t.W) | frozenset(assumptions)
    if not consistent(base):
        raise TheoryError("facts together with the assumptions are inconsistent")
    return sorted(_enumerate(base, t.D), key=lambda w: tuple(sorted(f.key for f in w.generators)))


def m_credulous(t: DefaultTheory, assumptions: Iterable[Formula], goal: Formula,
                cap: int = DEFAULT_CAP) -> tuple[bool, ExtensionWitness | None]:
    for w in modified_extensions(t, assumptions, cap):
        if w.entails(goal):
            return True, w
    return False, None


def validate_witness(t: DefaultTheory, assumptions: Iterable[Formula], w: ExtensionWitness) -> bool:
    """Independent re-check of success, closedness, groundedness and bookkeeping."""
    base = frozenset(t.W) | frozenset(assumptions)
    if not consistent(w.generators) or not base <= w.generators:
        return False
    if w.support != frozenset(j for d in w.applied for j in d.justifications):
        return False
    if w.generators != base | frozenset(d.conclusion for d in w.applied):
        return False
    gens = set(base)
    for d in w.applied:
        if not entails(gens, d.prerequisite):
            return False
        gens.add(d.conclusion)
    return succeeds(w.generators, w.support) and is_closed(t.D, w.applied, w.generators, w.support)


def check_semi_monotonicity(t: DefaultTheory, extra: Iterable[DefaultRule],
                            assumptions: Iterable[Formula] = ()) -> bool:
    bigger = DefaultTheory(t.W, tuple(t.D) + tuple(d for d in extra if d not in t.D))
    small = modified_extensions(t, assumptions)
    large = modified_extensions(bigger, assumptions)
    for w in small:
        goal = big_and(w.generators)
        if not any(entails(v.generators, goal) and w.support <= v.support for v in large):
            return False
    return True
