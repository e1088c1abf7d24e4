"""Control sets, controlled sequents and derivation trees."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from ..syntax import EMPTY, Context, Formula, LabelledFormula

DEF, OBL, PERM = "D", "O", "P"
TURNSTILES = (DEF, OBL, PERM)

ControlSet = frozenset  # frozenset[frozenset[LabelledFormula]]
NO_CONTROL: ControlSet = frozenset()


class DerivationError(ValueError):
    """A derivation node does not match the shape of the rule it claims."""

    def __init__(self, message: str, path: tuple[int, ...] = ()):
        where = "root" if not path else "node " + ".".join(str(i) for i in path)
        super().__init__(f"{where}: {message}")
        self.path = path


def control_set(*groups: Iterable[LabelledFormula]) -> ControlSet:
    """Build a control set from groups of labelled formulas; empty groups are dropped."""
    return frozenset(frozenset(g) for g in map(frozenset, groups) if g)


def labelled(formulas: Iterable[Formula], tag: str) -> frozenset[LabelledFormula]:
    return frozenset(LabelledFormula(f, tag) for f in formulas)


def union(*sets: ControlSet) -> ControlSet:
    out: set[frozenset[LabelledFormula]] = set()
    for s in sets:
        out |= s
    return frozenset(out)


def members(cs: ControlSet, tags: Iterable[str] | None = None) -> frozenset[Formula]:
    """Formulas occurring in any inner set, optionally restricted to the given tags."""
    wanted = None if tags is None else set(tags)
    return frozenset(lf.formula for group in cs for lf in group if wanted is None or lf.tag in wanted)


def _group_key(group: frozenset[LabelledFormula]) -> tuple[str, ...]:
    return tuple(sorted(lf.show() for lf in group))


def sorted_groups(cs: ControlSet) -> list[list[LabelledFormula]]:
    """Canonical order: members by text inside a group, groups by their member texts."""
    return [sorted(g, key=lambda lf: lf.show()) for g in sorted(cs, key=_group_key)]


def show_control(cs: ControlSet) -> str:
    return "{" + ", ".join("{" + ", ".join(lf.show() for lf in g) + "}" for g in sorted_groups(cs)) + "}"


@dataclass(frozen=True)
class ControlledSequent:
    turnstile: str
    repository: Context
    antecedent: Context
    succedent: Context
    T: ControlSet = NO_CONTROL
    S: ControlSet = NO_CONTROL
    Sprime: ControlSet = NO_CONTROL

    def __post_init__(self) -> None:
        if self.turnstile not in TURNSTILES:
            raise ValueError(f"unknown turnstile {self.turnstile!r}")
        if self.turnstile == DEF and len(self.repository):
            raise ValueError("default-labelled sequents carry no repository")

    def with_controls(self, T: ControlSet, S: ControlSet, Sprime: ControlSet) -> "ControlledSequent":
        return ControlledSequent(self.turnstile, self.repository, self.antecedent, self.succedent, T, S, Sprime)

    def show(self) -> str:
        rep = "" if self.turnstile == DEF else f"{self.repository.show() or '.'} | "
        ctl = f"[T={show_control(self.T)} S={show_control(self.S)}"
        if self.Sprime:
            ctl += f" S'={show_control(self.Sprime)}"
        ctl += "]"
        return f"{rep}{self.antecedent.show()} |-{self.turnstile}{ctl} {self.succedent.show()}".strip()


def sequent(turnstile: str, antecedent: Iterable[Formula] = (), succedent: Iterable[Formula] = (),
            repository: Iterable[Formula] = (), T: ControlSet = NO_CONTROL, S: ControlSet = NO_CONTROL,
            Sprime: ControlSet = NO_CONTROL) -> ControlledSequent:
    return ControlledSequent(turnstile, Context(repository), Context(antecedent), Context(succedent), T, S, Sprime)


@dataclass(frozen=True, eq=False)
class Derivation:
    """A derivation node; `label` names the sources of an extra-logical step."""

    rule: str
    conclusion: ControlledSequent
    children: tuple["Derivation", ...] = ()
    label: str = ""

    def walk(self, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], "Derivation"]]:
        """Pre-order traversal with child-index paths."""
        yield path, self
        for i, c in enumerate(self.children):
            yield from c.walk(path + (i,))

    def at(self, path: Iterable[int]) -> "Derivation":
        node = self
        for i in path:
            node = node.children[i]
        return node

    def size(self) -> int:
        return sum(1 for _ in self.walk())

    def height(self) -> int:
        return 1 + max((c.height() for c in self.children), default=0)

    def show(self, indent: int = 0) -> str:
        tag = f"{self.rule}[{self.label}]" if self.label else self.rule
        lines = [" " * indent + f"{tag}: {self.conclusion.show()}"]
        for c in self.children:
            lines.append(c.show(indent + 2))
        return "\n".join(lines)


__all__ = [
    "DEF", "OBL", "PERM", "TURNSTILES", "ControlSet", "NO_CONTROL", "DerivationError", "control_set",
    "labelled", "union", "members", "sorted_groups", "show_control", "ControlledSequent", "sequent",
    "Derivation", "EMPTY",
]
