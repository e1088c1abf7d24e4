"""Line-oriented theory DSL: facts, defaults, norms, axioms and scenario schemas."""

from __future__ import annotations

import re
import shlex
from dataclasses import dataclass, field, replace

from .defaults import DefaultRule, DefaultTheory, TheoryError
from .deontic import DEONTIC, FACTUAL, MIXED, OBLIGATION, PERMISSION, NormativeSystem, NormRule
from .syntax import RESERVED_ATOM, Formula, ReservedAtomError, SyntaxErrorAt, parse_formula


class BundleError(ValueError):
    """A theory file failed to parse or validate; names the offending line."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


@dataclass(frozen=True)
class SchemaSpec:
    name: str
    params: tuple[tuple[str, str], ...] = ()

    def get(self, key: str, default: str | None = None) -> str | None:
        for k, v in self.params:
            if k == key:
                return v
        return default

    def get_all(self, key: str) -> list[str]:
        return [v for k, v in self.params if k == key]


@dataclass
class TheoryBundle:
    default_theory: DefaultTheory
    normative_system: NormativeSystem | None
    atoms: frozenset[str]
    schemas: tuple[SchemaSpec, ...] = ()
    source: str = ""
    names: dict[str, object] = field(default_factory=dict)

    @property
    def W(self) -> tuple[Formula, ...]:
        return self.default_theory.W

    @property
    def D(self) -> tuple[DefaultRule, ...]:
        return self.default_theory.D

    def schema(self, name: str) -> list[SchemaSpec]:
        return [s for s in self.schemas if s.name == name]

    def has_schema(self, name: str) -> bool:
        return any(s.name == name for s in self.schemas)

    def rule(self, name: str):
        return self.names[name]

    def fact_compatibility(self, mode: str = OBLIGATION) -> frozenset[str]:
        """Names of the obligations that must stay consistent with the facts (F-constraint schema)."""
        if mode != OBLIGATION or self.normative_system is None:
            return frozenset()
        out: set[str] = set()
        for spec in self.schema("f_pi_constraint"):
            listed = {n for v in spec.get_all("rules") + spec.get_all("rule") for n in v.replace(",", " ").split()}
            out |= listed or {r.name for r in self.normative_system.O}
        return frozenset(out)


SCHEMA_NAMES = ("prsyl", "fcp", "pe", "dp", "qw", "f_pi_constraint", "specificity_rewrite", "symmetric_pair")

_RULE_KEYS = {
    "default": None,
    "oblig-f": (FACTUAL, OBLIGATION),
    "oblig-d": (DEONTIC, OBLIGATION),
    "oblig-m": (MIXED, OBLIGATION),
    "perm-f": (FACTUAL, PERMISSION),
    "perm-d": (DEONTIC, PERMISSION),
    "perm-m": (MIXED, PERMISSION),
}


def _formula(text: str, line: int) -> Formula:
    try:
        return parse_formula(text)
    except SyntaxErrorAt as e:
        raise BundleError(f"syntax error in {text.strip()!r}: {e}", line) from e
    except ReservedAtomError as e:
        raise BundleError(str(e), line) from e


def _split_rule(body: str, line: int) -> tuple[str, list[str], str, list[str]]:
    if "=>" not in body:
        raise BundleError("rule needs '=>' before its conclusion", line)
    head, concl = body.rsplit("=>", 1)
    unless: list[str] = []
    m = re.search(r"\bunless\b", concl)
    if m:
        unless = [u for u in (x.strip() for x in concl[m.end():].split(",")) if u]
        concl = concl[:m.start()]
        if not unless:
            raise BundleError("'unless' needs at least one exception formula", line)
    if ":" not in head:
        raise BundleError("rule needs ':' between condition and justifications", line)
    cond, just = head.split(":", 1)
    justs = [j for j in (x.strip() for x in just.split(",")) if j]
    if not justs:
        raise BundleError("rule needs at least one justification", line)
    return cond.strip(), justs, concl.strip(), unless


def _parse_schema(body: str, line: int) -> SchemaSpec:
    m = re.match(r"\s*([a-z_]+)\s*(\{(.*)\})?\s*\Z", body, re.S)
    if not m:
        raise BundleError(f"malformed schema declaration {body.strip()!r}", line)
    name = m.group(1)
    if name not in SCHEMA_NAMES:
        raise BundleError(f"unknown schema {name!r}", line)
    params: list[tuple[str, str]] = []
    if m.group(3):
        for tok in shlex.split(m.group(3)):
            if "=" not in tok:
                raise BundleError(f"schema parameter {tok!r} needs key=value", line)
            k, v = tok.split("=", 1)
            params.append((k.strip(), v.strip()))
    return SchemaSpec(name, tuple(params))


def _apply_specificity(schemas: list[SchemaSpec], O: list[NormRule], P: list[NormRule],
                       names: dict[str, object]) -> tuple[list[NormRule], list[NormRule]]:
    """A more specific norm's factual condition becomes an exception of the general one."""
    for spec in schemas:
        if spec.name != "specificity_rewrite":
            continue
        general, specific = spec.get("general"), spec.get("specific")
        g, sp = names.get(general or ""), names.get(specific or "")
        if not isinstance(g, NormRule) or not isinstance(sp, NormRule):
            raise BundleError(f"specificity_rewrite needs two declared norms, got {general!r} and {specific!r}")
        if sp.factual_condition is None:
            raise BundleError(f"specificity_rewrite: {specific} has no factual condition")
        new = replace(g, exceptions=g.exceptions + (sp.factual_condition,))
        O = [new if r is g else r for r in O]
        P = [new if r is g else r for r in P]
        names[g.name] = new
    return O, P


def parse_bundle(text: str) -> TheoryBundle:
    """Parse and validate a theory file."""
    declared: set[str] | None = None
    W: list[Formula] = []
    Wo: list[Formula] = []
    Wp: list[Formula] = []
    D: list[DefaultRule] = []
    O: list[NormRule] = []
    P: list[NormRule] = []
    schemas: list[SchemaSpec] = []
    names: dict[str, object] = {}
    used: dict[str, int] = {}

    def note_atoms(f: Formula, line: int) -> None:
        for a in f.atoms() - {RESERVED_ATOM}:
            used.setdefault(a, line)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        if content.startswith("atoms"):
            rest = content[len("atoms"):].strip()
            declared = set(declared or ()) | set(rest.split())
            for a in rest.split():
                if not re.fullmatch(r"[a-z][a-z0-9_]*", a) or a in ("top", "bot"):
                    raise BundleError(f"invalid atom name {a!r}", lineno)
            continue
        if ":" not in content:
            raise BundleError(f"unrecognised declaration {content!r}", lineno)
        key, body = content.split(":", 1)
        key = key.strip()
        try:
            if key == "fact":
                f = _formula(body, lineno)
                note_atoms(f, lineno)
                W.append(f)
            elif key == "oblig-axiom":
                f = _formula(body, lineno)
                note_atoms(f, lineno)
                Wo.append(f)
            elif key == "perm-axiom":
                f = _formula(body, lineno)
                note_atoms(f, lineno)
                Wp.append(f)
            elif key == "schema":
                schemas.append(_parse_schema(body, lineno))
            elif key in _RULE_KEYS:
                cond_text, just_texts, concl_text, unless_texts = _split_rule(body, lineno)
                second: Formula | None = None
                if key.endswith("-m"):
                    if ";" not in cond_text:
                        raise BundleError("mixed norm needs '<factual> ; <deontic>' conditions", lineno)
                    a, b = cond_text.split(";", 1)
                    cond = _formula(a, lineno)
                    second = _formula(b, lineno)
                    note_atoms(second, lineno)
                else:
                    cond = _formula(cond_text, lineno)
                justs = tuple(_formula(j, lineno) for j in just_texts)
                concl = _formula(concl_text, lineno)
                excs = tuple(_formula(u, lineno) for u in unless_texts)
                for f in (cond, concl, *justs, *excs):
                    note_atoms(f, lineno)
                if key == "default":
                    if excs:
                        raise BundleError("'unless' is only available on norms", lineno)
                    name = f"D{len(D) + 1}"
                    D.append(DefaultRule(cond, justs, concl, name))
                    names[name] = D[-1]
                else:
                    kind, mode = _RULE_KEYS[key]  # type: ignore[misc]
                    if mode == OBLIGATION:
                        name = f"O{len(O) + 1}"
                        rule = NormRule(cond, justs, concl, kind, mode, name, second, excs)
                        O.append(rule)
                    else:
                        name = f"P{sum(1 for r in P if r.mode == PERMISSION) + 1}"
                        rule = NormRule(cond, justs, concl, kind, mode, name, second, excs)
                        P.append(rule)
                    names[name] = rule
            else:
                raise BundleError(f"unknown declaration keyword {key!r}", lineno)
        except TheoryError as e:
            raise BundleError(str(e), lineno) from e

    O, P = _apply_specificity(schemas, O, P, names)

    if declared is not None:
        for a, line in sorted(used.items(), key=lambda kv: kv[1]):
            if a not in declared:
                raise BundleError(f"atom {a!r} is not declared", line)
    alphabet = frozenset(declared) if declared is not None else frozenset(used)
    try:
        theory = DefaultTheory(tuple(W), tuple(D), allow_empty=bool(O or P))
    except TheoryError as e:
        raise BundleError(str(e)) from e
    system: NormativeSystem | None = None
    if O or P or Wo or Wp:
        # Obligations double as permissions and obligation axioms as permission axioms.
        wp = tuple(Wo) + tuple(f for f in Wp if f not in Wo)
        try:
            system = NormativeSystem(tuple(Wo), wp, tuple(O), tuple(O) + tuple(P))
        except TheoryError as e:
            raise BundleError(str(e)) from e
    return TheoryBundle(theory, system, alphabet, tuple(schemas), text, names)


def load_bundle(path: str) -> TheoryBundle:
    with open(path, encoding="utf-8") as fh:
        return parse_bundle(fh.read())
