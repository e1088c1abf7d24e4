"""JSON certificates for controlled derivations, with a fixed field order."""

from __future__ import annotations

import json
from typing import Any

from .controlled.model import ControlledSequent, ControlSet, Derivation, control_set, sorted_groups
from .syntax import Context, ReservedAtomError, SyntaxErrorAt, parse_formula, parse_labelled

FIELDS = ("rule", "label", "turnstile", "repository", "antecedent", "succedent", "T", "S", "Sprime", "children")


class CertificateError(ValueError):
    """A certificate document is malformed."""


def _context(ctx: Context) -> list[str]:
    return [f.key for f in ctx]


def _controls(cs: ControlSet) -> list[list[str]]:
    return [[lf.show() for lf in g] for g in sorted_groups(cs)]


def to_record(d: Derivation) -> dict[str, Any]:
    c = d.conclusion
    return {
        "rule": d.rule,
        "label": d.label,
        "turnstile": c.turnstile,
        "repository": _context(c.repository),
        "antecedent": _context(c.antecedent),
        "succedent": _context(c.succedent),
        "T": _controls(c.T),
        "S": _controls(c.S),
        "Sprime": _controls(c.Sprime),
        "children": [to_record(k) for k in d.children],
    }


def dumps(d: Derivation) -> str:
    return json.dumps(to_record(d), indent=2, ensure_ascii=False) + "\n"


def _parse_context(items: Any, where: str) -> Context:
    if not isinstance(items, list) or not all(isinstance(x, str) for x in items):
        raise CertificateError(f"{where}: expected a list of formulas")
    try:
        return Context(parse_formula(x, allow_reserved=True) for x in items)
    except (SyntaxErrorAt, ReservedAtomError) as e:
        raise CertificateError(f"{where}: {e}") from e


def _parse_controls(groups: Any, where: str) -> ControlSet:
    if not isinstance(groups, list) or not all(isinstance(g, list) and g for g in groups):
        raise CertificateError(f"{where}: expected a list of nonempty lists")
    try:
        return control_set(*([parse_labelled(x) for x in g] for g in groups))
    except (ValueError, TypeError) as e:
        raise CertificateError(f"{where}: {e}") from e


def from_record(rec: Any, path: str = "root") -> Derivation:
    if not isinstance(rec, dict):
        raise CertificateError(f"{path}: node must be an object")
    missing = [k for k in FIELDS if k not in rec]
    extra = [k for k in rec if k not in FIELDS]
    if missing or extra:
        raise CertificateError(f"{path}: missing fields {missing} or unknown fields {extra}")
    if not isinstance(rec["rule"], str) or not isinstance(rec["label"], str):
        raise CertificateError(f"{path}: rule and label must be strings")
    try:
        seq = ControlledSequent(
            rec["turnstile"],
            _parse_context(rec["repository"], f"{path}.repository"),
            _parse_context(rec["antecedent"], f"{path}.antecedent"),
            _parse_context(rec["succedent"], f"{path}.succedent"),
            _parse_controls(rec["T"], f"{path}.T"),
            _parse_controls(rec["S"], f"{path}.S"),
            _parse_controls(rec["Sprime"], f"{path}.Sprime"),
        )
    except ValueError as e:
        if isinstance(e, CertificateError):
            raise
        raise CertificateError(f"{path}: {e}") from e
    if not isinstance(rec["children"], list):
        raise CertificateError(f"{path}: children must be a list")
    kids = tuple(from_record(k, f"{path}.{i}") for i, k in enumerate(rec["children"]))
    return Derivation(rec["rule"], seq, kids, rec["label"])


def loads(text: str) -> Derivation:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise CertificateError(f"invalid JSON: {e}") from e
    return from_record(data)


def load(path: str) -> Derivation:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dump(d: Derivation, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(d))
