"""Controlled sequent calculi: control sets, extra-logical rules, checking and proof search."""

from .checker import Checker, Metrics, NodeVerdict, Verdict, check_derivation, compatible, derivation_metrics
from .model import (
    DEF,
    NO_CONTROL,
    OBL,
    PERM,
    ControlledSequent,
    ControlSet,
    Derivation,
    DerivationError,
    control_set,
    labelled,
    members,
    sequent,
    show_control,
    union,
)
from .rules import ExtraRule, RuleBase, close_rules, generate_rules
from .search import BudgetExhausted, Prover, SearchResult, prove

__all__ = [
    "Checker", "Metrics", "NodeVerdict", "Verdict", "check_derivation", "compatible", "derivation_metrics",
    "DEF", "OBL", "PERM", "NO_CONTROL", "ControlledSequent", "ControlSet", "Derivation", "DerivationError",
    "control_set", "labelled", "members", "sequent", "show_control", "union", "ExtraRule", "RuleBase",
    "close_rules", "generate_rules", "BudgetExhausted", "Prover", "SearchResult", "prove",
]
