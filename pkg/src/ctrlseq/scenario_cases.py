"""Programmatic construction of the scenario corpus shipped under ctrlseq/corpus."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

from .certificate import dumps
from .controlled.model import DEF, OBL, PERM, Derivation
from .dsl import parse_bundle
from .scenarios import Builder


@dataclass
class BuiltCase:
    name: str
    theory: str
    derivations: dict[str, Derivation]
    expected: list[tuple[str, str]]


def _typicality() -> BuiltCase:
    theory = """\
# an adult is employed unless a student; employment and studies each carry a duty
atoms p q r s t
default: p : p & ~r => q
oblig-f: q : s => s
oblig-f: r : t => t
"""
    b = Builder(parse_bundle(theory))
    left = b.delta(OBL, "O1", ["s"], [b.delta(DEF, "D1", ["q"], [b.ax(DEF, ["p"], ["p"])], ["p"])], repository=["p"])
    mid_ax = b.lw(b.ax(DEF, ["p"], ["p"]), "r")
    middle = b.delta(OBL, "O1", ["s"], [b.delta(DEF, "D1", ["q"], [mid_ax], ["p", "r"])], repository=["p", "r"])
    right = b.delta(OBL, "O2", ["t"], [b.lw(b.ax(DEF, ["r"], ["r"]), "p")], repository=["r", "p"])
    return BuiltCase("typicality", theory, {"left": left, "middle": middle, "right": right},
                     [("left", "proof"), ("middle", "paraproof"), ("right", "proof")])


def _practical_syllogism() -> BuiltCase:
    theory = """\
# one ought not pollute; cycling does not pollute
atoms p q
fact: ~q | ~p
oblig-f: top : ~p => ~p
schema: prsyl
"""
    b = Builder(parse_bundle(theory))
    main = b.delta(OBL, "O1", ["~p"])
    d = b.schema("prsyl", [main, b.ax(DEF, ["q"], ["~p"])], conclusion="q")
    return BuiltCase("practical_syllogism", theory, {"main": d}, [("main", "proof")])


def _conjoin(b: Builder, left: Derivation, right: Derivation, formula: str) -> Derivation:
    return b.step("R&", [], [formula], [left, right])


def _chisholm() -> BuiltCase:
    theory = """\
# a primary duty and two contrary-to-duty obligations
atoms p q
oblig-f: top : p => p
oblig-f: p : q => q
oblig-f: ~p : ~q => ~q
schema: f_pi_constraint
"""
    b = Builder(parse_bundle(theory))
    left = b.delta(OBL, "O1", ["p"])
    right = b.delta(OBL, "O3", ["~q"], [b.ax(DEF, ["~p"], ["~p"])], repository=["~p"])
    d = _conjoin(b, left, right, "p & ~q")
    return BuiltCase("chisholm", theory, {"main": d}, [("main", "paraproof"), ("main@0", "proof"), ("main@1", "proof")])


def _forrester() -> BuiltCase:
    theory = """\
# one ought not kill; if one kills, one ought to kill gently
atoms p q
oblig-f: top : ~p => ~p
oblig-f: p : q => q
schema: f_pi_constraint
"""
    b = Builder(parse_bundle(theory))
    left = b.delta(OBL, "O1", ["~p"])
    right = b.delta(OBL, "O2", ["q"], [b.ax(DEF, ["p"], ["p"])], repository=["p"])
    d = _conjoin(b, left, right, "~p & q")
    return BuiltCase("forrester", theory, {"main": d}, [("main", "paraproof"), ("main@0", "proof"), ("main@1", "proof")])


def _specificity() -> BuiltCase:
    theory = """\
# a dog ought not be killed; a dog attacking a child ought to be
atoms p q r
oblig-f: p : ~q => ~q
oblig-f: p & r : q => q
schema: specificity_rewrite { general=O1 specific=O2 }
"""
    b = Builder(parse_bundle(theory))
    prem = b.lw(b.ax(DEF, ["p"], ["p"]), "r")
    d = b.delta(OBL, "O1", ["~q"], [prem], repository=["p", "r"])
    return BuiltCase("specificity", theory, {"main": d}, [("main", "paraproof")])


def _extended_forrester() -> BuiltCase:
    theory = """\
# no fence unless there is a dog; a fence ought to be white
atoms p q r
oblig-f: top : ~p => ~p unless r
oblig-f: p : p & q => p & q
oblig-f: r : p & q => p & q
schema: f_pi_constraint { rules=O2,O3 }
"""
    b = Builder(parse_bundle(theory))
    left = b.delta(OBL, "O1", ["~p"], repository=["r"])
    fence = b.delta(OBL, "O2", ["p"], [b.ax(DEF, ["p"], ["p"])], repository=["p"])
    white = b.delta(OBL, "O2", ["q"], [b.ax(DEF, ["p"], ["p"])], repository=["p"])
    both = _conjoin(b, fence, white, "p & q")
    right = _conjoin(b, b.delta(OBL, "O1", ["~p"]), both, "~p & (p & q)")
    return BuiltCase("extended_forrester", theory, {"left": left, "right": right},
                     [("left", "paraproof"), ("right", "paraproof"), ("right@0", "proof"), ("right@1", "proof")])


def _euthyphro() -> BuiltCase:
    theory = """\
# prosecuting the father dishonours him
atoms p q
fact: ~p | q
oblig-f: top : p => p
oblig-f: top : ~q => ~q
schema: f_pi_constraint
"""
    b = Builder(parse_bundle(theory))
    d = _conjoin(b, b.delta(OBL, "O1", ["p"]), b.delta(OBL, "O2", ["~q"]), "p & ~q")
    return BuiltCase("euthyphro", theory, {"main": d}, [("main", "paraproof"), ("main@0", "proof"), ("main@1", "proof")])


def _exceptions() -> BuiltCase:
    theory = """\
# at a meal one ought not eat with fingers, except for asparagus
atoms p q r
oblig-f: p : ~q => ~q unless r
"""
    b = Builder(parse_bundle(theory))
    prem = b.lw(b.ax(DEF, ["p"], ["p"]), "r")
    d = b.delta(OBL, "O1", ["~q"], [prem], repository=["p", "r"])
    return BuiltCase("exceptions", theory, {"main": d}, [("main", "paraproof")])


def _violations() -> BuiltCase:
    theory = """\
# one ought not double-park; a violation carries a fine
atoms p q
oblig-f: top : ~p => ~p
oblig-m: p ; ~p : q => q
"""
    b = Builder(parse_bundle(theory))
    fact = b.ax(DEF, ["p"], ["p"])
    duty = b.delta(OBL, "O1", ["~p"], repository=["p"])
    d = b.delta(OBL, "O2", ["q"], [fact, duty], repository=["p"])
    return BuiltCase("violations", theory, {"main": d}, [("main", "proof")])


def _free_choice() -> BuiltCase:
    theory = """\
# one may work, relax or skip the bill; one ought to pay it
atoms p q r
perm-axiom: p | q | ~r
oblig-f: top : r => r
schema: fcp
"""
    b = Builder(parse_bundle(theory))
    out: dict[str, Derivation] = {}
    for name, lit in (("work", "p"), ("relax", "q"), ("skip", "~r")):
        out[name] = b.schema("fcp", [b.ax(PERM, [], ["p", "q", "~r"])], disjunct=lit)
    return BuiltCase("free_choice", theory, out, [("relax", "proof"), ("skip", "paraproof"), ("work", "proof")])


def _permission_exception() -> BuiltCase:
    theory = """\
# one ought not take one's life unless threatened with conversion
atoms p q
oblig-f: top : ~p => ~p unless q
schema: pe
"""
    b = Builder(parse_bundle(theory))
    d = b.schema("pe", [b.delta(OBL, "O1", ["~p"])])
    return BuiltCase("permission_exception", theory, {"main": d}, [("main", "proof"), ("main@0", "proof")])


def _dynamic_permission() -> BuiltCase:
    theory = """\
# free expression is permitted; forbidding the cartoons would forbid it
atoms p q
perm-f: top : p => p
oblig-d: ~q : ~p => ~p
oblig-f: top : ~q => ~q
schema: dp
"""
    b = Builder(parse_bundle(theory))
    perm = b.delta(PERM, "P1", ["p"])
    obl = b.delta(OBL, "O1", ["~p"], [b.delta(OBL, "O2", ["~q"])])
    d = b.schema("dp", [perm, obl])
    return BuiltCase("dynamic_permission", theory, {"main": d}, [("main", "proof")])


def _qal_wahomer() -> BuiltCase:
    theory = """\
# a granddaughter is forbidden; a daughter is permitted; permission passes upwards
atoms p q
oblig-f: top : ~p => ~p
perm-d: top : q => q
perm-d: q : p => p
schema: qw
"""
    b = Builder(parse_bundle(theory))
    obl = b.delta(OBL, "O1", ["~p"])
    perm = b.delta(PERM, "P2", ["p"], [b.delta(PERM, "P1", ["q"])])
    d = b.schema("qw", [obl, perm])
    return BuiltCase("qal_wahomer", theory, {"main": d}, [("main", "proof")])


def _ross() -> BuiltCase:
    theory = """\
# mailing the letter must not license burning it
atoms p q r
fact: ~r | q
oblig-d: top : p => p
oblig-f: top : ~q => ~q
schema: symmetric_pair { rule=O1 right="p | q" }
"""
    b = Builder(parse_bundle(theory))
    mail = b.delta(OBL, "O1", ["p"])
    return BuiltCase("ross", theory, {"mail": mail, "weakened": b.rw(mail, "q")},
                     [("mail", "proof"), ("weakened", "paraproof")])


def _good_samaritan() -> BuiltCase:
    theory = """\
# help the robbed victim; robbing ought not happen
atoms p q
oblig-f: top : p & q => p & q
oblig-f: top : ~q => ~q
schema: symmetric_pair { rule=O1 right=q }
schema: symmetric_pair { rule=O2 right=q }
"""
    b = Builder(parse_bundle(theory))
    d = _conjoin(b, b.delta(OBL, "O1", ["p"]), b.delta(OBL, "O1", ["q"]), "p & q")
    return BuiltCase("good_samaritan", theory, {"main": d}, [("main", "proof"), ("main@0", "proof"), ("main@1", "paraproof")])


CASES: tuple[Callable[[], BuiltCase], ...] = (
    _typicality, _practical_syllogism, _chisholm, _forrester, _specificity, _extended_forrester, _euthyphro,
    _exceptions, _violations, _free_choice, _permission_exception, _dynamic_permission, _qal_wahomer, _ross,
    _good_samaritan,
)


def build_cases() -> list[BuiltCase]:
    return [make() for make in CASES]


def case_files(case: BuiltCase) -> dict[str, str]:
    """File name to content for one case directory."""
    files = {"theory.nk": case.theory}
    for name, d in case.derivations.items():
        files[f"derivation-{name}.json"] = dumps(d)
    files["expected.txt"] = "".join(f"{k}={v}\n" for k, v in case.expected)
    return files


def write_corpus(directory: str) -> list[str]:
    written: list[str] = []
    for case in build_cases():
        target = os.path.join(directory, case.name)
        os.makedirs(target, exist_ok=True)
        for fn, text in case_files(case).items():
            path = os.path.join(target, fn)
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
            written.append(path)
    return written


if __name__ == "__main__":
    import argparse

    ap = argparse.ArgumentParser(description="Regenerate the scenario corpus files.")
    ap.add_argument("directory", nargs="?", default=os.path.join(os.path.dirname(__file__), "corpus"))
    for path in write_corpus(ap.parse_args().directory):
        print(path)
