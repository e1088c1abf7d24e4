"""Command-line front end: decide, decompose, extensions, query, check and corpus."""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
from dataclasses import dataclass
from typing import Any, Sequence

from .certificate import CertificateError, dump, load, to_record
from .classical import SEQUENT, ANTISEQUENT, ProofTree, StarSequent, decide, decompose, families
from .controlled.checker import Checker, Verdict
from .controlled.model import DEF, OBL, PERM, Derivation, DerivationError, show_control
from .controlled.search import DEFAULT_BUDGET, Prover
from .defaults import CapExceeded, TheoryError, m_credulous, modified_extensions
from .deontic import OBLIGATION, PERMISSION, d_credulous, deontic_extensions
from .dsl import BundleError, TheoryBundle, load_bundle
from .scenarios import CorpusError, run_corpus
from .syntax import Formula, ReservedAtomError, SyntaxErrorAt, big_or, parse_formula

EXIT_YES, EXIT_NO, EXIT_ERROR, EXIT_CAP, EXIT_UNKNOWN = 0, 1, 2, 3, 4


class UsageError(ValueError):
    """Malformed command input."""


# -- text formats ------------------------------------------------------------------

_TURNSTILE = re.compile(r"\|-\*|\|-|-\||⊢|⊣")
_LABELLED = re.compile(r"\|-([DOP])")


def parse_list(text: str) -> list[Formula]:
    """Comma-separated formulas; an empty text is the empty list."""
    text = text.strip()
    if not text:
        return []
    return [parse_formula(part) for part in text.split(",")]


def parse_star_sequent(text: str) -> StarSequent:
    """`A, B |- C` is a sequent, `A -| C` an antisequent; a bare formula F reads as `|- F`."""
    m = list(_TURNSTILE.finditer(text))
    if not m:
        return StarSequent.of([], [parse_formula(text)])
    if len(m) > 1:
        raise UsageError("more than one turnstile")
    kind = ANTISEQUENT if m[0].group(0) in ("-|", "⊣") else SEQUENT
    return StarSequent.of(parse_list(text[:m[0].start()]), parse_list(text[m[0].end():]), kind)


@dataclass
class Query:
    kind: str  # m-cred, o-cred, p-cred or prove
    goal: list[Formula]
    turnstile: str = DEF
    repository: list[Formula] | None = None
    antecedent: list[Formula] | None = None


def _keyword_lists(rest: str, keys: Sequence[str]) -> tuple[str, dict[str, list[Formula]]]:
    pattern = re.compile(r"\b(" + "|".join(keys) + r")\b")
    parts = pattern.split(rest)
    head, out = parts[0], {}
    for i in range(1, len(parts), 2):
        if parts[i] in out:
            raise UsageError(f"keyword {parts[i]!r} given twice")
        out[parts[i]] = parse_list(parts[i + 1])
    return head, out


def parse_query(text: str) -> Query:
    text = text.strip()
    word, _, rest = text.partition(" ")
    if word == "m-cred":
        head, kw = _keyword_lists(rest, ["assuming"])
        return Query(word, [parse_formula(head)], DEF, [], kw.get("assuming", []))
    if word in ("o-cred", "p-cred"):
        head, kw = _keyword_lists(rest, ["facts", "oblig", "perm"])
        x = OBL if word == "o-cred" else PERM
        return Query(word, [parse_formula(head)], x, kw.get("facts", []), kw.get("oblig", []) + kw.get("perm", []))
    if word == "prove":
        m = list(_LABELLED.finditer(rest))
        if len(m) != 1:
            raise UsageError("prove needs exactly one of |-D, |-O or |-P")
        x = m[0].group(1)
        left, goal = rest[:m[0].start()].strip(), parse_list(rest[m[0].end():])
        rep: list[Formula] = []
        if left.startswith("["):
            close = left.find("]")
            if close < 0:
                raise UsageError("unclosed repository bracket")
            rep = parse_list(left[1:close])
            left = left[close + 1:].strip()
            if not left.startswith("|"):
                raise UsageError("a repository is followed by '|'")
            left = left[1:]
        elif left.startswith("|"):
            left = left[1:]
        if rep and x == DEF:
            raise UsageError("default sequents carry no repository")
        if not goal:
            raise UsageError("prove needs a nonempty succedent")
        return Query(word, goal, x, rep, parse_list(left))
    raise UsageError(f"unknown query {word!r}; use m-cred, o-cred, p-cred or prove")


# -- output helpers ------------------------------------------------------------------


def _tree_lines(t: ProofTree, depth: int, limit: int | None) -> list[str]:
    if limit is not None and depth > limit:
        return []
    out = ["  " * depth + f"{t.rule}: {t.sequent.show()}"]
    for c in t.children:
        out.extend(_tree_lines(c, depth + 1, limit))
    return out


def _emit(args: argparse.Namespace, text_lines: list[str], payload: dict[str, Any]) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, ensure_ascii=False, sort_keys=False))
    else:
        for line in text_lines:
            print(line)


def _bundle(args: argparse.Namespace) -> TheoryBundle:
    if not args.theory:
        raise UsageError("this command needs --theory FILE")
    return load_bundle(args.theory)


def _keys(fs: Sequence[Formula]) -> list[str]:
    return [f.key for f in fs]


# -- commands ----------------------------------------------------------------------


def cmd_decide(args: argparse.Namespace) -> int:
    s = parse_star_sequent(args.text)
    if s.kind != SEQUENT:
        raise UsageError("decide takes a sequent; use decompose for antisequents")
    d = decide(s)
    lines = [f"{d.outcome}: {s.show()}"]
    if d.valuation is not None:
        lines.append("countermodel: " + " ".join(f"{a}={'true' if v else 'false'}" for a, v in sorted(d.valuation.items())))
    if args.max_depth is not None:
        lines.extend(_tree_lines(d.witness, 0, args.max_depth))
    payload = {"sequent": s.show(), "valid": d.valid, "valuation": d.valuation}
    _emit(args, lines, payload)
    return EXIT_YES if d.valid else EXIT_NO


def cmd_decompose(args: argparse.Namespace) -> int:
    s = parse_star_sequent(args.text)
    rng = random.Random(args.seed) if args.seed is not None else None
    leaves = sorted(x.show() for x in decompose(s, rng))
    lines = [f"atomic: {x}" for x in leaves]
    payload: dict[str, Any] = {"sequent": s.show(), "atomic": leaves}
    if args.families:
        fam = families(s)
        for name in ("top", "top_cp", "top_r", "top_hash", "top_cp_hash", "top_r_hash"):
            members = sorted(x.show() for x in getattr(fam, name))
            payload[name] = members
            lines.append(f"{name} ({len(members)}):")
            lines.extend(f"  {x}" for x in members)
    _emit(args, lines, payload)
    return EXIT_YES


def cmd_extensions(args: argparse.Namespace) -> int:
    bundle = _bundle(args)
    facts = parse_list(args.facts or "")
    assume = parse_list(args.assume or "")
    t = bundle.default_theory
    if args.mode == "d":
        ws = modified_extensions(t, facts + assume)
        rows = [{"generators": _keys(sorted(w.generators)), "support": _keys(sorted(w.support)),
                 "applied": [r.name for r in w.applied]} for w in ws]
    else:
        n = bundle.normative_system
        if n is None:
            raise UsageError("the theory declares no norms")
        mode = OBLIGATION if args.mode == "o" else PERMISSION
        dws = deontic_extensions(t, n, facts, assume, mode, bundle.fact_compatibility(mode))
        rows = [{"base": _keys(sorted(w.base.generators)), "generators": _keys(sorted(w.generators)),
                 "support": _keys(sorted(w.support)), "applied": [r.name for r in w.applied]} for w in dws]
    rows.sort(key=lambda r: json.dumps(r, sort_keys=True))
    lines = []
    for i, r in enumerate(rows, start=1):
        base = f" base {{{', '.join(r['base'])}}};" if "base" in r else ""
        lines.append(f"{i}:{base} generators {{{', '.join(r['generators'])}}}; "
                     f"support {{{', '.join(r['support'])}}}; applied [{', '.join(r['applied'])}]")
    lines.append(f"{len(rows)} extension(s)")
    _emit(args, lines, {"mode": args.mode, "extensions": rows})
    return EXIT_YES


def _oracle(bundle: TheoryBundle, q: Query) -> tuple[bool, Any]:
    goal = big_or(q.goal)
    t = bundle.default_theory
    if q.turnstile == DEF:
        return m_credulous(t, q.antecedent or [], goal)
    n = bundle.normative_system
    if n is None:
        raise UsageError("the theory declares no norms")
    mode = OBLIGATION if q.turnstile == OBL else PERMISSION
    return d_credulous(t, n, q.repository or [], q.antecedent or [], goal, mode, bundle.fact_compatibility(mode))


def cmd_query(args: argparse.Namespace) -> int:
    bundle = _bundle(args)
    q = parse_query(args.text)
    payload: dict[str, Any] = {"query": args.text.strip(), "kind": q.kind}
    lines: list[str] = []
    status = "no"
    derivation: Derivation | None = None
    if q.kind != "prove":
        ok, w = _oracle(bundle, q)
        status = "yes" if ok else "no"
        if w is not None:
            lines.append(f"witness: {w.show()}")
            payload["witness"] = w.show()
    if q.kind == "prove" or args.emit_derivation:
        res = Prover(bundle, args.budget).search(q.turnstile, q.repository or [], q.antecedent or [], q.goal)
        derivation = res.derivation
        if q.kind == "prove":
            status = {"proof": "yes", "none": "no"}.get(res.status, "unknown")
            if res.reason:
                lines.append(f"note: {res.reason}")
        elif derivation is None and status == "yes":
            lines.append(f"note: no certificate built ({res.reason})")
    if derivation is not None:
        payload["derivation"] = to_record(derivation)
        if args.max_depth is not None:
            lines.extend(_limit(derivation.show(), args.max_depth))
        if args.emit_derivation:
            dump(derivation, args.emit_derivation)
            lines.append(f"derivation written to {args.emit_derivation}")
    payload["result"] = status
    _emit(args, [status] + lines, payload)
    return {"yes": EXIT_YES, "no": EXIT_NO}.get(status, EXIT_UNKNOWN)


def _limit(shown: str, depth: int) -> list[str]:
    return [ln for ln in shown.splitlines() if (len(ln) - len(ln.lstrip(" "))) // 2 <= depth]


def _node_rows(d: Derivation, v: Verdict) -> list[dict[str, Any]]:
    rows = []
    for path, node in d.walk():
        nv = v.nodes[path]
        rows.append({
            "path": ".".join(map(str, path)) or "root",
            "rule": node.rule + (f"[{node.label}]" if node.label else ""),
            "conditions": nv.cond_sound,
            "constraints": nv.constr_sound,
            "succedent": nv.succedent_compatible,
            "verdict": v.word(path),
            "failures": list(nv.failures),
        })
    return rows


def cmd_check(args: argparse.Namespace) -> int:
    bundle = _bundle(args)
    try:
        d = load(args.derivation)
    except OSError as e:
        raise UsageError(str(e)) from e
    try:
        v = Checker(bundle).check(d)
    except DerivationError as e:
        _emit(args, [f"error: {e}"], {"verdict": "error", "error": str(e)})
        return EXIT_ERROR
    word = v.word(())
    rows = _node_rows(d, v)
    lines = [word, f"{'node':<10} {'rule':<14} {'cond':<5} {'constr':<6} {'succ':<5} verdict"]
    for r in rows:
        succ = "-" if r["succedent"] is None else ("ok" if r["succedent"] else "no")
        lines.append(f"{r['path']:<10} {r['rule']:<14} {'ok' if r['conditions'] else 'no':<5} "
                     f"{'ok' if r['constraints'] else 'no':<6} {succ:<5} {r['verdict']}")
        lines.extend(f"{'':<10} {f}" for f in r["failures"])
    c = d.conclusion
    lines.append(f"conclusion: {c.show()}")
    if c.Sprime:
        lines.append(f"succedent constraints: {show_control(c.Sprime)}")
    _emit(args, lines, {"verdict": word, "nodes": rows})
    return EXIT_YES if v.is_proof else EXIT_NO


def cmd_corpus(args: argparse.Namespace) -> int:
    report = run_corpus(args.directory)
    payload = {"ok": report.ok, "elapsed": round(report.elapsed, 3),
               "results": [{"case": r.case, "key": r.key, "expected": r.expected, "actual": r.actual,
                            "ok": r.ok} for r in report.results]}
    _emit(args, report.lines(), payload)
    return EXIT_YES if report.ok else EXIT_NO


# -- entry point -------------------------------------------------------------------


def _global_options(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--theory", metavar="FILE", default=d(None), help="theory file in the .nk format")
    p.add_argument("--format", choices=("text", "json"), default=d("text"), help="output format")
    p.add_argument("--max-depth", type=int, metavar="N", default=d(None), help="print trees down to this depth")
    p.add_argument("--emit-derivation", metavar="PATH", default=d(None), help="write the derivation certificate")
    p.add_argument("--seed", type=int, metavar="N", default=d(None), help="seed for randomized schedules")
    p.add_argument("--budget", type=int, metavar="N", default=d(DEFAULT_BUDGET), help="proof search step budget")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ctrlseq", description="Controlled sequent calculi for defaults and norms.")
    _global_options(ap, suppress=False)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        _global_options(p, suppress=True)
        return p

    p = add("decide", "decide a classical sequent or formula")
    p.add_argument("text")
    p.set_defaults(func=cmd_decide)
    p = add("decompose", "atomic *-sequents of a *-sequent")
    p.add_argument("text")
    p.add_argument("--families", action="store_true", help="also list the closure families")
    p.set_defaults(func=cmd_decompose)
    p = add("extensions", "list modified or deontic extensions")
    p.add_argument("--mode", choices=("d", "o", "p"), default="d")
    p.add_argument("--facts", metavar="LIST", help="comma-separated factual assumptions")
    p.add_argument("--assume", metavar="LIST", help="comma-separated assumptions of the chosen layer")
    p.set_defaults(func=cmd_extensions)
    p = add("query", "credulous consequence or controlled provability")
    p.add_argument("text")
    p.set_defaults(func=cmd_query)
    p = add("check", "check a derivation certificate")
    p.add_argument("derivation")
    p.set_defaults(func=cmd_check)
    p = add("corpus", "run the scenario corpus")
    p.add_argument("directory", nargs="?")
    p.set_defaults(func=cmd_corpus)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code not in (0, None) else EXIT_YES
    try:
        return args.func(args)
    except CapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, SyntaxErrorAt, ReservedAtomError, BundleError, TheoryError, CertificateError,
            CorpusError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
