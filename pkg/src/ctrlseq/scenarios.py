"""Scenario schemas layered over the controlled checker, a derivation builder and the corpus runner."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Iterable, Sequence

from .certificate import CertificateError, load
from .controlled.checker import Checker, Verdict
from .controlled.model import (
    DEF,
    NO_CONTROL,
    OBL,
    PERM,
    ControlledSequent,
    Derivation,
    DerivationError,
    control_set,
    labelled,
    union,
)
from .controlled.rules import RuleBase
from .dsl import BundleError, TheoryBundle, load_bundle
from .syntax import NOT, Context, Formula, complement, neg, parse_formula

PROOF = "proof"
PARAPROOF = "paraproof"
ERROR = "error"
VERDICTS = (PROOF, PARAPROOF, ERROR)


class SchemaError(ValueError):
    """A schema application does not fit the schema's premise shapes or side conditions."""


@dataclass(frozen=True)
class ScenarioSchema:
    name: str
    params: tuple[tuple[str, str], ...] = ()

    def get(self, key: str, default: str | None = None) -> str | None:
        return dict(self.params).get(key, default)


def schema(name: str, **params: str) -> ScenarioSchema:
    return ScenarioSchema(name, tuple(sorted(params.items())))


@dataclass(frozen=True)
class SchemaPlugin:
    """A registered schema: node-level schemas build and validate a conclusion node."""

    name: str
    scope: str  # "node" or "theory"
    arity: int
    build: Callable[[ScenarioSchema, Sequence[Derivation], TheoryBundle], ControlledSequent] | None
    virtual: Callable[[ScenarioSchema, Sequence[Derivation], ControlledSequent], str] | None = None
    summary: str = ""


def _one(ctx: Context, what: str) -> Formula:
    if len(ctx) != 1:
        raise SchemaError(f"{what} must have exactly one formula")
    return ctx.items[0]


def _param_formula(s: ScenarioSchema, key: str) -> Formula | None:
    v = s.get(key)
    return None if v is None else parse_formula(v)


def _build_prsyl(s: ScenarioSchema, premises: Sequence[Derivation], bundle: TheoryBundle) -> ControlledSequent:
    main, fact = (p.conclusion for p in premises)
    chosen = _param_formula(s, "conclusion")
    if chosen is None:
        chosen = _one(fact.antecedent, "without a conclusion parameter, the factual antecedent")
    S = union(main.S, control_set(labelled([neg(chosen)], "o")))
    return ControlledSequent(main.turnstile, main.repository, main.antecedent, Context([chosen]),
                             main.T, S, main.Sprime)


def _build_fcp(s: ScenarioSchema, premises: Sequence[Derivation], bundle: TheoryBundle) -> ControlledSequent:
    p = premises[0].conclusion
    disjunct = _param_formula(s, "disjunct")
    if disjunct is None:
        raise SchemaError("fcp needs a disjunct parameter")
    ou, oc = Checker(bundle).fcp_guard()
    guard = control_set(labelled([neg(ou), neg(oc)], "p"))
    return ControlledSequent(PERM, p.repository, p.antecedent, Context([disjunct]), NO_CONTROL, guard, NO_CONTROL)


def _build_pe(s: ScenarioSchema, premises: Sequence[Derivation], bundle: TheoryBundle) -> ControlledSequent:
    p = premises[0].conclusion
    lit = _one(p.succedent, "the obligation")
    if not lit.is_literal():
        raise SchemaError("pe needs a literal obligation")
    exc = frozenset(g for g in p.S if all(lf.tag == "f" for lf in g))
    excs = sorted({lf.formula for g in exc for lf in g})
    rep = p.repository.add(*(e for e in excs if e not in p.repository))
    return ControlledSequent(PERM, rep, p.antecedent, Context([complement(lit)]), p.T, p.S - exc, p.Sprime)


def _build_dp(s: ScenarioSchema, premises: Sequence[Derivation], bundle: TheoryBundle) -> ControlledSequent:
    perm, obl = premises
    pa, ob = perm.conclusion, obl.conclusion
    if not obl.children:
        raise SchemaError("dp needs an obligation step with a deontic premise")
    inner = obl.children[0].conclusion
    forbidden = _one(inner.succedent, "the inner obligation")
    permitted = forbidden.operand if forbidden.kind == NOT else neg(forbidden)
    rep = pa.repository.add(*(f for f in ob.repository if f not in pa.repository))
    return ControlledSequent(PERM, rep, pa.antecedent, Context([permitted]), union(pa.T, inner.T), pa.S, pa.Sprime)


def _build_qw(s: ScenarioSchema, premises: Sequence[Derivation], bundle: TheoryBundle) -> ControlledSequent:
    obl, perm = premises
    ob, pa = obl.conclusion, perm.conclusion
    if not perm.children:
        raise SchemaError("qw needs a permission step with a deontic premise")
    inner = perm.children[0].conclusion
    concl = neg(_one(inner.succedent, "the inner permission"))
    rep = ob.repository.add(*(f for f in pa.repository if f not in ob.repository))
    return ControlledSequent(OBL, rep, ob.antecedent, Context([concl]), ob.T,
                             control_set(labelled([neg(concl)], "o")), NO_CONTROL)


def _virtual_pe(s: ScenarioSchema, premises: Sequence[Derivation], c: ControlledSequent) -> str:
    return s.get("virtual") or premises[0].conclusion.succedent.items[0].key


def _virtual_own(s: ScenarioSchema, premises: Sequence[Derivation], c: ControlledSequent) -> str:
    return s.get("virtual") or c.succedent.items[0].key


REGISTRY: dict[str, SchemaPlugin] = {
    "prsyl": SchemaPlugin("prsyl", "node", 2, _build_prsyl, summary="obligation passed to a sufficient means"),
    "fcp": SchemaPlugin("fcp", "node", 1, _build_fcp, summary="guarded choice of one disjunct of a permission axiom"),
    "pe": SchemaPlugin("pe", "node", 1, _build_pe, _virtual_pe, "exception of an obligation read as a permission"),
    "dp": SchemaPlugin("dp", "node", 2, _build_dp, _virtual_own, "permission forced by an explicit permission"),
    "qw": SchemaPlugin("qw", "node", 2, _build_qw, _virtual_own, "obligation drawn a fortiori"),
    "f_pi_constraint": SchemaPlugin("f_pi_constraint", "theory", 0, None,
                                    summary="obligations stay consistent with the facts of the derivation"),
    "specificity_rewrite": SchemaPlugin("specificity_rewrite", "theory", 0, None,
                                        summary="a more specific condition becomes an exception"),
    "symmetric_pair": SchemaPlugin("symmetric_pair", "theory", 0, None,
                                   summary="succedent constraints checked at the root"),
}


def apply_schema(sch: ScenarioSchema | str, premises: Sequence[Derivation], bundle: TheoryBundle) -> Derivation:
    """Conclude a schema node from its premises; the node is validated by the checker before returning."""
    if isinstance(sch, str):
        sch = ScenarioSchema(sch)
    plugin = REGISTRY.get(sch.name)
    if plugin is None:
        raise SchemaError(f"unknown schema {sch.name!r}")
    if plugin.scope != "node":
        raise SchemaError(f"schema {sch.name} acts on the theory, not on derivation nodes")
    if len(premises) != plugin.arity:
        raise SchemaError(f"{sch.name} takes {plugin.arity} premises, got {len(premises)}")
    assert plugin.build is not None
    concl = plugin.build(sch, premises, bundle)
    label = plugin.virtual(sch, premises, concl) if plugin.virtual else ""
    node = Derivation(sch.name, concl, tuple(premises), label)
    try:
        Checker(bundle)._check_node(node, ())
    except DerivationError as e:
        raise SchemaError(str(e)) from e
    return node


class Builder:
    """Assembles derivations node by node; extra-logical steps get the control sets their rule demands."""

    def __init__(self, bundle: TheoryBundle):
        self.bundle = bundle
        self.rules = RuleBase(bundle)
        self.checker = Checker(bundle, self.rules)

    @staticmethod
    def _ctx(items: Iterable[Formula | str]) -> Context:
        return Context(parse_formula(f) if isinstance(f, str) else f for f in items)

    def ax(self, turnstile: str, antecedent: Iterable[Formula | str] = (), succedent: Iterable[Formula | str] = (),
           repository: Iterable[Formula | str] = ()) -> Derivation:
        rep = self._ctx(repository) if turnstile != DEF else Context()
        return Derivation("ax", ControlledSequent(turnstile, rep, self._ctx(antecedent), self._ctx(succedent)))

    def lw(self, d: Derivation, *formulas: Formula | str) -> Derivation:
        for f in self._ctx(formulas):
            c = d.conclusion
            d = Derivation("LW", ControlledSequent(c.turnstile, c.repository, c.antecedent.add(f), c.succedent,
                                                   c.T, c.S, c.Sprime), (d,))
        return d

    def rw(self, d: Derivation, *formulas: Formula | str) -> Derivation:
        for f in self._ctx(formulas):
            c = d.conclusion
            d = Derivation("RW", ControlledSequent(c.turnstile, c.repository, c.antecedent, c.succedent.add(f),
                                                   c.T, c.S, c.Sprime), (d,))
        return d

    def delta(self, turnstile: str, label: str, succedent: Iterable[Formula | str],
              premises: Sequence[Derivation] = (), antecedent: Iterable[Formula | str] = (),
              repository: Iterable[Formula | str] = ()) -> Derivation:
        succ = self._ctx(succedent)
        names = tuple(n for n in label.split("+") if n)
        rule = self.rules.rule(turnstile, names, succ)
        if rule is None:
            raise SchemaError(f"{label} does not conclude {{{succ.show()}}} under {turnstile}")
        rep = self._ctx(repository) if turnstile != DEF else Context()
        seq = ControlledSequent(turnstile, rep, self._ctx(antecedent), succ)
        proto = Derivation("delta", seq, tuple(premises), label)
        T, S, Sp = self.checker.expected_delta_controls(proto, rule)
        return Derivation("delta", seq.with_controls(T, S, Sp), tuple(premises), label)

    def step(self, rule: str, antecedent: Iterable[Formula | str], succedent: Iterable[Formula | str],
             premises: Sequence[Derivation]) -> Derivation:
        """A logical or cut node: controls and repositories are the union of the premises'."""
        ps = [p.conclusion for p in premises]
        rep: list[Formula] = []
        for p in ps:
            rep.extend(f for f in p.repository if f not in rep)
        seq = ControlledSequent(ps[0].turnstile, Context(rep), self._ctx(antecedent), self._ctx(succedent),
                                union(*(p.T for p in ps)), union(*(p.S for p in ps)), union(*(p.Sprime for p in ps)))
        return Derivation(rule, seq, tuple(premises))

    def schema(self, name: str, premises: Sequence[Derivation], **params: str) -> Derivation:
        return apply_schema(schema(name, **params), premises, self.bundle)


# -- corpus ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Expectation:
    derivation: str
    path: tuple[int, ...]
    verdict: str

    @property
    def key(self) -> str:
        return self.derivation + ("@" + ".".join(map(str, self.path)) if self.path else "")


@dataclass
class ScenarioCase:
    name: str
    theory: str
    derivations: dict[str, str]
    expected: list[Expectation]


@dataclass(frozen=True)
class CaseResult:
    case: str
    key: str
    expected: str
    actual: str
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


@dataclass
class CorpusReport:
    results: list[CaseResult] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return bool(self.results) and all(r.ok for r in self.results)

    @property
    def failures(self) -> list[CaseResult]:
        return [r for r in self.results if not r.ok]

    def lines(self) -> list[str]:
        out = [f"{'PASS' if r.ok else 'FAIL'} {r.case} {r.key}: expected {r.expected}, got {r.actual}"
               + (f" ({r.detail})" if r.detail and not r.ok else "") for r in self.results]
        out.append(f"{len(self.results) - len(self.failures)}/{len(self.results)} verdicts match "
                   f"in {self.elapsed:.2f}s")
        return out


class CorpusError(ValueError):
    """A corpus case directory is missing files or holds malformed ones."""


def parse_expected(text: str, where: str = "expected") -> list[Expectation]:
    out: list[Expectation] = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CorpusError(f"{where}:{n}: expected key=verdict")
        key, verdict = (x.strip() for x in line.split("=", 1))
        if verdict not in VERDICTS:
            raise CorpusError(f"{where}:{n}: unknown verdict {verdict!r}")
        name, _, path = key.partition("@")
        try:
            steps = tuple(int(i) for i in path.split(".")) if path else ()
        except ValueError:
            raise CorpusError(f"{where}:{n}: malformed path {path!r}") from None
        out.append(Expectation(name, steps, verdict))
    return out


def load_case(directory: str) -> ScenarioCase:
    name = os.path.basename(os.path.normpath(directory))
    theory = os.path.join(directory, "theory.nk")
    expected = os.path.join(directory, "expected.txt")
    for f in (theory, expected):
        if not os.path.isfile(f):
            raise CorpusError(f"{name}: missing {os.path.basename(f)}")
    derivs = {fn[len("derivation-"):-len(".json")]: os.path.join(directory, fn)
              for fn in sorted(os.listdir(directory)) if fn.startswith("derivation-") and fn.endswith(".json")}
    if not derivs:
        raise CorpusError(f"{name}: no derivation-*.json files")
    with open(expected, encoding="utf-8") as fh:
        exp = parse_expected(fh.read(), f"{name}/expected.txt")
    for e in exp:
        if e.derivation not in derivs:
            raise CorpusError(f"{name}: expected.txt names unknown derivation {e.derivation!r}")
    return ScenarioCase(name, theory, derivs, exp)


def run_case(case: ScenarioCase) -> list[CaseResult]:
    try:
        bundle = load_bundle(case.theory)
    except (BundleError, OSError) as e:
        raise CorpusError(f"{case.name}: {e}") from e
    checker = Checker(bundle)
    verdicts: dict[str, Verdict | str] = {}
    for name, path in case.derivations.items():
        try:
            verdicts[name] = checker.check(load(path))
        except (CertificateError, DerivationError, KeyError) as e:
            verdicts[name] = str(e)
    out: list[CaseResult] = []
    for e in case.expected:
        v = verdicts[e.derivation]
        if isinstance(v, str):
            out.append(CaseResult(case.name, e.key, e.verdict, ERROR, v))
            continue
        if e.path not in v.nodes:
            out.append(CaseResult(case.name, e.key, e.verdict, ERROR, "no node at this path"))
            continue
        word = v.word(e.path)
        fails = "; ".join(f for p, nv in v.nodes.items() if p[:len(e.path)] == e.path for f in nv.failures)
        out.append(CaseResult(case.name, e.key, e.verdict, word, fails))
    return out


def default_corpus_dir() -> str:
    return str(resources.files("ctrlseq").joinpath("corpus"))


def run_corpus(directory: str | None = None) -> CorpusReport:
    """Check every case directory below `directory` against its expected verdicts."""
    root = directory or default_corpus_dir()
    if not os.path.isdir(root):
        raise CorpusError(f"corpus directory {root!r} not found")
    start = time.perf_counter()
    report = CorpusReport()
    cases = sorted(d for d in os.listdir(root) if os.path.isdir(os.path.join(root, d)) and not d.startswith(("_", ".")))
    if not cases:
        raise CorpusError(f"no cases under {root!r}")
    for d in cases:
        report.results.extend(run_case(load_case(os.path.join(root, d))))
    report.elapsed = time.perf_counter() - start
    return report


__all__ = [
    "PROOF", "PARAPROOF", "ERROR", "SchemaError", "ScenarioSchema", "schema", "SchemaPlugin", "REGISTRY",
    "apply_schema", "Builder", "Expectation", "ScenarioCase", "CaseResult", "CorpusReport", "CorpusError",
    "parse_expected", "load_case", "run_case", "default_corpus_dir", "run_corpus",
]
