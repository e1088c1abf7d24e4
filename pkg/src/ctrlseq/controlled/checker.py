"""Structural validation of controlled derivations and the proof/paraproof verdict."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from ..classical import _left_premises, _right_premises, entails, is_axiom_of, is_valid
from ..dsl import TheoryBundle
from ..syntax import ATOM, Context, Formula, LabelledFormula, big_and, big_or, complement, neg, parse_formula
from .model import (
    DEF,
    NO_CONTROL,
    OBL,
    PERM,
    ControlSet,
    Derivation,
    DerivationError,
    control_set,
    labelled,
    members,
    union,
)
from .rules import FACTUAL_KINDS, RuleBase, clause_key

LOGICAL_LEFT = ("L&", "L|", "L~&", "L~|", "L~~")
LOGICAL_RIGHT = ("R&", "R|", "R~&", "R~|", "R~~")
STRUCTURAL = ("ax", "LW", "RW", "cut_asa", "sigma", "delta")
SCHEMA_RULES = ("prsyl", "fcp", "pe", "dp", "qw")
RULE_NAMES = STRUCTURAL + LOGICAL_LEFT + LOGICAL_RIGHT + SCHEMA_RULES

# Tags whose formulas a virtual conclusion contributes to, per schema.
_VIRTUAL_TAGS = {"pe": ("p",), "dp": ("p",), "qw": ("o", "p")}
_DELTA_TAGS = {DEF: ("f",), OBL: ("o", "p"), PERM: ("p",)}


def compatible(gamma: Iterable[Formula], conditions: ControlSet, constraints: ControlSet) -> bool:
    """Every condition entailed and no constraint entailed; tags are ignored."""
    g = list(gamma)
    return (all(entails(g, a) for a in members(conditions))
            and not any(entails(g, b) for b in members(constraints)))


@dataclass(frozen=True)
class NodeVerdict:
    path: tuple[int, ...]
    rule: str
    cond_sound: bool
    constr_sound: bool
    succedent_compatible: bool | None = None
    failures: tuple[str, ...] = ()

    @property
    def sound(self) -> bool:
        return self.cond_sound and self.constr_sound


@dataclass(frozen=True)
class Metrics:
    defaults: tuple[str, ...]
    obligations: tuple[str, ...]
    permissions: tuple[str, ...]
    D_f: frozenset[Formula]
    D_o: frozenset[Formula]
    D_p: frozenset[Formula]
    E_f: frozenset[Formula]
    E_o: frozenset[Formula]
    E_p: frozenset[Formula]
    F: Formula


@dataclass
class Verdict:
    is_proof: bool
    nodes: dict[tuple[int, ...], NodeVerdict]
    metrics: dict[tuple[int, ...], Metrics] = field(default_factory=dict)

    @property
    def root(self) -> NodeVerdict:
        return self.nodes[()]

    def subderivation_is_proof(self, path: tuple[int, ...]) -> bool:
        """Verdict of the subtree at `path` read as a derivation of its own."""
        here = self.nodes[path]
        inside = [v for p, v in self.nodes.items() if p[:len(path)] == path]
        return all(v.sound for v in inside) and here.succedent_compatible is not False

    def word(self, path: tuple[int, ...] = ()) -> str:
        return "proof" if self.subderivation_is_proof(path) else "paraproof"


def _as_set(ctx: Context) -> frozenset[Formula]:
    return ctx.to_set()


def _equivalent_formula(a: Formula, b: Formula) -> bool:
    return a == b or (entails([a], b) and entails([b], a))


class Checker:
    """Checks derivations against one bundle; rule closure is memoized across calls."""

    def __init__(self, bundle: TheoryBundle, rules: RuleBase | None = None):
        self.bundle = bundle
        self.rules = rules or RuleBase(bundle)
        self._contrib: dict[int, tuple[Derivation, dict[str, frozenset[Formula]]]] = {}
        self._labels: dict[int, tuple[Derivation, Counter]] = {}

    # -- bookkeeping over subtrees -------------------------------------------

    def _virtual(self, d: Derivation) -> Formula | None:
        if d.rule in _VIRTUAL_TAGS and d.label:
            return parse_formula(d.label, allow_reserved=True)
        return None

    def contributions(self, d: Derivation) -> dict[str, frozenset[Formula]]:
        """Conclusions of the extra-logical steps in the subtree, by tag."""
        key = id(d)
        if key in self._contrib and self._contrib[key][0] is d:
            return self._contrib[key][1]
        out: dict[str, set[Formula]] = {"f": set(), "o": set(), "p": set()}
        if d.rule in _VIRTUAL_TAGS:
            v = self._virtual(d)
            if v is not None:
                for t in _VIRTUAL_TAGS[d.rule]:
                    out[t].add(v)
        else:
            for c in d.children:
                for t, fs in self.contributions(c).items():
                    out[t] |= fs
            if d.rule == "delta":
                x = d.conclusion.turnstile
                for name in d.label.split("+"):
                    f = self.rules.source(x, name).conclusion
                    for t in _DELTA_TAGS[x]:
                        out[t].add(f)
        frozen = {t: frozenset(fs) for t, fs in out.items()}
        self._contrib[key] = (d, frozen)
        return frozen

    def labels(self, d: Derivation) -> Counter:
        """Source names of the extra-logical steps in the subtree, keyed by turnstile."""
        key = id(d)
        if key in self._labels and self._labels[key][0] is d:
            return self._labels[key][1]
        out: Counter = Counter()
        if d.rule not in _VIRTUAL_TAGS:
            for c in d.children:
                out.update(self.labels(c))
            if d.rule == "delta":
                for name in d.label.split("+"):
                    out[(d.conclusion.turnstile, name)] += 1
        self._labels[key] = (d, out)
        return out

    def lower_contributions(self, d: Derivation) -> dict[str, frozenset[Formula]]:
        """Contributions above the lowermost extra-logical steps of the subtree."""
        out: dict[str, set[Formula]] = {"f": set(), "o": set(), "p": set()}
        stack = [d]
        while stack:
            n = stack.pop()
            if n.rule in _VIRTUAL_TAGS:
                continue
            if n.rule == "delta":
                for c in n.children:
                    for t, fs in self.contributions(c).items():
                        out[t] |= fs
                continue
            stack.extend(n.children)
        return {t: frozenset(fs) for t, fs in out.items()}

    def f_formula(self, d: Derivation) -> Formula:
        """Conjunction of the facts, the default conclusions used and the repository."""
        items = set(self.bundle.W) | set(self.contributions(d)["f"]) | set(d.conclusion.repository)
        return big_and(items)

    def metrics(self, d: Derivation) -> Metrics:
        c = self.contributions(d)
        e = self.lower_contributions(d)
        lab = self.labels(d)

        def names(x: str) -> tuple[str, ...]:
            return tuple(sorted(n for (t, n), k in lab.items() if t == x for _ in range(k)))

        return Metrics(names(DEF), names(OBL), names(PERM), c["f"], c["o"], c["p"], e["f"], e["o"], e["p"],
                       self.f_formula(d))

    # -- structure --------------------------------------------------------------

    def axioms(self, turnstile: str) -> tuple[Formula, ...]:
        return self.rules.axioms(turnstile)

    def check_structure(self, d: Derivation) -> None:
        for path, node in d.walk():
            self._check_node(node, path)

    def _fail(self, path: tuple[int, ...], msg: str) -> None:
        raise DerivationError(msg, path)

    def _check_node(self, d: Derivation, path: tuple[int, ...]) -> None:
        c = d.conclusion
        if d.rule not in RULE_NAMES:
            self._fail(path, f"unknown rule {d.rule!r}")
        if d.rule in SCHEMA_RULES:
            if not self.bundle.has_schema(d.rule):
                self._fail(path, f"schema {d.rule} is not active in this theory")
            getattr(self, f"_schema_{d.rule}")(d, path)
            return
        if d.rule == "delta":
            self._check_delta(d, path)
            return
        ch = d.children
        if d.rule == "ax":
            self._check_ax(d, path)
            return
        for k in ch:
            if k.conclusion.turnstile != c.turnstile:
                self._fail(path, f"{d.rule} premises must share the turnstile {c.turnstile}")
        if d.rule == "sigma":
            if len(ch) != 1:
                self._fail(path, "sigma has one premise")
            p = ch[0].conclusion
            if (p.repository, p.antecedent, p.succedent) != (c.repository, c.antecedent, c.succedent):
                self._fail(path, "sigma keeps the contexts")
            if p.T != c.T:
                self._fail(path, "sigma keeps the conditions")
            if not (p.S <= c.S and p.Sprime <= c.Sprime):
                self._fail(path, "sigma may only add constraint sets")
            return
        if d.rule == "cut_asa":
            self._check_cut(d, path)
            return
        n = 1 if d.rule in ("LW", "RW") else None
        if d.rule in ("LW", "RW"):
            if len(ch) != n:
                self._fail(path, f"{d.rule} has one premise")
            self._same_controls(d, path)
            p = ch[0].conclusion
            if p.repository != c.repository:
                self._fail(path, f"{d.rule} keeps the repository")
            if d.rule == "LW":
                ok = p.succedent == c.succedent and _one_more(p.antecedent, c.antecedent)
            else:
                ok = p.antecedent == c.antecedent and _one_more(p.succedent, c.succedent)
            if not ok:
                self._fail(path, f"{d.rule} must add exactly one formula")
            return
        self._check_logical(d, path)

    def _same_controls(self, d: Derivation, path: tuple[int, ...]) -> None:
        c = d.conclusion
        for k in d.children:
            p = k.conclusion
            if (p.T, p.S, p.Sprime) != (c.T, c.S, c.Sprime):
                self._fail(path, f"{d.rule} keeps the control sets unchanged")

    def _union_controls(self, d: Derivation, path: tuple[int, ...]) -> None:
        c = d.conclusion
        ps = [k.conclusion for k in d.children]
        if c.T != union(*(p.T for p in ps)) or c.S != union(*(p.S for p in ps)) \
                or c.Sprime != union(*(p.Sprime for p in ps)):
            self._fail(path, f"{d.rule} takes the union of the premises' control sets")
        rep = frozenset().union(*(_as_set(p.repository) for p in ps))
        if _as_set(c.repository) != rep:
            self._fail(path, f"{d.rule} repository must collect the premises' repositories")

    def _check_ax(self, d: Derivation, path: tuple[int, ...]) -> None:
        c = d.conclusion
        if d.children:
            self._fail(path, "ax has no premises")
        if c.T or c.S or c.Sprime:
            self._fail(path, "ax carries empty control sets")
        if not (c.antecedent.is_literal() and c.succedent.is_literal()):
            self._fail(path, "ax contexts must be literal")
        a, s = _as_set(c.antecedent), _as_set(c.succedent)
        if len(a) == 1 and a == s:
            return
        for side in (a, s):
            if len(side) == 2:
                x, y = sorted(side)
                if complement(x) == y:
                    return
        if is_axiom_of(a, s, set(self.rules.axiom_closure(c.turnstile))):
            return
        self._fail(path, "ax is neither an identity, a clash, nor an instance of the axioms")

    def _check_cut(self, d: Derivation, path: tuple[int, ...]) -> None:
        c = d.conclusion
        if len(d.children) != 2:
            self._fail(path, "cut_asa has two premises")
        left, right = (k.conclusion for k in d.children)
        if left.antecedent != c.antecedent or right.antecedent != c.antecedent:
            self._fail(path, "cut_asa premises share the conclusion's antecedent")
        cut = None
        for f in left.succedent:
            if f.kind == ATOM and _one_more(c.succedent, left.succedent) and left.succedent.remove_one(f) == c.succedent:
                cut = f
                break
        if cut is None or right.succedent != c.succedent.add(neg(cut)):
            self._fail(path, "cut_asa premises add an atom and its negation to the succedent")
        allowed = c.antecedent.atoms()
        for w in self.axioms(c.turnstile):
            allowed |= w.atoms()
        if cut.name not in allowed:  # type: ignore[union-attr]
            self._fail(path, f"cut atom {cut} occurs in neither the antecedent nor the axioms")
        self._union_controls(d, path)

    def _check_logical(self, d: Derivation, path: tuple[int, ...]) -> None:
        c = d.conclusion
        left = d.rule in LOGICAL_LEFT
        side = c.antecedent if left else c.succedent
        for f in sorted(set(side)):
            if f.is_literal():
                continue
            name, branches = (_left_premises if left else _right_premises)(f)
            if name != d.rule or len(branches) != len(d.children):
                continue
            rest = side.remove_one(f)
            ok = True
            for branch, k in zip(branches, d.children):
                p = k.conclusion
                want = rest.add(*branch)
                got, other, mine = (p.antecedent, p.succedent, c.succedent) if left else \
                    (p.succedent, p.antecedent, c.antecedent)
                if got != want or other != mine:
                    ok = False
                    break
            if ok:
                if len(d.children) == 1:
                    self._same_controls(d, path)
                    if d.children[0].conclusion.repository != c.repository:
                        self._fail(path, f"{d.rule} keeps the repository")
                else:
                    self._union_controls(d, path)
                return
        self._fail(path, f"no principal formula matches {d.rule}")

    # -- extra-logical steps ------------------------------------------------------

    def delta_rule(self, d: Derivation):
        c = d.conclusion
        names = tuple(n for n in d.label.split("+") if n)
        if not names:
            return None
        return self.rules.rule(c.turnstile, names, c.succedent)

    def expected_delta_controls(self, d: Derivation, rule) -> tuple[ControlSet, ControlSet, ControlSet]:
        ps = [k.conclusion for k in d.children]
        T = union(rule.T_delta, *(p.T for p in ps))
        S = union(rule.S_delta, *(p.S for p in ps))
        if rule.f_constraint:
            S = union(S, control_set(labelled([neg(self.f_formula(d))], "o")))
        Sp = union(rule.Sprime_delta, *(p.Sprime for p in ps))
        return T, S, Sp

    def _check_delta(self, d: Derivation, path: tuple[int, ...]) -> None:
        c = d.conclusion
        x = c.turnstile
        names = tuple(n for n in d.label.split("+") if n)
        for n in names:
            if (x, n) not in self.rules.sources:
                self._fail(path, f"no rule {n!r} for turnstile {x}")
        if len(names) > self.rules.max_sources:
            self._fail(path, f"more than {self.rules.max_sources} combined rules")
        if not c.succedent.is_literal() or len(c.succedent.contracted()) != len(c.succedent):
            self._fail(path, "an extra-logical conclusion is a set of literals")
        rule = self.delta_rule(d)
        if rule is None:
            self._fail(path, f"{d.label} does not conclude {{{c.succedent.show()}}}")
        got = sorted(((k.conclusion.turnstile, clause_key(_as_set(k.conclusion.succedent))) for k in d.children))
        want = sorted((t, clause_key(cl)) for t, cl in rule.premises)
        if got != want:
            self._fail(path, f"premises of {d.label} must conclude {want}")
        for k in d.children:
            if not k.conclusion.succedent.is_literal() or len(k.conclusion.succedent.contracted()) != len(k.conclusion.succedent):
                self._fail(path, "extra-logical premises have literal, duplicate-free succedents")
        dprem = [k.conclusion for k in d.children if k.conclusion.turnstile == DEF]
        xprem = [k.conclusion for k in d.children if k.conclusion.turnstile != DEF]
        for group in (dprem, xprem):
            if len({p.antecedent for p in group}) > 1:
                self._fail(path, "premises of the same layer share their antecedent")
        if x == DEF:
            if dprem and dprem[0].antecedent != c.antecedent:
                self._fail(path, "default premises share the conclusion's antecedent")
        else:
            if xprem:
                if xprem[0].antecedent != c.antecedent:
                    self._fail(path, "deontic premises share the conclusion's antecedent")
            elif all(self.rules.source(x, n).kind in FACTUAL_KINDS for n in names) and len(c.antecedent):
                self._fail(path, "a purely factual step has an empty antecedent")
            need = set(dprem[0].antecedent) if dprem else set()
            for p in xprem:
                need |= set(p.repository)
            have = _as_set(c.repository)
            zero_ary = any(not self.rules.source(x, n).premises for n in names)
            if not (need <= have if zero_ary else need == have):
                self._fail(path, "repository must collect the factual premises' antecedent")
        T, S, Sp = self.expected_delta_controls(d, rule)
        if (c.T, c.S, c.Sprime) != (T, S, Sp):
            self._fail(path, f"control sets of {d.label} do not match the rule")

    # -- schema nodes -------------------------------------------------------------

    def _schema_prsyl(self, d: Derivation, path: tuple[int, ...]) -> None:
        c = d.conclusion
        if len(d.children) != 2:
            self._fail(path, "prsyl has a deontic premise and a factual axiom premise")
        main, fact = d.children
        m, f = main.conclusion, fact.conclusion
        if fact.rule != "ax" or f.turnstile != DEF or f.T or f.S or f.Sprime:
            self._fail(path, "prsyl needs a default-labelled axiom with empty controls")
        if m.turnstile == DEF or c.turnstile != m.turnstile:
            self._fail(path, "prsyl keeps the deontic turnstile")
        if _as_set(m.succedent) != _as_set(f.succedent):
            self._fail(path, "prsyl premises share their succedent")
        if is_valid(f.antecedent, f.succedent):
            self._fail(path, "prsyl needs a factual premise that is not classically valid")
        if (c.repository, c.antecedent) != (m.repository, m.antecedent):
            self._fail(path, "prsyl keeps the contexts of the deontic premise")
        if len(c.succedent) != 1 or c.succedent.items[0] not in f.antecedent:
            self._fail(path, "prsyl concludes one antecedent formula of the factual premise")
        a = c.succedent.items[0]
        if (c.T, c.S, c.Sprime) != (m.T, union(m.S, control_set(labelled([neg(a)], "o"))), m.Sprime):
            self._fail(path, "prsyl adds the negated conclusion as an obligation constraint")

    def fcp_guard(self) -> tuple[Formula, Formula]:
        n = self.bundle.normative_system
        wo = n.Wo if n else ()
        oc = [r.conclusion for r in n.O] if n else []
        return big_and(wo), big_and(oc)

    def _schema_fcp(self, d: Derivation, path: tuple[int, ...]) -> None:
        c = d.conclusion
        if len(d.children) != 1:
            self._fail(path, "fcp has one premise")
        k = d.children[0]
        p = k.conclusion
        if k.rule != "ax" or p.turnstile != PERM or c.turnstile != PERM or p.T or p.S or p.Sprime:
            self._fail(path, "fcp closes permission axioms with empty controls")
        if (c.repository, c.antecedent) != (p.repository, p.antecedent):
            self._fail(path, "fcp keeps the contexts")
        if len(c.succedent) != 1 or c.succedent.items[0] not in p.succedent:
            self._fail(path, "fcp concludes one disjunct of the premise")
        ou, oc = self.fcp_guard()
        want = control_set(labelled([neg(ou), neg(oc)], "p"))
        if (c.T, c.S, c.Sprime) != (NO_CONTROL, want, NO_CONTROL):
            self._fail(path, "fcp attaches the obligation guard as its only constraint set")

    def _schema_pe(self, d: Derivation, path: tuple[int, ...]) -> None:
        c = d.conclusion
        if len(d.children) != 1:
            self._fail(path, "pe has one premise")
        k = d.children[0]
        p = k.conclusion
        if k.rule != "delta" or p.turnstile != OBL or c.turnstile != PERM:
            self._fail(path, "pe turns an obligation step into a permission")
        if len(p.succedent) != 1 or not p.succedent.items[0].is_literal():
            self._fail(path, "pe needs a single literal obligation")
        if c.succedent != Context([complement(p.succedent.items[0])]):
            self._fail(path, "pe permits the complement of the obligation")
        exc = frozenset(g for g in p.S if all(lf.tag == "f" for lf in g))
        if not exc:
            self._fail(path, "pe needs an obligation with exceptions")
        if _as_set(c.repository) != _as_set(p.repository) | members(exc):
            self._fail(path, "pe moves the exceptions into the repository")
        if c.antecedent != p.antecedent:
            self._fail(path, "pe keeps the antecedent")
        if (c.T, c.S, c.Sprime) != (p.T, p.S - exc, p.Sprime):
            self._fail(path, "pe drops the exception sets and keeps the rest")

    def _schema_dp(self, d: Derivation, path: tuple[int, ...]) -> None:
        c = d.conclusion
        if len(d.children) != 2:
            self._fail(path, "dp has two premises")
        perm, obl = d.children
        pa, ob = perm.conclusion, obl.conclusion
        if pa.turnstile != PERM or ob.turnstile != OBL or c.turnstile != PERM:
            self._fail(path, "dp combines a permission and an obligation into a permission")
        if obl.rule != "delta" or len(obl.children) != 1 or obl.children[0].conclusion.turnstile != OBL:
            self._fail(path, "dp needs an obligation step with one deontic premise")
        inner = obl.children[0].conclusion
        if len(pa.succedent) != 1 or len(ob.succedent) != 1 or len(inner.succedent) != 1 or len(c.succedent) != 1:
            self._fail(path, "dp works on single formulas")
        a, b = pa.succedent.items[0], c.succedent.items[0]
        if not _equivalent_formula(ob.succedent.items[0], neg(a)):
            self._fail(path, "dp needs the obligation to forbid the permitted formula")
        if not _equivalent_formula(inner.succedent.items[0], neg(b)):
            self._fail(path, "dp permits what the inner obligation forbids")
        if c.antecedent != pa.antecedent or _as_set(c.repository) != _as_set(pa.repository) | _as_set(ob.repository):
            self._fail(path, "dp keeps the permission's contexts")
        if (c.T, c.S, c.Sprime) != (union(pa.T, inner.T), pa.S, pa.Sprime):
            self._fail(path, "dp keeps the permission's constraints and the inner conditions")

    def _schema_qw(self, d: Derivation, path: tuple[int, ...]) -> None:
        c = d.conclusion
        if len(d.children) != 2:
            self._fail(path, "qw has two premises")
        obl, perm = d.children
        ob, pa = obl.conclusion, perm.conclusion
        if ob.turnstile != OBL or pa.turnstile != PERM or c.turnstile != OBL:
            self._fail(path, "qw combines an obligation and a permission into an obligation")
        if perm.rule != "delta" or len(perm.children) != 1 or perm.children[0].conclusion.turnstile != PERM:
            self._fail(path, "qw needs a permission step with one deontic premise")
        inner = perm.children[0].conclusion
        if len(ob.succedent) != 1 or len(pa.succedent) != 1 or len(inner.succedent) != 1 or len(c.succedent) != 1:
            self._fail(path, "qw works on single formulas")
        if not _equivalent_formula(ob.succedent.items[0], neg(pa.succedent.items[0])):
            self._fail(path, "qw needs the obligation to forbid the permitted formula")
        b = inner.succedent.items[0]
        concl = c.succedent.items[0]
        if not _equivalent_formula(concl, neg(b)):
            self._fail(path, "qw forbids the inner permission's formula")
        if c.antecedent != ob.antecedent or _as_set(c.repository) != _as_set(ob.repository) | _as_set(pa.repository):
            self._fail(path, "qw keeps the obligation's contexts")
        if (c.T, c.S, c.Sprime) != (ob.T, control_set(labelled([neg(concl)], "o")), NO_CONTROL):
            self._fail(path, "qw keeps the obligation's conditions and constrains its own conclusion")

    # -- soundness ------------------------------------------------------------------

    def _hyps(self, turnstile: str, tag: str, extra: dict[str, frozenset[Formula]],
              node_ctx: Derivation) -> list[Formula] | None:
        """Hypotheses for a tagged check at a node of the given turnstile, or None when ignored."""
        c = node_ctx.conclusion
        if turnstile == DEF:
            return list(self.axioms(DEF)) + list(extra["f"]) + list(c.antecedent)
        if tag == "o":
            if turnstile == PERM:
                return None
            return list(self.axioms(OBL)) + list(extra["o"]) + list(c.antecedent)
        if tag == "p":
            return list(self.axioms(PERM)) + list(extra["p"]) + list(c.antecedent)
        return list(self.axioms(DEF)) + list(extra["f"]) + list(c.repository)

    def node_verdict(self, d: Derivation, path: tuple[int, ...]) -> NodeVerdict:
        c = d.conclusion
        x = c.turnstile
        failures: list[str] = []
        cond = True
        for sub_path, mu in d.walk():
            V = mu.conclusion.T
            if not V:
                continue
            e = self.lower_contributions(mu)
            for lf in sorted({lf for g in V for lf in g}):
                hyps = self._hyps(x, lf.tag, e, d)
                if hyps is not None and not entails(hyps, lf.formula):
                    cond = False
                    where = ".".join(map(str, path + sub_path)) or "root"
                    failures.append(f"condition {lf.show()} of {where} not entailed")
        contrib = self.contributions(d)
        constr = True
        for lf in sorted({lf for g in c.S for lf in g}):
            hyps = self._hyps(x, lf.tag, contrib, d)
            if hyps is not None and entails(hyps, lf.formula):
                constr = False
                failures.append(f"constraint {lf.show()} entailed")
        if d.rule == "fcp":
            a = c.succedent.items[0]
            hyps = list(self.axioms(PERM)) + list(contrib["p"]) + list(c.antecedent) + [a]
            for g in self.fcp_guard():
                if entails(hyps, neg(g)):
                    constr = False
                    failures.append(f"permission {a} contradicts the obligations")
        succ = None
        if c.Sprime:
            disj = big_or(c.succedent)
            succ = not any(entails([a], disj) for a in members(c.Sprime))
            if not succ:
                failures.append("succedent entailed by a succedent constraint")
        return NodeVerdict(path, d.rule, cond, constr, succ, tuple(failures))

    def check(self, d: Derivation) -> Verdict:
        self.check_structure(d)
        nodes = {path: self.node_verdict(node, path) for path, node in d.walk()}
        metrics = {path: self.metrics(node) for path, node in d.walk()}
        root = nodes[()]
        is_proof = all(v.sound for v in nodes.values()) and root.succedent_compatible is not False
        return Verdict(is_proof, nodes, metrics)


def _one_more(smaller: Context, bigger: Context) -> bool:
    if len(bigger) != len(smaller) + 1:
        return False
    rest = Counter(bigger.items)
    rest.subtract(Counter(smaller.items))
    return all(v >= 0 for v in rest.values())


def check_derivation(d: Derivation, bundle: TheoryBundle, rules: RuleBase | None = None) -> Verdict:
    return Checker(bundle, rules).check(d)


def derivation_metrics(d: Derivation, bundle: TheoryBundle) -> dict[tuple[int, ...], Metrics]:
    ch = Checker(bundle)
    return {path: ch.metrics(node) for path, node in d.walk()}


__all__ = [
    "Checker", "NodeVerdict", "Metrics", "Verdict", "compatible", "check_derivation", "derivation_metrics",
    "RULE_NAMES", "SCHEMA_RULES", "LabelledFormula",
]
