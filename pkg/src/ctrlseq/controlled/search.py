"""Certificate-producing proof search guided by the extension oracles."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Sequence

from ..classical import Clause, _left_premises, _right_premises, entails, is_axiom_of
from ..defaults import TheoryError, m_credulous
from ..deontic import OBLIGATION, PERMISSION, d_credulous
from ..dsl import TheoryBundle
from ..syntax import ATOM, Context, Formula, atom, big_or, complement, neg
from .checker import Checker, Verdict
from .model import DEF, NO_CONTROL, OBL, PERM, ControlledSequent, Derivation, union
from .rules import FACTUAL_KINDS, RuleBase, clause_key

DEFAULT_BUDGET = 20000
FALLBACK_RULE_LIMIT = 4


class BudgetExhausted(RuntimeError):
    """The search ran out of steps before reaching a verdict."""


@dataclass
class SearchResult:
    status: str  # "proof", "none" or "unknown"
    derivation: Derivation | None = None
    verdict: Verdict | None = None
    witness: object | None = None
    reason: str = ""


def _node(rule: str, turnstile: str, repository: Context, antecedent: Context, succedent: Context,
          children: Sequence[Derivation] = (), label: str = "", T=None, S=None, Sp=None) -> Derivation:
    ps = [c.conclusion for c in children]
    if T is None:
        T = union(*(p.T for p in ps)) if ps else NO_CONTROL
        S = union(*(p.S for p in ps)) if ps else NO_CONTROL
        Sp = union(*(p.Sprime for p in ps)) if ps else NO_CONTROL
    seq = ControlledSequent(turnstile, repository, antecedent, succedent, T, S, Sp)
    return Derivation(rule, seq, tuple(children), label)


def weaken(d: Derivation, antecedent: Iterable[Formula] = (), succedent: Iterable[Formula] = ()) -> Derivation:
    """Apply LW then RW steps, one formula at a time."""
    for f in antecedent:
        c = d.conclusion
        d = _node("LW", c.turnstile, c.repository, c.antecedent.add(f), c.succedent, [d], T=c.T, S=c.S, Sp=c.Sprime)
    for f in succedent:
        c = d.conclusion
        d = _node("RW", c.turnstile, c.repository, c.antecedent, c.succedent.add(f), [d], T=c.T, S=c.S, Sp=c.Sprime)
    return d


def _missing(have: Context, want: Context) -> list[Formula]:
    rest = list(want.items)
    for f in have.items:
        rest.remove(f)
    return rest


class Prover:
    """Builds derivations for one bundle; every result is re-checked before it is returned."""

    def __init__(self, bundle: TheoryBundle, budget: int = DEFAULT_BUDGET, rules: RuleBase | None = None):
        self.bundle = bundle
        self.rules = rules or RuleBase(bundle)
        self.checker = Checker(bundle, self.rules)
        self.budget = budget
        self.steps = 0
        self._memo: dict = {}

    def _tick(self) -> None:
        self.steps += 1
        if self.steps > self.budget:
            raise BudgetExhausted(f"search budget of {self.budget} steps exhausted")

    # -- classical part -----------------------------------------------------------

    def classical(self, x: str, rep: Context, gamma: Context, delta: Context) -> Derivation | None:
        """Empty-control derivation of a sequent valid relative to the axioms of the layer."""
        self._tick()
        for f in gamma.items:
            if not f.is_literal():
                name, branches = _left_premises(f)
                rest = gamma.remove_one(f)
                kids = [self.classical(x, rep, rest.add(*b), delta) for b in branches]
                if any(k is None for k in kids):
                    return None
                return _node(name, x, rep, gamma, delta, kids)  # type: ignore[arg-type]
        for f in delta.items:
            if not f.is_literal():
                name, branches = _right_premises(f)
                rest = delta.remove_one(f)
                kids = [self.classical(x, rep, gamma, rest.add(*b)) for b in branches]
                if any(k is None for k in kids):
                    return None
                return _node(name, x, rep, gamma, delta, kids)  # type: ignore[arg-type]
        return self._leaf(x, rep, gamma, delta)

    def _leaf(self, x: str, rep: Context, gamma: Context, delta: Context) -> Derivation | None:
        a, s = gamma.to_set(), delta.to_set()
        core: tuple[list[Formula], list[Formula]] | None = None
        common = sorted(a & s)
        if common:
            core = ([common[0]], [common[0]])
        else:
            for side, is_left in ((a, True), (s, False)):
                for lit in sorted(side):
                    if lit.kind == ATOM and neg(lit) in side:
                        pair = [lit, neg(lit)]
                        core = (pair, []) if is_left else ([], pair)
                        break
                if core:
                    break
        if core is None:
            target = s | frozenset(complement(y) for y in a)
            closure = self.rules.axiom_closure(x)
            for c in sorted((c for c in closure if c <= target), key=lambda c: (len(c), clause_key(c))):
                succ = sorted(c & s)
                ante = sorted(complement(y) for y in c - s)
                if is_axiom_of(ante, succ, set(closure)):
                    core = (ante, succ)
                    break
        if core is None:
            return None
        ax_rep = rep if x != DEF else Context()
        d = _node("ax", x, ax_rep, Context(core[0]), Context(core[1]))
        return weaken(d, _missing(Context(core[0]), gamma), _missing(Context(core[1]), delta))

    # -- goal decomposition ---------------------------------------------------------

    def decompose_goal(self, x: str, rep: Context, gamma: Context, delta: Context, plan) -> Derivation | None:
        """Right rules down to literal clauses, each discharged by `plan`."""
        for f in delta.items:
            if not f.is_literal():
                name, branches = _right_premises(f)
                rest = delta.remove_one(f)
                kids = [self.decompose_goal(x, rep, gamma, rest.add(*b), plan) for b in branches]
                if any(k is None for k in kids):
                    return None
                return _node(name, x, rep, gamma, delta, kids)  # type: ignore[arg-type]
        base = delta.contracted()
        d = plan(frozenset(base))
        if d is None:
            return None
        return weaken(d, (), _missing(base, delta))

    # -- construction -------------------------------------------------------------

    def derive(self, x: str, rep: Context, gamma: Context, clause: Clause,
               order: tuple[str, ...], base_order: tuple[str, ...]) -> Derivation | None:
        """Derivation of rep | gamma |-x clause using rules from `order` (earlier first)."""
        key = (x, rep, gamma, clause_key(clause), order, base_order)
        if key in self._memo:
            return self._memo[key]
        self._memo[key] = None
        try:
            out = self._derive(x, rep, gamma, clause, order, base_order)
        except BudgetExhausted:
            del self._memo[key]
            raise
        self._memo[key] = out
        return out

    def _derive(self, x: str, rep: Context, gamma: Context, clause: Clause,
                order: tuple[str, ...], base_order: tuple[str, ...]) -> Derivation | None:
        self._tick()
        target = Context(sorted(clause))
        axioms = list(self.rules.axioms(x))
        if entails(axioms + list(gamma), big_or(clause)):
            return self.classical(x, rep, gamma, target)
        d = self._by_rule(x, rep, gamma, clause, order, base_order)
        if d is not None:
            return d
        seen = {a.name for a in clause if a.kind == ATOM} | {a.left.name for a in clause if a.kind != ATOM}
        cuttable = set(gamma.atoms())
        for w in axioms:
            cuttable |= w.atoms()
        for name in sorted(cuttable - seen):
            a = atom(name)
            left = self.derive(x, rep, gamma, clause | {a}, order, base_order)
            if left is None:
                continue
            right = self.derive(x, rep, gamma, clause | {neg(a)}, order, base_order)
            if right is None:
                continue
            return _node("cut_asa", x, rep, gamma, target, [left, right])
        return None

    def _by_rule(self, x: str, rep: Context, gamma: Context, clause: Clause,
                 order: tuple[str, ...], base_order: tuple[str, ...]) -> Derivation | None:
        if not order:
            return None
        pos = {n: i for i, n in enumerate(order)}
        candidates = []
        for M in self.rules.multisets(x, order):
            for phi in self.rules.conclusions(x, M):
                if phi <= clause:
                    candidates.append((len(M), max(pos[n] for n in M), len(phi), M, clause_key(phi), phi))
        candidates.sort(key=lambda t: t[:5])
        for _, top, _, M, _, phi in candidates:
            d = self._apply(x, rep, gamma, M, phi, order[:top], base_order)
            if d is not None:
                return weaken(d, (), sorted(clause - phi))
        return None

    def _apply(self, x: str, rep: Context, gamma: Context, M: tuple[str, ...], phi: Clause,
               earlier: tuple[str, ...], base_order: tuple[str, ...]) -> Derivation | None:
        rule = self.rules.rule(x, M, phi)
        if rule is None:
            return None
        kids: list[Derivation] = []
        for t, theta in rule.premises:
            if t == DEF:
                if x == DEF:
                    sub = self.derive(DEF, Context(), gamma, theta, earlier, ())
                else:
                    sub = self.derive(DEF, Context(), rep, theta, base_order, ())
            else:
                sub = self.derive(x, rep, gamma, theta, earlier, base_order)
            if sub is None:
                return None
            kids.append(sub)
        factual_only = all(self.rules.source(x, n).kind in FACTUAL_KINDS for n in M)
        has_x = any(t != DEF for t, _ in rule.premises)
        if x == DEF:
            ante, node_rep = gamma, Context()
        else:
            ante = Context() if (factual_only and not has_x) else gamma
            node_rep = rep
        proto = _node("delta", x, node_rep, ante, Context(sorted(phi)), kids, label=rule.label,
                      T=NO_CONTROL, S=NO_CONTROL, Sp=NO_CONTROL)
        T, S, Sp = self.checker.expected_delta_controls(proto, rule)
        d = _node("delta", x, node_rep, ante, Context(sorted(phi)), kids, label=rule.label, T=T, S=S, Sp=Sp)
        if ante != gamma:
            d = weaken(d, _missing(ante, gamma), ())
        return d

    # -- entry points -------------------------------------------------------------

    def construct(self, x: str, rep: Context, gamma: Context, delta: Context,
                  order: tuple[str, ...], base_order: tuple[str, ...]) -> Derivation | None:
        return self.decompose_goal(
            x, rep, gamma, delta,
            lambda clause: self.derive(x, rep, gamma, clause, order, base_order),
        )

    def certify(self, d: Derivation | None) -> Verdict | None:
        if d is None:
            return None
        v = self.checker.check(d)
        return v if v.is_proof else None

    def oracle(self, x: str, rep: Context, gamma: Context, goal: Formula):
        t = self.bundle.default_theory
        if x == DEF:
            ok, w = m_credulous(t, list(gamma), goal)
            return ok, w, (tuple(r.name for r in w.applied) if w else ()), ()
        n = self.bundle.normative_system
        if n is None:
            return False, None, (), ()
        mode = OBLIGATION if x == OBL else PERMISSION
        ok, w = d_credulous(t, n, list(rep), list(gamma), goal, mode, self.bundle.fact_compatibility(mode))
        if not ok or w is None:
            return False, None, (), ()
        return True, w, tuple(r.name for r in w.applied), tuple(r.name for r in w.base.applied)

    def fallback_orders(self, x: str) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
        names = self.rules.names(x)
        base = self.rules.names(DEF) if x != DEF else []
        if len(names) > FALLBACK_RULE_LIMIT or len(base) > FALLBACK_RULE_LIMIT:
            return []
        orders: list[tuple[str, ...]] = []
        for k in range(len(names) + 1):
            for combo in permutations(sorted(names), k):
                orders.append(combo)
        bases: list[tuple[str, ...]] = [()]
        if x != DEF:
            bases = [p for k in range(len(base) + 1) for p in permutations(sorted(base), k)]
        return [(o, b) for o in orders for b in bases]

    def search(self, x: str, rep: Iterable[Formula], gamma: Iterable[Formula],
               delta: Iterable[Formula]) -> SearchResult:
        rep_c = Context(rep) if x != DEF else Context()
        gamma_c = Context(gamma)
        delta_c = Context(delta)
        goal = big_or(delta_c)
        self.steps = 0
        try:
            try:
                ok, w, order, base_order = self.oracle(x, rep_c, gamma_c, goal)
            except TheoryError:
                # no extension exists over inconsistent assumptions; only the empty-control route remains
                ok, w, order, base_order = False, None, (), ()
            if ok:
                d = self.construct(x, rep_c, gamma_c, delta_c, order, base_order)
                v = self.certify(d)
                if v is not None:
                    return SearchResult("proof", d, v, w)
            tried = {(order, base_order)} if ok else set()
            for o, b in [((), ())] + self.fallback_orders(x):
                if (o, b) in tried:
                    continue
                tried.add((o, b))
                d = self.construct(x, rep_c, gamma_c, delta_c, o, b)
                v = self.certify(d)
                if v is not None:
                    return SearchResult("proof", d, v, w, "found outside the oracle's witness")
        except BudgetExhausted as e:
            return SearchResult("unknown", reason=str(e))
        if ok:
            return SearchResult("unknown", witness=w, reason="oracle succeeds but no certified derivation was built")
        return SearchResult("none", reason="no extension supports the goal")


def prove(turnstile: str, repository: Iterable[Formula], antecedent: Iterable[Formula],
          goal: Formula | Iterable[Formula], bundle: TheoryBundle, budget: int = DEFAULT_BUDGET,
          prover: Prover | None = None) -> Derivation | None:
    """A certified proof of repository | antecedent |- goal, or None; raises BudgetExhausted on unknown."""
    delta = [goal] if isinstance(goal, Formula) else list(goal)
    p = prover or Prover(bundle, budget)
    res = p.search(turnstile, repository, antecedent, delta)
    if res.status == "unknown":
        raise BudgetExhausted(res.reason)
    return res.derivation
