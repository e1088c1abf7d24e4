"""Independent reference implementations used only by the tests.

Nothing here calls the decision procedures under test: validity is read off
truth tables computed as bit masks over all valuations.
"""

from __future__ import annotations

import itertools
import random
from typing import Iterable, Sequence

from ctrlseq.syntax import AND, ATOM, NOT, OR, RESERVED_ATOM, Formula, atom, conj, disj, neg


# -- truth tables -----------------------------------------------------------------


def valuations(names: Sequence[str]) -> list[dict[str, bool]]:
    return [dict(zip(names, bits)) for bits in itertools.product((False, True), repeat=len(names))]


def truth(f: Formula, val: dict[str, bool]) -> bool:
    if f.kind == ATOM:
        # the reserved atom only occurs inside the top/bottom encodings, whose value it cannot change
        return val.get(f.name, False) if f.name == RESERVED_ATOM else val[f.name]
    if f.kind == NOT:
        return not truth(f.left, val)
    if f.kind == AND:
        return truth(f.left, val) and truth(f.right, val)
    return truth(f.left, val) or truth(f.right, val)


def names_of(formulas: Iterable[Formula]) -> list[str]:
    out: set[str] = set()
    for f in formulas:
        out |= f.atoms()
    return sorted(out - {RESERVED_ATOM})


def tt_entails(hyps: Iterable[Formula], goal: Formula) -> bool:
    hs = list(hyps)
    for val in valuations(names_of(hs + [goal])):
        if all(truth(h, val) for h in hs) and not truth(goal, val):
            return False
    return True


def tt_consistent(formulas: Iterable[Formula]) -> bool:
    fs = list(formulas)
    return any(all(truth(f, v) for f in fs) for v in valuations(names_of(fs)))


def tt_sequent_valid(ante: Iterable[Formula], succ: Iterable[Formula]) -> bool:
    a, s = list(ante), list(succ)
    for val in valuations(names_of(a + s)):
        if all(truth(x, val) for x in a) and not any(truth(x, val) for x in s):
            return False
    return True


def mask(f: Formula, names: Sequence[str]) -> int:
    """Bit i is set when f holds under the i-th valuation (atom j true iff bit j of i)."""
    m = 0
    for i in range(1 << len(names)):
        if truth(f, {n: bool(i >> j & 1) for j, n in enumerate(names)}):
            m |= 1 << i
    return m


# -- exhaustive enumeration by complexity ------------------------------------------


def enumerate_formulas(names: Sequence[str], max_complexity: int,
                       max_leaves: int | None = None) -> dict[tuple[int, int], list[tuple[Formula, int]]]:
    """All formulas over `names` by (complexity, literal occurrences), each with its truth mask.

    Negation is primitive, so a negated compound is measured through its
    De Morgan premises: C(~~A) = C(A) + 1 and C(~(A op B)) = C(~A) + C(~B) + 1.
    Masks are combined bitwise, independently of the formula structure used
    by the decision procedure.
    """
    nval = 1 << len(names)
    full = (1 << nval) - 1
    leaf_cap = max_leaves if max_leaves is not None else max_complexity
    buckets: dict[tuple[int, int], list[tuple[Formula, int]]] = {(1, 1): []}
    for i, a in enumerate(names):
        m = sum(1 << v for v in range(nval) if v >> i & 1)
        buckets[(1, 1)] += [(atom(a), m), (neg(atom(a)), full ^ m)]
    for c in range(2, max_complexity + 1):
        for leaves in range(1, leaf_cap + 1):
            out: list[tuple[Formula, int]] = []
            for f, m in buckets.get((c - 1, leaves), []):
                out.append((neg(neg(f)), m))
            for i in range(1, c - 1):
                j = c - 1 - i
                for k in range(1, leaves):
                    for f, mf in buckets.get((i, k), []):
                        f_neg = f.kind == NOT
                        for g, mg in buckets.get((j, leaves - k), []):
                            out.append((conj(f, g), mf & mg))
                            out.append((disj(f, g), mf | mg))
                            if f_neg and g.kind == NOT:
                                out.append((neg(disj(f.left, g.left)), mf & mg))
                                out.append((neg(conj(f.left, g.left)), mf | mg))
            if out:
                buckets[(c, leaves)] = out
    return buckets


def count_by_complexity(n_atoms: int, max_complexity: int) -> list[int]:
    """Closed-form counts of formulas per complexity, for cross-checking the enumerator."""
    negs = [0] * (max_complexity + 1)
    tot = [0] * (max_complexity + 1)
    for c in range(1, max_complexity + 1):
        pairs = range(1, c - 1)
        binary = sum(2 * tot[a] * tot[c - 1 - a] for a in pairs)
        # ~(A op B) is measured through ~A and ~B, so it pairs up negation-headed formulas
        negated_binary = sum(2 * negs[a] * negs[c - 1 - a] for a in pairs)
        lits = n_atoms if c == 1 else 0
        negs[c] = lits + negated_binary + (tot[c - 1] if c >= 2 else 0)
        tot[c] = lits + binary + negs[c]
    return tot


# -- random formulas -----------------------------------------------------------------


def random_formula(rng: random.Random, names: Sequence[str], depth: int) -> Formula:
    if depth == 0 or rng.random() < 0.3:
        a = atom(rng.choice(names))
        return a if rng.random() < 0.5 else neg(a)
    op = rng.choice("&|~")
    if op == "~":
        return neg(random_formula(rng, names, depth - 1))
    l, r = random_formula(rng, names, depth - 1), random_formula(rng, names, depth - 1)
    return conj(l, r) if op == "&" else disj(l, r)


def random_literal(rng: random.Random, names: Sequence[str]) -> Formula:
    a = atom(rng.choice(names))
    return a if rng.random() < 0.5 else neg(a)


# -- brute-force modified extensions ------------------------------------------------


def brute_extensions(W: Sequence[Formula], defaults: Sequence[tuple[Formula, tuple[Formula, ...], Formula]],
                     names: Sequence[str]) -> set[int]:
    """Truth masks of the generator sets of all modified extensions.

    Every ordered selection of distinct defaults is tried as a process:
    each prerequisite must follow from W and the earlier conclusions, each
    collected justification must stay consistent with all conclusions, and
    no remaining default may still be applicable at the end.
    """
    full = (1 << (1 << len(names))) - 1
    base = full
    for w in W:
        base &= mask(w, names)
    pre = [mask(d[0], names) for d in defaults]
    just = [[mask(j, names) for j in d[1]] for d in defaults]
    concl = [mask(d[2], names) for d in defaults]
    found: set[int] = set()
    idx = range(len(defaults))
    for k in range(len(defaults) + 1):
        for order in itertools.permutations(idx, k):
            e = base
            ok = True
            for i in order:
                if e & ~pre[i] & full:
                    ok = False
                    break
                e &= concl[i]
            if not ok:
                continue
            support = [j for i in order for j in just[i]]
            if any(e & j == 0 for j in support):
                continue
            closed = True
            for i in idx:
                if i in order or e & ~pre[i] & full:
                    continue
                grown = e & concl[i]
                if all(grown & j for j in support + just[i]):
                    closed = False
                    break
            if closed:
                found.add(e)
    return found


def generator_mask(generators: Iterable[Formula], names: Sequence[str]) -> int:
    m = (1 << (1 << len(names))) - 1
    for g in generators:
        m &= mask(g, names)
    return m
