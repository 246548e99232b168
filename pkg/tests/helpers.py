"""Shared test fixtures: random automata and independent oracles.

The oracles work on a plain set-of-triples view of an automaton and
implement the semantics directly, so they share no code paths with the
constructions they check.
"""

from __future__ import annotations

import random
from collections import defaultdict, deque

from nfakit import EPSILON, Nfa
from nfakit import algorithms as alg
from nfakit import inclusion as incl


def triples(nfa: Nfa) -> set[tuple[int, int, int]]:
    return set(nfa.transitions())


def plain_post(nfa: Nfa) -> dict[tuple[int, int], set[int]]:
    post: dict[tuple[int, int], set[int]] = defaultdict(set)
    for s, a, t in nfa.transitions():
        post[(s, a)].add(t)
    return post


def eps_syms(nfa: Nfa) -> frozenset[int]:
    return frozenset(EPSILON - i for i in range(nfa.num_epsilons))


def oracle_accepts(nfa: Nfa, word) -> bool:
    """Run search over (state, position) configurations, epsilon-aware."""
    post = plain_post(nfa)
    eps = eps_syms(nfa)
    word = list(word)
    seen = set()
    stack = [(q, 0) for q in nfa.initial]
    while stack:
        q, i = stack.pop()
        if (q, i) in seen:
            continue
        seen.add((q, i))
        if i == len(word) and q in nfa.final:
            return True
        for e in eps:
            for t in post.get((q, e), ()):
                stack.append((t, i))
        if i < len(word):
            for t in post.get((q, word[i]), ()):
                stack.append((t, i + 1))
    return False


def enum_words(symbols, max_len):
    """All words over ``symbols`` up to ``max_len``, shortest first."""
    symbols = list(symbols)
    level = [()]
    yield ()
    for _ in range(max_len):
        level = [w + (a,) for w in level for a in symbols]
        yield from level


def language_set(nfa: Nfa, symbols, max_len) -> set[tuple[int, ...]]:
    """Words of length <= max_len accepted, by independent set-stepping."""
    post = plain_post(nfa)
    eps = eps_syms(nfa)

    def closure(states):
        seen = set(states)
        stack = list(states)
        while stack:
            q = stack.pop()
            for e in eps:
                for t in post.get((q, e), ()):
                    if t not in seen:
                        seen.add(t)
                        stack.append(t)
        return frozenset(seen)

    finals = set(nfa.final)
    out: set[tuple[int, ...]] = set()
    start = closure(set(nfa.initial))
    frontier = [((), start)]
    if start & finals:
        out.add(())
    for _ in range(max_len):
        nxt = []
        for word, states in frontier:
            for a in symbols:
                moved = closure({t for q in states for t in post.get((q, a), ())})
                if not moved:
                    continue
                w2 = word + (a,)
                nxt.append((w2, moved))
                if moved & finals:
                    out.add(w2)
        frontier = nxt
    return out


def random_nfa(
    rng: random.Random,
    max_states: int = 6,
    num_symbols: int = 3,
    trans_prob: float = 0.25,
    eps_prob: float = 0.0,
    final_prob: float = 0.35,
    allow_no_initial: bool = False,
) -> Nfa:
    n = rng.randint(1, max_states)
    nfa = Nfa(num_states=n)
    for q in range(n):
        for a in range(num_symbols):
            for t in range(n):
                if rng.random() < trans_prob:
                    nfa.add_transition(q, a, t)
        if eps_prob:
            for t in range(n):
                if rng.random() < eps_prob:
                    nfa.add_transition(q, EPSILON, t)
    k = rng.randint(0 if allow_no_initial else 1, n)
    for q in rng.sample(range(n), k):
        nfa.initial.add(q)
    for q in range(n):
        if rng.random() < final_prob:
            nfa.final.add(q)
    if len(nfa.final) == 0 and rng.random() < 0.7:
        nfa.final.add(rng.randrange(n))
    return nfa


def assert_delta_invariants(nfa: Nfa) -> None:
    """Sortedness at every layer, no empty posts, epsilon posts last."""
    eps_floor = EPSILON - nfa.num_epsilons + 1
    for q in range(nfa.delta.num_states()):
        post = nfa.delta.state_post(q)
        symbols = [sp.symbol for sp in post]
        assert symbols == sorted(symbols), f"symbols out of order at state {q}"
        assert len(symbols) == len(set(symbols)), f"duplicate symbol at state {q}"
        for i, sp in enumerate(post):
            ts = list(sp.targets)
            assert ts, f"empty symbol post at state {q}"
            assert ts == sorted(ts) and len(ts) == len(set(ts))
            if sp.symbol >= eps_floor and nfa.num_epsilons:
                assert i >= len(post) - nfa.num_epsilons


def is_dfa(nfa: Nfa) -> bool:
    if len(nfa.initial) > 1:
        return False
    eps = eps_syms(nfa)
    for q in range(nfa.delta.num_states()):
        for sp in nfa.delta.state_post(q):
            if sp.symbol in eps or len(sp.targets) > 1:
                return False
    return True


def naive_simulation(nfa: Nfa) -> list[list[bool]]:
    """Greatest fixpoint: delete pairs violating downward compatibility."""
    n = nfa.num_states()
    post = plain_post(nfa)
    finals = set(nfa.final)
    symbols = sorted({a for (_, a) in post})
    rel = [[not (p in finals and q not in finals) for q in range(n)] for p in range(n)]
    changed = True
    while changed:
        changed = False
        for p in range(n):
            for q in range(n):
                if not rel[p][q]:
                    continue
                ok = True
                for a in symbols:
                    for p2 in post.get((p, a), ()):
                        if not any(rel[p2][q2] for q2 in post.get((q, a), ())):
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    rel[p][q] = False
                    changed = True
    return rel


def two_pass_useful(nfa: Nfa) -> set[int]:
    """Forward-reachable intersected with co-reachable via reversal."""
    post = plain_post(nfa)
    fwd = set(nfa.initial)
    queue = deque(fwd)
    succ: dict[int, set[int]] = defaultdict(set)
    pred: dict[int, set[int]] = defaultdict(set)
    for (s, _), ts in post.items():
        for t in ts:
            succ[s].add(t)
            pred[t].add(s)
    while queue:
        q = queue.popleft()
        for t in succ[q]:
            if t not in fwd:
                fwd.add(t)
                queue.append(t)
    bwd = set(nfa.final)
    queue = deque(bwd)
    while queue:
        q = queue.popleft()
        for s in pred[q]:
            if s not in bwd:
                bwd.add(s)
                queue.append(s)
    return fwd & bwd


def oracle_remove_epsilon(nfa: Nfa) -> Nfa:
    """Independent epsilon elimination over the plain triple view."""
    post = plain_post(nfa)
    eps = eps_syms(nfa)
    n = nfa.num_states()
    closure = []
    for q in range(n):
        seen = {q}
        stack = [q]
        while stack:
            p = stack.pop()
            for e in eps:
                for t in post.get((p, e), ()):
                    if t not in seen:
                        seen.add(t)
                        stack.append(t)
        closure.append(seen)
    out = Nfa(num_states=n, initial=nfa.initial, num_epsilons=nfa.num_epsilons)
    finals = set(nfa.final)
    for q in range(n):
        if closure[q] & finals:
            out.final.add(q)
        for r in closure[q]:
            for (s, a), ts in post.items():
                if s != r or a in eps:
                    continue
                for t in ts:
                    for t2 in closure[t]:
                        out.add_transition(q, a, t2)
    return out


def naive_included(a: Nfa, b: Nfa) -> bool:
    """The complement-product-emptiness route to language inclusion."""
    sigma = (a.used_symbols() | b.used_symbols()) - eps_syms(a) - eps_syms(b)
    product, _ = alg.intersection(a, alg.complement(b, sigma))
    empty, _ = alg.is_lang_empty(product)
    return empty


def lang_equal(a: Nfa, b: Nfa) -> bool:
    """Language equality of epsilon-free automata via inclusion both ways."""
    return incl.is_included(a, b)[0] and incl.is_included(b, a)[0]


def last_letter_family(n: int) -> tuple[Nfa, Nfa]:
    """The classic 2^n determinization family over {a, b} (symbols 0, 1).

    Branch i of the union accepts the words whose i-th letter from the end
    is an 'a'; the left operand is the n-th branch alone, so inclusion
    holds while determinizing the union needs exponentially many
    macrostates.
    """

    def branch(nfa: Nfa, i: int) -> None:
        base = nfa.num_states()
        nfa.initial.add(base)
        nfa.add_transition(base, 0, base)
        nfa.add_transition(base, 1, base)
        nfa.add_transition(base, 0, base + 1)
        for j in range(1, i):
            nfa.add_transition(base + j, 0, base + j + 1)
            nfa.add_transition(base + j, 1, base + j + 1)
        nfa.final.add(base + i)

    a = Nfa()
    branch(a, n)
    b = Nfa()
    for i in range(1, n + 1):
        branch(b, i)
    return a, b
