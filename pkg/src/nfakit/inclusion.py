"""Antichain-based language inclusion and universality, plus simulation.

The inclusion check explores the product of the left automaton with the
on-the-fly subset construction of the right one, pruning pairs by
subsumption (smaller sets are kept) and popping small sets first by
default. Simulation is computed with a counting-based refinement loop and
feeds the quotient reduction.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable

from .core import AutomataError, EpsilonError, Nfa


def _require_epsilon_free(nfa: Nfa) -> None:
    if nfa.has_epsilon_transitions():
        raise EpsilonError("epsilon not supported; remove first")


def _is_subset_sorted(small: tuple, big: tuple) -> bool:
    # merge walk over two sorted tuples
    if len(small) > len(big):
        return False
    j = 0
    nb = len(big)
    for x in small:
        while j < nb and big[j] < x:
            j += 1
        if j == nb or big[j] != x:
            return False
        j += 1
    return True


class AntichainStore:
    """Per-state families of pairwise incomparable state sets.

    Keeps only inclusion-minimal sets: inserting a superset of a stored set
    is refused, and inserting a subset evicts every stored superset.
    """

    def __init__(self, num_states: int):
        self._sets: list[list[tuple]] = [[] for _ in range(max(num_states, 1))]

    def insert(self, q: int, s: tuple) -> bool:
        """Insert ``s`` into the family of ``q``; False when subsumed."""
        bucket = self._sets[q]
        for t in bucket:
            if _is_subset_sorted(t, s):
                return False
        bucket[:] = [t for t in bucket if not _is_subset_sorted(s, t)]
        bucket.append(s)
        return True

    def contains(self, q: int, s: tuple) -> bool:
        return s in self._sets[q]

    def sets(self, q: int) -> list[tuple]:
        return list(self._sets[q])

    def check_antichain(self) -> bool:
        """Whether no family holds two comparable distinct sets."""
        for bucket in self._sets:
            for i, s in enumerate(bucket):
                for t in bucket[i + 1 :]:
                    if _is_subset_sorted(s, t) or _is_subset_sorted(t, s):
                        return False
        return True


class FifoWorklist:
    """Plain first-in first-out order."""

    def __init__(self):
        self._queue: deque = deque()

    def push(self, size: int, item) -> None:
        self._queue.append(item)

    def pop(self):
        return self._queue.popleft()

    def __len__(self) -> int:
        return len(self._queue)


class MinSizeWorklist:
    """Size-bucketed FIFO queues: pops a pair with the smallest set, ties
    broken first-in first-out."""

    def __init__(self):
        self._buckets: list[deque] = []
        self._min = 0
        self._count = 0

    def push(self, size: int, item) -> None:
        while len(self._buckets) <= size:
            self._buckets.append(deque())
        self._buckets[size].append(item)
        if size < self._min:
            self._min = size
        self._count += 1

    def pop(self):
        while self._min < len(self._buckets) and not self._buckets[self._min]:
            self._min += 1
        item = self._buckets[self._min].popleft()
        self._count -= 1
        return item

    def __len__(self) -> int:
        return self._count


WORKLIST_POLICIES = {"min-size": MinSizeWorklist, "fifo": FifoWorklist}


def make_worklist(policy: str):
    try:
        return WORKLIST_POLICIES[policy]()
    except KeyError:
        raise AutomataError(f"unknown worklist policy {policy!r}") from None


def _trace_word(parents: dict, key) -> list[int]:
    word: list[int] = []
    while True:
        parent, symbol = parents[key]
        if parent is None:
            break
        word.append(symbol)
        key = parent
    word.reverse()
    return word


def is_included(a: Nfa, b: Nfa, policy: str = "min-size", stats: dict | None = None):
    """Antichain inclusion test: is L(a) a subset of L(b)?

    Returns ``(True, None)`` or ``(False, counterexample_word)``. Pairs
    (q, S) of an a-state and a set of b-states are explored on the fly; a
    pair with final q and S missing b's finals witnesses non-inclusion.
    """
    _require_epsilon_free(a)
    _require_epsilon_free(b)
    a_final = a.final
    b_final = b.final
    store = AntichainStore(a.num_states())
    worklist = make_worklist(policy)
    parents: dict[tuple[int, tuple], tuple] = {}
    discovered = 0
    expanded = 0

    def record(result):
        if stats is not None:
            stats["pairs_discovered"] = discovered
            stats["pairs_expanded"] = expanded
        return result

    def bad(q: int, s: tuple) -> bool:
        return q in a_final and not any(x in b_final for x in s)

    initial_b = tuple(sorted(b.initial))
    for q in sorted(a.initial):
        key = (q, initial_b)
        if key not in parents:
            parents[key] = (None, None)
        if bad(q, initial_b):
            return record((False, []))
        if store.insert(q, initial_b):
            worklist.push(len(initial_b), key)
            discovered += 1
    while len(worklist):
        q, s = worklist.pop()
        if not store.contains(q, s):
            continue  # evicted by subsumption while pending
        expanded += 1
        for sp in a.delta.state_post(q):
            symbol = sp.symbol
            acc: set[int] = set()
            for x in s:
                acc.update(b.symbol_post(x, symbol))
            s2 = tuple(sorted(acc))
            size = len(s2)
            for q2 in sp.targets:
                key2 = (q2, s2)
                if key2 not in parents:
                    parents[key2] = ((q, s), symbol)
                if bad(q2, s2):
                    return record((False, _trace_word(parents, key2)))
                if store.insert(q2, s2):
                    worklist.push(size, key2)
                    discovered += 1
    return record((True, None))


def is_universal(
    nfa: Nfa,
    alphabet: Iterable[int],
    policy: str = "min-size",
    stats: dict | None = None,
):
    """Antichain universality test: is L(nfa) all of alphabet*?

    Searches the subset construction for a reachable non-final macrostate,
    pruning supersets of stored macrostates.
    """
    _require_epsilon_free(nfa)
    alpha = sorted(set(alphabet))
    outside = nfa.used_symbols() - set(alpha)
    if outside:
        raise AutomataError(
            f"transition symbol {min(outside)} outside the given alphabet"
        )
    finals = nfa.final
    store = AntichainStore(1)
    worklist = make_worklist(policy)
    parents: dict[tuple, tuple] = {}
    discovered = 0
    expanded = 0

    def record(result):
        if stats is not None:
            stats["pairs_discovered"] = discovered
            stats["pairs_expanded"] = expanded
        return result

    s0 = tuple(sorted(nfa.initial))
    parents[s0] = (None, None)
    if not any(q in finals for q in s0):
        return record((False, []))
    if store.insert(0, s0):
        worklist.push(len(s0), s0)
        discovered += 1
    while len(worklist):
        s = worklist.pop()
        if not store.contains(0, s):
            continue
        expanded += 1
        for symbol in alpha:
            acc: set[int] = set()
            for x in s:
                acc.update(nfa.symbol_post(x, symbol))
            s2 = tuple(sorted(acc))
            if s2 not in parents:
                parents[s2] = (s, symbol)
            if not any(q in finals for q in s2):
                return record((False, _trace_word(parents, s2)))
            if store.insert(0, s2):
                worklist.push(len(s2), s2)
                discovered += 1
    return record((True, None))


class SimulationRelation:
    """Boolean matrix over states; entry (p, q) says q simulates p."""

    def __init__(self, matrix: list[list[bool]]):
        self._m = matrix

    def num_states(self) -> int:
        return len(self._m)

    def holds(self, p: int, q: int) -> bool:
        return self._m[p][q]

    def equivalent(self, p: int, q: int) -> bool:
        return self._m[p][q] and self._m[q][p]

    def pairs(self) -> set[tuple[int, int]]:
        return {
            (p, q)
            for p, row in enumerate(self._m)
            for q, v in enumerate(row)
            if v
        }

    def __eq__(self, other) -> bool:
        if isinstance(other, SimulationRelation):
            return self._m == other._m
        return NotImplemented

    def __repr__(self) -> str:
        return f"SimulationRelation({sorted(self.pairs())})"


def compute_simulation(nfa: Nfa) -> SimulationRelation:
    """The maximal simulation preorder, by counting-based refinement.

    Starts from finality compatibility and repeatedly deletes pairs whose
    moves cannot be matched, maintaining for each (state p, symbol a, state q)
    the number of a-successors of q still simulating p so each deletion
    cascades in amortized constant time per affected edge pair.
    """
    _require_epsilon_free(nfa)
    n = nfa.num_states()
    if n == 0:
        return SimulationRelation([])
    finals = nfa.final
    is_final = [q in finals for q in range(n)]
    posts = [list(nfa.delta.state_post(q)) for q in range(n)]
    symbols = sorted({sp.symbol for post in posts for sp in post})
    pre: dict[int, list[list[int]]] = {a: [[] for _ in range(n)] for a in symbols}
    for q in range(n):
        for sp in posts[q]:
            for t in sp.targets:
                pre[sp.symbol][t].append(q)

    sim = [[True] * n for _ in range(n)]
    for p in range(n):
        if is_final[p]:
            row = sim[p]
            for q in range(n):
                if not is_final[q]:
                    row[q] = False

    # cnt[p][a-index][q]: |{q' in post(q, a) : sim[p][q']}|
    cnt: dict[tuple[int, int, int], int] = {}
    for q in range(n):
        for sp in posts[q]:
            a = sp.symbol
            for p in range(n):
                row = sim[p]
                cnt[(p, a, q)] = sum(1 for t in sp.targets if row[t])

    queue: deque[tuple[int, int]] = deque()
    for p in range(n):
        for q in range(n):
            if not sim[p][q]:
                continue
            for sp in posts[p]:
                a = sp.symbol
                if any(cnt.get((t, a, q), 0) == 0 for t in sp.targets):
                    sim[p][q] = False
                    queue.append((p, q))
                    break
    while queue:
        p, q = queue.popleft()
        for a in symbols:
            pre_a = pre[a]
            for qq in pre_a[q]:
                key = (p, a, qq)
                c = cnt[key] - 1
                cnt[key] = c
                if c == 0:
                    for pp in pre_a[p]:
                        if sim[pp][qq]:
                            sim[pp][qq] = False
                            queue.append((pp, qq))
    return SimulationRelation(sim)


def reduce_simulation(nfa: Nfa):
    """Quotient by simulation equivalence; language preserved.

    Returns ``(reduced, mapping)`` where ``mapping`` sends each old state to
    its class state in the result.
    """
    sim = compute_simulation(nfa)
    n = nfa.num_states()
    rep = list(range(n))
    for p in range(n):
        for q in range(p):
            if sim.equivalent(p, q):
                rep[p] = rep[q]
                break
    reps = sorted(set(rep))
    class_id = {r: i for i, r in enumerate(reps)}
    mapping = {p: class_id[rep[p]] for p in range(n)}
    out = Nfa(
        num_states=len(reps),
        alphabet=nfa.alphabet,
        num_epsilons=nfa.num_epsilons,
    )
    for s, a, t in nfa.transitions():
        out.delta.add(mapping[s], a, mapping[t])
    for q in nfa.initial:
        out.initial.add(mapping[q])
    for q in nfa.final:
        out.final.add(mapping[q])
    return out, mapping
