"""Classical constructions: determinization, boolean operations, trimming.

All constructions drive the post-image machinery of :mod:`nfakit.core`;
reachable-part-only subset and product constructions, epsilon-free
concatenation, and a single-pass Tarjan-style identification of useful
states.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable

from .core import (
    AutomataError,
    EpsilonError,
    Nfa,
    OrdVector,
    SparseSet,
    StateLimitError,
    StatePost,
    synchronized_iterator,
)

#: A macrostate of the subset construction: a sorted, duplicate-free tuple of
#: states, usable as a hash key.
Macrostate = tuple

#: Dense-backend threshold for the product pair map.
PRODUCT_DENSE_LIMIT = 1 << 20


def _require_epsilon_free(nfa: Nfa) -> None:
    if nfa.has_epsilon_transitions():
        raise EpsilonError("epsilon not supported; remove first")


class ProductMap:
    """Maps pairs of input states to product states.

    Uses a dense two-dimensional array for small inputs and a state-indexed
    vector of hash tables otherwise.
    """

    def __init__(self, n_left: int, n_right: int):
        self._n_right = n_right
        if 0 < n_left * n_right <= PRODUCT_DENSE_LIMIT:
            self._grid: list[list[int]] | None = [[-1] * n_right for _ in range(n_left)]
            self._maps: list[dict[int, int]] | None = None
        else:
            self._grid = None
            self._maps = [dict() for _ in range(n_left)]
        self._count = 0

    def get(self, q: int, r: int) -> int | None:
        if self._grid is not None:
            v = self._grid[q][r]
            return v if v >= 0 else None
        return self._maps[q].get(r)

    def put(self, q: int, r: int, value: int) -> None:
        if self._grid is not None:
            self._grid[q][r] = value
        else:
            self._maps[q][r] = value
        self._count += 1

    def items(self):
        if self._grid is not None:
            for q, row in enumerate(self._grid):
                for r, v in enumerate(row):
                    if v >= 0:
                        yield (q, r), v
        else:
            for q, row in enumerate(self._maps):
                for r, v in row.items():
                    yield (q, r), v

    def as_dict(self) -> dict[tuple[int, int], int]:
        return dict(self.items())

    def __len__(self) -> int:
        return self._count


def determinize(nfa: Nfa, state_limit: int | None = None):
    """Subset construction; builds only the reachable macrostates.

    Returns ``(dfa, subset_map)`` where ``subset_map`` maps each constructed
    macrostate to its state in the DFA. Raises :class:`StateLimitError` when
    more than ``state_limit`` macrostates would be constructed.
    """
    _require_epsilon_free(nfa)
    dfa = Nfa(alphabet=nfa.alphabet, num_epsilons=nfa.num_epsilons)
    initial_ms: Macrostate = tuple(sorted(nfa.initial))
    subset_map: dict[Macrostate, int] = {initial_ms: 0}
    dfa.delta.grow(1)
    dfa.initial.add(0)
    finals = nfa.final
    if any(q in finals for q in initial_ms):
        dfa.final.add(0)
    work = deque([initial_ms])
    while work:
        ms = work.popleft()
        src = subset_map[ms]
        posts = [nfa.delta.state_post(q) for q in ms]
        for symbol, groups in synchronized_iterator(posts):
            if len(groups) == 1:
                targets = groups[0].as_tuple()
            else:
                merged: set[int] = set()
                for vec in groups:
                    merged.update(vec)
                targets = tuple(sorted(merged))
            nxt = subset_map.get(targets)
            if nxt is None:
                nxt = len(subset_map)
                if state_limit is not None and nxt + 1 > state_limit:
                    raise StateLimitError(state_limit, nxt + 1)
                subset_map[targets] = nxt
                dfa.delta.grow(nxt + 1)
                if any(q in finals for q in targets):
                    dfa.final.add(nxt)
                work.append(targets)
            # symbols arrive in ascending order, so this is a pure append
            dfa.delta.push_back_post(src, symbol, (nxt,))
    return dfa, subset_map


def intersection(a: Nfa, b: Nfa, sync_epsilons: bool = False):
    """Product construction over the reachable pairs only.

    With ``sync_epsilons`` the declared epsilon-like symbols take part in the
    product like ordinary letters (both operands must move on them together);
    otherwise epsilon transitions are rejected.
    """
    if not sync_epsilons:
        _require_epsilon_free(a)
        _require_epsilon_free(b)
    out = Nfa(
        alphabet=a.alphabet if a.alphabet is b.alphabet else None,
        num_epsilons=max(a.num_epsilons, b.num_epsilons),
    )
    pmap = ProductMap(max(a.num_states(), 1), max(b.num_states(), 1))
    work: deque[tuple[int, int]] = deque()

    def pair_state(q: int, r: int) -> int:
        pid = pmap.get(q, r)
        if pid is None:
            pid = len(pmap)
            pmap.put(q, r, pid)
            out.delta.grow(pid + 1)
            if q in a.final and r in b.final:
                out.final.add(pid)
            work.append((q, r))
        return pid

    for q in sorted(a.initial):
        for r in sorted(b.initial):
            out.initial.add(pair_state(q, r))
    while work:
        q, r = work.popleft()
        src = pmap.get(q, r)
        posts = [a.delta.state_post(q), b.delta.state_post(r)]
        for symbol, (ta, tb) in synchronized_iterator(posts, require_all=True):
            for t1 in ta:
                for t2 in tb:
                    out.delta.add(src, symbol, pair_state(t1, t2))
    return out, pmap


def _append_renamed(dst, src_nfa: Nfa, offset: int) -> None:
    # append src_nfa's posts behind dst's, shifting every target by offset
    dst.grow(offset)
    for q in range(src_nfa.delta.num_states()):
        post = StatePost()
        post._posts = [
            type(sp)(sp.symbol, OrdVector._from_sorted([t + offset for t in sp.targets]))
            for sp in src_nfa.delta.state_post(q)
        ]
        dst._posts.append(post)


def union_inplace(a: Nfa, b: Nfa) -> None:
    """Disjoint union into ``a``: appends ``b``'s posts, renaming its states
    by ``num_states(a)``, without touching ``a``'s existing posts."""
    if a is b:
        b = b.copy()
    offset = a.num_states()
    _append_renamed(a.delta, b, offset)
    for q in b.initial:
        a.initial.add(q + offset)
    for q in b.final:
        a.final.add(q + offset)
    a.num_epsilons = max(a.num_epsilons, b.num_epsilons)


def union(a: Nfa, b: Nfa) -> Nfa:
    out = a.copy()
    union_inplace(out, b)
    return out


def concatenate_inplace(a: Nfa, b: Nfa) -> None:
    """Epsilon-free concatenation into ``a``.

    Appends ``b`` renamed by offset and connects every original final state
    of ``a`` to the successors of ``b``'s initial states. The finals become
    ``b``'s, keeping ``a``'s as well when ``b`` accepts the empty word; the
    initials gain ``b``'s when ``a`` accepts the empty word.
    """
    if a is b:
        b = b.copy()
    offset = a.num_states()
    old_finals = sorted(a.final)
    eps_in_a = any(q in a.final for q in a.initial)
    eps_in_b = any(s in b.final for s in b.initial)
    _append_renamed(a.delta, b, offset)
    # connecting posts: union over b's initial states, targets shifted
    init_posts = [b.delta.state_post(s) for s in sorted(b.initial)]
    connecting: list[tuple[int, list[int]]] = []
    for symbol, groups in synchronized_iterator(init_posts):
        merged: set[int] = set()
        for vec in groups:
            merged.update(vec)
        connecting.append((symbol, [t + offset for t in sorted(merged)]))
    for f in old_finals:
        for symbol, targets in connecting:
            for t in targets:
                a.delta.add(f, symbol, t)
    if eps_in_a:
        for s in b.initial:
            a.initial.add(s + offset)
    if not eps_in_b:
        a.final.clear()
    for s in b.final:
        a.final.add(s + offset)
    a.num_epsilons = max(a.num_epsilons, b.num_epsilons)


def concatenate(a: Nfa, b: Nfa) -> Nfa:
    out = a.copy()
    concatenate_inplace(out, b)
    return out


def _epsilon_closures(nfa: Nfa) -> list[set[int]]:
    eps = nfa.epsilon_symbols()
    n = nfa.num_states()
    closures: list[set[int]] = []
    for q in range(n):
        seen = {q}
        stack = [q]
        while stack:
            p = stack.pop()
            for e in eps:
                for t in nfa.symbol_post(p, e):
                    if t not in seen:
                        seen.add(t)
                        stack.append(t)
        closures.append(seen)
    return closures


def remove_epsilon(nfa: Nfa) -> Nfa:
    """Eliminate epsilon transitions, preserving the language.

    Adds (q, a, r) whenever r is reachable from q through epsilons, then a,
    then epsilons again, and makes q final when its closure hits a final
    state.
    """
    closures = _epsilon_closures(nfa)
    eps = nfa.epsilon_symbols()
    n = nfa.num_states()
    out = Nfa(
        num_states=n,
        initial=nfa.initial,
        alphabet=nfa.alphabet,
        num_epsilons=nfa.num_epsilons,
    )
    finals = nfa.final
    for q in range(n):
        if any(r in finals for r in closures[q]):
            out.final.add(q)
        for r in closures[q]:
            for sp in nfa.delta.state_post(r):
                if sp.symbol in eps:
                    continue
                for t in sp.targets:
                    for t2 in closures[t]:
                        out.delta.add(q, sp.symbol, t2)
    return out


def revert(nfa: Nfa) -> Nfa:
    """Reverse every transition and swap initial with final states."""
    out = Nfa(
        num_states=nfa.num_states(),
        initial=nfa.final,
        final=nfa.initial,
        alphabet=nfa.alphabet,
        num_epsilons=nfa.num_epsilons,
    )
    for s, a, t in nfa.transitions():
        out.delta.add(t, a, s)
    return out


def _complete_inplace(nfa: Nfa, alphabet: list[int], sink: int | None) -> None:
    n = nfa.num_states()
    missing = [
        (q, a) for q in range(n) for a in alphabet if len(nfa.symbol_post(q, a)) == 0
    ]
    if not missing:
        return
    if sink is None:
        sink = nfa.add_state()
    elif sink >= n:
        nfa.delta.grow(sink + 1)
    for q, a in missing:
        nfa.delta.add(q, a, sink)
    for a in alphabet:
        if len(nfa.symbol_post(sink, a)) == 0:
            nfa.delta.add(sink, a, sink)


def make_complete(nfa: Nfa, alphabet: Iterable[int], sink: int | None = None) -> Nfa:
    """Return a copy where every state has a move on every alphabet symbol.

    Missing moves are redirected to ``sink`` (a fresh state unless given),
    which gets self-loops on the whole alphabet. A complete input comes back
    unchanged, with no sink added.
    """
    out = nfa.copy()
    _complete_inplace(out, sorted(set(alphabet)), sink)
    return out


def complement(nfa: Nfa, alphabet: Iterable[int]) -> Nfa:
    """Complement over ``alphabet``: determinize, complete, flip finals."""
    _require_epsilon_free(nfa)
    alpha = sorted(set(alphabet))
    outside = nfa.used_symbols() - set(alpha)
    if outside:
        raise AutomataError(
            f"transition symbol {min(outside)} outside the given alphabet"
        )
    dfa, _ = determinize(nfa)
    _complete_inplace(dfa, alpha, None)
    old_finals = set(dfa.final)
    dfa.final = SparseSet(q for q in range(dfa.num_states()) if q not in old_finals)
    return dfa


def is_lang_empty(nfa: Nfa):
    """Breadth-first reachability of a final state; epsilon counts as a move.

    Returns ``(True, None)`` or ``(False, witness_word)`` with the witness
    recovered from the search's parent links (epsilon moves contribute no
    letters).
    """
    eps = nfa.epsilon_symbols()
    parent: dict[int, tuple[int, int] | None] = {}
    queue: deque[int] = deque()
    for q in sorted(nfa.initial):
        if q not in parent:
            parent[q] = None
            queue.append(q)
    while queue:
        q = queue.popleft()
        if q in nfa.final:
            word: list[int] = []
            cur: int | None = q
            while parent[cur] is not None:
                prev, symbol = parent[cur]
                if symbol not in eps:
                    word.append(symbol)
                cur = prev
            word.reverse()
            return False, word
        for sp in nfa.delta.state_post(q):
            for t in sp.targets:
                if t not in parent:
                    parent[t] = (q, sp.symbol)
                    queue.append(t)
    return True, None


def is_in_lang(nfa: Nfa, word: Iterable[int]) -> bool:
    """Membership test; runs may interleave epsilon moves freely."""
    eps = nfa.epsilon_symbols()

    def closure(states: set[int]) -> set[int]:
        seen = set(states)
        stack = list(states)
        while stack:
            p = stack.pop()
            for e in eps:
                for t in nfa.symbol_post(p, e):
                    if t not in seen:
                        seen.add(t)
                        stack.append(t)
        return seen

    current = closure(set(nfa.initial))
    for a in word:
        current = closure({t for q in current for t in nfa.symbol_post(q, a)})
        if not current:
            return False
    return any(q in nfa.final for q in current)


def useful_states(nfa: Nfa, stats: dict | None = None) -> set[int]:
    """States lying on some accepting run.

    One iterative Tarjan-style depth-first pass from the initial states: when
    a strongly connected component completes, it is useful iff it contains a
    final state or reaches an already-settled useful component, and the
    verdict propagates to the component's DFS parent. No reverse Delta and no
    second exploration pass. ``stats['edge_visits']`` reports the number of
    edge traversals when a dict is supplied.
    """
    n = nfa.num_states()
    index = [-1] * n
    lowlink = [0] * n
    on_stack = [False] * n
    pending = [False] * n
    useful = [False] * n
    scc_stack: list[int] = []
    counter = 0
    edge_visits = 0
    finals = nfa.final
    delta = nfa.delta

    def successors(q):
        for sp in delta.state_post(q):
            yield from sp.targets

    for start in sorted(nfa.initial):
        if start >= n or index[start] != -1:
            continue
        index[start] = lowlink[start] = counter
        counter += 1
        scc_stack.append(start)
        on_stack[start] = True
        frames: list[tuple[int, object]] = [(start, successors(start))]
        while frames:
            v, it = frames[-1]
            descended = False
            for w in it:
                edge_visits += 1
                if index[w] == -1:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    scc_stack.append(w)
                    on_stack[w] = True
                    frames.append((w, successors(w)))
                    descended = True
                    break
                elif on_stack[w]:
                    if index[w] < lowlink[v]:
                        lowlink[v] = index[w]
                elif useful[w]:
                    pending[v] = True
            if descended:
                continue
            frames.pop()
            if frames:
                parent = frames[-1][0]
                if lowlink[v] < lowlink[parent]:
                    lowlink[parent] = lowlink[v]
            if lowlink[v] == index[v]:
                members = []
                while True:
                    w = scc_stack.pop()
                    on_stack[w] = False
                    members.append(w)
                    if w == v:
                        break
                scc_useful = any(m in finals or pending[m] for m in members)
                for m in members:
                    useful[m] = scc_useful
                if scc_useful and frames:
                    pending[frames[-1][0]] = True
    if stats is not None:
        stats["edge_visits"] = edge_visits
    return {q for q in range(n) if useful[q]}


def trim(nfa: Nfa):
    """Drop useless states and rename survivors densely, in one Delta pass.

    Returns ``(trimmed, renaming)`` where ``renaming`` maps each useful old
    state to its new name; the relative order of states is preserved.
    """
    useful = useful_states(nfa)
    renaming = {old: new for new, old in enumerate(sorted(useful))}
    out = Nfa(
        num_states=len(renaming),
        alphabet=nfa.alphabet,
        num_epsilons=nfa.num_epsilons,
    )
    keep = [False] * nfa.num_states()
    for q in useful:
        keep[q] = True
    for old, new in renaming.items():
        post = StatePost()
        posts = []
        for sp in nfa.delta.state_post(old):
            targets = [renaming[t] for t in sp.targets if keep[t]]
            if targets:
                # monotone renaming keeps targets sorted
                posts.append(type(sp)(sp.symbol, OrdVector._from_sorted(targets)))
        post._posts = posts
        out.delta._posts[new] = post
    for q in nfa.initial:
        if q < len(keep) and keep[q]:
            out.initial.add(renaming[q])
    for q in nfa.final:
        if q < len(keep) and keep[q]:
            out.final.add(renaming[q])
    return out, renaming
