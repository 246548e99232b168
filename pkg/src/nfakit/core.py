"""Core containers and the layered transition store.

States and symbols are unsigned integers. The transition relation lives in
``Delta``: a state-indexed vector of ``StatePost``s, each a symbol-ordered
vector of ``SymbolPost``s, each holding one symbol and a sorted vector of
target states. Epsilon is the largest representable symbol value, so an
epsilon post is always the last entry of a ``StatePost``.
"""

from __future__ import annotations

import bisect
import heapq
from typing import Iterable, Iterator, NamedTuple

#: Largest 32-bit unsigned value, reserved for the epsilon symbol. Further
#: epsilon-like symbols occupy the values immediately below it.
EPSILON = 2**32 - 1

#: Upper bound on per-automaton epsilon-like symbols.
MAX_EPSILONS = 64


class AutomataError(Exception):
    """Base class for errors raised by this library."""


class EpsilonError(AutomataError):
    """Raised by operations that require an epsilon-free automaton."""


class StateLimitError(AutomataError):
    """A construction exceeded its configured state budget."""

    def __init__(self, limit: int, count: int):
        super().__init__(f"state limit exceeded: {count} states > limit {limit}")
        self.limit = limit
        self.count = count


class OrdVector:
    """Strictly ascending vector of integers.

    Appending past the current maximum and popping the maximum are constant
    time, membership is a binary search, and union/intersection/difference
    are single merge passes over both operands.
    """

    __slots__ = ("_elems",)

    def __init__(self, elems: Iterable[int] = ()):
        xs = sorted(elems)
        out: list[int] = []
        for x in xs:
            if not out or out[-1] != x:
                out.append(x)
        self._elems = out

    @classmethod
    def _from_sorted(cls, elems: list[int]) -> "OrdVector":
        # caller guarantees strictly ascending order
        ov = cls.__new__(cls)
        ov._elems = elems
        return ov

    def push_back(self, x: int) -> None:
        """Insert ``x``; constant time when it exceeds the current maximum."""
        if not self._elems or x > self._elems[-1]:
            self._elems.append(x)
        elif x < self._elems[-1]:
            self.insert(x)
        # x == max: already present

    def pop_back(self) -> int:
        return self._elems.pop()

    def insert(self, x: int) -> None:
        elems = self._elems
        if not elems or x > elems[-1]:
            elems.append(x)
            return
        i = bisect.bisect_left(elems, x)
        if i == len(elems) or elems[i] != x:
            elems.insert(i, x)

    def remove(self, x: int) -> None:
        i = bisect.bisect_left(self._elems, x)
        if i < len(self._elems) and self._elems[i] == x:
            del self._elems[i]

    def union(self, other: "OrdVector") -> "OrdVector":
        a, b = self._elems, other._elems
        out: list[int] = []
        i = j = 0
        while i < len(a) and j < len(b):
            x, y = a[i], b[j]
            if x < y:
                out.append(x)
                i += 1
            elif y < x:
                out.append(y)
                j += 1
            else:
                out.append(x)
                i += 1
                j += 1
        out.extend(a[i:])
        out.extend(b[j:])
        return OrdVector._from_sorted(out)

    def intersection(self, other: "OrdVector") -> "OrdVector":
        a, b = self._elems, other._elems
        out: list[int] = []
        i = j = 0
        while i < len(a) and j < len(b):
            x, y = a[i], b[j]
            if x < y:
                i += 1
            elif y < x:
                j += 1
            else:
                out.append(x)
                i += 1
                j += 1
        return OrdVector._from_sorted(out)

    def difference(self, other: "OrdVector") -> "OrdVector":
        a, b = self._elems, other._elems
        out: list[int] = []
        i = j = 0
        while i < len(a) and j < len(b):
            x, y = a[i], b[j]
            if x < y:
                out.append(x)
                i += 1
            elif y < x:
                j += 1
            else:
                i += 1
                j += 1
        out.extend(a[i:])
        return OrdVector._from_sorted(out)

    def copy(self) -> "OrdVector":
        return OrdVector._from_sorted(list(self._elems))

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(self._elems)

    def last(self) -> int:
        return self._elems[-1]

    def __contains__(self, x: int) -> bool:
        i = bisect.bisect_left(self._elems, x)
        return i < len(self._elems) and self._elems[i] == x

    def __iter__(self) -> Iterator[int]:
        return iter(self._elems)

    def __len__(self) -> int:
        return len(self._elems)

    def __getitem__(self, i):
        return self._elems[i]

    def __eq__(self, other) -> bool:
        if isinstance(other, OrdVector):
            return self._elems == other._elems
        return NotImplemented

    def __repr__(self) -> str:
        return f"OrdVector({self._elems})"


class SparseSet:
    """Set of small non-negative integers with O(1) insert/remove/lookup.

    ``x`` is a member iff ``sparse[x] < size`` and ``dense[sparse[x]] == x``;
    iteration touches exactly ``size`` entries of the dense vector.
    """

    __slots__ = ("_dense", "_sparse", "_size")

    def __init__(self, members: Iterable[int] = ()):
        self._dense: list[int] = []
        self._sparse: list[int] = []
        self._size = 0
        for x in members:
            self.add(x)

    def __contains__(self, x: int) -> bool:
        if x < 0 or x >= len(self._sparse):
            return False
        i = self._sparse[x]
        return i < self._size and self._dense[i] == x

    def add(self, x: int) -> None:
        if x in self:
            return
        if x >= len(self._sparse):
            self._sparse.extend([0] * (x + 1 - len(self._sparse)))
        if self._size < len(self._dense):
            self._dense[self._size] = x
        else:
            self._dense.append(x)
        self._sparse[x] = self._size
        self._size += 1

    def discard(self, x: int) -> None:
        if x not in self:
            return
        i = self._sparse[x]
        last = self._dense[self._size - 1]
        self._dense[i] = last
        self._sparse[last] = i
        self._size -= 1

    def clear(self) -> None:
        self._size = 0

    def copy(self) -> "SparseSet":
        ss = SparseSet()
        ss._dense = self._dense[: self._size]
        ss._sparse = list(self._sparse)
        ss._size = self._size
        return ss

    def __iter__(self) -> Iterator[int]:
        return iter(self._dense[: self._size])

    def __len__(self) -> int:
        return self._size

    def __eq__(self, other) -> bool:
        if isinstance(other, SparseSet):
            return sorted(self) == sorted(other)
        return NotImplemented

    def __repr__(self) -> str:
        return f"SparseSet({sorted(self)})"


class Transition(NamedTuple):
    source: int
    symbol: int
    target: int


class SymbolPost:
    """Targets reachable from one state under one symbol; never empty."""

    __slots__ = ("symbol", "targets")

    def __init__(self, symbol: int, targets: Iterable[int] = ()):
        self.symbol = symbol
        self.targets = targets if isinstance(targets, OrdVector) else OrdVector(targets)

    def copy(self) -> "SymbolPost":
        return SymbolPost(self.symbol, self.targets.copy())

    def __eq__(self, other) -> bool:
        if isinstance(other, SymbolPost):
            return self.symbol == other.symbol and self.targets == other.targets
        return NotImplemented

    def __repr__(self) -> str:
        return f"SymbolPost({self.symbol}, {list(self.targets)})"


class StatePost:
    """Symbol-ordered vector of SymbolPosts for one source state.

    Symbols strictly ascend, so an epsilon post (epsilon being the largest
    symbol value) always sits at the end.
    """

    __slots__ = ("_posts",)

    def __init__(self, posts: Iterable[SymbolPost] = ()):
        self._posts = sorted(posts, key=lambda sp: sp.symbol)

    def find(self, symbol: int) -> SymbolPost | None:
        """Binary search for the post of ``symbol``."""
        posts = self._posts
        i = bisect.bisect_left(posts, symbol, key=lambda sp: sp.symbol)
        if i < len(posts) and posts[i].symbol == symbol:
            return posts[i]
        return None

    def targets(self, symbol: int) -> OrdVector:
        sp = self.find(symbol)
        return sp.targets if sp is not None else OrdVector()

    def add(self, symbol: int, target: int) -> None:
        posts = self._posts
        if posts and symbol > posts[-1].symbol:
            posts.append(SymbolPost(symbol, (target,)))
            return
        i = bisect.bisect_left(posts, symbol, key=lambda sp: sp.symbol)
        if i < len(posts) and posts[i].symbol == symbol:
            posts[i].targets.insert(target)
        else:
            posts.insert(i, SymbolPost(symbol, (target,)))

    def push_back(self, symbol: int, targets: Iterable[int]) -> None:
        """Append a whole post; constant time when ``symbol`` exceeds all present."""
        tv = targets if isinstance(targets, OrdVector) else OrdVector(targets)
        if len(tv) == 0:
            return
        posts = self._posts
        if not posts or symbol > posts[-1].symbol:
            posts.append(SymbolPost(symbol, tv))
            return
        # out-of-order fallback
        sp = self.find(symbol)
        if sp is None:
            i = bisect.bisect_left(posts, symbol, key=lambda p: p.symbol)
            posts.insert(i, SymbolPost(symbol, tv))
        else:
            sp.targets = sp.targets.union(tv)

    def remove(self, symbol: int, target: int) -> None:
        posts = self._posts
        i = bisect.bisect_left(posts, symbol, key=lambda sp: sp.symbol)
        if i < len(posts) and posts[i].symbol == symbol:
            posts[i].targets.remove(target)
            if len(posts[i].targets) == 0:
                del posts[i]

    def symbols(self) -> list[int]:
        return [sp.symbol for sp in self._posts]

    def copy(self) -> "StatePost":
        sp = StatePost()
        sp._posts = [p.copy() for p in self._posts]
        return sp

    def __iter__(self) -> Iterator[SymbolPost]:
        return iter(self._posts)

    def __len__(self) -> int:
        return len(self._posts)

    def __getitem__(self, i: int) -> SymbolPost:
        return self._posts[i]

    def __eq__(self, other) -> bool:
        if isinstance(other, StatePost):
            return self._posts == other._posts
        return NotImplemented

    def __repr__(self) -> str:
        return f"StatePost({self._posts})"


class Delta:
    """The transition relation: a state-indexed vector of StatePosts.

    Grows on demand so that the vector always covers every state mentioned
    as a source or a target.
    """

    __slots__ = ("_posts",)

    def __init__(self):
        self._posts: list[StatePost] = []

    def num_states(self) -> int:
        return len(self._posts)

    def grow(self, n: int) -> None:
        while len(self._posts) < n:
            self._posts.append(StatePost())

    def add(self, source: int, symbol: int, target: int) -> None:
        self.grow(max(source, target) + 1)
        self._posts[source].add(symbol, target)

    def push_back_post(self, source: int, symbol: int, targets: Iterable[int]) -> None:
        self.grow(source + 1)
        tv = targets if isinstance(targets, OrdVector) else OrdVector(targets)
        if len(tv) == 0:
            return
        self.grow(tv.last() + 1)
        self._posts[source].push_back(symbol, tv)

    def remove(self, source: int, symbol: int, target: int) -> None:
        if source < len(self._posts):
            self._posts[source].remove(symbol, target)

    def state_post(self, q: int) -> StatePost:
        if 0 <= q < len(self._posts):
            return self._posts[q]
        return StatePost()

    def transitions(self) -> Iterator[Transition]:
        """All transitions, ordered by (source, symbol, target)."""
        for q, post in enumerate(self._posts):
            for sp in post:
                for t in sp.targets:
                    yield Transition(q, sp.symbol, t)

    def num_transitions(self) -> int:
        return sum(len(sp.targets) for post in self._posts for sp in post)

    def copy(self) -> "Delta":
        d = Delta()
        d._posts = [post.copy() for post in self._posts]
        return d

    def __eq__(self, other) -> bool:
        if isinstance(other, Delta):
            return self._posts == other._posts
        return NotImplemented

    def __repr__(self) -> str:
        return f"Delta({self._posts})"


class Alphabet:
    """Bijection between symbol names and symbol numbers."""

    def __init__(self):
        self._by_name: dict[str, int] = {}
        self._by_symbol: dict[int, str] = {}
        self.next_symbol = 0

    @classmethod
    def from_symbol_map(cls, mapping: dict[str, int]) -> "Alphabet":
        alpha = cls()
        for name, symbol in mapping.items():
            if symbol in alpha._by_symbol:
                raise AutomataError(
                    f"symbol map is not a bijection: {symbol} already named "
                    f"{alpha._by_symbol[symbol]!r}"
                )
            alpha._by_name[name] = symbol
            alpha._by_symbol[symbol] = name
            alpha.next_symbol = max(alpha.next_symbol, symbol + 1)
        return alpha

    def translate(self, name: str) -> int:
        """Return the symbol for ``name``, allocating a fresh one if new."""
        symbol = self._by_name.get(name)
        if symbol is None:
            symbol = self.next_symbol
            self.next_symbol += 1
            self._by_name[name] = symbol
            self._by_symbol[symbol] = name
        return symbol

    def lookup(self, name: str) -> int:
        return self._by_name[name]

    def name_of(self, symbol: int) -> str:
        return self._by_symbol[symbol]

    def has_symbol(self, symbol: int) -> bool:
        return symbol in self._by_symbol

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def symbols(self) -> list[int]:
        return sorted(self._by_symbol)

    def __len__(self) -> int:
        return len(self._by_name)

    def __repr__(self) -> str:
        return f"Alphabet({self._by_name})"


class Nfa:
    """A nondeterministic finite automaton: Delta plus initial/final sets.

    ``num_epsilons`` declares how many of the topmost symbol values act as
    epsilon-like symbols for this automaton (default 1: just EPSILON).
    """

    __slots__ = ("delta", "initial", "final", "alphabet", "num_epsilons")

    def __init__(
        self,
        num_states: int = 0,
        initial: Iterable[int] = (),
        final: Iterable[int] = (),
        alphabet: Alphabet | None = None,
        num_epsilons: int = 1,
    ):
        if not 0 <= num_epsilons <= MAX_EPSILONS:
            raise AutomataError(f"num_epsilons must be in 0..{MAX_EPSILONS}")
        self.delta = Delta()
        self.delta.grow(num_states)
        self.initial = SparseSet(initial)
        self.final = SparseSet(final)
        self.alphabet = alphabet
        self.num_epsilons = num_epsilons

    def num_states(self) -> int:
        n = self.delta.num_states()
        for q in self.initial:
            n = max(n, q + 1)
        for q in self.final:
            n = max(n, q + 1)
        return n

    def add_state(self) -> int:
        q = self.num_states()
        self.delta.grow(q + 1)
        return q

    def add_transition(self, source, symbol=None, target=None) -> None:
        if isinstance(source, Transition):
            source, symbol, target = source
        self.delta.add(source, symbol, target)

    def remove_transition(self, source, symbol=None, target=None) -> None:
        if isinstance(source, Transition):
            source, symbol, target = source
        self.delta.remove(source, symbol, target)

    def state_post(self, q: int) -> StatePost:
        return self.delta.state_post(q)

    def symbol_post(self, q: int, symbol: int) -> OrdVector:
        return self.delta.state_post(q).targets(symbol)

    def transitions(self) -> Iterator[Transition]:
        return self.delta.transitions()

    def num_transitions(self) -> int:
        return self.delta.num_transitions()

    def epsilon_symbols(self) -> frozenset[int]:
        return frozenset(EPSILON - i for i in range(self.num_epsilons))

    def has_epsilon_transitions(self) -> bool:
        eps = self.epsilon_symbols()
        if not eps:
            return False
        floor = min(eps)
        for q in range(self.delta.num_states()):
            post = self.delta.state_post(q)
            if len(post) and post[len(post) - 1].symbol >= floor:
                return True
        return False

    def used_symbols(self) -> set[int]:
        out: set[int] = set()
        for q in range(self.delta.num_states()):
            out.update(self.delta.state_post(q).symbols())
        return out

    def copy(self) -> "Nfa":
        nfa = Nfa(alphabet=self.alphabet, num_epsilons=self.num_epsilons)
        nfa.delta = self.delta.copy()
        nfa.initial = self.initial.copy()
        nfa.final = self.final.copy()
        return nfa

    def __repr__(self) -> str:
        return (
            f"Nfa(states={self.num_states()}, transitions={self.num_transitions()}, "
            f"initial={sorted(self.initial)}, final={sorted(self.final)})"
        )


def synchronized_iterator(
    posts: list[StatePost], require_all: bool = False
) -> Iterator[tuple[int, list[OrdVector]]]:
    """Merge-iterate several StatePosts in ascending symbol order.

    Yields ``(symbol, target_vectors)`` for every symbol present in at least
    one of the posts, with the target vectors of exactly the posts containing
    it. With ``require_all`` only symbols present in every post are yielded
    (the product-construction variant). Each underlying vector is traversed
    once in total.
    """
    k = len(posts)
    if k == 0 or (require_all and any(len(p) == 0 for p in posts)):
        return
    heap = [(p[0].symbol, i, 0) for i, p in enumerate(posts) if len(p) > 0]
    heapq.heapify(heap)
    while heap:
        symbol = heap[0][0]
        group: list[tuple[int, int]] = []
        while heap and heap[0][0] == symbol:
            _, i, pos = heapq.heappop(heap)
            group.append((i, pos))
        if not require_all or len(group) == k:
            yield symbol, [posts[i][pos].targets for i, pos in group]
        exhausted = False
        for i, pos in group:
            if pos + 1 < len(posts[i]):
                heapq.heappush(heap, (posts[i][pos + 1].symbol, i, pos + 1))
            else:
                exhausted = True
        if require_all and exhausted:
            return
