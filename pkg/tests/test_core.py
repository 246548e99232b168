import random

import pytest

from nfakit import EPSILON, Alphabet, AutomataError, Nfa, OrdVector, SparseSet
from nfakit.core import StatePost, SymbolPost, Transition, synchronized_iterator

from helpers import assert_delta_invariants, random_nfa, triples


class TestOrdVector:
    def test_construction_sorts_and_dedups(self):
        ov = OrdVector([3, 1, 2, 3, 1])
        assert list(ov) == [1, 2, 3]

    def test_push_back_and_pop_back(self):
        ov = OrdVector()
        for x in (1, 4, 9):
            ov.push_back(x)
        assert list(ov) == [1, 4, 9]
        assert ov.pop_back() == 9
        assert list(ov) == [1, 4]

    def test_push_back_out_of_order_falls_back(self):
        ov = OrdVector([5])
        ov.push_back(2)
        ov.push_back(5)
        assert list(ov) == [2, 5]

    def test_membership_binary_search(self):
        ov = OrdVector(range(0, 100, 3))
        for x in range(100):
            assert (x in ov) == (x % 3 == 0)

    def test_insert_remove(self):
        ov = OrdVector([1, 5])
        ov.insert(3)
        ov.insert(3)
        assert list(ov) == [1, 3, 5]
        ov.remove(3)
        ov.remove(42)  # absent: no-op
        assert list(ov) == [1, 5]

    def test_merge_ops_against_set_oracle(self):
        rng = random.Random(1)
        for _ in range(300):
            xs = {rng.randrange(40) for _ in range(rng.randrange(20))}
            ys = {rng.randrange(40) for _ in range(rng.randrange(20))}
            a, b = OrdVector(xs), OrdVector(ys)
            assert list(a.union(b)) == sorted(xs | ys)
            assert list(a.intersection(b)) == sorted(xs & ys)
            assert list(a.difference(b)) == sorted(xs - ys)

    def test_random_insertion_order_stays_sorted(self):
        rng = random.Random(2)
        for _ in range(100):
            ov = OrdVector()
            ref = set()
            for _ in range(30):
                x = rng.randrange(20)
                ov.insert(x)
                ref.add(x)
            assert list(ov) == sorted(ref)


class TestSparseSet:
    def test_model_based_against_set(self):
        rng = random.Random(3)
        ss = SparseSet()
        ref: set[int] = set()
        for _ in range(10_000):
            x = rng.randrange(60)
            op = rng.random()
            if op < 0.5:
                ss.add(x)
                ref.add(x)
            elif op < 0.9:
                ss.discard(x)
                ref.discard(x)
            else:
                assert (x in ss) == (x in ref)
            assert len(ss) == len(ref)
        assert sorted(ss) == sorted(ref)

    def test_iteration_visits_size_elements(self):
        ss = SparseSet([5, 1, 9])
        ss.discard(1)
        assert len(list(ss)) == len(ss) == 2

    def test_copy_is_independent(self):
        ss = SparseSet([1, 2])
        cp = ss.copy()
        cp.add(7)
        assert 7 not in ss


class TestDelta:
    def test_single_insertion(self):
        nfa = Nfa()
        nfa.add_transition(0, 5, 1)
        assert triples(nfa) == {(0, 5, 1)}
        assert nfa.num_states() == 2

    def test_add_idempotent(self):
        nfa = Nfa()
        nfa.add_transition(Transition(0, 5, 1))
        nfa.add_transition(0, 5, 1)
        assert list(nfa.transitions()) == [(0, 5, 1)]

    def test_targets_sorted_regardless_of_insertion_order(self):
        nfa = Nfa()
        nfa.add_transition(0, 5, 2)
        nfa.add_transition(0, 5, 1)
        assert list(nfa.symbol_post(0, 5)) == [1, 2]
        rng = random.Random(4)
        for _ in range(50):
            n2 = Nfa()
            targets = rng.sample(range(30), 10)
            for t in targets:
                n2.add_transition(0, 1, t)
            assert list(n2.symbol_post(0, 1)) == sorted(targets)
            assert_delta_invariants(n2)

    def test_remove_last_target_drops_symbol_post(self):
        nfa = Nfa()
        nfa.add_transition(0, 5, 1)
        nfa.remove_transition(0, 5, 1)
        assert len(nfa.state_post(0)) == 0
        assert nfa.num_states() == 2  # states are not removed

    def test_remove_absent_is_noop(self):
        nfa = Nfa()
        nfa.add_transition(0, 5, 1)
        nfa.remove_transition(0, 7, 1)
        nfa.remove_transition(3, 5, 1)
        assert triples(nfa) == {(0, 5, 1)}

    def test_model_based_against_triple_set(self):
        rng = random.Random(5)
        nfa = Nfa()
        ref: set[tuple[int, int, int]] = set()
        for _ in range(10_000):
            s, a, t = rng.randrange(8), rng.randrange(4), rng.randrange(8)
            if rng.random() < 0.6:
                nfa.add_transition(s, a, t)
                ref.add((s, a, t))
            else:
                nfa.remove_transition(s, a, t)
                ref.discard((s, a, t))
        assert triples(nfa) == ref
        assert_delta_invariants(nfa)

    def test_transition_stream_sorted(self):
        rng = random.Random(6)
        nfa = random_nfa(rng, max_states=8)
        stream = list(nfa.transitions())
        assert stream == sorted(stream)
        assert len(stream) == nfa.num_transitions()

    def test_state_post_out_of_range_is_empty_view(self):
        nfa = Nfa()
        nfa.add_transition(0, 1, 0)
        assert len(nfa.state_post(99)) == 0
        assert list(nfa.symbol_post(99, 1)) == []

    def test_state_post_matches_triple_oracle(self):
        rng = random.Random(7)
        for _ in range(50):
            nfa = random_nfa(rng, max_states=6)
            ref = triples(nfa)
            for q in range(nfa.num_states()):
                seen = {
                    (q, sp.symbol, t)
                    for sp in nfa.state_post(q)
                    for t in sp.targets
                }
                assert seen == {tr for tr in ref if tr[0] == q}


class TestEpsilon:
    def test_epsilon_is_max_symbol(self):
        assert EPSILON == 2**32 - 1

    def test_epsilon_post_is_last(self):
        nfa = Nfa()
        nfa.add_transition(0, EPSILON, 1)
        nfa.add_transition(0, 3, 1)
        nfa.add_transition(0, 100, 0)
        assert nfa.state_post(0).symbols()[-1] == EPSILON
        assert_delta_invariants(nfa)

    def test_epsilon_like_symbols(self):
        nfa = Nfa(num_epsilons=3)
        assert nfa.epsilon_symbols() == {EPSILON, EPSILON - 1, EPSILON - 2}
        nfa.add_transition(0, EPSILON - 2, 1)
        assert nfa.has_epsilon_transitions()

    def test_num_epsilons_bounds(self):
        with pytest.raises(AutomataError):
            Nfa(num_epsilons=65)


class TestSynchronizedIterator:
    @staticmethod
    def _post(pairs):
        sp = StatePost()
        for symbol, targets in pairs:
            sp.push_back(symbol, targets)
        return sp

    def test_single_view_identity(self):
        post = self._post([(1, [5]), (3, [2, 7])])
        got = [(s, [list(v) for v in vs]) for s, vs in synchronized_iterator([post])]
        assert got == [(1, [[5]]), (3, [[2, 7]])]

    def test_union_mode_interleaves_disjoint_symbols(self):
        p1 = self._post([(1, [0]), (5, [1])])
        p2 = self._post([(2, [2]), (4, [3])])
        got = [s for s, _ in synchronized_iterator([p1, p2])]
        assert got == [1, 2, 4, 5]

    def test_union_mode_against_merge_oracle(self):
        rng = random.Random(8)
        for _ in range(100):
            posts = []
            ref: dict[int, list[list[int]]] = {}
            for _ in range(rng.randint(0, 4)):
                symbols = sorted(rng.sample(range(10), rng.randint(0, 6)))
                pairs = [(a, sorted(rng.sample(range(8), rng.randint(1, 3)))) for a in symbols]
                posts.append(self._post(pairs))
                for a, ts in pairs:
                    ref.setdefault(a, []).append(ts)
            got = {
                s: sorted(tuple(v) for v in vs)
                for s, vs in synchronized_iterator(posts)
            }
            want = {s: sorted(tuple(v) for v in vs) for s, vs in ref.items()}
            assert got == want

    def test_all_present_mode_is_symbol_intersection(self):
        rng = random.Random(9)
        for _ in range(100):
            k = rng.randint(1, 4)
            symsets = [set(rng.sample(range(8), rng.randint(0, 5))) for _ in range(k)]
            posts = [
                self._post([(a, [0]) for a in sorted(ss)]) for ss in symsets
            ]
            got = [s for s, vs in synchronized_iterator(posts, require_all=True)]
            want = sorted(set.intersection(*symsets)) if symsets else []
            assert got == want
            for s, vs in synchronized_iterator(posts, require_all=True):
                assert len(vs) == k


class TestAlphabet:
    def test_translate_interns_densely(self):
        alpha = Alphabet()
        assert alpha.translate("a") == 0
        assert alpha.translate("b") == 1
        assert alpha.translate("a") == 0
        assert alpha.name_of(1) == "b"

    def test_from_symbol_map(self):
        alpha = Alphabet.from_symbol_map({"a": 97, "b": 98})
        assert alpha.lookup("a") == 97
        assert alpha.translate("c") == 99

    def test_bijectivity_enforced(self):
        with pytest.raises(AutomataError):
            Alphabet.from_symbol_map({"a": 1, "b": 1})


class TestSymbolPost:
    def test_equality(self):
        assert SymbolPost(1, [2, 3]) == SymbolPost(1, [3, 2])
        assert SymbolPost(1, [2]) != SymbolPost(2, [2])
