from math import ceil, log2

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from setcmp.bitset import all_masks
from setcmp.errors import InvariantError
from setcmp.oracle import ComparisonOracle, locate, oracle_sort
from setcmp.setfn import Xos, gen_coverage


def modular(weights):
    return Xos(len(weights), trees=(tuple(float(w) for w in weights),))


class TestCompare:
    def test_cov3_examples(self, cov3):
        o = ComparisonOracle(cov3)
        assert o.compare(0b001, 0b100) == 1  # 1 <= 3
        assert o.compare(0b100, 0b001) == 0  # 3 > 1

    def test_reflexive(self, cov3):
        o = ComparisonOracle(cov3)
        for m in all_masks(3):
            assert o.compare(m, m) == 1

    def test_counter_increments_per_call(self, cov3):
        o = ComparisonOracle(cov3)
        assert o.query_count == 0
        o.compare(0, 1)
        o.compare(1, 0)
        o.compare(1, 1)
        assert o.query_count == 3

    def test_tolerance_ties(self):
        fn = modular([1.0, 1.0 + 1e-12])
        o = ComparisonOracle(fn)
        # values differ by 1e-12 relative: both directions answer 1
        assert o.compare(0b01, 0b10) == 1
        assert o.compare(0b10, 0b01) == 1


class TestOracleSort:
    def test_cov3_example(self, cov3):
        o = ComparisonOracle(cov3)
        items = [0b100, 0b001, 0b011]  # values 3, 1, 2
        perm = oracle_sort(o, items)
        assert [items[i] for i in perm] == [0b001, 0b011, 0b100]

    def test_single_element(self, cov3):
        o = ComparisonOracle(cov3)
        assert oracle_sort(o, [0b010]) == [0]

    def test_all_equal_is_identity(self):
        fn = modular([1.0, 1.0, 1.0])
        o = ComparisonOracle(fn)
        singletons = [0b001, 0b010, 0b100]
        assert oracle_sort(o, singletons) == [0, 1, 2]

    @given(st.lists(st.integers(min_value=0, max_value=255), min_size=1, max_size=40),
           st.integers(min_value=0, max_value=5))
    def test_sorted_adjacent_compare_and_ground_truth(self, masks, seed):
        fn = gen_coverage(8, 12, 0.4, seed=seed)
        o = ComparisonOracle(fn)
        perm = oracle_sort(o, masks)
        assert sorted(perm) == list(range(len(masks)))
        out = [masks[i] for i in perm]
        for a, b in zip(out, out[1:]):
            assert o.compare(a, b) == 1  # checkable without ground truth
        vals = [fn.value(m) for m in out]
        assert vals == sorted(vals)

    @given(st.lists(st.integers(min_value=0, max_value=127), min_size=1, max_size=64))
    def test_query_budget(self, masks):
        fn = gen_coverage(7, 10, 0.4, seed=0)
        o = ComparisonOracle(fn)
        oracle_sort(o, masks)
        m = len(masks)
        assert o.query_count <= m * ceil(log2(m)) + m if m > 1 else o.query_count == 0

    def test_stability_on_ties(self):
        fn = modular([1.0, 1.0, 1.0, 2.0])
        o = ComparisonOracle(fn)
        # three tied singletons followed by a smaller empty set
        items = [0b0001, 0b0010, 0b0100, 0b0000]
        perm = oracle_sort(o, items)
        assert perm == [3, 0, 1, 2]


class TestLocate:
    def test_interval_examples(self):
        fn = modular([1.0, 2.0, 4.0])
        o = ComparisonOracle(fn)
        landmarks = [0b001, 0b010, 0b100]  # values 1, 2, 4
        # value 3 = {0,1} sits between the 2nd and 3rd landmark
        assert locate(o, 0b011, landmarks) == 2
        # value 0 below everything
        assert locate(o, 0b000, landmarks) == 0
        # value above everything
        assert locate(o, 0b111, landmarks) == 3
        # tie with a landmark lands on that landmark's interval
        assert locate(o, 0b010, landmarks) == 2

    @given(st.integers(min_value=0, max_value=2**10 - 1), st.integers(min_value=0, max_value=3))
    def test_matches_exhaustive_count(self, query, seed):
        fn = gen_coverage(10, 15, 0.3, seed=seed)
        o = ComparisonOracle(fn)
        pool = [int(m) for m in np.random.default_rng(seed).integers(0, 1 << 10, size=17)]
        perm = oracle_sort(o, pool)
        landmarks = [pool[i] for i in perm]
        t = locate(o, query, landmarks)
        exhaustive = sum(o.compare(lm, query) for lm in landmarks)
        assert t == exhaustive

    def test_locate_query_budget(self):
        fn = gen_coverage(10, 15, 0.3, seed=1)
        o = ComparisonOracle(fn)
        pool = [int(m) for m in np.random.default_rng(0).integers(0, 1 << 10, size=64)]
        perm = oracle_sort(o, pool)
        landmarks = [pool[i] for i in perm]
        before = o.query_count
        locate(o, 0b1010101010, landmarks)
        assert o.query_count - before <= ceil(log2(64)) + 1

    def test_audit_rejects_unsorted(self):
        fn = modular([1.0, 2.0, 4.0])
        o = ComparisonOracle(fn)
        with pytest.raises(InvariantError):
            locate(o, 0, [0b100, 0b001], audit=True)
