import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import (
    COV3_ITEMS,
    COV3_WEIGHTS,
    coverage_brute,
    cut_brute,
    fourier_brute,
    mask_to_set,
)
from setcmp.bitset import all_masks, popcount
from setcmp.errors import InputError
from setcmp.setfn import (
    Coverage,
    FourierSparse,
    Interaction,
    KDnf,
    Truncate,
    Xos,
    from_json,
    fourier_from_cut,
    gen_coverage,
    gen_curvature_shift,
    gen_cut,
    gen_disjunction,
    gen_interaction,
    gen_kdnf,
    gen_modular,
    gen_xos,
    path_cut,
    to_json,
    value_table,
    verify_class,
)


class TestEval:
    def test_cov3_matches_brute_force(self, cov3, cov3_table):
        for m in all_masks(3):
            assert cov3.value(m) == cov3_table[m]

    def test_cov3_spot_values(self, cov3):
        assert cov3.value(0b100) == 3.0  # the wide item alone covers everything
        assert cov3.value(0) == 0.0

    def test_p3_cut_matches_brute_force(self, p3):
        for m in all_masks(3):
            assert p3.value(m) == cut_brute([(0, 1, 1.0), (1, 2, 1.0)], mask_to_set(m))

    def test_p3_middle_vertex_cuts_both_edges(self, p3):
        assert p3.value(0b010) == 2.0

    def test_fourier_p3_representation(self, p3):
        # {} coeff 1, {0,1} and {1,2} coeff -1/2: equals the path cut.
        fs = FourierSparse(3, support=(0, 0b011, 0b110), coeffs=(1.0, -0.5, -0.5))
        assert fs.value(0b010) == 2.0
        support_sets = [frozenset(), frozenset({0, 1}), frozenset({1, 2})]
        for m in all_masks(3):
            brute = fourier_brute(support_sets, [1.0, -0.5, -0.5], mask_to_set(m))
            assert fs.value(m) == pytest.approx(brute)
            assert fs.value(m) == pytest.approx(p3.value(m))

    def test_mask_too_wide_rejected(self, cov3):
        with pytest.raises(InputError):
            cov3.value(0b1000)

    def test_value_table_agrees_with_pointwise(self, cov3, p3):
        for fn in (cov3, p3):
            table = value_table(fn)
            for m in all_masks(fn.n):
                assert table[m] == pytest.approx(fn.value(m))


class TestGenerators:
    def test_coverage_single_element_universe(self):
        fn = gen_coverage(3, 1, 1.0, seed=5)
        w = fn.weights[0]
        for m in range(1, 8):
            assert fn.value(m) == pytest.approx(w)
        assert fn.value(0) == 0.0

    def test_coverage_deterministic_under_seed(self):
        a = gen_coverage(6, 20, 0.3, seed=42)
        b = gen_coverage(6, 20, 0.3, seed=42)
        assert a == b
        c = gen_coverage(6, 20, 0.3, seed=43)
        assert a != c

    def test_coverage_rejects_zero_density(self):
        with pytest.raises(InputError):
            gen_coverage(4, 10, 0.0, seed=1)

    def test_coverage_weights_positive(self):
        fn = gen_coverage(5, 30, 0.5, seed=9)
        assert all(w > 0 for w in fn.weights)

    def test_coverage_submodular_exhaustive(self):
        fn = gen_coverage(12, 40, 0.2, seed=7)
        assert verify_class(fn, "monotone").ok
        assert verify_class(fn, "submodular").ok

    def test_normalized_coverage_range(self):
        fn = gen_coverage(8, 25, 0.3, seed=3, normalize=True)
        table = value_table(fn)
        assert table.max() == pytest.approx(1.0)
        assert table.min() >= 0.0

    def test_xos_subadditive(self):
        fn = gen_xos(8, 4, seed=11)
        assert verify_class(fn, "subadditive").ok
        assert verify_class(fn, "monotone").ok

    def test_modular_is_linear(self):
        fn = gen_modular(6, seed=2)
        w = np.array(fn.trees[0])
        table = value_table(fn)
        for m in all_masks(6):
            expect = sum(w[i] for i in range(6) if (m >> i) & 1)
            assert table[m] == pytest.approx(expect)

    def test_cut_values_match_brute(self):
        fn = gen_cut(7, 0.5, seed=3)
        for m in (0, 0b1010101, 0b1111111, 0b0000111):
            assert fn.value(m) == cut_brute(list(fn.edges), mask_to_set(m))

    def test_interaction_degree_one_is_modular(self):
        fn = gen_interaction(10, 1, 6, seed=4)
        table = value_table(fn)
        # marginal of adding element i must not depend on the base set
        for i in range(10):
            bit = 1 << i
            marginals = {
                round(table[m | bit] - table[m], 9)
                for m in all_masks(10)
                if not m & bit
            }
            assert len(marginals) == 1

    def test_kdnf_max_semantics(self):
        fn = KDnf(3, k=2, terms=((2, 0b001), (1, 0b010)))
        assert fn.value(0b001) == 2.0
        assert fn.value(0b010) == 1.0
        assert fn.value(0b011) == 2.0
        assert fn.value(0b100) == 0.0

    def test_gen_kdnf_range(self):
        fn = gen_kdnf(8, 2, 6, seed=13)
        table = value_table(fn)
        assert set(np.unique(table)) <= {0.0, 1.0, 2.0}

    def test_disjunction_boolean(self):
        fn = gen_disjunction(8, seed=5)
        table = value_table(fn)
        assert set(np.unique(table)) <= {0.0, 1.0}
        assert fn.value(0) == 0.0


class TestCurvatureShift:
    def test_kappa_zero_is_cardinality(self, cov3):
        fn = gen_curvature_shift(cov3, 0.0)
        for m in all_masks(3):
            assert fn.value(m) == popcount(m)

    def test_kappa_one_is_base(self, cov3):
        fn = gen_curvature_shift(cov3, 1.0)
        for m in all_masks(3):
            assert fn.value(m) == cov3.value(m)

    def test_kappa_half_cov3(self, cov3):
        fn = gen_curvature_shift(cov3, 0.5)
        assert fn.value(0b100) == pytest.approx(0.5 * 3 + 0.5 * 1)

    def test_kappa_out_of_range(self, cov3):
        with pytest.raises(InputError):
            gen_curvature_shift(cov3, 1.5)

    def test_preserves_submodularity(self):
        base = gen_coverage(8, 20, 0.3, seed=21)
        fn = gen_curvature_shift(base, 0.4)
        assert verify_class(fn, "submodular").ok
        assert verify_class(fn, "monotone").ok


class TestVerifyClass:
    def test_squared_cardinality_not_subadditive(self):
        # |S|^2 fails at S={0}, S'={1}: 4 > 1 + 1.
        fn = Interaction(
            3, degree=2, terms=tuple((m, 1.0) for m in (0b001, 0b010, 0b100))
        )

        class Sq:
            n = 3
            kind = "sq"

            def value(self, m):
                return float(popcount(m) ** 2)

        res = verify_class(Sq(), "subadditive")
        assert not res.ok
        s, t = res.witness
        assert popcount(s | t) ** 2 > popcount(s) ** 2 + popcount(t) ** 2
        del fn

    def test_cardinality_is_monotone(self):
        class Card:
            n = 4
            kind = "card"

            def value(self, m):
                return float(popcount(m))

        assert verify_class(Card(), "monotone").ok
        assert verify_class(Card(), "submodular").ok
        assert verify_class(Card(), "subadditive").ok

    def test_cut_not_monotone_but_submodular(self, p3):
        assert not verify_class(p3, "monotone").ok
        assert verify_class(p3, "submodular").ok

    def test_refuses_large_n_exhaustive(self):
        fn = gen_coverage(16, 30, 0.2, seed=1)
        with pytest.raises(InputError):
            verify_class(fn, "submodular")
        assert verify_class(fn, "submodular", mode="sampled", trials=300, seed=2).ok

    def test_truncate_preserves_monotone_submodular(self):
        base = gen_coverage(8, 15, 0.3, seed=8, unit_weights=True)
        fn = Truncate(8, cap=2.0, base=base)
        assert verify_class(fn, "monotone").ok
        assert verify_class(fn, "submodular").ok


class TestFourierFromCut:
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_cut_everywhere(self, seed):
        cut = gen_cut(10, 0.4, seed=seed)
        fs = fourier_from_cut(cut)
        assert np.allclose(value_table(fs), value_table(cut))

    def test_support_shape(self):
        fs = fourier_from_cut(path_cut(4))
        assert fs.support[0] == 0
        assert all(popcount(t) == 2 for t in fs.support[1:])

    def test_p3_coefficients(self, p3):
        fs = fourier_from_cut(p3)
        assert fs.support == (0, 0b011, 0b110)
        assert fs.coeffs == (1.0, -0.5, -0.5)


class TestSerialization:
    @pytest.mark.parametrize(
        "fn_factory",
        [
            lambda: gen_coverage(6, 12, 0.4, seed=1),
            lambda: gen_xos(5, 3, seed=2),
            lambda: gen_cut(6, 0.5, seed=3),
            lambda: fourier_from_cut(path_cut(4)),
            lambda: gen_interaction(6, 2, 5, seed=4),
            lambda: gen_disjunction(7, seed=5),
            lambda: gen_kdnf(6, 2, 4, seed=6),
            lambda: gen_curvature_shift(gen_coverage(5, 10, 0.5, seed=7), 0.3),
            lambda: Truncate(5, cap=2.0, base=gen_coverage(5, 10, 0.5, seed=7, unit_weights=True)),
        ],
    )
    def test_roundtrip(self, fn_factory):
        fn = fn_factory()
        back = from_json(to_json(fn))
        assert back == fn
        assert np.allclose(value_table(back), value_table(fn))

    def test_json_deterministic(self):
        fn = gen_coverage(6, 12, 0.4, seed=1)
        assert to_json(fn) == to_json(gen_coverage(6, 12, 0.4, seed=1))


class TestValidation:
    def test_coverage_needs_n_items(self):
        with pytest.raises(InputError):
            Coverage(3, universe_size=2, item_masks=(0b01,), weights=(1.0, 1.0))

    def test_negative_weight_rejected(self):
        with pytest.raises(InputError):
            Coverage(1, universe_size=1, item_masks=(0b1,), weights=(-1.0,))

    def test_interaction_empty_term_rejected(self):
        with pytest.raises(InputError):
            Interaction(3, degree=2, terms=((0, 1.0),))

    def test_fourier_duplicate_support_rejected(self):
        with pytest.raises(InputError):
            FourierSparse(3, support=(1, 1), coeffs=(1.0, 2.0))

    def test_xos_negative_weight_rejected(self):
        with pytest.raises(InputError):
            Xos(2, trees=((1.0, -0.5),))


@given(st.integers(min_value=0, max_value=2**10 - 1), st.integers(min_value=0, max_value=2**10 - 1))
def test_xos_pairwise_subadditive(a, b):
    fn = gen_xos(10, 3, seed=99)
    assert fn.value(a | b) <= fn.value(a) + fn.value(b) + 1e-12
