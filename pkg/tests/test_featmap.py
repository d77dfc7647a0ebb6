from math import comb, sqrt, log

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from setcmp.bitset import all_masks, bits_matrix, elements, masks_up_to_size, popcount
from setcmp.errors import CapacityError, InputError
from setcmp.featmap import (
    characteristic_map,
    embed,
    embed_many,
    intersect_map,
    map_from_descriptor,
    monomial_map,
    or_map,
    pair_support,
    parity_map,
    select_map,
)
from setcmp.setfn import (
    fourier_from_cut,
    gen_coverage,
    gen_cut,
    gen_interaction,
    value_table,
)


class TestDimensions:
    def test_characteristic(self):
        assert characteristic_map(7).dim == 7

    def test_monomial_includes_empty(self):
        fm = monomial_map(5, 2)
        assert fm.dim == 1 + 5 + comb(5, 2)

    def test_intersect_excludes_empty(self):
        fm = intersect_map(5, 2)
        assert fm.dim == 5 + comb(5, 2)

    def test_parity_by_degree_and_support(self):
        assert parity_map(6, degree=2).dim == 1 + 6 + comb(6, 2)
        assert parity_map(6, support=[0, 0b11, 0b101]).dim == 3

    def test_or_dim(self):
        assert or_map(4).dim == 15

    def test_enumeration_is_card_then_numeric(self):
        fm = monomial_map(3, 3)
        assert fm.feature_masks == masks_up_to_size(3, 3)


class TestGuards:
    def test_or_map_guard(self):
        with pytest.raises(CapacityError) as exc:
            or_map(17)
        assert "131071" in str(exc.value)  # names the would-be dimension

    def test_monomial_guard_names_dim(self):
        with pytest.raises(CapacityError) as exc:
            monomial_map(200, 4)
        assert str(comb(200, 4) + comb(200, 3) + comb(200, 2) + 201) in str(exc.value)

    def test_degree_beyond_n(self):
        with pytest.raises(InputError):
            intersect_map(4, 5)

    def test_parity_exactly_one_spec(self):
        with pytest.raises(InputError):
            parity_map(4)
        with pytest.raises(InputError):
            parity_map(4, degree=1, support=[1])


class TestEmbed:
    def test_parity_of_empty_set_is_all_ones(self):
        for fm in (parity_map(5, degree=2), parity_map(5, support=[0, 0b11, 0b10101])):
            assert np.array_equal(embed(fm, 0), np.ones(fm.dim))

    def test_parity_example(self):
        fm = parity_map(2, support=[0b01, 0b11])
        assert np.array_equal(embed(fm, 0b01), np.array([-1.0, -1.0]))

    def test_monomial_containment(self):
        fm = monomial_map(3, 2)
        x = embed(fm, 0b101)
        expect = {t: 1.0 if (t & 0b101) == t else 0.0 for t in fm.feature_masks}
        assert np.array_equal(x, np.array([expect[t] for t in fm.feature_masks]))

    def test_intersect_singleton(self):
        fm = intersect_map(3, 1)
        assert np.array_equal(embed(fm, 0b010), np.array([0.0, 1.0, 0.0]))

    def test_characteristic_is_indicator(self):
        fm = characteristic_map(4)
        assert np.array_equal(embed(fm, 0b1010), np.array([0.0, 1.0, 0.0, 1.0]))

    def test_embed_many_matches_embed(self):
        fm = parity_map(6, degree=3)
        masks = [0, 5, 63, 17]
        many = embed_many(fm, masks)
        for row, m in zip(many, masks):
            assert np.array_equal(row, embed(fm, m))

    @given(st.integers(min_value=0, max_value=2**6 - 1))
    def test_value_ranges(self, m):
        assert set(np.unique(embed(characteristic_map(6), m))) <= {0.0, 1.0}
        assert set(np.unique(embed(monomial_map(6, 2), m))) <= {0.0, 1.0}
        assert set(np.unique(embed(intersect_map(6, 2), m))) <= {0.0, 1.0}
        assert set(np.unique(embed(or_map(6), m))) <= {0.0, 1.0}
        assert set(np.unique(embed(parity_map(6, degree=2), m))) <= {-1.0, 1.0}

    def test_wide_mask_rejected(self):
        with pytest.raises(InputError):
            embed(characteristic_map(3), 0b1000)


class TestSelectMap:
    def test_submodular_table(self):
        fm, alpha = select_map("submodular", 16)
        assert fm.kind == "characteristic" and alpha == 4.0

    def test_interaction_no_separation(self):
        fm, alpha = select_map("interaction", 8, k=2)
        assert fm.kind == "intersect" and fm.degree == 2 and alpha == 1.0

    def test_coverage_or(self):
        fm, alpha = select_map("coverage-or", 8, sep_eps=0.25)
        assert fm.kind == "or" and alpha == 1.25

    def test_modular(self):
        fm, alpha = select_map("modular", 9)
        assert fm.kind == "characteristic" and alpha == 1.0

    def test_subadditive(self):
        fm, alpha = select_map("subadditive", 16)
        assert alpha == pytest.approx(4.0 * log(16))

    def test_curvature(self):
        _, alpha = select_map("curvature", 16, kappa=0.5)
        assert alpha == 2.0
        _, alpha = select_map("curvature", 16, kappa=0.99)
        assert alpha == 4.0  # min(sqrt(n), 1/(1-kappa)) caps at sqrt(n)

    def test_xos_trees(self):
        fm, alpha = select_map("xos-trees", 10, trees=8, xi=0.5)
        assert fm.kind == "monomial" and fm.degree == 2
        assert alpha == pytest.approx(8.0 ** 0.5)

    def test_unknown_class(self):
        with pytest.raises(InputError):
            select_map("mystery", 5)


class TestRealizability:
    """Exact weight vectors reproduce the target in the matched feature space."""

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_fourier_sparse_exact(self, seed):
        cut = gen_cut(10, 0.4, seed=seed)
        fs = fourier_from_cut(cut)
        fm = parity_map(10, support=list(fs.support))
        w = np.array(fs.coeffs)
        X = embed_many(fm, list(all_masks(10)))
        assert np.allclose(X @ w, value_table(fs))

    @pytest.mark.parametrize("seed", [3, 4])
    def test_interaction_exact(self, seed):
        fn = gen_interaction(8, 2, 12, seed=seed)
        fm = intersect_map(8, 2)
        w = np.zeros(fm.dim)
        index = {t: i for i, t in enumerate(fm.feature_masks)}
        for t, g in fn.terms:
            w[index[t]] = g
        X = embed_many(fm, list(all_masks(8)))
        assert np.allclose(X @ w, value_table(fn))

    @pytest.mark.parametrize("seed", [5, 6])
    def test_coverage_or_exact(self, seed):
        fn = gen_coverage(8, 20, 0.3, seed=seed)
        fm = or_map(8)
        w = np.zeros(fm.dim)
        index = {t: i for i, t in enumerate(fm.feature_masks)}
        for u in range(fn.universe_size):
            covering = [i for i in range(8) if (fn.item_masks[i] >> u) & 1]
            if covering:
                m = 0
                for i in covering:
                    m |= 1 << i
                w[index[m]] += fn.weights[u]
        X = embed_many(fm, list(all_masks(8)))
        assert np.allclose(X @ w, value_table(fn))

    def test_pair_support_spans_cuts(self):
        sup = pair_support(5)
        assert sup[0] == 0
        assert all(popcount(t) == 2 for t in sup[1:])
        assert len(sup) == 1 + comb(5, 2)


@given(
    st.floats(min_value=1e-3, max_value=1e3),
    st.floats(min_value=1e-3, max_value=1e3),
    st.floats(min_value=0.05, max_value=20.0),
)
def test_positive_powers_preserve_order(x, y, p):
    """Order comparisons never need the p-th root: x<y iff x**p<y**p for x,y>0."""
    assert (x < y) == (x**p < y**p)


def test_descriptor_roundtrip():
    for fm in (
        characteristic_map(6),
        monomial_map(6, 2),
        intersect_map(6, 3),
        parity_map(6, degree=2),
        parity_map(6, support=[0, 3, 5]),
        or_map(6),
    ):
        back = map_from_descriptor(fm.descriptor())
        assert back == fm
