import pytest
from hypothesis import given, settings, strategies as st

from gk.comodules import descent_check, divided_power_form, torus_module, weight_component_basis
from gk.errors import PositivityViolation, PreconditionFailure
from gk.functors import WeightWindow
from gk.lie import monomials
from gk.orbits import (
    ThetaStableDatum,
    admissibility_profile,
    block_hom_ranks,
    block_projections,
    check_partition,
    check_pro_decomposition,
    orbit_blocks_as_kmodule,
    orbit_decomposition,
    pro_block_ranks,
    window_stable,
)
from gk.pairs import character_gk


@st.composite
def theta_data(draw):
    """One or two representatives pairing negatively with up to three roots."""
    roots = draw(st.integers(min_value=1, max_value=3))
    reps = draw(st.integers(min_value=1, max_value=2))
    values = [
        tuple(draw(st.integers(min_value=-4, max_value=-1)) for _ in range(roots)) for _ in range(reps)
    ]
    perms = [(1, 0)] if reps == 2 and draw(st.booleans()) else []
    return ThetaStableDatum(tuple(values), tuple(perms))


class TestDatum:
    def test_values_must_be_negative(self):
        with pytest.raises(PositivityViolation):
            ThetaStableDatum(((1,),))
        with pytest.raises(PositivityViolation):
            ThetaStableDatum(((-1, 0),))

    def test_permutations_are_checked(self):
        with pytest.raises(PreconditionFailure):
            ThetaStableDatum(((-1,), (-2,)), ((0, 0),))

    def test_from_pair_map(self, upper_borel_map):
        d = ThetaStableDatum.from_pair_map(upper_borel_map, (1,))
        assert d.values == ((-2,),)
        assert d.root_weights == ((-2,),)
        assert d.labels == ("f",)


class TestBlocks:
    def test_single_root(self):
        d = ThetaStableDatum(((-2,),), root_weights=((-2,),))
        blocks = orbit_decomposition(d, 8)
        assert len(blocks) == 9
        assert all(b.rank == 1 and b.complete for b in blocks)
        assert blocks[0].label == (0,)
        assert check_partition(d, blocks, 8)

    def test_permutation_merges_blocks(self):
        d = ThetaStableDatum(((-1, -2), (-2, -1)), ((1, 0),))
        blocks = orbit_decomposition(d, 2)
        assert sorted(b.rank for b in blocks) == [1, 1, 2, 2]
        assert check_partition(d, blocks, 2)

    @given(theta_data(), st.integers(min_value=0, max_value=8))
    @settings(max_examples=100, deadline=None)
    def test_blocks_partition_the_pbw_basis(self, d, cap):
        blocks = orbit_decomposition(d, cap)
        assert check_partition(d, blocks, cap)
        assert sum(b.rank for b in blocks) == len(monomials(d.roots, cap))

    def test_overlap_is_reported(self):
        d = ThetaStableDatum(((-1,),))
        blocks = orbit_decomposition(d, 2)
        report = check_partition(d, blocks + blocks[:1], 2)
        assert not report and report.check == "orbit-blocks"


class TestDecompositions:
    def test_pro_splits_over_blocks(self, upper_borel_map, bplus):
        d = ThetaStableDatum.from_pair_map(upper_borel_map, (1,))
        for lam in (0, 1, 3):
            report = check_pro_decomposition(upper_borel_map, character_gk(bplus, lam), d, WeightWindow(5))
            assert report

    def test_block_ranks_of_pro(self, upper_borel_map, bplus):
        d = ThetaStableDatum.from_pair_map(upper_borel_map, (1,))
        ranks = pro_block_ranks(upper_borel_map, character_gk(bplus, 1), d, WeightWindow(4))
        assert ranks == {(1 + 2 * k,): 1 for k in range(4, -1, -1)}
        assert list(ranks) == [(9,), (7,), (5,), (3,), (1,)]

    def test_block_hom_ranks(self, ZZ):
        d = ThetaStableDatum(((-2,),), root_weights=((-2,),))
        blocks = orbit_decomposition(d, 6)
        ranks = block_hom_ranks(torus_module(ZZ, [-4]), d, blocks, ZZ)
        assert ranks.coincide
        assert ranks.direct == 1
        assert ranks.nonzero_blocks == ((-4,),)

    def test_admissibility(self, upper_borel_map, bplus):
        Z = character_gk(bplus, 0)
        profile = admissibility_profile(Z, upper_borel_map, [WeightWindow(3), WeightWindow(6)])
        assert window_stable(profile, [(0,), (2,), (4,)])
        assert profile[1][(12,)] == 1
        with pytest.raises(PreconditionFailure):
            admissibility_profile(Z, upper_borel_map, [WeightWindow(6), WeightWindow(3)])


class TestDescent:
    def test_torus_components_descend(self, ZZ, to_i):
        V = torus_module(ZZ, [0, 2, 2])
        parts = [weight_component_basis(V, (0,)), weight_component_basis(V, (2,))]
        assert descent_check(to_i, V, parts)

    def test_weight_lines_of_sl2_form_do_not(self, to_i):
        V = divided_power_form(1)
        parts = [weight_component_basis(V, (1,)), weight_component_basis(V, (-1,))]
        report = descent_check(to_i, V, parts)
        assert not report and report.check == "descent"


class TestGl2Datum:
    def test_blocks_to_degree_eight_descend(self, ZZ, to_i):
        d = ThetaStableDatum(((-2,),), root_weights=((-1, 1),))
        blocks = orbit_decomposition(d, 8)
        assert check_partition(d, blocks, 8)
        assert [b.rank for b in blocks] == [1] * 9
        total = orbit_blocks_as_kmodule(d, blocks, ZZ)
        assert total.weights[-1] == (-8, 8)
        assert descent_check(to_i, total, block_projections(blocks, ZZ))
