from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from gk.base_change import (
    COR_314,
    LEMMA_328,
    THM_B,
    THM_C,
    THM_D,
    VARIANT_G1,
    VARIANT_G2,
    base_change_module,
    comparison_iota,
    restriction_of_scalars,
    scalar_extension_unit,
    verify_cohomology_base_change,
    verify_hom_base_change,
    verify_invariants_base_change,
    verify_iota_naturality,
    verify_restriction_identity,
)
from gk.comodules import divided_power_form, symmetric_power_form, torus_module
from gk.errors import UnsupportedRingMap
from gk.functors import I_functor, WeightWindow
from gk.linalg import dense, diagonal, entries, from_values, scale
from gk.pairs import (
    PairMap,
    adjoint_gk,
    borel_pair,
    character_gk,
    gk_module,
    sl2_form_gk,
    sl2_pair,
    tensor_gk,
    torus_pair,
    trivial_gk,
    validate_pair_module,
)
from gk.rings import BaseRing, RingMap


@pytest.fixture
def t1(ZZ):
    return torus_pair(ZZ, 1)


@pytest.fixture
def torus_into_sl2(t1, sl2T, ZZ):
    return PairMap(t1, sl2T, from_values([[0], [1], [0]], ZZ))


@pytest.fixture
def six():
    return WeightWindow(3, frozenset({-4, -2, 0, 2, 4, 6}))


class TestModules:
    def test_identity_map_returns_the_module(self, sl2T):
        V = adjoint_gk(sl2T)
        assert base_change_module(RingMap.identity(sl2T.ring), V) is V

    def test_source_must_match(self, sl2T, to_Q):
        V = base_change_module(to_Q, adjoint_gk(sl2T))
        assert V.ring.label == "QQ"
        with pytest.raises(UnsupportedRingMap):
            base_change_module(to_Q, V)

    def test_restriction_of_scalars(self, t1, to_i):
        c2_i = base_change_module(to_i, character_gk(t1, 2))
        R = restriction_of_scalars(to_i, t1, c2_i)
        assert R.rank == 2
        assert R.weights == ((2,), (2,))
        assert validate_pair_module(R)
        unit = scalar_extension_unit(to_i, character_gk(t1, 2))
        assert unit.shape == (2, 1)
        assert entries(unit) == [[t1.ring.field.one], [t1.ring.field.zero]]

    def test_restriction_needs_gaussian_target(self, t1, to_half):
        with pytest.raises(UnsupportedRingMap):
            restriction_of_scalars(to_half, t1, character_gk(t1, 0))


class TestHomAndInvariants:
    def test_flat_base_change_of_hom(self, sl2T, to_Q):
        V2 = sl2_form_gk(sl2T, divided_power_form(2))
        cert = verify_hom_base_change(to_Q, adjoint_gk(sl2T), V2)
        assert cert.tag == THM_B
        assert cert.is_iso
        assert cert.ranks == (1, 1)

    def test_localization(self, sl2T, to_half):
        V2 = sl2_form_gk(sl2T, divided_power_form(2))
        cert = verify_hom_base_change(to_half, V2, V2)
        assert cert.is_iso
        assert all(d == "1" for d in cert.divisors)

    def test_gaussian_variant(self, sl2T, to_i):
        V2 = sl2_form_gk(sl2T, divided_power_form(2))
        cert = verify_hom_base_change(to_i, adjoint_gk(sl2T), V2)
        assert cert.tag == VARIANT_G1
        assert cert.is_iso

    def test_invariants(self, sl2T, to_half):
        cert = verify_invariants_base_change(to_half, adjoint_gk(sl2T).kmodule)
        assert cert.tag == LEMMA_328
        assert cert.is_iso
        assert cert.ranks == (1, 1)

    def test_certificate_dict(self, sl2T, to_Q):
        cert = verify_invariants_base_change(to_Q, adjoint_gk(sl2T).kmodule)
        d = cert.to_dict()
        assert d["verdict"] == "iso"
        assert len(d["instance_hash"]) == 12
        assert d["instance_hash"] == cert.instance_hash


class TestIota:
    @pytest.mark.parametrize("lam", [0, 2])
    def test_borel_weil_over_rationals(self, borel_weil_map, bminus, to_Q, lam):
        cert = comparison_iota(to_Q, borel_weil_map, character_gk(bminus, lam), WeightWindow(6))
        assert cert.tag == THM_C
        assert not cert.informational
        assert cert.is_iso
        assert cert.ranks == (lam + 1, lam + 1)

    def test_gaussian_variant(self, borel_weil_map, bminus, to_i):
        cert = comparison_iota(to_i, borel_weil_map, character_gk(bminus, 2), WeightWindow(6))
        assert cert.tag == VARIANT_G2
        assert cert.is_iso

    def test_tripled_action_is_caught(self, borel_weil_map, bminus, to_Q):
        def tripled(pm, V, window):
            out = I_functor(pm, V, window)
            if out.ring.label == "ZZ":
                return out
            three = out.ring.from_int(3)
            return replace(out, action=tuple(scale(M, three) for M in out.action))

        cert = comparison_iota(to_Q, borel_weil_map, character_gk(bminus, 2), WeightWindow(6), compute=tripled)
        assert cert.ranks == (3, 3)
        assert not cert.is_iso
        assert any("does not commute" in note for note in cert.notes)

    def test_changed_window_module_is_caught(self, borel_weil_map, bminus, to_Q):
        def skewed(pm, V, window):
            out = I_functor(pm, V, window)
            if out.ring.label == "ZZ":
                return out
            A = out.ambient
            bumped = (scale(A.action[0], out.ring.from_int(3)),) + A.action[1:]
            return replace(out, ambient=replace(A, action=bumped))

        cert = comparison_iota(to_Q, borel_weil_map, character_gk(bminus, 2), WeightWindow(6), compute=skewed)
        assert not cert.is_iso
        assert any("window modules differ" in note for note in cert.notes)

    def test_non_surjective_pair_map_is_informational(self, torus_into_sl2, t1, to_Q, six):
        cert = comparison_iota(to_Q, torus_into_sl2, character_gk(t1, 2), six)
        assert cert.informational
        assert any("not surjective" in note for note in cert.notes)

    def test_naturality(self, borel_weil_map, bminus, to_Q, ZZ):
        W = character_gk(bminus, 2)
        phi = from_values([[2]], ZZ, 1)
        assert verify_iota_naturality(to_Q, borel_weil_map, phi, W, W, WeightWindow(6))

    def test_restriction_identity(self, torus_into_sl2, t1, to_i, six):
        c2_i = base_change_module(to_i, character_gk(t1, 2))
        cert = verify_restriction_identity(to_i, torus_into_sl2, c2_i, six)
        assert cert.tag == COR_314
        assert cert.is_iso


class TestCohomology:
    def test_localization_kills_two_torsion(self, sl2_absolute, to_half):
        cert = verify_cohomology_base_change(to_half, trivial_gk(sl2_absolute))
        assert cert.tag == THM_D
        assert cert.is_iso
        assert cert.ranks == (2, 2)

    def test_rationals(self, sl2_absolute, to_Q):
        assert verify_cohomology_base_change(to_Q, adjoint_gk(sl2_absolute)).is_iso

    def test_gaussian_keeps_the_torsion(self, sl2_absolute, to_i):
        cert = verify_cohomology_base_change(to_i, trivial_gk(sl2_absolute))
        assert cert.is_iso
        assert "H^2: free 0, torsion [2, 2]" in cert.notes


ZZ_ = BaseRing.integers()
T1 = torus_pair(ZZ_, 1)
SL2T = sl2_pair(ZZ_, "torus")
MAPS = [RingMap.parse("ZZ -> QQ"), RingMap.parse("ZZ -> ZZ[1/2]")]
BMINUS = borel_pair(ZZ_, "lower")
INTO_SL2T = PairMap.inclusion(BMINUS, SL2T)
BOREL_WEIL = PairMap.inclusion(BMINUS, sl2_pair(ZZ_, "sl2"), ((1,),))


def torus_gk(weights):
    km = torus_module(ZZ_, weights, group=T1.group)
    return gk_module(T1, km, {"t1": diagonal([ZZ_.from_int(w) for w in weights], ZZ_.field)})


@st.composite
def torus_modules(draw):
    return torus_gk(draw(st.lists(st.integers(min_value=-3, max_value=3), min_size=1, max_size=6)))


@st.composite
def lower_borel_modules(draw):
    """h diagonal, f lowering the weight by 2 with small random entries."""
    weights = draw(st.lists(st.integers(min_value=-3, max_value=3), min_size=1, max_size=4))
    n, K = len(weights), ZZ_.field
    F = [[K.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if weights[i] == weights[j] - 2:
                F[i][j] = ZZ_.from_int(draw(st.integers(min_value=-2, max_value=2)))
    km = torus_module(ZZ_, weights, group=BMINUS.group)
    h = diagonal([ZZ_.from_int(w) for w in weights], K)
    return gk_module(BMINUS, km, {"h": h, "f": dense(F, K, n)})


@st.composite
def sl2_torus_modules(draw):
    """Finitely generated (sl2, T)-modules of rank at most 6."""
    kind = draw(st.sampled_from(["divided", "symmetric", "adjoint", "trivial", "tensor"]))
    if kind == "divided":
        return sl2_form_gk(SL2T, divided_power_form(draw(st.integers(min_value=0, max_value=5))))
    if kind == "symmetric":
        return sl2_form_gk(SL2T, symmetric_power_form(draw(st.integers(min_value=0, max_value=5))))
    if kind == "adjoint":
        return adjoint_gk(SL2T)
    if kind == "trivial":
        return trivial_gk(SL2T, draw(st.integers(min_value=1, max_value=3)))
    V1 = sl2_form_gk(SL2T, divided_power_form(1))
    return tensor_gk(V1, sl2_form_gk(SL2T, divided_power_form(draw(st.integers(min_value=0, max_value=2)))))


class TestRandomInstances:
    @given(sl2_torus_modules(), sl2_torus_modules(), st.sampled_from(MAPS))
    @settings(max_examples=60, deadline=None)
    def test_hom_base_change_sl2(self, X, Y, f):
        assert verify_hom_base_change(f, X, Y).is_iso

    @given(torus_modules(), torus_modules(), st.sampled_from(MAPS))
    @settings(max_examples=60, deadline=None)
    def test_hom_base_change_torus(self, X, Y, f):
        cert = verify_hom_base_change(f, X, Y)
        assert cert.tag == THM_B
        assert cert.is_iso

    @given(torus_modules(), torus_modules())
    @settings(max_examples=50, deadline=None)
    def test_gaussian_hom(self, X, Y):
        cert = verify_hom_base_change(RingMap.parse("ZZ -> ZZ[i]"), X, Y)
        assert cert.tag == VARIANT_G1
        assert cert.is_iso

    @given(lower_borel_modules())
    @settings(max_examples=50, deadline=None)
    def test_gaussian_iota(self, W):
        cert = comparison_iota(RingMap.parse("ZZ -> ZZ[i]"), INTO_SL2T, W, WeightWindow(3))
        assert cert.tag == VARIANT_G2
        assert cert.is_iso
        assert cert.ranks[0] == 4 * W.rank
        assert cert.notes == ("Lie(K) + q -> g is not surjective",)

    @given(st.integers(min_value=0, max_value=4), st.integers(min_value=1, max_value=2))
    @settings(max_examples=20, deadline=None)
    def test_gaussian_borel_weil(self, lam, extra):
        W = character_gk(BMINUS, lam)
        cert = comparison_iota(RingMap.parse("ZZ -> ZZ[i]"), BOREL_WEIL, W, WeightWindow(lam + extra))
        assert cert.tag == VARIANT_G2
        assert not cert.informational
        assert cert.is_iso
        assert cert.ranks == (lam + 1, lam + 1)


@pytest.mark.parametrize("lam", range(0, 6))
@pytest.mark.parametrize("label", ["ZZ -> QQ", "ZZ -> ZZ[1/2]", "ZZ[1/2] -> QQ"])
def test_borel_weil_iota(lam, label, borel_weil_map, bminus):
    f = RingMap.parse(label)
    to_source = RingMap(borel_weil_map.ring, f.source)
    pm = borel_weil_map.base_change(to_source)
    W = base_change_module(to_source, character_gk(bminus, lam))
    cert = comparison_iota(f, pm, W, WeightWindow(6))
    assert cert.is_iso
    assert cert.ranks == (lam + 1, lam + 1)
