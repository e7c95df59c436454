import pytest
from hypothesis import given, settings, strategies as st

from gk.comodules import GroupDatum, divided_power_form, torus_module
from gk.errors import BoundaryLoss, PreconditionFailure, UnsupportedRegime
from gk.functors import (
    I_functor,
    WeightWindow,
    adjunction_certificate,
    aq_lambda,
    easy_duality,
    forgetful,
    graded_ranks,
    ind,
    interior_ranks,
    leak_margin,
    pro,
    tensor_identity,
    triangle_identities_I,
    triangle_identities_ind,
    zuckerman_gamma,
)
from gk.lie import LieAlgebraData, SubalgebraDecomposition, gl, sl2
from gk.linalg import diagonal, from_values, identity
from gk.pairs import (
    PairDatum,
    PairMap,
    adjoint_gk,
    borel_pair,
    character_gk,
    gk_module,
    gl2_pair,
    hom_space_gk,
    sl2_form_gk,
    sl2_pair,
    trivial_gk,
    validate_pair_module,
)
from gk.rings import BaseRing

ZZ_ = BaseRing.integers()
BORELS = {side: borel_pair(ZZ_, side) for side in ("lower", "upper")}
SL2 = {group: sl2_pair(ZZ_, group) for group in ("torus", "sl2")}
BW = PairMap.inclusion(BORELS["lower"], SL2["sl2"], ((1,),))
UPPER = PairMap.inclusion(BORELS["upper"], SL2["torus"])
GL2T = gl2_pair(ZZ_, "torus")
Q_GL2 = PairDatum.build(
    "q",
    gl(ZZ_, 2).subalgebra(("E12", "E11", "E22"), name="q"),
    GroupDatum.torus(2),
    [(1, -1), (0, 0), (0, 0)],
    {"t1": {"E11": 1}, "t2": {"E22": 1}},
)
U11 = PairMap.inclusion(Q_GL2, GL2T)


def upper_borel_module(lam):
    """Rank two over b+: e sends the weight lam vector to the weight lam + 2 one."""
    b = BORELS["upper"]
    km = torus_module(ZZ_, [lam + 2, lam], group=b.group)
    h = diagonal([ZZ_.from_int(lam + 2), ZZ_.from_int(lam)], ZZ_.field)
    return gk_module(b, km, {"e": from_values([[0, 1], [0, 0]], ZZ_), "h": h}, f"S{lam}")


def gl2_borel_module(a, b):
    """Rank two over the upper Borel of gl2, weights (a+1, b) and (a, b+1)."""
    km = torus_module(ZZ_, [(a + 1, b), (a, b + 1)], group=Q_GL2.group)
    action = {
        "E12": from_values([[0, 1], [0, 0]], ZZ_),
        "E11": diagonal([ZZ_.from_int(a + 1), ZZ_.from_int(a)], ZZ_.field),
        "E22": diagonal([ZZ_.from_int(b), ZZ_.from_int(b + 1)], ZZ_.field),
    }
    return gk_module(Q_GL2, km, action, f"N{a}{b}")


def cyclic_pair_map():
    """g = <a, b> with [a, b] = b, q = <b>; a^k b straightens to b (a + 1)^k."""
    g = LieAlgebraData.from_triples(ZZ_, ("a", "b"), [("a", "b", "b", 1)], name="aff")
    G = PairDatum.build("aff", g, GroupDatum.trivial(), [(), ()], {})
    Q = PairDatum.build("b", g.subalgebra(("b",), name="b"), GroupDatum.trivial(), [()], {})
    return PairMap.inclusion(Q, G)


DUALITY_CASES = [
    pytest.param(UPPER, character_gk(BORELS["upper"], -2), id="b+ k-2"),
    pytest.param(UPPER, character_gk(BORELS["upper"], 3), id="b+ k3"),
    pytest.param(UPPER, upper_borel_module(0), id="b+ rank2"),
    pytest.param(UPPER, upper_borel_module(-3), id="b+ rank2 shifted"),
    pytest.param(U11, character_gk(Q_GL2, (1, 0)), id="u11 Z10"),
    pytest.param(U11, character_gk(Q_GL2, (2, 1)), id="u11 Z21"),
    pytest.param(U11, gl2_borel_module(0, 0), id="u11 rank2"),
    pytest.param(U11, gl2_borel_module(1, -2), id="u11 rank2 shifted"),
]

FORMS = {n: sl2_form_gk(SL2["torus"], divided_power_form(n)) for n in (1, 2)}

TENSOR_CASES = [
    pytest.param(UPPER, character_gk(BORELS["upper"], 2), FORMS[2], id="b+ k2 V2"),
    pytest.param(UPPER, upper_borel_module(-1), FORMS[1], id="b+ rank2 V1"),
    pytest.param(U11, character_gk(Q_GL2, (2, 1)), adjoint_gk(GL2T), id="u11 Z21 adjoint"),
    pytest.param(U11, gl2_borel_module(0, 0), character_gk(GL2T, (1, -1)), id="u11 rank2 Q11"),
    pytest.param(U11, gl2_borel_module(1, -2), adjoint_gk(GL2T), id="u11 rank2 adjoint"),
]


@pytest.fixture
def cap4():
    return WeightWindow(4)


class TestWindows:
    def test_negative_cap(self):
        with pytest.raises(PreconditionFailure):
            WeightWindow(-1)

    def test_weights(self):
        w = WeightWindow(3, frozenset({2, 4}))
        assert w.admits((2,)) and not w.admits((0,))
        assert w.mirrored().admits((-4,))
        assert w.to_dict() == {"degree_cap": 3, "weights": [[2], [4]]}


class TestForgetful:
    def test_restricts_action(self, upper_borel_map, sl2T):
        V2 = sl2_form_gk(sl2T, divided_power_form(2))
        F = forgetful(upper_borel_map, V2)
        assert F.pair.g.labels == ("e", "h")
        assert F.rank == 3
        assert validate_pair_module(F)

    def test_regrades_along_group(self, borel_weil_map, sl2K):
        V1 = sl2_form_gk(sl2K, divided_power_form(1))
        F = forgetful(borel_weil_map, V1)
        assert F.pair.group.kind == "torus"
        assert F.weights == ((1,), (-1,))


class TestIndPro:
    def test_ind_of_a_character(self, upper_borel_map, bplus):
        M = ind(upper_borel_map, character_gk(bplus, 0), WeightWindow(3))
        assert M.rank == 4
        assert graded_ranks(M) == {(0,): 1, (-2,): 1, (-4,): 1, (-6,): 1}
        assert validate_pair_module(M)

    def test_pro_of_a_character(self, upper_borel_map, bplus):
        M = pro(upper_borel_map, character_gk(bplus, 0), WeightWindow(3))
        assert graded_ranks(M) == {(6,): 1, (4,): 1, (2,): 1, (0,): 1}
        assert validate_pair_module(M)

    def test_ind_needs_identity_group(self, borel_weil_map, bminus, cap4):
        with pytest.raises(PreconditionFailure):
            ind(borel_weil_map, character_gk(bminus, 0), cap4)

    def test_weight_window_cuts_the_basis(self, upper_borel_map, bplus):
        M = pro(upper_borel_map, character_gk(bplus, 0), WeightWindow(5, frozenset({2, 4})))
        assert graded_ranks(M) == {(4,): 1, (2,): 1}

    def test_interior_ranks(self, upper_borel_map, bplus):
        M = ind(upper_borel_map, character_gk(bplus, 0), WeightWindow(4))
        assert interior_ranks(M, 1) == {(0,): 1, (-2,): 1}


class TestBorelWeil:
    @pytest.mark.parametrize("lam", range(0, 6))
    def test_rank_is_lambda_plus_one(self, borel_weil_map, bminus, lam):
        I = I_functor(borel_weil_map, character_gk(bminus, lam), WeightWindow(6))
        assert I.rank == lam + 1
        assert not I.is_windowed
        assert graded_ranks(I) == {(lam - 2 * i,): 1 for i in range(lam + 1)}
        assert validate_pair_module(I)

    def test_negative_weight_vanishes(self, borel_weil_map, bminus):
        assert I_functor(borel_weil_map, character_gk(bminus, -1), WeightWindow(6)).rank == 0

    def test_matches_the_divided_power_form(self, borel_weil_map, bminus, sl2K):
        I = I_functor(borel_weil_map, character_gk(bminus, 3), WeightWindow(6))
        V3 = sl2_form_gk(sl2K, divided_power_form(3))
        assert hom_space_gk(V3, I).rank == 1

    def test_over_localized_ring(self, borel_weil_map, bminus, to_half):
        pm = borel_weil_map.base_change(to_half)
        lam = character_gk(bminus, 2).base_change(to_half)
        assert I_functor(pm, lam, WeightWindow(6)).rank == 3


class TestGamma:
    def test_integrable_part_of_a_finite_module(self, sl2T, sl2K):
        pm = PairMap(sl2T, sl2K, identity(3, sl2T.ring.field), ((1,),))
        V2 = sl2_form_gk(sl2T, divided_power_form(2))
        G = zuckerman_gamma(pm, V2)
        assert G.rank == 3
        assert G.pair is sl2K
        assert validate_pair_module(G)

    def test_needs_identity_lie_part(self, upper_borel_map, bplus):
        with pytest.raises(PreconditionFailure):
            zuckerman_gamma(upper_borel_map, character_gk(bplus, 0))


class TestAdjunctions:
    def test_borel_weil_adjunction(self, borel_weil_map, bminus, sl2K, cap4):
        X = sl2_form_gk(sl2K, divided_power_form(1))
        V = character_gk(bminus, 1)
        cert = adjunction_certificate(borel_weil_map, X, V, cap4)
        assert cert.iso
        assert cert.ranks == (1, 1)
        tri = triangle_identities_I(borel_weil_map, X, V, cap4)
        assert tri.first and tri.second

    def test_ind_triangles(self, upper_borel_map, bplus, sl2T):
        W = character_gk(bplus, 0)
        X = sl2_form_gk(sl2T, divided_power_form(1))
        assert triangle_identities_ind(upper_borel_map, W, X, WeightWindow(3))


class TestDualityAndProjection:
    @pytest.mark.parametrize("cap", [6, 7])
    @pytest.mark.parametrize("pm, W", DUALITY_CASES)
    def test_easy_duality(self, pm, W, cap):
        cert = easy_duality(pm, W, WeightWindow(cap))
        assert cert.iso
        assert cert.intertwines
        assert cert.graded_ranks_equal

    @pytest.mark.parametrize("pm, W, V", TENSOR_CASES)
    def test_tensor_identity(self, pm, W, V):
        cert = tensor_identity(pm, W, V, WeightWindow(6))
        assert cert.iso
        assert cert.intertwines
        assert cert.graded_ranks_equal

    def test_unbounded_straightening_is_a_boundary_loss(self):
        pm = cyclic_pair_map()
        with pytest.raises(BoundaryLoss):
            easy_duality(pm, trivial_gk(pm.source), WeightWindow(6))


class TestLeakMargin:
    @pytest.mark.parametrize("side, complement", [("lower", ("e",)), ("upper", ("f",))])
    def test_sl2_borels(self, side, complement):
        sub = ("h", "f") if side == "lower" else ("e", "h")
        assert leak_margin(SubalgebraDecomposition(sl2(ZZ_), sub, complement)) == 1

    def test_gl2_lower_borel(self):
        d = SubalgebraDecomposition(gl(ZZ_, 2), ("E11", "E22", "E21"), ("E12",))
        assert leak_margin(d) == 1

    def test_gl4_lower_borel_absorbs_three(self):
        g = gl(ZZ_, 4)
        complement = ("E12", "E13", "E14", "E23", "E24", "E34")
        sub = tuple(lab for lab in g.labels if lab not in complement)
        d = SubalgebraDecomposition(g, sub, complement)
        assert d.check()
        assert leak_margin(d) == 3

    def test_empty_complement(self):
        d = SubalgebraDecomposition(sl2(ZZ_), ("e", "h", "f"), ())
        assert leak_margin(d) == 0

    def test_cycle_raises(self):
        pm = cyclic_pair_map()
        with pytest.raises(BoundaryLoss):
            pro(pm, trivial_gk(pm.source), WeightWindow(3))


class TestAq:
    def test_weights_shift_by_the_top_wedge(self, upper_borel_map, bplus):
        A = aq_lambda(upper_borel_map, character_gk(bplus, 0), WeightWindow(5, frozenset({2, 4, 6})))
        assert graded_ranks(A) == {(6,): 1, (4,): 1, (2,): 1}
        assert A.name.startswith("A_q(")

    @pytest.mark.parametrize("lam", [0, 1, 2])
    def test_lowest_weight(self, upper_borel_map, bplus, lam):
        A = aq_lambda(upper_borel_map, character_gk(bplus, lam), WeightWindow(3))
        assert min(w[0] for w in A.weights) == lam + 2

    def test_u_meeting_k_is_unsupported(self, upper_borel_map, bplus):
        with pytest.raises(UnsupportedRegime):
            aq_lambda(upper_borel_map, character_gk(bplus, 0), WeightWindow(3), ("h",))


class TestRandomAdjunctions:
    @given(st.integers(min_value=0, max_value=3), st.integers(min_value=-1, max_value=4))
    @settings(max_examples=50, deadline=None)
    def test_borel_weil(self, n, lam):
        X = sl2_form_gk(SL2["sl2"], divided_power_form(n))
        V = character_gk(BORELS["lower"], lam)
        window = WeightWindow(6)
        cert = adjunction_certificate(BW, X, V, window)
        assert cert.iso
        assert cert.ranks == ((1, 1) if lam == n else (0, 0))
        assert triangle_identities_I(BW, X, V, window)

    @given(st.integers(min_value=0, max_value=3), st.integers(min_value=-3, max_value=3))
    @settings(max_examples=50, deadline=None)
    def test_upper_borel(self, n, lam):
        X = sl2_form_gk(SL2["torus"], divided_power_form(n))
        V = character_gk(BORELS["upper"], lam)
        window = WeightWindow(5)
        assert adjunction_certificate(UPPER, X, V, window).iso
        assert triangle_identities_I(UPPER, X, V, window)
        assert triangle_identities_ind(UPPER, V, X, window)
