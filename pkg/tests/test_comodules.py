import pytest

from gk.comodules import (
    GroupDatum,
    KModule,
    divided_power_form,
    dual_K,
    generated_subcomodule,
    hom_K,
    highest_weight_ambient,
    internal_hom_K,
    invariants_K,
    maximal_subcomodule,
    symmetric_power_form,
    tensor_K,
    torus_module,
    validate_kmodule,
)
from gk.errors import ParseError
from gk.linalg import LatticeModule, entries, equal, from_values, identity
from gk.rings import BaseRing


class TestGroups:
    def test_presets(self):
        assert GroupDatum.sl2().k_labels() == ("t1", "e", "f")
        assert GroupDatum.gl2().k_weights() == ((0, 0), (0, 0), (1, -1), (-1, 1))
        assert GroupDatum.torus(2).k_labels() == ("t1", "t2")

    def test_root_pairing_must_be_two(self):
        with pytest.raises(ParseError):
            GroupDatum("chevalley", 1, (1,), (1,))

    def test_lie_algebra_of_sl2_type(self, ZZ):
        k = GroupDatum.sl2().lie_algebra(ZZ)
        e, f = k.basis_vector("e"), k.basis_vector("f")
        assert k.bracket(e, f) == k.basis_vector("t1")


class TestValidation:
    @pytest.mark.parametrize("n", range(0, 6))
    def test_integral_forms(self, n):
        assert validate_kmodule(divided_power_form(n))
        assert validate_kmodule(symmetric_power_form(n))

    def test_weight_support(self, ZZ):
        V = divided_power_form(1)
        bad = KModule(V.group, V.lattice, V.weights, V.f, V.e)
        report = validate_kmodule(bad)
        assert not report and report.check == "weight-support"

    def test_divided_powers_must_be_integral(self, ZZ):
        W = highest_weight_ambient(2)
        lattice = LatticeModule(ZZ, W.labels)
        report = validate_kmodule(KModule(W.group, lattice, W.weights, W.e, W.f))
        assert not report


class TestGeneratedSubcomodules:
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_highest_weight_vector_generates_the_divided_power_form(self, n, ZZ):
        W = highest_weight_ambient(n)
        top = from_values([[1]] + [[0]] * n, W.ring)
        S = generated_subcomodule(W, top, ZZ)
        assert S.rank == n + 1
        V = S.as_kmodule()
        form = divided_power_form(n)
        assert V.weights == form.weights
        assert equal(V.e, form.e)
        assert equal(V.f, form.f)

    def test_lowest_weight_vector_over_integers(self, ZZ):
        W = highest_weight_ambient(2)
        # e w_{-2} = 2 w_0 and e^(2) w_{-2} = 2 w_2
        S = generated_subcomodule(W, from_values([[0], [0], [1]], W.ring), ZZ)
        assert S.rank == 3
        assert not S.contains(from_values([[0], [1], [0]], BaseRing.rationals()))

    def test_maximal_subcomodule_inside_zero_weight(self, ZZ):
        V = divided_power_form(2)
        inside = maximal_subcomodule(V, from_values([[0], [1], [0]], ZZ))
        assert inside.rank == 0
        everything = maximal_subcomodule(V, identity(3, ZZ.field))
        assert everything.rank == 3


class TestInvariantsAndHom:
    def test_invariants_of_torus_module(self, ZZ):
        V = torus_module(ZZ, [0, 2, 0, -2])
        assert invariants_K(V).rank == 2

    def test_invariants_of_adjoint_form(self):
        assert invariants_K(divided_power_form(2)).rank == 0
        assert invariants_K(divided_power_form(0)).rank == 1

    def test_tensor_square_of_standard_has_an_invariant(self):
        V = divided_power_form(1)
        T = tensor_K(V, V)
        assert validate_kmodule(T)
        assert invariants_K(T).rank == 1

    def test_hom_between_forms(self):
        # V(2) -> Sym^2 is nonzero; the two forms differ but Hom_K has rank one
        B = hom_K(divided_power_form(2), symmetric_power_form(2))
        assert B.shape[1] == 1

    def test_internal_hom_and_dual(self):
        V = divided_power_form(1)
        H = internal_hom_K(V, V)
        assert H.rank == 4
        assert invariants_K(H).rank == 1
        D = dual_K(V)
        assert sorted(D.weights) == sorted(V.weights)
        assert validate_kmodule(D)

    def test_base_change_keeps_weights(self, to_half):
        V = divided_power_form(3).base_change(to_half)
        assert V.ring.label == "ZZ[1/2]"
        assert entries(V.e)[0][1] == V.ring.from_int(3)
