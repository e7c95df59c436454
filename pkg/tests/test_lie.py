import pytest
from hypothesis import given, settings, strategies as st

from gk.comodules import divided_power_form, highest_weight_ambient, symmetric_power_form
from gk.errors import DegreeCapExceeded, PreconditionFailure, ValidationFailure
from gk.lie import (
    LEFTMOST,
    RIGHTMOST,
    STRAIGHTEN_CACHE_SIZE,
    LieAlgebraData,
    SubalgebraDecomposition,
    adjoint_action,
    divided_power_check,
    from_vector,
    gl,
    monomials,
    multiply,
    pbw_straighten,
    sl2,
    structure_matrix,
    validate_lie,
    _straighten,
)
from gk.rings import BaseRing

SL2 = sl2(BaseRing.integers())
GL2 = gl(BaseRing.integers(), 2)


@st.composite
def words(draw, L, max_len=5):
    return tuple(draw(st.lists(st.sampled_from(L.labels), min_size=0, max_size=max_len)))


@st.composite
def pbw_monomials(draw, L, max_degree=2):
    return {draw(st.sampled_from(monomials(L.dim, max_degree))): L.ring.one}


class TestValidation:
    @pytest.mark.parametrize("L", [SL2, GL2, gl(BaseRing.integers(), 3)], ids=["sl2", "gl2", "gl3"])
    def test_presets_are_lie(self, L):
        assert validate_lie(L)

    def test_jacobi_failure_names_the_triple(self, ZZ):
        L = LieAlgebraData.from_triples(
            ZZ, ("a", "b", "c"), [("a", "b", "a", 1), ("a", "c", "b", 1)], validate=False
        )
        report = validate_lie(L)
        assert not report
        assert report.check == "jacobi"
        assert report.witness == ((1, 2, 3),)
        assert "(a, b, c)" in report.detail
        with pytest.raises(ValidationFailure):
            LieAlgebraData.from_triples(ZZ, ("a", "b", "c"), [("a", "b", "a", 1), ("a", "c", "b", 1)])

    def test_alternating_failure(self, ZZ):
        L = LieAlgebraData.from_triples(ZZ, ("a", "b"), [("a", "a", "b", 1)], validate=False)
        report = validate_lie(L)
        assert report.check == "alternating"

    def test_antisymmetry_is_completed(self, ZZ):
        L = LieAlgebraData.from_triples(ZZ, ("x", "y"), [("x", "y", "y", 1)])
        assert L.bracket(L.basis_vector("y"), L.basis_vector("x")) == [ZZ.zero, -ZZ.one]

    def test_structure_matrix_shape(self):
        assert structure_matrix(SL2).shape == (3, 9)


class TestStraightening:
    def test_fe(self, ZZ):
        # f e = e f - h
        assert pbw_straighten(SL2, ("f", "e"), 2) == {(1, 0, 1): ZZ.one, (0, 1, 0): -ZZ.one}

    def test_degree_cap(self):
        with pytest.raises(DegreeCapExceeded):
            pbw_straighten(SL2, ("f", "e", "h"), 2)

    def test_unknown_strategy(self):
        with pytest.raises(PreconditionFailure):
            pbw_straighten(SL2, ("f",), 1, "middle")

    def test_rebuilt_algebras_share_the_cache(self, ZZ):
        a, b = sl2(ZZ), sl2(ZZ)
        assert a is not b
        pbw_straighten(a, ("f", "e", "f"), 3)
        before = _straighten.cache_info()
        assert pbw_straighten(b, ("f", "e", "f"), 3) == pbw_straighten(a, ("f", "e", "f"), 3)
        after = _straighten.cache_info()
        assert after.hits > before.hits
        assert after.currsize == before.currsize
        assert after.maxsize == STRAIGHTEN_CACHE_SIZE

    def test_equality_follows_the_constants(self, ZZ, QQ):
        assert sl2(ZZ) == SL2
        assert hash(sl2(ZZ)) == hash(SL2)
        assert LieAlgebraData(ZZ, SL2.labels, SL2.brackets, "renamed") == SL2
        assert sl2(QQ) != SL2
        assert gl(ZZ, 2) != SL2
        assert SubalgebraDecomposition(SL2, ("h", "f"), ("e",)).sub_first() != SL2

    @given(words(SL2))
    @settings(max_examples=250, deadline=None)
    def test_confluence_sl2(self, word):
        assert pbw_straighten(SL2, word, 5, LEFTMOST) == pbw_straighten(SL2, word, 5, RIGHTMOST)

    @given(words(GL2))
    @settings(max_examples=250, deadline=None)
    def test_confluence_gl2(self, word):
        assert pbw_straighten(GL2, word, 5, LEFTMOST) == pbw_straighten(GL2, word, 5, RIGHTMOST)

    @given(pbw_monomials(SL2), pbw_monomials(SL2), pbw_monomials(SL2))
    @settings(max_examples=100, deadline=None)
    def test_associativity(self, u, v, w):
        left = multiply(SL2, multiply(SL2, u, v, 6), w, 6)
        right = multiply(SL2, u, multiply(SL2, v, w, 6), 6)
        assert left == right

    def test_adjoint_action_matches_bracket(self):
        e = from_vector(SL2, SL2.basis_vector("e"))
        # [h, e] = 2e
        assert adjoint_action(SL2, "h", e, 2) == {(1, 0, 0): SL2.ring.from_int(2)}


class TestDividedPowers:
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_integral_forms(self, n, ZZ):
        V = divided_power_form(n)
        assert divided_power_check(V.e, n + 1, ZZ)
        assert divided_power_check(V.f, n + 1, ZZ)
        S = symmetric_power_form(n)
        assert divided_power_check(S.e, n + 1, ZZ)

    def test_counterexample_lattice(self, ZZ):
        # f acts by 1 on the unnormalized basis, so f^2 / 2 is not integral
        cert = divided_power_check(highest_weight_ambient(3).f, 4, ZZ)
        assert not cert
        assert cert.report.witness[0] == 2

    def test_counterexample_passes_after_inverting_two(self):
        half = BaseRing.localized(6)
        assert divided_power_check(highest_weight_ambient(3).f, 4, half)

    def test_not_nilpotent(self, ZZ):
        with pytest.raises(PreconditionFailure):
            divided_power_check(divided_power_form(2).e, 2, ZZ)


class TestDecompositions:
    def test_borel_decomposition(self):
        assert SubalgebraDecomposition(SL2, ("h", "f"), ("e",)).check()

    def test_not_a_subalgebra(self):
        assert not SubalgebraDecomposition(SL2, ("e", "f"), ("h",)).check()
        with pytest.raises(PreconditionFailure):
            SL2.subalgebra(("e", "f"))

    def test_reordering_keeps_brackets(self):
        L = SubalgebraDecomposition(SL2, ("h", "f"), ("e",)).complement_first()
        assert L.labels == ("e", "h", "f")
        M = SubalgebraDecomposition(SL2, ("h", "f"), ("e",)).sub_first()
        assert M.labels == ("h", "f", "e")
        assert validate_lie(M)
