from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from gk.errors import NotInRing, ParseError, UnsupportedRingMap
from gk.rings import BaseRing, RingMap

small = st.integers(min_value=-50, max_value=50)


@st.composite
def gaussian_pairs(draw):
    """Two gaussian integers, the second nonzero."""
    R = BaseRing.gaussian()
    a = R.gaussian_element(draw(small), draw(small))
    bx, by = draw(small), draw(small)
    assume(bx or by)
    return a, R.gaussian_element(bx, by)


class TestParsing:
    @pytest.mark.parametrize(
        "label, expected",
        [("ZZ", "ZZ"), ("QQ", "QQ"), ("ZZ[i]", "ZZ[i]"), ("ZZ[1/6]", "ZZ[1/6]"), ("ZZ[1/4]", "ZZ[1/2]")],
    )
    def test_labels(self, label, expected):
        assert BaseRing.parse(label).label == expected

    def test_localized_primes(self):
        assert BaseRing.parse("ZZ[1/12]").primes == (2, 3)

    def test_quotient_ring_is_unsupported(self):
        with pytest.raises(UnsupportedRingMap):
            BaseRing.parse("ZZ/4")

    def test_garbage(self):
        with pytest.raises(ParseError):
            BaseRing.parse("RR")


class TestMembership:
    def test_fraction_not_in_integers(self, ZZ, QQ):
        with pytest.raises(NotInRing):
            ZZ.convert("3/4")
        assert QQ.convert("3/4") == QQ.from_fraction(3, 4)

    def test_localized_membership(self):
        half = BaseRing.parse("ZZ[1/2]")
        assert half.contains(half.convert("3/4"))
        assert not half.contains(BaseRing.rationals().convert(Fraction(1, 3)))

    def test_gaussian_values(self, GI):
        z = GI.convert([1, 2])
        assert GI.format(z) == "1+2i"
        assert GI.format(GI.convert([0, -1])) == "-i"
        with pytest.raises(NotInRing):
            GI.convert(["1/2", 0])

    def test_denominator(self):
        R = BaseRing.parse("ZZ[1/2]")
        assert R.denominator(BaseRing.rationals().from_fraction(1, 12)) == 3


class TestEuclidean:
    @given(small, small)
    @settings(max_examples=200, deadline=None)
    def test_integer_division(self, a, b):
        assume(b)
        R = BaseRing.integers()
        q, r = R.divmod(R.from_int(a), R.from_int(b))
        assert q * R.from_int(b) + r == R.from_int(a)
        assert R.norm(r) < R.norm(R.from_int(b))

    @given(gaussian_pairs())
    @settings(max_examples=200, deadline=None)
    def test_gaussian_division(self, pair):
        R = BaseRing.gaussian()
        a, b = pair
        q, r = R.divmod(a, b)
        assert R.contains(q) and R.contains(r)
        assert q * b + r == a
        assert R.norm(r) < R.norm(b)

    @given(small, st.integers(min_value=1, max_value=30))
    @settings(max_examples=100, deadline=None)
    def test_localized_division(self, a, b):
        R = BaseRing.localized(6)
        x, y = R.from_int(a), R.from_int(b)
        q, r = R.divmod(x, y)
        assert R.contains(q)
        assert q * y + r == x
        assert R.norm(r) < R.norm(y)

    @given(small, small)
    @settings(max_examples=100, deadline=None)
    def test_gaussian_associate(self, x, y):
        assume(x or y)
        R = BaseRing.gaussian()
        z = R.gaussian_element(x, y)
        c, u = R.associate(z)
        assert R.is_unit(u)
        assert u * c == z
        assert c.x > 0 and c.y >= 0

    def test_units(self, ZZ):
        assert ZZ.is_unit(ZZ.from_int(-1))
        assert not ZZ.is_unit(ZZ.from_int(2))
        assert BaseRing.parse("ZZ[1/2]").is_unit(ZZ.from_int(8))


class TestRingMaps:
    def test_flat_maps(self):
        f = RingMap.parse("ZZ -> QQ")
        assert f.is_flat and not f.is_finite_projective and f.rank is None

    def test_gaussian_is_finite_projective(self, to_i):
        assert to_i.is_finite_projective
        assert to_i.rank == 2

    @pytest.mark.parametrize("label", ["QQ -> ZZ", "ZZ[1/6] -> ZZ[1/2]", "ZZ[i] -> QQ", "ZZ -> ZZ/2"])
    def test_unsupported(self, label):
        with pytest.raises(UnsupportedRingMap):
            RingMap.parse(label)

    def test_composition(self, to_half):
        f = to_half.then(RingMap.parse("ZZ[1/2] -> QQ"))
        assert f.label == "ZZ -> QQ"
        with pytest.raises(UnsupportedRingMap):
            to_half.then(RingMap.parse("ZZ -> QQ"))

    def test_malformed(self):
        with pytest.raises(ParseError):
            RingMap.parse("ZZ QQ")
