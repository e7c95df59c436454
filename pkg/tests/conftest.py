import pytest

from gk.comodules import GroupDatum, divided_power_form
from gk.lie import sl2
from gk.pairs import PairDatum, PairMap, borel_pair, sl2_pair
from gk.rings import BaseRing, RingMap


@pytest.fixture
def ZZ():
    return BaseRing.integers()


@pytest.fixture
def QQ():
    return BaseRing.rationals()


@pytest.fixture
def GI():
    return BaseRing.gaussian()


@pytest.fixture
def to_Q():
    return RingMap.parse("ZZ -> QQ")


@pytest.fixture
def to_half():
    return RingMap.parse("ZZ -> ZZ[1/2]")


@pytest.fixture
def to_i():
    return RingMap.parse("ZZ -> ZZ[i]")


@pytest.fixture
def sl2T(ZZ):
    return sl2_pair(ZZ, "torus")


@pytest.fixture
def sl2K(ZZ):
    return sl2_pair(ZZ, "sl2")


@pytest.fixture
def bplus(ZZ):
    return borel_pair(ZZ, "upper")


@pytest.fixture
def bminus(ZZ):
    return borel_pair(ZZ, "lower")


@pytest.fixture
def upper_borel_map(bplus, sl2T):
    """b+ with the torus into sl2 with the torus."""
    return PairMap.inclusion(bplus, sl2T)


@pytest.fixture
def borel_weil_map(bminus, sl2K):
    """b- with the torus into sl2 with SL2."""
    return PairMap.inclusion(bminus, sl2K, ((1,),))


@pytest.fixture
def V2():
    return divided_power_form(2)


@pytest.fixture
def sl2_absolute(ZZ):
    """sl2 with the trivial group, so the complex is the absolute one."""
    return PairDatum.build("sl2", sl2(ZZ), GroupDatum.trivial(), [(), (), ()], {})
