# rings.py

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, prod
from typing import Any

from sympy import factorint, isprime
from sympy.polys.domains import QQ, QQ_I

from .errors import NotInRing, ParseError, UnsupportedRingMap

INTEGERS = "ZZ"
RATIONALS = "QQ"
LOCALIZED = "ZZ[1/n]"
GAUSSIAN = "ZZ[i]"

_KINDS = (INTEGERS, RATIONALS, LOCALIZED, GAUSSIAN)
_LOCALIZED_LABEL = re.compile(r"^ZZ\[1/(\d+)\]$")
_QUOTIENT_LABEL = re.compile(r"^ZZ/(\d+)$")


def _int(q) -> int:
    """Integer value of a rational domain element with denominator 1."""
    return int(q.numerator)


@dataclass(frozen=True)
class BaseRing:
    """
    One of the four supported principal ideal domains.

    Elements are stored as elements of the fraction field (sympy ``QQ`` or
    ``QQ_I``); membership in the ring itself is a predicate. This keeps
    every matrix in a single sympy domain no matter which ring a lattice
    is defined over.
    """

    kind: str
    primes: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ParseError(f"unknown ring kind {self.kind!r}")
        if self.kind == LOCALIZED:
            if not self.primes:
                raise ParseError("ZZ[1/n] needs at least one inverted prime")
            for p in self.primes:
                if not isprime(p):
                    raise ParseError(f"{p} is not prime")
            object.__setattr__(self, "primes", tuple(sorted(set(self.primes))))
        elif self.primes:
            raise ParseError(f"{self.kind} takes no inverted primes")

    # ─────────────────────────────── constructors
    @classmethod
    def integers(cls) -> "BaseRing":
        return cls(INTEGERS)

    @classmethod
    def rationals(cls) -> "BaseRing":
        return cls(RATIONALS)

    @classmethod
    def gaussian(cls) -> "BaseRing":
        return cls(GAUSSIAN)

    @classmethod
    def localized(cls, n: int) -> "BaseRing":
        """ZZ[1/n]: invert every prime dividing n."""
        if n < 2:
            raise ParseError("ZZ[1/n] needs n >= 2")
        return cls(LOCALIZED, tuple(factorint(n)))

    @classmethod
    def parse(cls, label: str) -> "BaseRing":
        label = label.replace(" ", "")
        if label in ("ZZ", "Z"):
            return cls.integers()
        if label in ("QQ", "Q"):
            return cls.rationals()
        if label in ("ZZ[i]", "Z[i]"):
            return cls.gaussian()
        m = _LOCALIZED_LABEL.match(label)
        if m:
            return cls.localized(int(m.group(1)))
        if _QUOTIENT_LABEL.match(label):
            raise UnsupportedRingMap(f"{label} is neither flat nor finite projective over ZZ")
        raise ParseError(f"cannot parse ring {label!r}")

    # ─────────────────────────────── domain plumbing
    @property
    def field(self):
        return QQ_I if self.kind == GAUSSIAN else QQ

    @property
    def is_field(self) -> bool:
        return self.kind == RATIONALS

    @property
    def label(self) -> str:
        if self.kind == LOCALIZED:
            return f"ZZ[1/{prod(self.primes)}]"
        return self.kind

    def __str__(self) -> str:
        return self.label

    @property
    def zero(self):
        return self.field(0)

    @property
    def one(self):
        return self.field(1)

    def from_int(self, n: int):
        return self.field(int(n))

    def from_fraction(self, p: int, q: int = 1):
        r = QQ(int(p), int(q))
        return QQ_I(r, 0) if self.kind == GAUSSIAN else r

    def gaussian_element(self, x, y):
        if self.kind != GAUSSIAN:
            raise NotInRing(f"{self.label} has no imaginary unit")
        return QQ_I(x, y)

    def parts(self, z) -> tuple[Any, Any]:
        """Real and imaginary rational parts of a field element."""
        if self.kind == GAUSSIAN:
            return z.x, z.y
        return z, QQ(0)

    # ─────────────────────────────── membership
    def _s_free(self, n: int) -> int:
        n = abs(n)
        for p in self.primes:
            while n and n % p == 0:
                n //= p
        return n

    def contains(self, z) -> bool:
        if self.kind == RATIONALS:
            return True
        if self.kind == GAUSSIAN:
            return z.x.denominator == 1 and z.y.denominator == 1
        if self.kind == INTEGERS:
            return z.denominator == 1
        return self._s_free(int(z.denominator)) == 1

    def convert(self, value: Any):
        """
        Build a ring element from user data: an int, a Fraction, a string
        such as ``"3/4"``, a field element, or an ``[x, y]`` pair over ZZ[i].
        """
        if isinstance(value, (list, tuple)):
            if len(value) != 2:
                raise ParseError(f"gaussian value must be [x, y], got {value!r}")
            x, y = (self._rational(v) for v in value)
            z = self.gaussian_element(x, y)
        elif isinstance(value, (int, str, Fraction)) and not isinstance(value, bool):
            r = self._rational(value)
            z = QQ_I(r, 0) if self.kind == GAUSSIAN else r
        else:
            z = self.field.convert(value)
        if not self.contains(z):
            raise NotInRing(f"{value!r} is not an element of {self.label}")
        return z

    @staticmethod
    def _rational(value: Any):
        try:
            fr = Fraction(value)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"cannot read {value!r} as a number") from exc
        return QQ(fr.numerator, fr.denominator)

    def denominator(self, z) -> int:
        """Smallest positive integer d with d*z in the ring."""
        if self.kind == RATIONALS:
            return 1
        if self.kind == GAUSSIAN:
            a, b = int(z.x.denominator), int(z.y.denominator)
            return a * b // gcd(a, b)
        d = int(z.denominator)
        if self.kind == LOCALIZED:
            return self._s_free(d)
        return d

    # ─────────────────────────────── euclidean structure
    def is_unit(self, z) -> bool:
        return bool(z) and self.norm(z) == 1

    def norm(self, z) -> int:
        if not z:
            return 0
        if self.kind == RATIONALS:
            return 1
        if self.kind == INTEGERS:
            return abs(_int(z))
        if self.kind == LOCALIZED:
            return self._s_free(int(z.numerator))
        x, y = _int(z.x), _int(z.y)
        return x * x + y * y

    def divmod(self, a, b):
        """Euclidean division: a = q*b + r with norm(r) < norm(b)."""
        if not b:
            raise ZeroDivisionError("division by zero in " + self.label)
        if self.kind == RATIONALS:
            return a / b, self.zero
        if self.kind == INTEGERS:
            q, r = divmod(_int(a), _int(b))
            return QQ(q), QQ(r)
        if self.kind == LOCALIZED:
            m = self.norm(b)
            if m == 1:
                return a / b, self.zero
            r = QQ((int(a.numerator) * pow(int(a.denominator), -1, m)) % m)
            return (a - r) / b, r
        ax, ay, bx, by = _int(a.x), _int(a.y), _int(b.x), _int(b.y)
        nx, ny, c = ax * bx + ay * by, ay * bx - ax * by, bx * bx + by * by
        q = QQ_I((2 * nx + c) // (2 * c), (2 * ny + c) // (2 * c))
        return q, a - q * b

    def divides(self, b, a) -> bool:
        if not b:
            return not a
        return self.contains(a / b)

    def exquo(self, a, b):
        if not self.divides(b, a):
            raise NotInRing(f"{self.format(b)} does not divide {self.format(a)} in {self.label}")
        return a / b if b else self.zero

    def associate(self, z) -> tuple[Any, Any]:
        """Return (c, u) with z = u*c, u a unit and c the canonical associate."""
        if not z:
            return self.zero, self.one
        if self.kind == RATIONALS:
            return self.one, z
        if self.kind == INTEGERS:
            return (z, self.one) if z > 0 else (-z, -self.one)
        if self.kind == LOCALIZED:
            c = QQ(self.norm(z))
            return c, z / c
        units = (QQ_I(1, 0), QQ_I(0, 1), QQ_I(-1, 0), QQ_I(0, -1))
        for u in units:
            c = z / u
            if c.x > 0 and c.y >= 0:
                return c, u
        raise AssertionError("no canonical associate")  # unreachable

    def canonical(self, z):
        return self.associate(z)[0]

    # ─────────────────────────────── output
    def format(self, z) -> str:
        x, y = self.parts(z)
        if self.kind != GAUSSIAN or not y:
            return _fmt_rational(x)
        if not x:
            return "i" if y == 1 else "-i" if y == -1 else f"{_fmt_rational(y)}i"
        sign = "+" if y > 0 else "-"
        mag = -y if y < 0 else y
        tail = "i" if mag == 1 else f"{_fmt_rational(mag)}i"
        return f"{_fmt_rational(x)}{sign}{tail}"

    def to_json(self, z) -> Any:
        if self.kind == GAUSSIAN:
            return [_json_rational(z.x), _json_rational(z.y)]
        return _json_rational(z)



def _fmt_rational(q) -> str:
    if q.denominator == 1:
        return str(int(q.numerator))
    return f"{int(q.numerator)}/{int(q.denominator)}"


def _json_rational(q) -> Any:
    if q.denominator == 1:
        return int(q.numerator)
    return _fmt_rational(q)


@dataclass(frozen=True)
class RingMap:
    """
    A ring homomorphism k -> k' between supported rings.

    Every supported map is flat. ZZ -> ZZ[i] is also finite free of rank 2
    with basis {1, i}; identities are finite free of rank 1.
    """

    source: BaseRing
    target: BaseRing

    def __post_init__(self):
        if not _supported(self.source, self.target):
            raise UnsupportedRingMap(
                f"no supported ring map {self.source.label} -> {self.target.label}"
            )

    @classmethod
    def identity(cls, ring: BaseRing) -> "RingMap":
        return cls(ring, ring)

    @classmethod
    def parse(cls, label: str) -> "RingMap":
        try:
            src, tgt = (s.strip() for s in label.split("->"))
        except ValueError as exc:
            raise ParseError(f"ring map must read 'A -> B', got {label!r}") from exc
        source = BaseRing.parse(src)
        if _QUOTIENT_LABEL.match(tgt.replace(" ", "")):
            raise UnsupportedRingMap(f"{src} -> {tgt} is neither flat nor finite projective")
        return cls(source, BaseRing.parse(tgt))

    @property
    def label(self) -> str:
        return f"{self.source.label} -> {self.target.label}"

    @property
    def is_identity(self) -> bool:
        return self.source == self.target

    @property
    def is_flat(self) -> bool:
        return True

    @property
    def is_finite_projective(self) -> bool:
        return self.is_identity or self.target.kind == GAUSSIAN

    @property
    def rank(self) -> int | None:
        if self.is_identity:
            return 1
        if self.target.kind == GAUSSIAN:
            return 2
        return None

    def __call__(self, z):
        if self.target.kind == GAUSSIAN and self.source.kind != GAUSSIAN:
            return QQ_I(z, 0)
        return z

    def then(self, other: "RingMap") -> "RingMap":
        if other.source != self.target:
            raise UnsupportedRingMap(f"cannot compose {self.label} with {other.label}")
        return RingMap(self.source, other.target)


def _supported(source: BaseRing, target: BaseRing) -> bool:
    if source == target:
        return True
    if source.kind == INTEGERS:
        return target.kind in (RATIONALS, LOCALIZED, GAUSSIAN)
    if source.kind == LOCALIZED:
        if target.kind == RATIONALS:
            return True
        if target.kind == LOCALIZED:
            return set(source.primes) <= set(target.primes)
    return False
