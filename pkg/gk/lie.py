# lie.py

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from math import factorial
from typing import Any, Iterable, Mapping, Sequence

from sympy.polys.matrices import DomainMatrix

from .errors import (
    DegreeCapExceeded,
    ParseError,
    PreconditionFailure,
    ValidationFailure,
    ValidationReport,
)
from .linalg import (
    dense,
    entries,
    from_columns,
    has_entries_in,
    identity,
    is_isomorphism,
    is_zero,
    matmul,
    power,
    scale,
)
from .rings import BaseRing, RingMap

logger = logging.getLogger("gk.lie")

Monomial = tuple[int, ...]
PBWElement = dict[Monomial, Any]

LEFTMOST = "leftmost"
RIGHTMOST = "rightmost"


@dataclass(frozen=True, eq=False)
class LieAlgebraData:
    """
    A Lie algebra free over its ring, given by sparse structure constants.

    ``brackets[(i, j)]`` maps k to the coefficient of x_k in [x_i, x_j].
    Both orders of every nonzero pair are stored. Two instances are equal
    when ring, labels and structure constants agree; the name is cosmetic.
    """

    ring: BaseRing
    labels: tuple[str, ...]
    brackets: Mapping[tuple[int, int], Mapping[int, Any]] = field(default_factory=dict)
    name: str = ""

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str | int) -> int:
        if isinstance(label, int):
            if not 0 <= label < self.dim:
                raise ParseError(f"basis index {label} out of range for {self.name or 'algebra'}")
            return label
        try:
            return self.labels.index(label)
        except ValueError:
            raise ParseError(f"unknown basis label {label!r} in {self.name or 'algebra'}") from None

    @cached_property
    def structure_key(self) -> tuple[Any, ...]:
        constants = tuple(
            sorted((i, j, k, c) for (i, j), row in self.brackets.items() for k, c in row.items() if c)
        )
        return (self.ring, self.labels, constants)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LieAlgebraData):
            return NotImplemented
        return self is other or self.structure_key == other.structure_key

    def __hash__(self) -> int:
        return hash(self.structure_key)

    def bracket_basis(self, i: int, j: int) -> Mapping[int, Any]:
        return self.brackets.get((i, j), {})

    def basis_vector(self, label: str | int) -> list[Any]:
        K = self.ring.field
        v = [K.zero] * self.dim
        v[self.index(label)] = K.one
        return v

    def bracket(self, u: Sequence[Any], v: Sequence[Any]) -> list[Any]:
        K = self.ring.field
        out = [K.zero] * self.dim
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if not b:
                    continue
                for k, c in self.bracket_basis(i, j).items():
                    out[k] += a * b * c
        return out

    def ad(self, u: Sequence[Any]) -> DomainMatrix:
        """Matrix of [u, -]; column j is [u, x_j]."""
        K = self.ring.field
        cols = [self.bracket(u, self.basis_vector(j)) for j in range(self.dim)]
        return from_columns(cols, self.dim, K)

    def ad_basis(self, i: int) -> DomainMatrix:
        return self.ad(self.basis_vector(i))

    # ─────────────────────────────── construction
    @classmethod
    def from_triples(
        cls,
        ring: BaseRing,
        labels: Sequence[str],
        triples: Iterable[Sequence[Any]],
        *,
        name: str = "",
        validate: bool = True,
    ) -> "LieAlgebraData":
        """
        Build an algebra from sparse triples (i, j, k, c) meaning the x_k
        coefficient of [x_i, x_j] is c. Indices may be labels or 0-based
        integers. A pair given in one order only is completed by
        antisymmetry.
        """
        labels = tuple(labels)
        if len(set(labels)) != len(labels):
            raise ParseError(f"duplicate basis labels in {name or 'algebra'}")
        shell = cls(ring, labels, {}, name)
        given: dict[tuple[int, int], dict[int, Any]] = {}
        for t in triples:
            if len(t) != 4:
                raise ParseError(f"structure constant must be (i, j, k, c), got {t!r}")
            i, j, k = (shell.index(x) for x in t[:3])
            c = ring.convert(t[3])
            slot = given.setdefault((i, j), {})
            slot[k] = slot.get(k, ring.zero) + c
        brackets = {key: dict(val) for key, val in given.items()}
        for (i, j), val in given.items():
            if (j, i) not in given:
                brackets[(j, i)] = {k: -c for k, c in val.items()}
        brackets = {key: {k: c for k, c in val.items() if c} for key, val in brackets.items()}
        brackets = {key: val for key, val in brackets.items() if val}
        algebra = cls(ring, labels, brackets, name)
        if validate:
            report = validate_lie(algebra)
            if not report:
                raise ValidationFailure(report)
        return algebra

    def reordered(self, labels: Sequence[str]) -> "LieAlgebraData":
        """The same algebra with its basis listed in a new order."""
        if sorted(labels) != sorted(self.labels):
            raise PreconditionFailure("reordering must permute the existing labels")
        perm = [self.index(lab) for lab in labels]
        pos = {old: new for new, old in enumerate(perm)}
        brackets = {
            (pos[i], pos[j]): {pos[k]: c for k, c in val.items()}
            for (i, j), val in self.brackets.items()
        }
        return LieAlgebraData(self.ring, tuple(labels), brackets, self.name)

    def subalgebra(self, labels: Sequence[str], name: str = "") -> "LieAlgebraData":
        """The span of a subset of basis vectors; it must be closed under the bracket."""
        idx = [self.index(lab) for lab in labels]
        pos = {old: new for new, old in enumerate(idx)}
        brackets: dict[tuple[int, int], dict[int, Any]] = {}
        for i in idx:
            for j in idx:
                val = self.bracket_basis(i, j)
                if any(k not in pos for k in val):
                    raise PreconditionFailure(
                        f"[{self.labels[i]}, {self.labels[j]}] leaves the span of {list(labels)}"
                    )
                if val:
                    brackets[(pos[i], pos[j])] = {pos[k]: c for k, c in val.items()}
        return LieAlgebraData(self.ring, tuple(self.labels[i] for i in idx), brackets, name)

    def base_change(self, f: RingMap) -> "LieAlgebraData":
        if f.source != self.ring:
            raise PreconditionFailure(f"{f.label} does not start at {self.ring.label}")
        brackets = {key: {k: f(c) for k, c in val.items()} for key, val in self.brackets.items()}
        return LieAlgebraData(f.target, self.labels, brackets, self.name)

    def is_subalgebra_span(self, labels: Sequence[str]) -> bool:
        idx = {self.index(lab) for lab in labels}
        return all(
            set(self.bracket_basis(i, j)) <= idx for i in idx for j in idx
        )


###### Presets ######

def abelian(ring: BaseRing, n: int, labels: Sequence[str] | None = None, name: str = "") -> LieAlgebraData:
    labels = tuple(labels) if labels is not None else tuple(f"x{i + 1}" for i in range(n))
    return LieAlgebraData(ring, labels, {}, name or f"abelian{n}")


def sl2(ring: BaseRing) -> LieAlgebraData:
    """sl2 with basis order (e, h, f)."""
    return LieAlgebraData.from_triples(
        ring,
        ("e", "h", "f"),
        [("h", "e", "e", 2), ("h", "f", "f", -2), ("e", "f", "h", 1)],
        name="sl2",
    )


def gl(ring: BaseRing, n: int) -> LieAlgebraData:
    """
    gl_n on the matrix units E_ij, listed upper-triangular first, then the
    diagonal, then lower-triangular; for n = 2 this reads (E12, E11, E22, E21).
    """
    pairs = (
        [(i, j) for i in range(n) for j in range(n) if i < j]
        + [(i, i) for i in range(n)]
        + [(i, j) for i in range(n) for j in range(n) if i > j]
    )
    labels = [f"E{i + 1}{j + 1}" for i, j in pairs]
    triples = []
    for (i, j) in pairs:
        for (k, l) in pairs:
            if j == k:
                triples.append((f"E{i + 1}{j + 1}", f"E{k + 1}{l + 1}", f"E{i + 1}{l + 1}", 1))
            if l == i:
                triples.append((f"E{i + 1}{j + 1}", f"E{k + 1}{l + 1}", f"E{k + 1}{j + 1}", -1))
    return LieAlgebraData.from_triples(ring, labels, _complete(triples), name=f"gl{n}")


def _complete(triples: list[tuple]) -> list[tuple]:
    # gl(n) lists both orders already; merge them into one entry per (i, j, k)
    acc: dict[tuple[str, str, str], int] = {}
    for i, j, k, c in triples:
        acc[(i, j, k)] = acc.get((i, j, k), 0) + c
    return [(i, j, k, c) for (i, j, k), c in acc.items() if c]


###### Validation ######

def validate_lie(L: LieAlgebraData) -> ValidationReport:
    n = L.dim
    for i in range(n):
        if L.bracket_basis(i, i):
            return ValidationReport.failed(
                "alternating", f"[{L.labels[i]}, {L.labels[i]}] != 0", (i + 1, i + 1)
            )
    for i, j in combinations(range(n), 2):
        a, b = L.bracket_basis(i, j), L.bracket_basis(j, i)
        for k in set(a) | set(b):
            if a.get(k, L.ring.zero) + b.get(k, L.ring.zero):
                return ValidationReport.failed(
                    "antisymmetry",
                    f"[{L.labels[i]}, {L.labels[j]}] != -[{L.labels[j]}, {L.labels[i]}]",
                    (i + 1, j + 1),
                )
    for i, j, k in combinations(range(n), 3):
        xi, xj, xk = (L.basis_vector(t) for t in (i, j, k))
        terms = (
            L.bracket(xi, L.bracket(xj, xk)),
            L.bracket(xj, L.bracket(xk, xi)),
            L.bracket(xk, L.bracket(xi, xj)),
        )
        jac = [a + b + c for a, b, c in zip(*terms)]
        if any(jac):
            named = ", ".join(L.labels[t] for t in (i, j, k))
            return ValidationReport.failed(
                "jacobi", f"Jacobi identity fails on ({named})", (i + 1, j + 1, k + 1)
            )
    return ValidationReport.passed("lie")


###### PBW straightening ######

def degree(m: Monomial) -> int:
    return sum(m)


def monomial_word(m: Monomial) -> tuple[int, ...]:
    return tuple(i for i, e in enumerate(m) for _ in range(e))


def monomials(n: int, cap: int) -> list[Monomial]:
    """All exponent vectors of length n and degree <= cap, by degree then lexicographically descending."""
    out: list[Monomial] = []

    def rec(prefix: list[int], left: int, slots: int) -> None:
        if slots == 0:
            out.append(tuple(prefix))
            return
        for e in range(left, -1, -1):
            rec(prefix + [e], left - e, slots - 1)

    rec([], cap, n)
    return sorted(out, key=lambda m: (degree(m), tuple(-e for e in m)))


def _exponents(word: tuple[int, ...], n: int) -> Monomial:
    exps = [0] * n
    for i in word:
        exps[i] += 1
    return tuple(exps)


def _accumulate(acc: dict, terms: Iterable[tuple[Monomial, Any]], c) -> None:
    for m, v in terms:
        acc[m] = acc[m] + c * v if m in acc else c * v


STRAIGHTEN_CACHE_SIZE = 1 << 15


@lru_cache(maxsize=STRAIGHTEN_CACHE_SIZE)
def _straighten(L: LieAlgebraData, word: tuple[int, ...], strategy: str) -> tuple[tuple[Monomial, Any], ...]:
    inversions = [p for p in range(len(word) - 1) if word[p] > word[p + 1]]
    if not inversions:
        return ((_exponents(word, L.dim), L.ring.one),)
    p = inversions[0] if strategy == LEFTMOST else inversions[-1]
    j, i = word[p], word[p + 1]
    acc: dict[Monomial, Any] = {}
    # x_j x_i = x_i x_j + [x_j, x_i]
    _accumulate(acc, _straighten(L, word[:p] + (i, j) + word[p + 2:], strategy), L.ring.one)
    for k, c in L.bracket_basis(j, i).items():
        _accumulate(acc, _straighten(L, word[:p] + (k,) + word[p + 2:], strategy), c)
    return tuple(sorted((m, c) for m, c in acc.items() if c))


def pbw_straighten(
    L: LieAlgebraData, word: Sequence[int | str], cap: int, strategy: str = LEFTMOST
) -> PBWElement:
    """
    Rewrite a word in the basis of L as a combination of ordered PBW
    monomials, using x_j x_i = x_i x_j + [x_j, x_i] for j > i.
    """
    if strategy not in (LEFTMOST, RIGHTMOST):
        raise PreconditionFailure(f"unknown straightening strategy {strategy!r}")
    w = tuple(L.index(x) for x in word)
    if len(w) > cap:
        raise DegreeCapExceeded(len(w), cap)
    return dict(_straighten(L, w, strategy))


def multiply(L: LieAlgebraData, u: PBWElement, v: PBWElement, cap: int, strategy: str = LEFTMOST) -> PBWElement:
    acc: dict[Monomial, Any] = {}
    for m1, c1 in u.items():
        for m2, c2 in v.items():
            word = monomial_word(m1) + monomial_word(m2)
            if len(word) > cap:
                raise DegreeCapExceeded(len(word), cap)
            _accumulate(acc, _straighten(L, word, strategy), c1 * c2)
    return {m: c for m, c in acc.items() if c}


def subtract(u: PBWElement, v: PBWElement) -> PBWElement:
    out = dict(u)
    for m, c in v.items():
        out[m] = out[m] - c if m in out else -c
    return {m: c for m, c in out.items() if c}


def from_vector(L: LieAlgebraData, vec: Sequence[Any]) -> PBWElement:
    out: PBWElement = {}
    for i, c in enumerate(vec):
        if c:
            exps = [0] * L.dim
            exps[i] = 1
            out[tuple(exps)] = c
    return out


def unit(L: LieAlgebraData) -> PBWElement:
    return {(0,) * L.dim: L.ring.one}


def adjoint_action(L: LieAlgebraData, x: Sequence[Any] | str, u: PBWElement, cap: int) -> PBWElement:
    """[x, u] = xu - ux in U(L), straightened."""
    xv = L.basis_vector(x) if isinstance(x, str) else list(x)
    xe = from_vector(L, xv)
    return subtract(multiply(L, xe, u, cap), multiply(L, u, xe, cap))


###### Divided powers ######

@dataclass(frozen=True)
class DividedPowers:
    report: ValidationReport
    matrices: tuple[DomainMatrix, ...] = ()

    def __bool__(self) -> bool:
        return self.report.ok


def divided_power_check(N: DomainMatrix, bound: int, ring: BaseRing) -> DividedPowers:
    """
    Check that N^j / j! is integral on the standard lattice for every
    j < bound, given N^bound = 0. On success the matrices N^(0), ...,
    N^(bound-1) are kept.
    """
    if N.shape[0] != N.shape[1]:
        raise PreconditionFailure("divided powers need a square matrix")
    if not is_zero(power(N, bound)):
        raise PreconditionFailure(f"operator is not nilpotent of order {bound}")
    K = ring.field
    mats = [identity(N.shape[0], K)]
    Nj = identity(N.shape[0], K)
    for j in range(1, bound):
        Nj = matmul(Nj, N)
        D = scale(Nj, K.one / ring.from_int(factorial(j)))
        if not has_entries_in(D, ring):
            rows = entries(D)
            for col in range(N.shape[1]):
                image = [rows[i][col] for i in range(N.shape[0])]
                if not all(ring.contains(x) for x in image):
                    return DividedPowers(
                        ValidationReport.failed(
                            "divided-powers",
                            f"N^{j}/{j}! sends basis vector {col} outside the lattice",
                            j,
                            col,
                            [ring.format(x) for x in image],
                        )
                    )
        mats.append(D)
    return DividedPowers(ValidationReport.passed("divided-powers"), tuple(mats))


###### Subalgebra decompositions ######

@dataclass(frozen=True)
class SubalgebraDecomposition:
    """g = q + u_bar with both summands spanned by basis vectors of g."""

    parent: LieAlgebraData
    sub: tuple[str, ...]
    complement: tuple[str, ...]

    def check(self) -> ValidationReport:
        L = self.parent
        if sorted(self.sub + self.complement) != sorted(L.labels):
            return ValidationReport.failed(
                "decomposition", "sub and complement do not partition the basis"
            )
        if not L.is_subalgebra_span(self.sub):
            return ValidationReport.failed("decomposition", "sub is not closed under the bracket")
        if not L.is_subalgebra_span(self.complement):
            return ValidationReport.failed(
                "decomposition", "complement is not closed under the bracket"
            )
        K = L.ring.field
        order = [L.index(x) for x in self.sub + self.complement]
        summation = from_columns([L.basis_vector(i) for i in order], L.dim, K)
        if not is_isomorphism(summation, L.ring):
            return ValidationReport.failed("decomposition", "summation map is not unimodular")
        return ValidationReport.passed("decomposition")

    def complement_first(self) -> LieAlgebraData:
        return self.parent.reordered(self.complement + self.sub)

    def sub_first(self) -> LieAlgebraData:
        return self.parent.reordered(self.sub + self.complement)


def coefficient_vector(L: LieAlgebraData, values: Mapping[str, Any]) -> list[Any]:
    K = L.ring.field
    v = [K.zero] * L.dim
    for label, c in values.items():
        v[L.index(label)] = L.ring.convert(c)
    return v


def structure_matrix(L: LieAlgebraData) -> DomainMatrix:
    """dim x dim^2 matrix whose column i*dim + j is [x_i, x_j]."""
    n = L.dim
    cols = [L.bracket(L.basis_vector(i), L.basis_vector(j)) for i in range(n) for j in range(n)]
    return from_columns(cols, n, L.ring.field) if cols else dense([], L.ring.field, 0)
