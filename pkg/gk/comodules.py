# comodules.py

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from math import factorial
from typing import Any, Iterable, Sequence

from sympy.polys.matrices import DomainMatrix

from .errors import ParseError, PreconditionFailure, ValidationFailure, ValidationReport
from .lie import LieAlgebraData, abelian, divided_power_check
from .linalg import (
    LatticeModule,
    add,
    apply_ring_map,
    contains,
    diagonal,
    entries,
    equal,
    from_columns,
    has_entries_in,
    hstack,
    identity,
    intersect,
    is_isomorphism,
    is_zero,
    kernel_basis,
    kronecker,
    lattice_equal,
    matmul,
    preimage,
    scale,
    select_columns,
    solve,
    span_basis,
    sub,
    transpose,
    vstack,
    zeros,
)
from .rings import BaseRing, RingMap

logger = logging.getLogger("gk.comodules")

Weight = tuple[int, ...]

TRIVIAL = "trivial"
TORUS = "torus"
CHEVALLEY = "chevalley"


###### Group data ######

@dataclass(frozen=True)
class GroupDatum:
    """
    A split group K: trivial, a torus of rank r, or a torus of rank r with
    one root alpha and coroot alpha_v, <alpha, alpha_v> = 2 (SL2-type).
    """

    kind: str
    rank: int = 0
    root: Weight = ()
    coroot: Weight = ()
    name: str = ""

    def __post_init__(self):
        if self.kind not in (TRIVIAL, TORUS, CHEVALLEY):
            raise ParseError(f"unknown group kind {self.kind!r}")
        if self.kind == TRIVIAL and self.rank:
            raise ParseError("the trivial group has rank 0")
        if self.kind == CHEVALLEY:
            if len(self.root) != self.rank or len(self.coroot) != self.rank:
                raise ParseError("root and coroot must have length equal to the torus rank")
            if pairing(self.root, self.coroot) != 2:
                raise ParseError("<alpha, alpha_v> must equal 2")
        elif self.root or self.coroot:
            raise ParseError(f"a {self.kind} group carries no root")

    @classmethod
    def trivial(cls) -> "GroupDatum":
        return cls(TRIVIAL, name="1")

    @classmethod
    def torus(cls, rank: int = 1) -> "GroupDatum":
        return cls(TORUS, rank, name=f"T{rank}")

    @classmethod
    def sl2(cls) -> "GroupDatum":
        return cls(CHEVALLEY, 1, (2,), (1,), name="SL2")

    @classmethod
    def gl2(cls) -> "GroupDatum":
        return cls(CHEVALLEY, 2, (1, -1), (1, -1), name="GL2")

    @property
    def is_diagonalizable(self) -> bool:
        return self.kind != CHEVALLEY

    @property
    def torus_part(self) -> "GroupDatum":
        if self.kind == CHEVALLEY:
            return GroupDatum.torus(self.rank)
        return self

    def k_labels(self) -> tuple[str, ...]:
        labels = tuple(f"t{i + 1}" for i in range(self.rank))
        return labels + (("e", "f") if self.kind == CHEVALLEY else ())

    def lie_algebra(self, ring: BaseRing) -> LieAlgebraData:
        """Lie(K): the torus part is abelian; [t_i, e] = alpha_i e, [t_i, f] = -alpha_i f, [e, f] = sum alpha_v_i t_i."""
        labels = self.k_labels()
        if self.kind != CHEVALLEY:
            return abelian(ring, len(labels), labels, name=f"Lie({self.name})")
        triples = []
        for i in range(self.rank):
            if self.root[i]:
                triples.append((f"t{i + 1}", "e", "e", self.root[i]))
                triples.append((f"t{i + 1}", "f", "f", -self.root[i]))
            if self.coroot[i]:
                triples.append(("e", "f", f"t{i + 1}", self.coroot[i]))
        return LieAlgebraData.from_triples(ring, labels, triples, name=f"Lie({self.name})")

    def k_weights(self) -> tuple[Weight, ...]:
        """Weights of the adjoint action of K on Lie(K)."""
        zero = (0,) * self.rank
        out = tuple(zero for _ in range(self.rank))
        if self.kind == CHEVALLEY:
            out += (self.root, tuple(-a for a in self.root))
        return out


def pairing(weight: Sequence[int], coweight: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(weight, coweight))


def add_weights(a: Sequence[int], b: Sequence[int]) -> Weight:
    return tuple(x + y for x, y in zip(a, b))


def sub_weights(a: Sequence[int], b: Sequence[int]) -> Weight:
    return tuple(x - y for x, y in zip(a, b))


def neg_weight(a: Sequence[int]) -> Weight:
    return tuple(-x for x in a)


###### K-modules ######

@dataclass(frozen=True, eq=False)
class KModule:
    """
    A K-module on a free lattice: one weight per basis vector, plus the
    raising and lowering operators e, f when K is of SL2-type. Divided
    powers e^(j) = e^j / j! are derived, never stored by the caller.
    """

    group: GroupDatum
    lattice: LatticeModule
    weights: tuple[Weight, ...]
    e: DomainMatrix | None = None
    f: DomainMatrix | None = None

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(tuple(int(x) for x in w) for w in self.weights))
        if len(self.weights) != self.lattice.rank:
            raise ParseError(
                f"{len(self.weights)} weights given for a lattice of rank {self.lattice.rank}"
            )
        for w in self.weights:
            if len(w) != self.group.rank:
                raise ParseError(f"weight {w} does not have length {self.group.rank}")
        n, K = self.lattice.rank, self.ring.field
        if self.group.kind == CHEVALLEY:
            if self.e is None:
                object.__setattr__(self, "e", zeros(n, n, K))
            if self.f is None:
                object.__setattr__(self, "f", zeros(n, n, K))
            for M in (self.e, self.f):
                if M.shape != (n, n):
                    raise ParseError(f"operator shape {M.shape} does not fit rank {n}")
        elif self.e is not None or self.f is not None:
            raise ParseError(f"a {self.group.kind} group has no root operators")

    @property
    def ring(self) -> BaseRing:
        return self.lattice.ring

    @property
    def rank(self) -> int:
        return self.lattice.rank

    @property
    def labels(self) -> tuple[str, ...]:
        return self.lattice.labels

    def weight_of(self, i: int) -> Weight:
        return self.weights[i]

    @cached_property
    def distinct_weights(self) -> tuple[Weight, ...]:
        seen: list[Weight] = []
        for w in self.weights:
            if w not in seen:
                seen.append(w)
        return tuple(seen)

    def graded_ranks(self) -> dict[Weight, int]:
        out: dict[Weight, int] = {}
        for w in self.weights:
            out[w] = out.get(w, 0) + 1
        return out

    @cached_property
    def projections(self) -> tuple[DomainMatrix, ...]:
        if self.group.kind == TRIVIAL or len(self.distinct_weights) <= 1:
            return ()
        K = self.ring.field
        return tuple(
            diagonal([K.one if w == mu else K.zero for w in self.weights], K)
            for mu in self.distinct_weights
        )

    def _divided(self, N: DomainMatrix) -> tuple[DomainMatrix, ...]:
        K = self.ring.field
        out = []
        Nj = identity(self.rank, K)
        for j in range(1, self.rank + 1):
            Nj = matmul(Nj, N)
            if is_zero(Nj):
                break
            out.append(scale(Nj, K.one / self.ring.from_int(factorial(j))))
        return tuple(out)

    @cached_property
    def e_divided(self) -> tuple[DomainMatrix, ...]:
        """e^(1), e^(2), ... up to the last nonzero one."""
        return self._divided(self.e) if self.e is not None else ()

    @cached_property
    def f_divided(self) -> tuple[DomainMatrix, ...]:
        return self._divided(self.f) if self.f is not None else ()

    def operators(self) -> tuple[DomainMatrix, ...]:
        """Every operator a K-subcomodule must be stable under."""
        return self.projections + self.e_divided + self.f_divided

    def nu(self, k_index: int) -> DomainMatrix:
        """dnu: the action of the k_index-th basis vector of Lie(K)."""
        K = self.ring.field
        r = self.group.rank
        if k_index < r:
            return diagonal([self.ring.from_int(w[k_index]) for w in self.weights], K)
        if self.group.kind == CHEVALLEY and k_index == r:
            return self.e
        if self.group.kind == CHEVALLEY and k_index == r + 1:
            return self.f
        raise PreconditionFailure(f"Lie(K) has no basis vector {k_index}")

    def base_change(self, f: RingMap) -> "KModule":
        return KModule(
            self.group,
            self.lattice.base_change(f),
            self.weights,
            apply_ring_map(f, self.e) if self.e is not None else None,
            apply_ring_map(f, self.f) if self.f is not None else None,
        )

    def with_group(self, group: GroupDatum, weights: Sequence[Weight]) -> "KModule":
        """The same lattice regraded for a diagonalizable group."""
        return KModule(group, self.lattice, tuple(weights))

    def relabel(self, labels: Sequence[str]) -> "KModule":
        return KModule(self.group, LatticeModule(self.ring, tuple(labels)), self.weights, self.e, self.f)


def trivial_module(ring: BaseRing, rank: int = 1, labels: Sequence[str] | None = None) -> KModule:
    labels = tuple(labels) if labels is not None else tuple(f"v{i + 1}" for i in range(rank))
    return KModule(GroupDatum.trivial(), LatticeModule(ring, labels), tuple(() for _ in labels))


def torus_module(
    ring: BaseRing,
    weights: Sequence[Sequence[int] | int],
    labels: Sequence[str] | None = None,
    group: GroupDatum | None = None,
) -> KModule:
    ws = tuple((w,) if isinstance(w, int) else tuple(w) for w in weights)
    group = group or GroupDatum.torus(len(ws[0]) if ws else 1)
    labels = tuple(labels) if labels is not None else tuple(f"v{i + 1}" for i in range(len(ws)))
    return KModule(group, LatticeModule(ring, labels), ws)


def weight_label(weights: Sequence[Weight], i: int, prefix: str = "v") -> str:
    w = weights[i]
    tag = ",".join(str(x) for x in w) if len(w) != 1 else str(w[0])
    if sum(1 for x in weights if x == w) == 1:
        return f"{prefix}{tag}"
    k = sum(1 for x in weights[:i] if x == w)
    return f"{prefix}{tag}_{k}"


def divided_power_form(n: int, ring: BaseRing | None = None) -> KModule:
    """
    The integral form of V(n) for SL2 on v_n, v_{n-2}, ..., v_{-n} with
    E v_{n-2i} = (n-i+1) v_{n-2i+2} and F v_{n-2i} = (i+1) v_{n-2i-2}.
    """
    ring = ring or BaseRing.integers()
    K = ring.field
    ws = tuple((n - 2 * i,) for i in range(n + 1))
    E = [[K.zero] * (n + 1) for _ in range(n + 1)]
    F = [[K.zero] * (n + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        if i >= 1:
            E[i - 1][i] = ring.from_int(n - i + 1)
        if i < n:
            F[i + 1][i] = ring.from_int(i + 1)
    labels = tuple(weight_label(ws, i) for i in range(n + 1))
    return KModule(
        GroupDatum.sl2(),
        LatticeModule(ring, labels),
        ws,
        DomainMatrix(E, (n + 1, n + 1), K),
        DomainMatrix(F, (n + 1, n + 1), K),
    )


def symmetric_power_form(n: int, ring: BaseRing | None = None) -> KModule:
    """Sym^n of the standard lattice on x^(n-i) y^i, with E = x d/dy and F = y d/dx."""
    ring = ring or BaseRing.integers()
    K = ring.field
    ws = tuple((n - 2 * i,) for i in range(n + 1))
    E = [[K.zero] * (n + 1) for _ in range(n + 1)]
    F = [[K.zero] * (n + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        if i >= 1:
            E[i - 1][i] = ring.from_int(i)
        if i < n:
            F[i + 1][i] = ring.from_int(n - i)
    labels = tuple(f"x{n - i}y{i}" for i in range(n + 1))
    return KModule(
        GroupDatum.sl2(),
        LatticeModule(ring, labels),
        ws,
        DomainMatrix(E, (n + 1, n + 1), K),
        DomainMatrix(F, (n + 1, n + 1), K),
    )


def highest_weight_ambient(n: int) -> KModule:
    """
    V(n) over QQ on w_{n-2i} = f^i w_n, where f w_{n-2i} = w_{n-2i-2} and
    e w_{n-2i} = i(n-i+1) w_{n-2i+2}.
    """
    ring = BaseRing.rationals()
    K = ring.field
    ws = tuple((n - 2 * i,) for i in range(n + 1))
    E = [[K.zero] * (n + 1) for _ in range(n + 1)]
    F = [[K.zero] * (n + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        if i >= 1:
            E[i - 1][i] = ring.from_int(i * (n - i + 1))
        if i < n:
            F[i + 1][i] = K.one
    labels = tuple(weight_label(ws, i, "w") for i in range(n + 1))
    return KModule(
        GroupDatum.sl2(),
        LatticeModule(ring, labels),
        ws,
        DomainMatrix(E, (n + 1, n + 1), K),
        DomainMatrix(F, (n + 1, n + 1), K),
    )


###### Validation ######

def validate_kmodule(V: KModule) -> ValidationReport:
    if V.group.kind != CHEVALLEY:
        return ValidationReport.passed("kmodule")
    alpha = V.group.root
    for name, M, shift in (("e", V.e, alpha), ("f", V.f, neg_weight(alpha))):
        if not has_entries_in(M, V.ring):
            return ValidationReport.failed("kmodule", f"{name} has entries outside {V.ring.label}")
        rows = entries(M)
        for i in range(V.rank):
            for j in range(V.rank):
                if rows[i][j] and V.weights[i] != add_weights(V.weights[j], shift):
                    return ValidationReport.failed(
                        "weight-support",
                        f"{name} sends {V.labels[j]} to {V.labels[i]} but does not shift its weight by {shift}",
                        V.labels[j],
                        V.labels[i],
                    )
        if V.rank:
            cert = divided_power_check(M, V.rank, V.ring)
            if not cert:
                return cert.report
    K = V.ring.field
    commutator = sub(matmul(V.e, V.f), matmul(V.f, V.e))
    expected = diagonal([V.ring.from_int(pairing(w, V.group.coroot)) for w in V.weights], K)
    if not equal(commutator, expected):
        return ValidationReport.failed("commutator", "[e, f] does not act on weight mu by <mu, alpha_v>")
    return ValidationReport.passed("kmodule")


def checked(V: KModule) -> KModule:
    report = validate_kmodule(V)
    if not report:
        raise ValidationFailure(report)
    return V


###### Sublattices ######

@dataclass(frozen=True, eq=False)
class Sublattice:
    """
    Columns of ``basis`` (ambient coordinates) spanning a sublattice over
    ``ring``, which may be smaller than the ambient ring (a ZZ-form inside a
    QQ-module).
    """

    ambient: KModule
    basis: DomainMatrix
    ring: BaseRing
    is_subcomodule: bool = False

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def contains(self, vectors: DomainMatrix) -> bool:
        return contains(self.basis, vectors, self.ring)

    def is_contained_in(self, other: "Sublattice") -> bool:
        return other.contains(self.basis)

    def same_as(self, other: "Sublattice") -> bool:
        return lattice_equal(self.basis, other.basis, self.ring)

    def graded_basis(self) -> DomainMatrix:
        """A basis of weight vectors, listed in the ambient weight order."""
        if not self.is_subcomodule:
            raise PreconditionFailure("only a subcomodule has a graded basis")
        V = self.ambient
        K = V.ring.field
        if not V.projections:
            return self.basis
        blocks = [span_basis(matmul(P, self.basis), self.ring) for P in V.projections]
        return hstack(K, V.rank, *blocks)

    def as_kmodule(self, prefix: str = "v") -> KModule:
        """The subcomodule as a K-module in its own right, on the graded basis."""
        V = self.ambient
        B = self.graded_basis()
        ws = []
        for col in range(B.shape[1]):
            vec = [row[col] for row in entries(B)]
            ws.append(next(V.weights[i] for i, x in enumerate(vec) if x))
        ws = tuple(ws)
        labels = tuple(weight_label(ws, i, prefix) for i in range(len(ws)))
        e = f = None
        if V.group.kind == CHEVALLEY:
            e = solve(B, matmul(V.e, B), self.ring)
            f = solve(B, matmul(V.f, B), self.ring)
            if e is None or f is None:
                raise PreconditionFailure("the sublattice is not stable under e and f")
        return KModule(V.group, LatticeModule(self.ring, labels), ws, e, f)


def _columns_matrix(V: KModule, S: DomainMatrix | Iterable[Sequence[Any]]) -> DomainMatrix:
    if isinstance(S, DomainMatrix):
        return S
    cols = [list(c) for c in S]
    return from_columns(cols, V.rank, V.ring.field)


def generated_subcomodule(
    V: KModule, S: DomainMatrix | Iterable[Sequence[Any]], ring: BaseRing | None = None
) -> Sublattice:
    """The smallest sublattice containing S and stable under every K-operator of V."""
    ring = ring or V.ring
    K = V.ring.field
    B = span_basis(_columns_matrix(V, S), ring)
    ops = V.operators()
    steps = 0
    while True:
        grown = span_basis(hstack(K, V.rank, B, *(matmul(op, B) for op in ops)), ring)
        steps += 1
        if grown.shape[1] == B.shape[1] and contains(B, grown, ring):
            break
        B = grown
    logger.debug("generated subcomodule of rank %d after %d steps", B.shape[1], steps)
    return Sublattice(V, B, ring, True)


def maximal_subcomodule(V: KModule, V0: Sublattice | DomainMatrix, ring: BaseRing | None = None) -> Sublattice:
    """The largest sublattice of V0 stable under every K-operator of V."""
    if isinstance(V0, Sublattice):
        ring = ring or V0.ring
        B = V0.basis
    else:
        ring = ring or V.ring
        B = span_basis(V0, ring)
    ops = V.operators()
    while True:
        C = B
        for op in ops:
            C = preimage(op, C, B, ring)
        if C.shape[1] == B.shape[1] and contains(C, B, ring):
            break
        B = C
    return Sublattice(V, B, ring, True)


def invariants_K(V: KModule) -> Sublattice:
    K = V.ring.field
    if V.group.kind == TRIVIAL:
        return Sublattice(V, identity(V.rank, K), V.ring, True)
    zero = (0,) * V.group.rank
    idx = [i for i, w in enumerate(V.weights) if w == zero]
    B0 = select_columns(identity(V.rank, K), idx)
    if V.group.kind == TORUS or not idx:
        return Sublattice(V, B0, V.ring, True)
    system = vstack(K, len(idx), matmul(V.e, B0), matmul(V.f, B0))
    return Sublattice(V, matmul(B0, kernel_basis(system, V.ring)), V.ring, True)


###### Tensor, Hom, dual ######

def _same_group(V: KModule, W: KModule) -> None:
    if V.group != W.group:
        raise PreconditionFailure(f"K-modules over {V.group.name} and {W.group.name}")
    if V.ring != W.ring:
        raise PreconditionFailure(f"K-modules over {V.ring.label} and {W.ring.label}")


def tensor_K(V: KModule, W: KModule) -> KModule:
    """V tensor W on the basis v_a * w_b, index a * rank(W) + b."""
    _same_group(V, W)
    K = V.ring.field
    n, m = V.rank, W.rank
    ws = tuple(add_weights(a, b) for a in V.weights for b in W.weights)
    labels = tuple(f"{a}⊗{b}" for a in V.labels for b in W.labels)
    e = f = None
    if V.group.kind == CHEVALLEY:
        e = add(kronecker(V.e, identity(m, K)), kronecker(identity(n, K), W.e))
        f = add(kronecker(V.f, identity(m, K)), kronecker(identity(n, K), W.f))
    return KModule(V.group, LatticeModule(V.ring, labels), ws, e, f)


def hom_operator(X: DomainMatrix, Y: DomainMatrix) -> DomainMatrix:
    """phi -> Y phi - phi X on row-major vec(phi) for phi: source -> target."""
    K = X.domain
    n, m = X.shape[0], Y.shape[0]
    return sub(kronecker(Y, identity(n, K)), kronecker(identity(m, K), transpose(X)))


def internal_hom_K(V: KModule, W: KModule) -> KModule:
    """
    Hom(V, W) with basis phi_{i,j} (v_j -> w_i), index i * rank(V) + j, of
    weight wt(w_i) - wt(v_j).
    """
    _same_group(V, W)
    ws = tuple(sub_weights(b, a) for b in W.weights for a in V.weights)
    labels = tuple(f"{b}|{a}" for b in W.labels for a in V.labels)
    e = f = None
    if V.group.kind == CHEVALLEY:
        e = hom_operator(V.e, W.e)
        f = hom_operator(V.f, W.f)
    return checked(KModule(V.group, LatticeModule(V.ring, labels), ws, e, f))


def dual_K(V: KModule) -> KModule:
    """V^c on the dual basis: weights negated, operators transposed and negated."""
    K = V.ring.field
    ws = tuple(neg_weight(w) for w in V.weights)
    labels = tuple(f"{a}*" for a in V.labels)
    e = f = None
    if V.group.kind == CHEVALLEY:
        e = scale(transpose(V.e), -K.one)
        f = scale(transpose(V.f), -K.one)
    return KModule(V.group, LatticeModule(V.ring, labels), ws, e, f)


def equivariance_unknowns(V: KModule, W: KModule) -> list[int]:
    """Row-major positions i * rank(V) + j with wt(w_i) = wt(v_j)."""
    return [
        i * V.rank + j
        for i in range(W.rank)
        for j in range(V.rank)
        if W.weights[i] == V.weights[j]
    ]


def hom_K(V: KModule, W: KModule) -> DomainMatrix:
    """Hom_K(V, W) as columns in row-major vec coordinates, by direct kernel computation."""
    _same_group(V, W)
    K = V.ring.field
    total = V.rank * W.rank
    unknowns = equivariance_unknowns(V, W)
    embed = select_columns(identity(total, K), unknowns)
    if V.group.kind != CHEVALLEY or not unknowns:
        return embed
    system = vstack(
        K,
        len(unknowns),
        matmul(hom_operator(V.e, W.e), embed),
        matmul(hom_operator(V.f, W.f), embed),
    )
    return matmul(embed, kernel_basis(system, V.ring))


###### Descent ######

def descent_check(f: RingMap, V: KModule, components: Sequence[DomainMatrix]) -> ValidationReport:
    """
    Given a decomposition of V over f.target into subcomodules whose bases
    are defined over f.source, confirm that each component is already a
    subcomodule of V over f.source and that the components decompose V.
    """
    if f.source != V.ring:
        raise PreconditionFailure(f"{f.label} does not start at {V.ring.label}")
    Vt = V.base_change(f)
    K, Kt = V.ring.field, Vt.ring.field
    lifted = [apply_ring_map(f, C) for C in components]
    total = hstack(Kt, Vt.rank, *lifted) if lifted else zeros(Vt.rank, 0, Kt)
    if not is_isomorphism(total, Vt.ring):
        return ValidationReport.failed("descent", f"components do not decompose V over {Vt.ring.label}")
    for n, C in enumerate(lifted):
        for op in Vt.operators():
            if not contains(C, matmul(op, C), Vt.ring):
                return ValidationReport.failed(
                    "descent", f"component {n} is not a subcomodule over {Vt.ring.label}", n
                )
    for n, C in enumerate(components):
        if not has_entries_in(C, V.ring):
            return ValidationReport.failed("descent", f"component {n} is not defined over {V.ring.label}", n)
        for op in V.operators():
            if not contains(C, matmul(op, C), V.ring):
                return ValidationReport.failed(
                    "descent", f"component {n} does not descend to a subcomodule over {V.ring.label}", n
                )
    direct = hstack(K, V.rank, *components) if components else zeros(V.rank, 0, K)
    if not is_isomorphism(direct, V.ring):
        return ValidationReport.failed("descent", f"components do not decompose V over {V.ring.label}")
    return ValidationReport.passed("descent")


def weight_component_basis(V: KModule, weight: Weight) -> DomainMatrix:
    K = V.ring.field
    return select_columns(identity(V.rank, K), [i for i, w in enumerate(V.weights) if w == weight])


def sublattice_intersection(A: Sublattice, B: Sublattice) -> Sublattice:
    return Sublattice(A.ambient, intersect(A.basis, B.basis, A.ring), A.ring, A.is_subcomodule and B.is_subcomodule)
