# pairs.py

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Any, Sequence

from sympy.polys.matrices import DomainMatrix

from .comodules import (
    CHEVALLEY,
    GroupDatum,
    KModule,
    Sublattice,
    add_weights,
    dual_K,
    equivariance_unknowns,
    hom_operator,
    internal_hom_K,
    tensor_K,
    validate_kmodule,
    weight_label,
)
from .errors import (
    ParseError,
    PreconditionFailure,
    UnsupportedRegime,
    ValidationFailure,
    ValidationReport,
)
from .lie import LieAlgebraData, abelian, gl, sl2, structure_matrix, validate_lie
from .linalg import (
    LatticeModule,
    add,
    apply_ring_map,
    column,
    contains,
    diagonal,
    dense,
    entries,
    equal,
    from_columns,
    has_entries_in,
    hstack,
    identity,
    is_isomorphism,
    kernel_basis,
    kronecker,
    matmul,
    scale,
    select_columns,
    smith_normal_form,
    solve,
    span_basis,
    sub,
    transpose,
    vstack,
    zeros,
)
from .rings import BaseRing, RingMap

if TYPE_CHECKING:
    from .functors import WeightWindow

logger = logging.getLogger("gk.pairs")


def _divided(mats: Sequence[DomainMatrix], j: int, n: int, K) -> DomainMatrix | None:
    """The j-th divided power from a list e^(1), e^(2), ...; None past the end."""
    if j == 0:
        return identity(n, K)
    return mats[j - 1] if j <= len(mats) else None


def _divided_or_zero(mats: Sequence[DomainMatrix], j: int, n: int, K) -> DomainMatrix:
    M = _divided(mats, j, n, K)
    return zeros(n, n, K) if M is None else M


###### Pairs ######

@dataclass(frozen=True, eq=False)
class PairDatum:
    """
    A pair (g, K): g with a K-structure on its underlying lattice and a map
    psi: Lie(K) -> g. psi is stored as a dim(g) x dim(Lie K) matrix.
    """

    name: str
    g: LieAlgebraData
    group: GroupDatum
    adjoint: KModule
    psi: DomainMatrix

    def __post_init__(self):
        if self.adjoint.labels != self.g.labels:
            raise ParseError(f"adjoint K-structure of {self.name} is not on the basis of g")
        if self.psi.shape != (self.g.dim, len(self.group.k_labels())):
            raise ParseError(f"psi of {self.name} has shape {self.psi.shape}")

    @property
    def ring(self) -> BaseRing:
        return self.g.ring

    @cached_property
    def k(self) -> LieAlgebraData:
        return self.group.lie_algebra(self.ring)

    @cached_property
    def k_adjoint(self) -> KModule:
        """Lie(K) with its own adjoint K-structure."""
        k = self.k
        K = self.ring.field
        e = f = None
        if self.group.kind == CHEVALLEY:
            e = k.ad_basis(k.index("e"))
            f = k.ad_basis(k.index("f"))
        return KModule(self.group, LatticeModule(self.ring, k.labels), self.group.k_weights(), e, f)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PairDatum):
            return NotImplemented
        if self is other:
            return True
        return (
            self.name == other.name
            and self.ring == other.ring
            and self.group == other.group
            and self.g == other.g
            and self.adjoint.weights == other.adjoint.weights
            and equal(self.psi, other.psi)
        )

    def __hash__(self) -> int:
        return hash((self.name, self.ring))

    def weight(self, label: str | int) -> tuple[int, ...]:
        return self.adjoint.weights[self.g.index(label)]

    def base_change(self, f: RingMap) -> "PairDatum":
        return PairDatum(
            self.name,
            self.g.base_change(f),
            self.group,
            self.adjoint.base_change(f),
            apply_ring_map(f, self.psi),
        )

    @classmethod
    def build(
        cls,
        name: str,
        g: LieAlgebraData,
        group: GroupDatum,
        weights: Sequence[Sequence[int]],
        psi: dict[str, dict[str, Any]] | DomainMatrix,
        *,
        validate: bool = True,
    ) -> "PairDatum":
        """
        Assemble a pair. ``psi`` maps each Lie(K) label to a coefficient
        dict over g. For an SL2-type group the adjoint operators are ad of
        psi(e) and psi(f).
        """
        K = g.ring.field
        if not isinstance(psi, DomainMatrix):
            klabels = group.k_labels()
            unknown = set(psi) - set(klabels)
            if unknown:
                raise ParseError(f"psi names unknown Lie(K) basis vectors {sorted(unknown)}")
            cols = []
            for lab in klabels:
                vec = [K.zero] * g.dim
                for target, c in psi.get(lab, {}).items():
                    vec[g.index(target)] = g.ring.convert(c)
                cols.append(vec)
            psi = from_columns(cols, g.dim, K)
        e = f = None
        if group.kind == CHEVALLEY:
            r = group.rank
            e = g.ad(column(psi, r))
            f = g.ad(column(psi, r + 1))
        adjoint = KModule(group, LatticeModule(g.ring, g.labels), tuple(tuple(w) for w in weights), e, f)
        pair = cls(name, g, group, adjoint, psi)
        if validate:
            report = validate_pair(pair)
            if not report:
                raise ValidationFailure(report)
        return pair


def validate_pair(P: PairDatum) -> ValidationReport:
    g, K = P.g, P.ring.field
    report = validate_lie(g)
    if not report:
        return report
    report = validate_kmodule(P.adjoint)
    if not report:
        return report
    S = structure_matrix(g)
    d = g.dim
    # the bracket is K-equivariant: weights add, divided powers act as on a tensor square
    for i in range(d):
        for j in range(d):
            for k, c in g.bracket_basis(i, j).items():
                if P.adjoint.weights[k] != add_weights(P.adjoint.weights[i], P.adjoint.weights[j]):
                    return ValidationReport.failed(
                        "pair-equivariance",
                        f"[{g.labels[i]}, {g.labels[j]}] has a {g.labels[k]} component of the wrong weight",
                        g.labels[i],
                        g.labels[j],
                    )
    if P.group.kind == CHEVALLEY and d:
        for mats in (P.adjoint.e_divided, P.adjoint.f_divided):
            for n in range(1, 2 * len(mats) + 1):
                lhs = matmul(_divided_or_zero(mats, n, d, K), S)
                rhs = zeros(d, d * d, K)
                for a in range(n + 1):
                    A, B = _divided(mats, a, d, K), _divided(mats, n - a, d, K)
                    if A is not None and B is not None:
                        rhs = add(rhs, matmul(S, kronecker(A, B)))
                if not equal(lhs, rhs):
                    return ValidationReport.failed(
                        "pair-equivariance", f"divided power {n} does not preserve the bracket"
                    )
    k = P.k
    for a in range(k.dim):
        for b in range(k.dim):
            lhs = [K.zero] * d
            for c_idx, c in k.bracket_basis(a, b).items():
                lhs = [x + c * y for x, y in zip(lhs, column(P.psi, c_idx))]
            rhs = g.bracket(column(P.psi, a), column(P.psi, b))
            if lhs != rhs:
                return ValidationReport.failed(
                    "psi-homomorphism",
                    f"psi([{k.labels[a]}, {k.labels[b]}]) != [psi({k.labels[a]}), psi({k.labels[b]})]",
                    k.labels[a],
                    k.labels[b],
                )
    rows = entries(P.psi)
    kw = P.group.k_weights()
    for a in range(k.dim):
        for i in range(d):
            if rows[i][a] and P.adjoint.weights[i] != kw[a]:
                return ValidationReport.failed(
                    "psi-equivariance", f"psi({k.labels[a]}) has a {g.labels[i]} component of the wrong weight"
                )
    if P.group.kind == CHEVALLEY:
        ka = P.k_adjoint
        for gm, km in ((P.adjoint.e_divided, ka.e_divided), (P.adjoint.f_divided, ka.f_divided)):
            for n in range(1, max(len(gm), len(km)) + 1):
                G = _divided_or_zero(gm, n, d, K)
                H = _divided_or_zero(km, n, k.dim, K)
                if not equal(matmul(G, P.psi), matmul(P.psi, H)):
                    return ValidationReport.failed("psi-equivariance", f"psi does not commute with divided power {n}")
    for a in range(k.dim):
        if not equal(P.adjoint.nu(a), g.ad(column(P.psi, a))):
            return ValidationReport.failed(
                "compatibility", f"d(phi)({k.labels[a]}) != ad(psi({k.labels[a]}))", k.labels[a]
            )
    return ValidationReport.passed("pair")


###### Pair presets ######

def sl2_pair(ring: BaseRing, group: str = "torus") -> PairDatum:
    g = sl2(ring)
    weights = [(2,), (0,), (-2,)]
    if group == "torus":
        return PairDatum.build("sl2-T", g, GroupDatum.torus(1), weights, {"t1": {"h": 1}})
    if group == "sl2":
        return PairDatum.build(
            "sl2-SL2", g, GroupDatum.sl2(), weights, {"t1": {"h": 1}, "e": {"e": 1}, "f": {"f": 1}}
        )
    raise ParseError(f"sl2 pair group must be 'torus' or 'sl2', got {group!r}")


def borel_pair(ring: BaseRing, side: str = "lower") -> PairDatum:
    """The Borel subalgebra <h, f> (lower) or <e, h> (upper) of sl2 with the torus."""
    full = sl2(ring)
    if side == "lower":
        g, weights = full.subalgebra(("h", "f"), name="b-"), [(0,), (-2,)]
    elif side == "upper":
        g, weights = full.subalgebra(("e", "h"), name="b+"), [(2,), (0,)]
    else:
        raise ParseError(f"Borel side must be 'lower' or 'upper', got {side!r}")
    return PairDatum.build(f"{g.name}-T", g, GroupDatum.torus(1), weights, {"t1": {"h": 1}})


def torus_pair(ring: BaseRing, rank: int = 1) -> PairDatum:
    group = GroupDatum.torus(rank)
    g = abelian(ring, rank, group.k_labels(), name=f"t{rank}")
    psi = {f"t{i + 1}": {f"t{i + 1}": 1} for i in range(rank)}
    return PairDatum.build(f"torus{rank}", g, group, [(0,) * rank] * rank, psi)


def trivial_pair(ring: BaseRing) -> PairDatum:
    return PairDatum.build("trivial", abelian(ring, 0, (), name="0"), GroupDatum.trivial(), [], {})


def abelian_pair(ring: BaseRing, rank: int) -> PairDatum:
    """An abelian Lie algebra of the given rank with the trivial group."""
    g = abelian(ring, rank)
    return PairDatum.build(f"abelian{rank}", g, GroupDatum.trivial(), [()] * rank, {})


def gl2_pair(ring: BaseRing, group: str = "torus") -> PairDatum:
    """gl2 on (E12, E11, E22, E21) with its diagonal torus or with GL2."""
    g = gl(ring, 2)
    weights = [(1, -1), (0, 0), (0, 0), (-1, 1)]
    psi = {"t1": {"E11": 1}, "t2": {"E22": 1}}
    if group == "torus":
        return PairDatum.build("gl2-T", g, GroupDatum.torus(2), weights, psi)
    if group == "gl2":
        psi.update({"e": {"E12": 1}, "f": {"E21": 1}})
        return PairDatum.build("gl2-GL2", g, GroupDatum.gl2(), weights, psi)
    raise ParseError(f"gl2 pair group must be 'torus' or 'gl2', got {group!r}")


###### (g, K)-modules ######

@dataclass(frozen=True, eq=False)
class GKModule:
    """
    A (g, K)-module: a K-module plus one action matrix per basis vector of
    g. A module truncated to a weight window also records, per basis
    vector of g, the components of its action that fall outside the
    window (``leaks``, one row per outside coordinate). A module cut out
    of a window module keeps it as ``ambient``, with ``embedding`` the
    basis columns in ambient coordinates. Induced and coinduced modules
    record ``keys``, the (PBW monomial, coefficient index) pair behind each
    basis vector.
    """

    pair: PairDatum
    kmodule: KModule
    action: tuple[DomainMatrix, ...]
    window: "WeightWindow | None" = None
    leaks: tuple[DomainMatrix, ...] | None = None
    name: str = ""
    ambient: "GKModule | None" = None
    embedding: DomainMatrix | None = None
    keys: tuple[Any, ...] | None = None

    def __post_init__(self):
        if len(self.action) != self.pair.g.dim:
            raise ParseError(
                f"{len(self.action)} action matrices given for a Lie algebra of rank {self.pair.g.dim}"
            )
        n = self.kmodule.rank
        for M in self.action:
            if M.shape != (n, n):
                raise ParseError(f"action matrix shape {M.shape} does not fit rank {n}")
        if self.kmodule.group != self.pair.group:
            raise ParseError(f"K-structure over {self.kmodule.group.name}, pair over {self.pair.group.name}")
        if self.leaks is not None and len(self.leaks) != len(self.action):
            raise ParseError("one leak matrix per basis vector of g is required")

    @property
    def ring(self) -> BaseRing:
        return self.kmodule.ring

    @property
    def rank(self) -> int:
        return self.kmodule.rank

    @property
    def labels(self) -> tuple[str, ...]:
        return self.kmodule.labels

    @property
    def weights(self) -> tuple[tuple[int, ...], ...]:
        return self.kmodule.weights

    @property
    def is_windowed(self) -> bool:
        return self.window is not None

    def pi(self, label: str | int) -> DomainMatrix:
        return self.action[self.pair.g.index(label)]

    def pi_of(self, vec: Sequence[Any]) -> DomainMatrix:
        """The action of an arbitrary element of g, given in coordinates."""
        K = self.ring.field
        out = zeros(self.rank, self.rank, K)
        for c, M in zip(vec, self.action):
            if c:
                out = add(out, scale(M, c))
        return out

    def graded_ranks(self) -> dict[tuple[int, ...], int]:
        return self.kmodule.graded_ranks()

    def leak_of(self, i: int) -> DomainMatrix | None:
        return self.leaks[i] if self.leaks is not None else None

    def base_change(self, f: RingMap) -> "GKModule":
        return GKModule(
            self.pair.base_change(f),
            self.kmodule.base_change(f),
            tuple(apply_ring_map(f, M) for M in self.action),
            self.window,
            tuple(apply_ring_map(f, L) for L in self.leaks) if self.leaks is not None else None,
            self.name,
            self.ambient.base_change(f) if self.ambient is not None else None,
            apply_ring_map(f, self.embedding) if self.embedding is not None else None,
            self.keys,
        )

    def renamed(self, name: str) -> "GKModule":
        return GKModule(
            self.pair, self.kmodule, self.action, self.window, self.leaks, name, self.ambient, self.embedding, self.keys
        )

    def ambient_embedding(self) -> tuple["GKModule", DomainMatrix]:
        """The window module this one was cut out of, with the embedding columns."""
        if self.ambient is None:
            return self, identity(self.rank, self.ring.field)
        return self.ambient, self.embedding


def gk_module(
    pair: PairDatum,
    kmodule: KModule,
    action: dict[str, DomainMatrix] | Sequence[DomainMatrix],
    name: str = "",
    *,
    validate: bool = True,
) -> GKModule:
    """Build a finite module; g basis vectors missing from ``action`` act by zero."""
    K = pair.ring.field
    n = kmodule.rank
    if isinstance(action, dict):
        unknown = set(action) - set(pair.g.labels)
        if unknown:
            raise ParseError(f"action names unknown basis vectors {sorted(unknown)}")
        mats = tuple(action.get(lab, zeros(n, n, K)) for lab in pair.g.labels)
    else:
        mats = tuple(action)
    V = GKModule(pair, kmodule, mats, name=name)
    if validate:
        report = validate_pair_module(V)
        if not report:
            raise ValidationFailure(report)
    return V


def trivial_gk(pair: PairDatum, rank: int = 1, name: str = "trivial") -> GKModule:
    K = pair.ring.field
    zero = (0,) * pair.group.rank
    labels = tuple(f"1_{i + 1}" for i in range(rank)) if rank != 1 else ("1",)
    km = KModule(pair.group, LatticeModule(pair.ring, labels), tuple(zero for _ in range(rank)))
    return GKModule(pair, km, tuple(zeros(rank, rank, K) for _ in pair.g.labels), name=name)


def character_gk(pair: PairDatum, weight: Sequence[int] | int, name: str = "") -> GKModule:
    """
    The rank-one module k_lambda of a pair whose g acts on it through the
    torus: psi(t_i) acts by lambda_i, and every g basis vector outside the
    image of psi acts by zero.
    """
    lam = (weight,) if isinstance(weight, int) else tuple(weight)
    K = pair.ring.field
    if pair.group.kind == CHEVALLEY:
        raise PreconditionFailure("a character of an SL2-type group must have weight 0")
    km = KModule(pair.group, LatticeModule(pair.ring, (weight_label((lam,), 0),)), (lam,))
    action = []
    r = pair.group.rank
    sol = _psi_coordinates(pair)
    for i in range(pair.g.dim):
        coeffs = sol[i]
        if coeffs is None:
            action.append(zeros(1, 1, K))
        else:
            value = sum((c * pair.ring.from_int(lam[t]) for t, c in enumerate(coeffs[:r])), K.zero)
            action.append(DomainMatrix([[value]], (1, 1), K))
    return gk_module(pair, km, action, name or f"k{lam}")


def _psi_coordinates(pair: PairDatum) -> list[list[Any] | None]:
    """For each basis vector of g lying in the image of psi, its psi-preimage coordinates."""
    K = pair.ring.field
    out: list[list[Any] | None] = []
    for i in range(pair.g.dim):
        target = from_columns([pair.g.basis_vector(i)], pair.g.dim, K)
        x = solve(pair.psi, target, pair.ring) if pair.psi.shape[1] else None
        out.append(column(x, 0) if x is not None else None)
    return out


def adjoint_gk(pair: PairDatum) -> GKModule:
    g = pair.g
    return gk_module(pair, pair.adjoint, tuple(g.ad_basis(i) for i in range(g.dim)), "adjoint")


def sl2_form_gk(pair: PairDatum, form: KModule, name: str = "") -> GKModule:
    """
    An SL2 lattice form (e, f given, weights <mu, alpha_v>) as a module over
    an sl2 pair: e and f act by the form's operators and h diagonally.
    """
    for lab in ("e", "h", "f"):
        if lab not in pair.g.labels:
            raise PreconditionFailure(f"{pair.name} has no basis vector {lab}")
    K = pair.ring.field
    h = diagonal([pair.ring.from_int(w[0]) for w in form.weights], K)
    mats = {"e": form.e, "h": h, "f": form.f}
    km = form if pair.group.kind == CHEVALLEY else form.with_group(pair.group, form.weights)
    return gk_module(pair, km, mats, name or f"V({form.rank - 1})")


def validate_pair_module(V: GKModule) -> ValidationReport:
    P, g, K = V.pair, V.pair.g, V.ring.field
    n = V.rank
    for i, M in enumerate(V.action):
        if not has_entries_in(M, V.ring):
            return ValidationReport.failed("action", f"pi({g.labels[i]}) has entries outside {V.ring.label}")
    report = validate_kmodule(V.kmodule)
    if not report:
        return report
    # Lie homomorphism, on columns whose images stay inside the window
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            cols = _interior_columns(V, (i, j))
            if not cols:
                continue
            bracket = V.pi_of(g.bracket(g.basis_vector(i), g.basis_vector(j)))
            comm = sub(matmul(V.action[i], V.action[j]), matmul(V.action[j], V.action[i]))
            if not equal(select_columns(bracket, cols), select_columns(comm, cols)):
                return ValidationReport.failed(
                    "lie-homomorphism",
                    f"pi([{g.labels[i]}, {g.labels[j]}]) != [pi({g.labels[i]}), pi({g.labels[j]})]",
                    g.labels[i],
                    g.labels[j],
                )
    # the action map g (x) V -> V is a K-morphism
    for i in range(g.dim):
        rows = entries(V.action[i])
        shift = P.adjoint.weights[i]
        for a in range(n):
            for b in range(n):
                if rows[a][b] and V.weights[a] != add_weights(V.weights[b], shift):
                    return ValidationReport.failed(
                        "weight-additivity",
                        f"pi({g.labels[i]}) sends {V.labels[b]} to {V.labels[a]} off weight",
                        g.labels[i],
                    )
    if P.group.kind == CHEVALLEY and n:
        d = g.dim
        for vm, am in ((V.kmodule.e_divided, P.adjoint.e_divided), (V.kmodule.f_divided, P.adjoint.f_divided)):
            for i in range(d):
                for m in range(1, len(vm) + len(am) + 1):
                    lhs = matmul(_divided_or_zero(vm, m, n, K), V.action[i])
                    rhs = zeros(n, n, K)
                    for a in range(m + 1):
                        A, B = _divided(am, a, d, K), _divided(vm, m - a, n, K)
                        if A is not None and B is not None:
                            rhs = add(rhs, matmul(V.pi_of(column(A, i)), B))
                    if not equal(lhs, rhs):
                        return ValidationReport.failed(
                            "k-intertwining",
                            f"divided power {m} does not intertwine the action of {g.labels[i]}",
                            g.labels[i],
                        )
    for a in range(P.k.dim):
        if not equal(V.pi_of(column(P.psi, a)), V.kmodule.nu(a)):
            return ValidationReport.failed(
                "k-actions", f"pi(psi({P.k.labels[a]})) differs from the K-action", P.k.labels[a]
            )
    return ValidationReport.passed("gk-module")


def _interior_columns(V: GKModule, idx: Sequence[int]) -> list[int]:
    if V.leaks is None:
        return list(range(V.rank))
    rows = [entries(V.leaks[i]) for i in idx]
    return [c for c in range(V.rank) if not any(r[c] for L in rows for r in L)]


###### Closed symmetric monoidal structure ######

def _same_pair(V: GKModule, W: GKModule) -> None:
    if V.pair != W.pair:
        raise PreconditionFailure(f"modules over {V.pair.name} and {W.pair.name}")


def tensor_gk(V: GKModule, W: GKModule) -> GKModule:
    _same_pair(V, W)
    if V.is_windowed and W.is_windowed:
        raise UnsupportedRegime("the tensor product of two window-truncated modules is not materialized")
    K = V.ring.field
    n, m = V.rank, W.rank
    IV, IW = identity(n, K), identity(m, K)
    action = tuple(add(kronecker(a, IW), kronecker(IV, b)) for a, b in zip(V.action, W.action))
    leaks = None
    if V.is_windowed:
        leaks = tuple(kronecker(L, IW) for L in V.leaks)
    elif W.is_windowed:
        leaks = tuple(kronecker(IV, L) for L in W.leaks)
    return GKModule(
        V.pair,
        tensor_K(V.kmodule, W.kmodule),
        action,
        V.window or W.window,
        leaks,
        f"{V.name}⊗{W.name}",
    )


def internal_hom_gk(V: GKModule, W: GKModule) -> GKModule:
    """F(V, W) with (pi(x) phi)(v) = pi_W(x) phi(v) - phi(pi_V(x) v)."""
    _same_pair(V, W)
    if V.is_windowed or W.is_windowed:
        raise UnsupportedRegime("internal Hom needs finite modules")
    action = tuple(hom_operator(a, b) for a, b in zip(V.action, W.action))
    return GKModule(V.pair, internal_hom_K(V.kmodule, W.kmodule), action, name=f"F({V.name},{W.name})")


def dual_gk(V: GKModule) -> GKModule:
    if V.is_windowed:
        raise UnsupportedRegime("duals of window-truncated modules are not materialized")
    K = V.ring.field
    action = tuple(scale(transpose(M), -K.one) for M in V.action)
    return GKModule(V.pair, dual_K(V.kmodule), action, name=f"{V.name}^c")


def double_dual_map(V: GKModule) -> DomainMatrix:
    """
    The canonical evaluation map V -> (V^c)^c. In the dual of the dual
    basis it is the identity matrix, returned once the weights, the g-action
    and the K-operators of (V^c)^c are checked against those of V.
    """
    DD = dual_gk(dual_gk(V))
    if DD.weights != V.weights:
        raise ValidationFailure(ValidationReport.failed("double-dual", "weights do not return"))
    for lab, M, N in zip(V.pair.g.labels, V.action, DD.action):
        if not equal(M, N):
            raise ValidationFailure(
                ValidationReport.failed("double-dual", f"the action of {lab} does not return", lab)
            )
    ops, ops2 = V.kmodule.operators(), DD.kmodule.operators()
    if len(ops) != len(ops2) or not all(equal(a, b) for a, b in zip(ops, ops2)):
        raise ValidationFailure(ValidationReport.failed("double-dual", "the K-structure does not return"))
    return identity(V.rank, V.ring.field)


###### Hom spaces ######

@dataclass(frozen=True, eq=False)
class HomSpace:
    """Hom_{g,K}(X, Y) as columns in row-major vec coordinates of Hom_k(X, Y)."""

    source: GKModule
    target: GKModule
    basis: DomainMatrix

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def lattice(self) -> LatticeModule:
        return LatticeModule(self.source.ring, tuple(f"phi{i + 1}" for i in range(self.rank)))

    def matrix(self, col: int) -> DomainMatrix:
        """The col-th basis homomorphism as a rank(Y) x rank(X) matrix."""
        n, m = self.source.rank, self.target.rank
        vec = column(self.basis, col)
        return DomainMatrix([vec[i * n:(i + 1) * n] for i in range(m)], (m, n), self.source.ring.field)


def hom_space_gk(X: GKModule, Y: GKModule) -> HomSpace:
    _same_pair(X, Y)
    if X.is_windowed:
        raise UnsupportedRegime("Hom out of a window-truncated module is not finitely computable")
    K, ring = X.ring.field, X.ring
    n, m = X.rank, Y.rank
    unknowns = equivariance_unknowns(X.kmodule, Y.kmodule)
    embed = select_columns(identity(n * m, K), unknowns)
    if not unknowns:
        return HomSpace(X, Y, embed)
    blocks = [matmul(hom_operator(a, b), embed) for a, b in zip(X.action, Y.action)]
    if X.pair.group.kind == CHEVALLEY:
        blocks.append(matmul(hom_operator(X.kmodule.e, Y.kmodule.e), embed))
        blocks.append(matmul(hom_operator(X.kmodule.f, Y.kmodule.f), embed))
    if Y.leaks is not None:
        blocks.extend(matmul(kronecker(L, identity(n, K)), embed) for L in Y.leaks)
    system = vstack(K, len(unknowns), *blocks)
    return HomSpace(X, Y, matmul(embed, kernel_basis(system, ring)))


def hom_matrix_to_vec(phi: DomainMatrix) -> list[Any]:
    return [x for row in entries(phi) for x in row]


###### Maps of pairs ######

IDENTITY_GROUP = "identity"
TORUS_RESTRICTION = "torus-restriction"
TORUS_INCLUSION = "torus-inclusion"


Restriction = tuple[tuple[int, ...], ...]


@dataclass(frozen=True, eq=False)
class PairMap:
    """
    A map (q, M) -> (g, K). ``lie_part`` is dim(g) x dim(q); ``restriction``
    is the r_M x r_K integer matrix of X*(K) -> X*(M), or None when M = K.
    """

    source: PairDatum
    target: PairDatum
    lie_part: DomainMatrix
    restriction: Restriction | None = None

    def __post_init__(self):
        if self.lie_part.shape != (self.target.g.dim, self.source.g.dim):
            raise ParseError(f"lie part has shape {self.lie_part.shape}")
        if self.restriction is None and self.source.group != self.target.group:
            raise ParseError("a restriction matrix is needed between different groups")
        if self.restriction is not None:
            R = tuple(tuple(int(x) for x in row) for row in self.restriction)
            if len(R) != self.source.group.rank or any(len(r) != self.target.group.rank for r in R):
                raise ParseError(
                    f"restriction must be {self.source.group.rank} x {self.target.group.rank}"
                )
            object.__setattr__(self, "restriction", R)

    @property
    def ring(self) -> BaseRing:
        return self.target.ring

    @property
    def group_kind(self) -> str:
        if self.restriction is None:
            return IDENTITY_GROUP
        if self.target.group.kind == CHEVALLEY:
            return TORUS_INCLUSION
        return TORUS_RESTRICTION

    def restrict_weight(self, w: Sequence[int]) -> tuple[int, ...]:
        if self.restriction is None:
            return tuple(w)
        return tuple(sum(a * b for a, b in zip(row, w)) for row in self.restriction)

    def restriction_matrix(self) -> DomainMatrix:
        r = self.target.group.rank
        rows = self.restriction if self.restriction is not None else tuple(
            tuple(int(i == j) for j in range(r)) for i in range(r)
        )
        return dense([[self.ring.from_int(x) for x in row] for row in rows], self.ring.field, r)

    @classmethod
    def identity(cls, pair: PairDatum) -> "PairMap":
        return cls(pair, pair, identity(pair.g.dim, pair.ring.field))

    @classmethod
    def inclusion(
        cls, source: PairDatum, target: PairDatum, restriction: Restriction | None = None
    ) -> "PairMap":
        """The map sending each basis vector of q to the basis vector of g with the same label."""
        K = target.ring.field
        cols = [target.g.basis_vector(lab) for lab in source.g.labels]
        if restriction is None and source.group != target.group:
            rs, rt = source.group.rank, target.group.rank
            if rs != rt:
                raise ParseError("a restriction matrix is needed between tori of different rank")
            restriction = tuple(tuple(int(i == j) for j in range(rt)) for i in range(rs))
        pm = cls(source, target, from_columns(cols, target.g.dim, K), restriction)
        report = pm.validate()
        if not report:
            raise ValidationFailure(report)
        return pm

    def validate(self) -> ValidationReport:
        q, g, K = self.source.g, self.target.g, self.ring.field
        for a in range(q.dim):
            for b in range(q.dim):
                lhs = [K.zero] * g.dim
                for c, coeff in q.bracket_basis(a, b).items():
                    lhs = [x + coeff * y for x, y in zip(lhs, column(self.lie_part, c))]
                rhs = g.bracket(column(self.lie_part, a), column(self.lie_part, b))
                if lhs != rhs:
                    return ValidationReport.failed(
                        "pair-map", f"lie part does not preserve [{q.labels[a]}, {q.labels[b]}]"
                    )
        rows = entries(self.lie_part)
        for a in range(q.dim):
            for i in range(g.dim):
                if rows[i][a] and self.restrict_weight(self.target.weight(i)) != self.source.weight(a):
                    return ValidationReport.failed(
                        "pair-map", f"{q.labels[a]} and {g.labels[i]} have incompatible weights"
                    )
        rM, rK = self.source.group.rank, self.target.group.rank
        if rM or rK:
            psiM = select_columns(self.source.psi, range(rM))
            psiK = select_columns(self.target.psi, range(rK))
            if rM and rK:
                lie_of_torus = matmul(psiK, transpose(self.restriction_matrix()))
            else:
                lie_of_torus = zeros(g.dim, rM, K)
            if not equal(matmul(self.lie_part, psiM), lie_of_torus):
                return ValidationReport.failed("pair-map", "the torus parts of psi are not compatible")
        return ValidationReport.passed("pair-map")

    @cached_property
    def surjective(self) -> bool:
        """Whether Lie(K) + q -> g is onto, by Smith form."""
        K = self.ring.field
        d = self.target.g.dim
        if d == 0:
            return True
        M = hstack(K, d, self.target.psi, self.lie_part)
        snf = smith_normal_form(M, self.ring)
        return snf.rank == d and snf.all_units

    def base_change(self, f: RingMap) -> "PairMap":
        return PairMap(
            self.source.base_change(f),
            self.target.base_change(f),
            apply_ring_map(f, self.lie_part),
            self.restriction,
        )

    def then(self, other: "PairMap") -> "PairMap":
        """self followed by other."""
        if self.target != other.source:
            raise PreconditionFailure("pair maps are not composable")
        R = self.restriction
        if other.restriction is not None:
            if R is None:
                R = other.restriction
            else:
                R = tuple(
                    tuple(sum(row[k] * other.restriction[k][j] for k in range(len(row)))
                          for j in range(len(other.restriction[0])))
                    for row in R
                )
        return PairMap(self.source, other.target, matmul(other.lie_part, self.lie_part), R)


###### Submodules and currying ######

def submodule_report(V: GKModule, basis: DomainMatrix) -> ValidationReport:
    """A sublattice is a (g, K)-submodule iff it is stable under g and is a K-subcomodule."""
    for i, M in enumerate(V.action):
        if not contains(basis, matmul(M, basis), V.ring):
            return ValidationReport.failed(
                "submodule", f"not stable under {V.pair.g.labels[i]}", V.pair.g.labels[i]
            )
    for op in V.kmodule.operators():
        if not contains(basis, matmul(op, basis), V.ring):
            return ValidationReport.failed("submodule", "not a K-subcomodule")
    return ValidationReport.passed("submodule")


def submodule(V: GKModule, basis: DomainMatrix, name: str = "") -> GKModule:
    """Restrict V to a stable sublattice, re-expressed on a graded basis."""
    if V.is_windowed:
        raise UnsupportedRegime("submodules of window-truncated modules are not materialized")
    report = submodule_report(V, basis)
    if not report:
        raise ValidationFailure(report)
    sub_k = Sublattice(V.kmodule, span_basis(basis, V.ring), V.ring, True)
    B = sub_k.graded_basis()
    km = sub_k.as_kmodule()
    action = tuple(solve(B, matmul(M, B), V.ring) for M in V.action)
    return GKModule(V.pair, km, action, name=name or f"sub({V.name})")


def currying_permutation(u: int, n: int, w: int, K) -> DomainMatrix:
    """
    Coordinates of Hom(U (x) V, W) -> Hom(U, F(V, W)):
    phi[i, a*n + b] goes to psi[i*n + b, a].
    """
    size = u * n * w
    rows = [[K.zero] * size for _ in range(size)]
    for i in range(w):
        for a in range(u):
            for b in range(n):
                src = i * (u * n) + a * n + b
                dst = (i * n + b) * u + a
                rows[dst][src] = K.one
    return DomainMatrix(rows, (size, size), K)


@dataclass(frozen=True, eq=False)
class CurryingCertificate:
    left: HomSpace
    right: HomSpace
    matrix: DomainMatrix | None
    iso: bool


def currying_map(U: GKModule, V: GKModule, W: GKModule) -> CurryingCertificate:
    """Hom(U (x) V, W) -> Hom(U, F(V, W)), checked to be a lattice isomorphism."""
    left = hom_space_gk(tensor_gk(U, V), W)
    right = hom_space_gk(U, internal_hom_gk(V, W))
    C = currying_permutation(U.rank, V.rank, W.rank, U.ring.field)
    M = solve(right.basis, matmul(C, left.basis), U.ring)
    iso = M is not None and is_isomorphism(M, U.ring)
    return CurryingCertificate(left, right, M, iso)
