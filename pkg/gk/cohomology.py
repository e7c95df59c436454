# cohomology.py

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Sequence

from sympy.polys.matrices import DomainMatrix

from .comodules import CHEVALLEY, Weight, add_weights
from .errors import UnsupportedRegime, ValidationFailure, ValidationReport
from .linalg import (
    LatticeModule,
    apply_ring_map,
    cokernel_invariants,
    column,
    dense,
    entries,
    format_divisors,
    is_zero,
    kernel_basis,
    matmul,
    solve,
)
from .pairs import GKModule, PairDatum, hom_space_gk, internal_hom_gk
from .rings import BaseRing, RingMap

logger = logging.getLogger("gk.cohomology")


@dataclass(frozen=True, eq=False)
class CochainComplex:
    """C^0 -> C^1 -> ... with differentials[n]: C^n -> C^(n+1)."""

    ring: BaseRing
    modules: tuple[LatticeModule, ...]
    differentials: tuple[DomainMatrix, ...]
    name: str = ""

    @property
    def length(self) -> int:
        return len(self.modules)

    def ranks(self) -> tuple[int, ...]:
        return tuple(M.rank for M in self.modules)

    def differential(self, n: int) -> DomainMatrix | None:
        return self.differentials[n] if 0 <= n < len(self.differentials) else None


@dataclass(frozen=True)
class CohomologyGroup:
    degree: int
    free_rank: int
    torsion: tuple[Any, ...]


@dataclass(frozen=True)
class CohomologyReport:
    ring: BaseRing
    groups: tuple[CohomologyGroup, ...]
    name: str = ""

    def free_ranks(self) -> tuple[int, ...]:
        return tuple(g.free_rank for g in self.groups)

    def torsion(self, n: int) -> tuple[Any, ...]:
        return self.groups[n].torsion

    def euler_characteristic(self) -> int:
        return sum((-1) ** g.degree * g.free_rank for g in self.groups)

    def lines(self) -> list[str]:
        out = []
        for g in self.groups:
            divisors = ", ".join(format_divisors(self.ring, g.torsion))
            out.append(f"H^{g.degree}: free {g.free_rank}, torsion [{divisors}]")
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "ring": self.ring.label,
            "groups": [
                {
                    "degree": g.degree,
                    "free_rank": g.free_rank,
                    "torsion": format_divisors(self.ring, g.torsion),
                }
                for g in self.groups
            ],
        }


###### Chevalley-Eilenberg complexes ######

def relative_split(P: PairDatum) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """(m, complement): m spanned by the images psi(t_i), complement the remaining basis of g."""
    if P.group.kind == CHEVALLEY:
        raise UnsupportedRegime("relative cohomology is materialized for diagonalizable M only")
    g = P.g
    m: list[str] = []
    for t in range(P.group.rank):
        col = column(P.psi, t)
        hits = [i for i, x in enumerate(col) if x]
        if not hits:
            continue
        if len(hits) != 1 or col[hits[0]] != 1:
            raise UnsupportedRegime("psi(Lie M) must be spanned by basis vectors of q")
        m.append(g.labels[hits[0]])
    return tuple(m), tuple(lab for lab in g.labels if lab not in m)


def _sorted_sign(R: Sequence[int], k: int) -> tuple[tuple[int, ...], int] | None:
    """Insert k into the sorted tuple R; the sign of moving it from the front."""
    if k in R:
        return None
    pos = sum(1 for r in R if r < k)
    return tuple(sorted((*R, k))), (-1) ** pos


def build_ce_complex(V: GKModule, max_degree: int | None = None) -> CochainComplex:
    """
    C^n = M-invariant part of Hom(Lambda^n(q/m), V) on the basis omega_{S,v}
    (S a sorted subset of the complement of m, wt(v) = sum of wt(x_S)), with
    the alternating-sum differential. d^2 = 0 is checked exactly.
    """
    P = V.pair
    q = P.g
    ring, K = V.ring, V.ring.field
    _, comp = relative_split(P)
    cidx = [q.index(lab) for lab in comp]
    top = len(comp) if max_degree is None else min(len(comp), max_degree + 1)
    zero = (0,) * P.group.rank

    def weight(S: tuple[int, ...]) -> Weight:
        out = zero
        for i in S:
            out = add_weights(out, P.weight(i))
        return out

    bases: list[list[tuple[tuple[int, ...], int]]] = []
    modules = []
    for n in range(top + 1):
        basis = [
            (S, v)
            for S in combinations(cidx, n)
            for v in range(V.rank)
            if V.weights[v] == weight(S)
        ]
        bases.append(basis)
        labels = tuple(
            f"{'∧'.join(q.labels[i] + '*' for i in S) or '1'}⊗{V.labels[v]}" for S, v in basis
        )
        modules.append(LatticeModule(ring, labels))

    pi = [entries(M) for M in V.action]
    differentials = []
    for n in range(top):
        src, dst = bases[n], bases[n + 1]
        dindex = {key: r for r, key in enumerate(dst)}
        rows = [[K.zero] * len(src) for _ in dst]
        sindex = {key: c for c, key in enumerate(src)}
        for T in combinations(cidx, n + 1):
            for i, ti in enumerate(T):
                rest = T[:i] + T[i + 1:]
                for v in range(V.rank):
                    col = sindex.get((rest, v))
                    if col is None:
                        continue
                    for w in range(V.rank):
                        c = pi[ti][w][v]
                        row = dindex.get((T, w))
                        if c and row is not None:
                            rows[row][col] += (-1) ** i * c
            for i in range(len(T)):
                for j in range(i + 1, len(T)):
                    R = T[:i] + T[i + 1:j] + T[j + 1:]
                    for k, c in q.bracket_basis(T[i], T[j]).items():
                        if k not in cidx or not c:
                            continue
                        placed = _sorted_sign(R, k)
                        if placed is None:
                            continue
                        S, sign = placed
                        for v in range(V.rank):
                            col = sindex.get((S, v))
                            row = dindex.get((T, v))
                            if col is not None and row is not None:
                                rows[row][col] += (-1) ** (i + j) * sign * c
        differentials.append(dense(rows, K, len(src)))

    C = CochainComplex(ring, tuple(modules), tuple(differentials), f"CE({q.name}, {V.name})")
    report = check_square_zero(C)
    if not report:
        raise ValidationFailure(report)
    logger.debug("built %s with ranks %s", C.name, C.ranks())
    return C


def check_square_zero(C: CochainComplex) -> ValidationReport:
    for n in range(len(C.differentials) - 1):
        dd = matmul(C.differentials[n + 1], C.differentials[n])
        if is_zero(dd):
            continue
        rows = entries(dd)
        r, c = next((r, c) for r, row in enumerate(rows) for c, x in enumerate(row) if x)
        return ValidationReport.failed(
            "d^2",
            f"d^{n + 1} d^{n} is nonzero on {C.modules[n].labels[c]}",
            C.modules[n + 2].labels[r],
        )
    return ValidationReport.passed("d^2")


def compute_cohomology(C: CochainComplex, degrees: int | None = None) -> CohomologyReport:
    """H^n = ker d^n / im d^(n-1) by Smith form, for n < degrees (all degrees by default)."""
    ring, K = C.ring, C.ring.field
    top = C.length if degrees is None else min(degrees, C.length)
    groups = []
    for n in range(top):
        size = C.modules[n].rank
        d = C.differential(n)
        Z = kernel_basis(d, ring) if d is not None else kernel_basis(dense([], K, size), ring)
        prev = C.differential(n - 1)
        if prev is None or prev.shape[1] == 0 or Z.shape[1] == 0:
            groups.append(CohomologyGroup(n, Z.shape[1], ()))
            continue
        X = solve(Z, prev, ring)
        if X is None:
            raise ValidationFailure(
                ValidationReport.failed("complex", f"im d^{n - 1} is not inside ker d^{n}")
            )
        coker = cokernel_invariants(X, ring)
        groups.append(CohomologyGroup(n, coker.free_rank, tuple(coker.torsion)))
    return CohomologyReport(ring, tuple(groups), C.name)


def base_change_complex(f: RingMap, C: CochainComplex) -> CochainComplex:
    return CochainComplex(
        f.target,
        tuple(M.base_change(f) for M in C.modules),
        tuple(apply_ring_map(f, d) for d in C.differentials),
        f"{C.name}⊗{f.target.label}",
    )


def euler_characteristic(C: CochainComplex) -> int:
    return sum((-1) ** n * r for n, r in enumerate(C.ranks()))


def relative_cohomology(V: GKModule, degrees: int | None = None) -> CohomologyReport:
    """H^*(q, M; V)."""
    return compute_cohomology(build_ce_complex(V), degrees)


def ext_gk(X: GKModule, Y: GKModule, max_degree: int) -> CohomologyReport:
    """Ext^n_{g,K}(X, Y) for n <= max_degree, from the relative complex with coefficients F(X, Y)."""
    if X.pair.group.kind == CHEVALLEY:
        raise UnsupportedRegime("Ext is materialized for diagonalizable K only")
    F = internal_hom_gk(X, Y)
    report = compute_cohomology(build_ce_complex(F, max_degree), max_degree + 1)
    hom_rank = hom_space_gk(X, Y).rank
    if report.groups[0].free_rank != hom_rank:
        raise ValidationFailure(
            ValidationReport.failed(
                "ext0", f"Ext^0 has rank {report.groups[0].free_rank}, Hom has rank {hom_rank}"
            )
        )
    return CohomologyReport(report.ring, report.groups, f"Ext({X.name}, {Y.name})")
