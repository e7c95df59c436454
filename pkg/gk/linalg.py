# linalg.py

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import lcm
from typing import Any, Callable, Iterable, Sequence

from sympy.polys.matrices import DomainMatrix

from .errors import InternalInconsistency, NotInRing, PreconditionFailure
from .rings import BaseRing, RingMap

logger = logging.getLogger("gk.linalg")


###### Matrix plumbing ######
#
# Every matrix is a dense sympy DomainMatrix over the fraction field of
# its ring. Algorithms that need elementary operations work on plain
# row lists and hand a fresh DomainMatrix back.

def dense(rows: Sequence[Sequence[Any]], K, ncols: int | None = None) -> DomainMatrix:
    rows = [list(r) for r in rows]
    n = len(rows[0]) if rows else (ncols or 0)
    return DomainMatrix(rows, (len(rows), n), K)


def zeros(m: int, n: int, K) -> DomainMatrix:
    return DomainMatrix([[K.zero] * n for _ in range(m)], (m, n), K)


def identity(n: int, K) -> DomainMatrix:
    return DomainMatrix(
        [[K.one if i == j else K.zero for j in range(n)] for i in range(n)], (n, n), K
    )


def diagonal(values: Sequence[Any], K) -> DomainMatrix:
    n = len(values)
    return DomainMatrix(
        [[values[i] if i == j else K.zero for j in range(n)] for i in range(n)], (n, n), K
    )


def from_values(rows: Sequence[Sequence[Any]], ring: BaseRing, ncols: int | None = None) -> DomainMatrix:
    """Matrix from user data (ints, fraction strings, gaussian pairs)."""
    return dense([[ring.convert(v) for v in row] for row in rows], ring.field, ncols)


def from_columns(cols: Sequence[Sequence[Any]], m: int, K) -> DomainMatrix:
    return DomainMatrix([[c[i] for c in cols] for i in range(m)], (m, len(cols)), K)


def entries(M: DomainMatrix) -> list[list[Any]]:
    m, n = M.shape
    if m == 0 or n == 0:
        return [[] for _ in range(m)]
    return [list(r) for r in M.to_list()]


def column(M: DomainMatrix, j: int) -> list[Any]:
    return [row[j] for row in entries(M)]


def columns(M: DomainMatrix) -> list[list[Any]]:
    rows = entries(M)
    return [[row[j] for row in rows] for j in range(M.shape[1])]


def select_columns(M: DomainMatrix, idx: Sequence[int]) -> DomainMatrix:
    rows = entries(M)
    return DomainMatrix([[row[j] for j in idx] for row in rows], (M.shape[0], len(idx)), M.domain)


def select_rows(M: DomainMatrix, idx: Sequence[int]) -> DomainMatrix:
    rows = entries(M)
    return DomainMatrix([rows[i] for i in idx], (len(idx), M.shape[1]), M.domain)


def hstack(K, m: int, *Ms: DomainMatrix) -> DomainMatrix:
    rows = [[] for _ in range(m)]
    for M in Ms:
        for r, src in zip(rows, entries(M)):
            r.extend(src)
    return DomainMatrix(rows, (m, sum(M.shape[1] for M in Ms)), K)


def vstack(K, n: int, *Ms: DomainMatrix) -> DomainMatrix:
    rows: list[list[Any]] = []
    for M in Ms:
        rows.extend(entries(M))
    return DomainMatrix(rows, (len(rows), n), K)


def matmul(A: DomainMatrix, B: DomainMatrix) -> DomainMatrix:
    if A.shape[1] != B.shape[0]:
        raise PreconditionFailure(f"shape mismatch {A.shape} x {B.shape}")
    m, n = A.shape[0], B.shape[1]
    if A.shape[1] == 0 or m == 0 or n == 0:
        return zeros(m, n, A.domain)
    return A.matmul(B)


def compose_all(K, n: int, *Ms: DomainMatrix) -> DomainMatrix:
    """Product M1 * M2 * ... ; the identity of size n when empty."""
    out = identity(n, K)
    for M in Ms:
        out = matmul(out, M)
    return out


def power(A: DomainMatrix, k: int) -> DomainMatrix:
    out = identity(A.shape[0], A.domain)
    for _ in range(k):
        out = matmul(out, A)
    return out


def add(A: DomainMatrix, B: DomainMatrix) -> DomainMatrix:
    a, b = entries(A), entries(B)
    return DomainMatrix([[x + y for x, y in zip(r, s)] for r, s in zip(a, b)], A.shape, A.domain)


def sub(A: DomainMatrix, B: DomainMatrix) -> DomainMatrix:
    a, b = entries(A), entries(B)
    return DomainMatrix([[x - y for x, y in zip(r, s)] for r, s in zip(a, b)], A.shape, A.domain)


def scale(A: DomainMatrix, c) -> DomainMatrix:
    return DomainMatrix([[c * x for x in r] for r in entries(A)], A.shape, A.domain)


def transpose(A: DomainMatrix) -> DomainMatrix:
    m, n = A.shape
    rows = entries(A)
    return DomainMatrix([[rows[i][j] for i in range(m)] for j in range(n)], (n, m), A.domain)


def map_entries(A: DomainMatrix, fn: Callable[[Any], Any], K) -> DomainMatrix:
    return DomainMatrix([[fn(x) for x in r] for r in entries(A)], A.shape, K)


def kronecker(A: DomainMatrix, B: DomainMatrix) -> DomainMatrix:
    """Kronecker product; row index i*p + k, column index j*q + l."""
    (m, n), (p, q) = A.shape, B.shape
    a, b = entries(A), entries(B)
    rows = [[a[i][j] * b[k][l] for j in range(n) for l in range(q)] for i in range(m) for k in range(p)]
    return DomainMatrix(rows, (m * p, n * q), A.domain)


def is_zero(A: DomainMatrix) -> bool:
    return not any(x for r in entries(A) for x in r)


def equal(A: DomainMatrix, B: DomainMatrix) -> bool:
    return A.shape == B.shape and entries(A) == entries(B)


def has_entries_in(A: DomainMatrix, ring: BaseRing) -> bool:
    return all(ring.contains(x) for r in entries(A) for x in r)


def clear_denominators(A: DomainMatrix, ring: BaseRing) -> tuple[DomainMatrix, int]:
    """Return (d*A, d) with d the least positive integer making d*A integral over ring."""
    d = 1
    for r in entries(A):
        for x in r:
            if x:
                d = lcm(d, ring.denominator(x))
    if d == 1:
        return A, 1
    return scale(A, ring.from_int(d)), d


###### Lattices ######

@dataclass(frozen=True)
class LatticeModule:
    """A free module of finite rank with a labeled basis."""

    ring: BaseRing
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(set(self.labels)) != len(self.labels):
            raise PreconditionFailure(f"basis labels are not unique: {self.labels}")

    @property
    def rank(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def base_change(self, f: RingMap) -> "LatticeModule":
        if f.source != self.ring:
            raise PreconditionFailure(f"{f.label} does not start at {self.ring.label}")
        return LatticeModule(f.target, self.labels)


@dataclass(frozen=True, eq=False)
class LatticeMap:
    """A homomorphism of lattices; matrix is target.rank x source.rank."""

    source: LatticeModule
    target: LatticeModule
    matrix: DomainMatrix

    def __post_init__(self):
        if self.source.ring != self.target.ring:
            raise PreconditionFailure("source and target live over different rings")
        if self.matrix.shape != (self.target.rank, self.source.rank):
            raise PreconditionFailure(
                f"matrix shape {self.matrix.shape} does not fit "
                f"{self.target.rank} x {self.source.rank}"
            )
        if not has_entries_in(self.matrix, self.ring):
            raise NotInRing(f"matrix entries are not in {self.ring.label}")

    @property
    def ring(self) -> BaseRing:
        return self.source.ring

    @classmethod
    def identity(cls, module: LatticeModule) -> "LatticeMap":
        return cls(module, module, identity(module.rank, module.ring.field))

    def compose(self, other: "LatticeMap") -> "LatticeMap":
        """self after other."""
        if other.target != self.source:
            raise PreconditionFailure("maps are not composable")
        return LatticeMap(other.source, self.target, matmul(self.matrix, other.matrix))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LatticeMap):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and equal(self.matrix, other.matrix)
        )

    __hash__ = None  # type: ignore[assignment]


def _unpack(A: LatticeMap | DomainMatrix, ring: BaseRing | None) -> tuple[DomainMatrix, BaseRing]:
    if isinstance(A, LatticeMap):
        return A.matrix, A.ring
    if ring is None:
        raise PreconditionFailure("a bare matrix needs its ring")
    return A, ring


###### Smith normal form ######

@dataclass(frozen=True)
class SmithForm:
    """
    P*A*Q = D with P, Q unimodular; equivalently A = U*D*V with U = P^-1
    and V = Q^-1. The nonzero diagonal entries are canonical associates
    forming a divisibility chain.
    """

    ring: BaseRing
    D: DomainMatrix
    P: DomainMatrix
    Q: DomainMatrix
    U: DomainMatrix
    V: DomainMatrix
    rank: int
    divisors: tuple[Any, ...]

    @property
    def torsion(self) -> tuple[Any, ...]:
        return tuple(d for d in self.divisors if not self.ring.is_unit(d))

    @property
    def all_units(self) -> bool:
        return all(self.ring.is_unit(d) for d in self.divisors)


def smith_normal_form(A: LatticeMap | DomainMatrix, ring: BaseRing | None = None) -> SmithForm:
    M, ring = _unpack(A, ring)
    K = ring.field
    m, n = M.shape
    a = entries(M)
    for row in a:
        for x in row:
            if not ring.contains(x):
                raise NotInRing(f"entry {ring.format(x)} is not in {ring.label}")

    P = entries(identity(m, K))
    Pi = entries(identity(m, K))
    Q = entries(identity(n, K))
    Qi = entries(identity(n, K))

    def swap_rows(i: int, j: int) -> None:
        if i == j:
            return
        a[i], a[j] = a[j], a[i]
        P[i], P[j] = P[j], P[i]
        for row in Pi:
            row[i], row[j] = row[j], row[i]

    def swap_cols(i: int, j: int) -> None:
        if i == j:
            return
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in Q:
            row[i], row[j] = row[j], row[i]
        Qi[i], Qi[j] = Qi[j], Qi[i]

    def add_row(dst: int, src: int, c) -> None:
        a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
        P[dst] = [x + c * y for x, y in zip(P[dst], P[src])]
        for row in Pi:
            row[src] = row[src] - c * row[dst]

    def add_col(dst: int, src: int, c) -> None:
        for row in a:
            row[dst] = row[dst] + c * row[src]
        for row in Q:
            row[dst] = row[dst] + c * row[src]
        Qi[src] = [x - c * y for x, y in zip(Qi[src], Qi[dst])]

    def scale_row(i: int, u) -> None:
        a[i] = [u * x for x in a[i]]
        P[i] = [u * x for x in P[i]]
        inv = K.one / u
        for row in Pi:
            row[i] = row[i] * inv

    t = 0
    while t < min(m, n):
        pivot, best = None, None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j]:
                    nrm = ring.norm(a[i][j])
                    if best is None or nrm < best:
                        pivot, best = (i, j), nrm
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])

        while True:
            settled = True
            for i in range(t + 1, m):
                if a[i][t]:
                    q, r = ring.divmod(a[i][t], a[t][t])
                    add_row(i, t, -q)
                    if r:
                        swap_rows(t, i)
                        settled = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q, r = ring.divmod(a[t][j], a[t][t])
                    add_col(j, t, -q)
                    if r:
                        swap_cols(t, j)
                        settled = False
            if not settled:
                continue
            stray = next(
                (
                    i
                    for i in range(t + 1, m)
                    for j in range(t + 1, n)
                    if a[i][j] and not ring.divides(a[t][t], a[i][j])
                ),
                None,
            )
            if stray is None:
                break
            add_row(t, stray, K.one)

        _, u = ring.associate(a[t][t])
        scale_row(t, K.one / u)
        t += 1

    return SmithForm(
        ring=ring,
        D=dense(a, K, n),
        P=dense(P, K, m),
        Q=dense(Q, K, n),
        U=dense(Pi, K, m),
        V=dense(Qi, K, n),
        rank=t,
        divisors=tuple(a[i][i] for i in range(t)),
    )


###### Kernels, images, cokernels ######

@dataclass(frozen=True)
class Cokernel:
    free_rank: int
    torsion: tuple[Any, ...]


def kernel_basis(A: LatticeMap | DomainMatrix, ring: BaseRing | None = None) -> DomainMatrix:
    """Columns spanning {x : A x = 0}; a saturated direct summand of the source."""
    M, ring = _unpack(A, ring)
    n = M.shape[1]
    if M.shape[0] == 0:
        return identity(n, ring.field)
    M, _ = clear_denominators(M, ring)
    snf = smith_normal_form(M, ring)
    return select_columns(snf.Q, range(snf.rank, n))


def cokernel_invariants(A: LatticeMap | DomainMatrix, ring: BaseRing | None = None) -> Cokernel:
    M, ring = _unpack(A, ring)
    snf = smith_normal_form(M, ring)
    return Cokernel(free_rank=M.shape[0] - snf.rank, torsion=snf.torsion)


def rank(A: DomainMatrix, ring: BaseRing) -> int:
    M, _ = clear_denominators(A, ring)
    return smith_normal_form(M, ring).rank


def span_basis(vectors: DomainMatrix, ring: BaseRing) -> DomainMatrix:
    """
    A basis of the ring-span of the columns of ``vectors``.

    The columns may have entries in the fraction field. Each returned
    column is scaled by a unit so that its first nonzero entry is a
    canonical associate.
    """
    n = vectors.shape[0]
    K = ring.field
    if vectors.shape[1] == 0 or is_zero(vectors):
        return zeros(n, 0, K)
    scaled, d = clear_denominators(vectors, ring)
    snf = smith_normal_form(scaled, ring)
    inv_d = K.one / ring.from_int(d)
    U = entries(snf.U)
    cols = []
    for j, dj in enumerate(snf.divisors):
        col = [U[i][j] * dj * inv_d for i in range(n)]
        lead = next(x for x in col if x)
        _, u = ring.associate(lead)
        cols.append([x / u for x in col])
    return from_columns(cols, n, K)


def solve(A: DomainMatrix, b: DomainMatrix, ring: BaseRing) -> DomainMatrix | None:
    """Some x with entries in ring and A x = b, or None when no such x exists."""
    K = ring.field
    m, k = A.shape
    p = b.shape[1]
    if k == 0:
        return zeros(0, p, K) if is_zero(b) else None
    A2, d = clear_denominators(A, ring)
    b2 = scale(b, ring.from_int(d)) if d != 1 else b
    snf = smith_normal_form(A2, ring)
    c = entries(matmul(snf.P, b2))
    y = [[K.zero] * p for _ in range(k)]
    for i in range(m):
        for j in range(p):
            if i < snf.rank:
                v = c[i][j] / snf.divisors[i]
                if not ring.contains(v):
                    return None
                y[i][j] = v
            elif c[i][j]:
                return None
    return matmul(snf.Q, dense(y, K, p))


def contains(basis: DomainMatrix, v: DomainMatrix, ring: BaseRing) -> bool:
    return solve(basis, v, ring) is not None


def lattice_equal(B1: DomainMatrix, B2: DomainMatrix, ring: BaseRing) -> bool:
    return (
        B1.shape[1] == B2.shape[1]
        and contains(B1, B2, ring)
        and contains(B2, B1, ring)
    )


def intersect(B1: DomainMatrix, B2: DomainMatrix, ring: BaseRing) -> DomainMatrix:
    K = ring.field
    n, r1 = B1.shape
    if r1 == 0 or B2.shape[1] == 0:
        return zeros(n, 0, K)
    ker = kernel_basis(hstack(K, n, B1, scale(B2, -K.one)), ring)
    return span_basis(matmul(B1, select_rows(ker, range(r1))), ring)


def preimage(T: DomainMatrix, source: DomainMatrix, target: DomainMatrix, ring: BaseRing) -> DomainMatrix:
    """{v in span(source) : T v in span(target)}."""
    K = ring.field
    n, r = source.shape
    if r == 0:
        return zeros(n, 0, K)
    image = matmul(T, source)
    system = hstack(K, image.shape[0], image, scale(target, -K.one))
    ker = kernel_basis(system, ring)
    return span_basis(matmul(source, select_rows(ker, range(r))), ring)


def induced_map(T: DomainMatrix, source: DomainMatrix, target: DomainMatrix, ring: BaseRing) -> DomainMatrix:
    """The matrix M with target * M = T * source."""
    M = solve(target, matmul(T, source), ring)
    if M is None:
        raise PreconditionFailure("the map does not send the source lattice into the target lattice")
    return M


def is_isomorphism(M: DomainMatrix, ring: BaseRing) -> bool:
    m, n = M.shape
    if m != n:
        return False
    if n == 0:
        return True
    if not has_entries_in(M, ring):
        return False
    snf = smith_normal_form(M, ring)
    return snf.rank == n and snf.all_units


def check_reconstruction(A: DomainMatrix, snf: SmithForm) -> None:
    """Raise when U*D*V does not give back A."""
    if not equal(compose_all(A.domain, A.shape[0], snf.U, snf.D, snf.V), A):
        raise InternalInconsistency("Smith form does not reconstruct its input")


###### Base change ######

def apply_ring_map(f: RingMap, A: LatticeMap | DomainMatrix):
    """Entrywise image of a map (or a bare matrix) along f."""
    if isinstance(A, LatticeMap):
        if A.ring != f.source:
            raise PreconditionFailure(f"{f.label} does not start at {A.ring.label}")
        return LatticeMap(
            A.source.base_change(f),
            A.target.base_change(f),
            apply_ring_map(f, A.matrix),
        )
    if A.domain != f.source.field:
        raise PreconditionFailure(f"matrix over {A.domain} cannot be pushed along {f.label}")
    return map_entries(A, f, f.target.field)


def format_divisors(ring: BaseRing, values: Iterable[Any]) -> list[str]:
    return [ring.format(v) for v in values]
