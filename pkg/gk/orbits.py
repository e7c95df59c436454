# orbits.py

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

from sympy.polys.matrices import DomainMatrix

from .comodules import KModule, GroupDatum, Weight, add_weights, hom_K, torus_module
from .errors import PositivityViolation, PreconditionFailure, ValidationReport
from .functors import WeightWindow, coordinate_decomposition, pro
from .lie import Monomial, monomials
from .linalg import identity, select_columns
from .pairs import GKModule, PairMap
from .rings import BaseRing

logger = logging.getLogger("gk.orbits")


@dataclass(frozen=True)
class ThetaStableDatum:
    """
    Pairing values alpha_i(h_x) of the complement roots against one Cartan
    element h_x per representative x of pi_0, with pi_0 acting on the
    representatives by the listed permutations.
    """

    values: tuple[tuple[int, ...], ...]
    permutations: tuple[tuple[int, ...], ...] = ()
    root_weights: tuple[Weight, ...] = ()
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(tuple(v) for v in self.values))
        object.__setattr__(self, "permutations", tuple(tuple(p) for p in self.permutations))
        object.__setattr__(self, "root_weights", tuple(tuple(w) for w in self.root_weights))
        if not self.values:
            raise PreconditionFailure("a θ-stable datum needs at least one representative h_x")
        s = len(self.values[0])
        if any(len(v) != s for v in self.values):
            raise PreconditionFailure("every representative must pair with every complement root")
        for x, row in enumerate(self.values):
            for i, v in enumerate(row):
                if v >= 0:
                    raise PositivityViolation(f"alpha_{i + 1}(h_{x}) = {v} is not negative")
        reps = len(self.values)
        for p in self.permutations:
            if sorted(p) != list(range(reps)):
                raise PreconditionFailure(f"{p} is not a permutation of the representatives")
        if self.root_weights and len(self.root_weights) != s:
            raise PreconditionFailure("one weight per complement root is required")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"u{i + 1}" for i in range(s)))

    @property
    def roots(self) -> int:
        return len(self.values[0])

    @classmethod
    def from_pair_map(cls, pm: PairMap, coweight: Sequence[int]) -> "ThetaStableDatum":
        """alpha_i(h) = <wt(u_i), coweight> for the complement u_bar of pm, with trivial pi_0."""
        d = coordinate_decomposition(pm)
        weights = tuple(pm.target.weight(lab) for lab in d.complement)
        values = tuple(sum(a * b for a, b in zip(w, coweight)) for w in weights)
        return cls((values,), (), weights, d.complement)

    def value(self, m: Monomial) -> tuple[int, ...]:
        return tuple(sum(n * a for n, a in zip(m, row)) for row in self.values)

    def orbit_key(self, r: tuple[int, ...]) -> tuple[int, ...]:
        """Smallest pi_0-translate of r."""
        translates = [r] + [tuple(r[p[x]] for x in range(len(r))) for p in self.permutations]
        return min(translates)

    def weight(self, m: Monomial) -> Weight | None:
        if not self.root_weights:
            return None
        out = (0,) * len(self.root_weights[0])
        for n, w in zip(m, self.root_weights):
            out = add_weights(out, tuple(n * x for x in w))
        return out


@dataclass(frozen=True)
class OrbitBlock:
    """U(u_bar)_O: the PBW monomials whose pairing vector lies in the orbit ``label``."""

    label: tuple[int, ...]
    monomials: tuple[Monomial, ...]
    complete: bool

    @property
    def rank(self) -> int:
        return len(self.monomials)

    def display(self) -> str:
        return "(" + ", ".join(str(v) for v in self.label) + ")"


def orbit_decomposition(d: ThetaStableDatum, cap: int) -> list[OrbitBlock]:
    """
    Partition the monomials of degree <= cap by the orbit of their pairing
    vector. Blocks are ordered by label, largest (closest to 0) first.
    """
    buckets: dict[tuple[int, ...], list[Monomial]] = defaultdict(list)
    for m in monomials(d.roots, cap):
        buckets[d.orbit_key(d.value(m))].append(m)
    # a monomial of value r has degree at most |r| / min |alpha_i(h_x)|
    shallowest = min(-v for row in d.values for v in row)
    blocks = []
    for label in sorted(buckets, reverse=True):
        reach = min(abs(v) for v in label) // shallowest if label else 0
        blocks.append(OrbitBlock(label, tuple(buckets[label]), reach <= cap))
    logger.debug("%d orbit blocks up to degree %d", len(blocks), cap)
    return blocks


def check_partition(d: ThetaStableDatum, blocks: Sequence[OrbitBlock], cap: int) -> ValidationReport:
    """Blocks are disjoint, cover every monomial to degree cap, and are weight-homogeneous."""
    seen: set[Monomial] = set()
    for block in blocks:
        for m in block.monomials:
            if m in seen:
                return ValidationReport.failed("orbit-blocks", "blocks overlap", m)
            seen.add(m)
        if d.root_weights and len({d.weight(m) for m in block.monomials}) > 1 and not d.permutations:
            return ValidationReport.failed(
                "orbit-blocks", f"block {block.display()} mixes K_L-weights", block.label
            )
    expected = set(monomials(d.roots, cap))
    if seen != expected:
        return ValidationReport.failed("orbit-blocks", "blocks do not cover the PBW basis")
    return ValidationReport.passed("orbit-blocks")


def orbit_blocks_as_kmodule(d: ThetaStableDatum, blocks: Sequence[OrbitBlock], ring: BaseRing) -> KModule:
    """U(u_bar) up to the window as a torus module, one basis vector per monomial."""
    if not d.root_weights:
        raise PreconditionFailure("block weights need the root weights of the datum")
    labels, weights = [], []
    for block in blocks:
        for m in block.monomials:
            labels.append("u^" + "_".join(str(n) for n in m))
            weights.append(d.weight(m))
    return torus_module(ring, weights, labels, GroupDatum.torus(len(d.root_weights[0])))


def block_projections(blocks: Sequence[OrbitBlock], ring: BaseRing) -> list[DomainMatrix]:
    """Coordinate projections onto each block, in the basis of orbit_blocks_as_kmodule."""
    n = sum(b.rank for b in blocks)
    I = identity(n, ring.field)
    out, start = [], 0
    for b in blocks:
        out.append(select_columns(I, range(start, start + b.rank)))
        start += b.rank
    return out


###### pro decomposition ######

def pro_block_ranks(pm: PairMap, Z: GKModule, d: ThetaStableDatum, window: WeightWindow) -> dict[Weight, int]:
    """
    Graded ranks of the sum over blocks of Hom(U(u_bar)_O, Z) on the
    window: a monomial m and a basis vector z of Z contribute weight
    wt(z) - wt(m).
    """
    if not d.root_weights:
        raise PreconditionFailure("block ranks need the root weights of the datum")
    out: dict[Weight, int] = {}
    for block in orbit_decomposition(d, window.degree_cap):
        for m in block.monomials:
            wm = d.weight(m)
            for wz in Z.weights:
                w = tuple(a - b for a, b in zip(wz, wm))
                if window.admits(w):
                    out[w] = out.get(w, 0) + 1
    return dict(sorted(out.items(), reverse=True))


def check_pro_decomposition(pm: PairMap, Z: GKModule, d: ThetaStableDatum, window: WeightWindow) -> ValidationReport:
    P = pro(pm, Z, window)
    direct = dict(sorted(P.graded_ranks().items(), reverse=True))
    blockwise = pro_block_ranks(pm, Z, d, window)
    if direct != blockwise:
        return ValidationReport.failed(
            "pro-decomposition", f"pro ranks {direct} differ from blockwise ranks {blockwise}"
        )
    return ValidationReport.passed("pro-decomposition")


@dataclass(frozen=True)
class BlockHomRanks:
    """Hom_K(Q, sum of blocks) computed directly and as a product of blockwise Homs."""

    direct: int
    blockwise: tuple[int, ...]
    nonzero_blocks: tuple[tuple[int, ...], ...] = field(default=())

    @property
    def coincide(self) -> bool:
        return self.direct == sum(self.blockwise)


def block_hom_ranks(Q: KModule, d: ThetaStableDatum, blocks: Sequence[OrbitBlock], ring: BaseRing) -> BlockHomRanks:
    total = orbit_blocks_as_kmodule(d, blocks, ring)
    direct = hom_K(Q, total).shape[1]
    ranks, nonzero = [], []
    for block in blocks:
        piece = orbit_blocks_as_kmodule(d, [block], ring)
        r = hom_K(Q, piece).shape[1]
        ranks.append(r)
        if r:
            nonzero.append(block.label)
    return BlockHomRanks(direct, tuple(ranks), tuple(nonzero))


def admissibility_profile(Z: GKModule, pm: PairMap, windows: Sequence[WeightWindow]) -> list[dict[Weight, int]]:
    """
    Graded ranks of pro(Z) on a growing family of windows. The outputs are
    free, so these are also the ranks after tensoring with QQ. Each weight
    must settle to a finite multiplicity.
    """
    if list(windows) != sorted(windows, key=lambda w: w.degree_cap):
        raise PreconditionFailure("windows must grow")
    if not Z.ring.is_field:
        logger.info("admissibility profile of %s is read over %s", Z.name, Z.ring.label)
    return [dict(sorted(pro(pm, Z, w).graded_ranks().items(), reverse=True)) for w in windows]


def window_stable(profile: Sequence[dict[Weight, int]], interior: Sequence[Weight]) -> bool:
    """Enlarging the window leaves the ranks of the interior weights unchanged."""
    first = profile[0]
    return all(p.get(w, 0) == first.get(w, 0) for p in profile for w in interior)
