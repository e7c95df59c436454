# base_change.py

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from typing import Any, Callable

from sympy.polys.matrices import DomainMatrix

from .cohomology import CohomologyReport, base_change_complex, build_ce_complex, compute_cohomology
from .comodules import KModule, invariants_K
from .errors import PreconditionFailure, UnsupportedRingMap, ValidationFailure, ValidationReport
from .functors import I_functor, WeightWindow, induced_morphism, leak_free_basis
from .linalg import (
    LatticeModule,
    apply_ring_map,
    dense,
    entries,
    equal,
    format_divisors,
    is_isomorphism,
    matmul,
    smith_normal_form,
    solve,
)
from .pairs import GKModule, PairDatum, PairMap, hom_space_gk, validate_pair_module
from .rings import GAUSSIAN, RingMap

logger = logging.getLogger("gk.base_change")

THM_B = "ThmB"
THM_C = "ThmC"
THM_D = "ThmD-instance"
VARIANT_G1 = "VariantG1"
VARIANT_G2 = "VariantG2"
LEMMA_328 = "Lemma328"
COR_314 = "Cor314"

ISO = "iso"
NOT_ISO = "not-iso"


@dataclass(frozen=True, eq=False)
class ComparisonCertificate:
    """
    Both sides of a base change statement computed independently, and the
    canonical map between them. The verdict is "iso" exactly when the
    ranks agree and every Smith divisor of the map is a unit.
    """

    tag: str
    instance: str
    ranks: tuple[int, int]
    matrix: DomainMatrix | None
    divisors: tuple[str, ...]
    verdict: str
    informational: bool = False
    notes: tuple[str, ...] = field(default=())

    @property
    def is_iso(self) -> bool:
        return self.verdict == ISO

    @property
    def instance_hash(self) -> str:
        return hashlib.sha256(self.instance.encode("utf-8")).hexdigest()[:12]

    def to_dict(self) -> dict[str, Any]:
        return {
            "tag": self.tag,
            "instance": self.instance,
            "instance_hash": self.instance_hash,
            "ranks": list(self.ranks),
            "verdict": self.verdict,
            "informational": self.informational,
            "divisors": list(self.divisors),
            "notes": list(self.notes),
        }


def _certify(
    tag: str,
    instance: str,
    left: DomainMatrix,
    right: DomainMatrix,
    f: RingMap,
    *,
    informational: bool = False,
    notes: tuple[str, ...] = (),
    check: Callable[[DomainMatrix], str | None] | None = None,
) -> ComparisonCertificate:
    """
    Express the left lattice in the basis of the right one and read off the
    Smith divisors. ``check`` sees the change of basis and returns a reason
    when it is not a morphism of the structures at hand.
    """
    ring = f.target
    ranks = (left.shape[1], right.shape[1])
    M = solve(right, left, ring) if left.shape[0] == right.shape[0] else None
    divisors: tuple[str, ...] = ()
    iso = False
    if M is not None:
        if M.shape[0] and M.shape[1]:
            divisors = tuple(format_divisors(ring, smith_normal_form(M, ring).divisors))
        iso = ranks[0] == ranks[1] and is_isomorphism(M, ring)
        if check is not None:
            reason = check(M)
            if reason is not None:
                iso = False
                notes = (*notes, reason)
    cert = ComparisonCertificate(
        tag, instance, ranks, M, divisors, ISO if iso else NOT_ISO, informational, notes
    )
    if informational:
        logger.warning("%s certificate for %s is informational: %s", tag, instance, "; ".join(notes))
    else:
        logger.info("%s %s: %s (ranks %d, %d)", tag, instance, cert.verdict, *ranks)
    return cert


###### Modules ######

def base_change_module(f: RingMap, V: GKModule, *, validate: bool = True) -> GKModule:
    """V (x) k': the entrywise image of every structure matrix."""
    if f.source != V.ring:
        raise UnsupportedRingMap(f"{f.label} does not start at {V.ring.label}")
    if f.is_identity:
        return V
    out = V.base_change(f)
    if validate and not out.is_windowed:
        report = validate_pair_module(out)
        if not report:
            raise ValidationFailure(report)
    return out


def _realify(M: DomainMatrix, f: RingMap) -> DomainMatrix:
    """a + bi -> [[a, -b], [b, a]] blockwise."""
    K = f.source.field
    rows = entries(M)
    m, n = M.shape
    out = [[K.zero] * (2 * n) for _ in range(2 * m)]
    for i in range(m):
        for j in range(n):
            a, b = f.target.parts(rows[i][j])
            out[2 * i][2 * j] = K.convert(a)
            out[2 * i][2 * j + 1] = K.convert(-b)
            out[2 * i + 1][2 * j] = K.convert(b)
            out[2 * i + 1][2 * j + 1] = K.convert(a)
    return dense(out, K, 2 * n)


def _require_gaussian(f: RingMap) -> None:
    if f.target.kind != GAUSSIAN or f.source.kind == GAUSSIAN:
        raise UnsupportedRingMap(f"restriction of scalars is materialized along ZZ -> ZZ[i], not {f.label}")


def restriction_of_scalars(f: RingMap, pair: PairDatum, V: GKModule) -> GKModule:
    """
    A module over pair (x) ZZ[i] viewed over pair: basis v, i*v for every
    basis vector v of V.
    """
    _require_gaussian(f)
    if V.ring != f.target:
        raise PreconditionFailure(f"{V.name} is not defined over {f.target.label}")
    labels = tuple(lab for v in V.labels for lab in (v, f"i*{v}"))
    weights = tuple(w for w in V.weights for _ in range(2))
    km_e = _realify(V.kmodule.e, f) if V.kmodule.e is not None else None
    km_f = _realify(V.kmodule.f, f) if V.kmodule.f is not None else None
    km = KModule(pair.group, LatticeModule(f.source, labels), weights, km_e, km_f)
    keys = None
    if V.keys is not None:
        keys = tuple((a, 2 * z + p) for a, z in V.keys for p in range(2))
    return GKModule(
        pair,
        km,
        tuple(_realify(M, f) for M in V.action),
        V.window,
        tuple(_realify(L, f) for L in V.leaks) if V.leaks is not None else None,
        f"Res({V.name})",
        keys=keys,
    )


def scalar_extension_unit(f: RingMap, V: GKModule) -> DomainMatrix:
    """The unit V -> Res(V (x) ZZ[i]), v -> v (x) 1."""
    _require_gaussian(f)
    K = f.source.field
    rows = [[K.zero] * V.rank for _ in range(2 * V.rank)]
    for i in range(V.rank):
        rows[2 * i][i] = K.one
    return dense(rows, K, V.rank)


###### Certificates ######

def _describe(pm: PairMap, W: GKModule, window: WeightWindow | None, f: RingMap) -> str:
    tail = f", cap {window.degree_cap}" if window is not None else ""
    return f"{pm.source.name} -> {pm.target.name}, {W.name}, {f.label}{tail}"


def _window_mismatch(f: RingMap, A: GKModule, At: GKModule) -> str | None:
    """Where A (x) k' and At differ as window modules, if anywhere."""
    if A.rank != At.rank or A.weights != At.weights:
        return f"the window modules have weights {A.graded_ranks()} and {At.graded_ranks()}"
    labels = A.pair.g.labels
    for i, (M, Mt) in enumerate(zip(A.action, At.action)):
        if not equal(apply_ring_map(f, M), Mt):
            return f"the window modules differ in the action of {labels[i]}"
    if (A.leaks is None) != (At.leaks is None):
        return "only one window module records leaks"
    for i, (L, Lt) in enumerate(zip(A.leaks or (), At.leaks or ())):
        if L.shape != Lt.shape or not equal(apply_ring_map(f, L), Lt):
            return f"the window modules differ in the leaks of {labels[i]}"
    return None


def comparison_iota(
    f: RingMap,
    pm: PairMap,
    W: GKModule,
    window: WeightWindow,
    compute: Callable[[PairMap, GKModule, WeightWindow], GKModule] = I_functor,
) -> ComparisonCertificate:
    """
    iota: I(W) (x) k' -> I(W (x) k'). Both sides are sublattices of the same
    coinduced window module, so iota is the change of basis between them.
    The window modules must agree entrywise after base change, and iota
    must commute with the action of g on every column that stays inside
    the window.
    """
    left = compute(pm, W, window)
    right = compute(pm.base_change(f), base_change_module(f, W), window)
    A_left, B_left = left.ambient_embedding()
    A_right, B_right = right.ambient_embedding()
    notes = []
    if not pm.surjective:
        notes.append("Lie(K) + q -> g is not surjective")
    tag = VARIANT_G2 if f.is_finite_projective and not f.is_identity else THM_C

    def check(M: DomainMatrix) -> str | None:
        reason = _window_mismatch(f, A_left, A_right)
        if reason is not None:
            return reason
        inside = apply_ring_map(f, leak_free_basis(left))
        for i, (X, Xt) in enumerate(zip(left.action, right.action)):
            lhs = matmul(matmul(Xt, M), inside)
            rhs = matmul(matmul(M, apply_ring_map(f, X)), inside)
            if not equal(lhs, rhs):
                return f"iota does not commute with the action of {pm.target.g.labels[i]}"
        return None

    return _certify(
        tag,
        _describe(pm, W, window, f),
        apply_ring_map(f, B_left),
        B_right,
        f,
        informational=bool(notes),
        notes=tuple(notes),
        check=check,
    )


def _finite(X: GKModule) -> GKModule:
    return GKModule(X.pair, X.kmodule, X.action, None, None, X.name)


def verify_hom_base_change(f: RingMap, X: GKModule, Y: GKModule) -> ComparisonCertificate:
    """Hom_{g,K}(X, Y) (x) k' against Hom_{g (x) k', K}(X (x) k', Y (x) k')."""
    notes = []
    if X.is_windowed:
        notes.append(f"{X.name} is a window of an infinitely generated module")
        X = _finite(X)
    left = hom_space_gk(X, Y).basis
    right = hom_space_gk(base_change_module(f, X, validate=False), base_change_module(f, Y, validate=False)).basis
    tag = VARIANT_G1 if f.is_finite_projective and not f.is_identity else THM_B
    return _certify(
        tag,
        f"Hom({X.name}, {Y.name}), {f.label}",
        apply_ring_map(f, left),
        right,
        f,
        informational=bool(notes),
        notes=tuple(notes),
    )


def verify_invariants_base_change(f: RingMap, V: KModule) -> ComparisonCertificate:
    """V^K (x) k' against (V (x) k')^K."""
    left = invariants_K(V).basis
    right = invariants_K(V.base_change(f)).basis
    return _certify(LEMMA_328, f"invariants of rank {V.rank}, {f.label}", apply_ring_map(f, left), right, f)


def verify_restriction_identity(
    f: RingMap, pm: PairMap, V: GKModule, window: WeightWindow
) -> ComparisonCertificate:
    """
    I(Res V) against Res I(V) for V over the pair (x) ZZ[i]. Both live in
    the same coinduced coordinates, so the certificate compares the lattices
    directly.
    """
    _require_gaussian(f)
    pm_t = pm.base_change(f)
    left = I_functor(pm, restriction_of_scalars(f, pm.source, V), window)
    right_t = I_functor(pm_t, V, window)
    _, B_left = left.ambient_embedding()
    _, B_right = right_t.ambient_embedding()
    identity_map = RingMap.identity(f.source)
    return _certify(
        COR_314,
        f"{pm.source.name} -> {pm.target.name}, Res({V.name})",
        B_left,
        _realify(B_right, f),
        identity_map,
    )


def _predicted(report: CohomologyReport, f: RingMap) -> list[tuple[int, list[str]]]:
    out = []
    for g in report.groups:
        kept = [d for d in g.torsion if not f.target.is_unit(f(d))]
        out.append((g.free_rank, format_divisors(f.target, [f(d) for d in kept])))
    return out


def verify_cohomology_base_change(f: RingMap, V: GKModule) -> ComparisonCertificate:
    """
    H^*(q, M; V) computed from the base-changed complex against the complex
    of V (x) k'. Over QQ and ZZ[1/n] the torsion must also follow the rule
    that divisors becoming units vanish and the others persist.
    """
    C = build_ce_complex(V)
    Cb = base_change_complex(f, C)
    Ct = build_ce_complex(base_change_module(f, V))
    before = compute_cohomology(C)
    left = compute_cohomology(Cb)
    right = compute_cohomology(Ct)
    same_complex = all(equal(a, b) for a, b in zip(Cb.differentials, Ct.differentials))
    agree = left.to_dict()["groups"] == right.to_dict()["groups"]
    notes = [*left.lines()]
    if f.target.kind != GAUSSIAN:
        predicted = _predicted(before, f)
        actual = [(g.free_rank, format_divisors(f.target, g.torsion)) for g in left.groups]
        if predicted != actual:
            agree = False
            notes.append(f"torsion does not follow the localization rule: {predicted} vs {actual}")
    ranks = (sum(left.free_ranks()), sum(right.free_ranks()))
    verdict = ISO if same_complex and agree else NOT_ISO
    cert = ComparisonCertificate(
        THM_D,
        f"H*({V.pair.g.name}, {V.name}), {f.label}",
        ranks,
        None,
        (),
        verdict,
        False,
        tuple(notes),
    )
    logger.info("%s %s: %s", THM_D, cert.instance, verdict)
    return cert


def verify_iota_naturality(
    f: RingMap,
    pm: PairMap,
    phi: DomainMatrix,
    W: GKModule,
    W2: GKModule,
    window: WeightWindow,
) -> ValidationReport:
    """iota_{W2} . (I(phi) (x) k') = I(phi (x) k') . iota_W, as matrices."""
    IW, IW2 = I_functor(pm, W, window), I_functor(pm, W2, window)
    pm_t = pm.base_change(f)
    Wt, W2t = base_change_module(f, W), base_change_module(f, W2)
    IWt, IW2t = I_functor(pm_t, Wt, window), I_functor(pm_t, W2t, window)
    ring = f.target

    def iota(source: GKModule, target: GKModule) -> DomainMatrix | None:
        return solve(target.ambient_embedding()[1], apply_ring_map(f, source.ambient_embedding()[1]), ring)

    iota_W, iota_W2 = iota(IW, IWt), iota(IW2, IW2t)
    if iota_W is None or iota_W2 is None:
        return ValidationReport.failed("iota-naturality", "iota is not defined on this window")
    I_phi = apply_ring_map(f, induced_morphism(phi, IW, IW2))
    I_phi_t = induced_morphism(apply_ring_map(f, phi), IWt, IW2t)
    if not equal(matmul(iota_W2, I_phi), matmul(I_phi_t, iota_W)):
        return ValidationReport.failed("iota-naturality", "the naturality square does not commute")
    return ValidationReport.passed("iota-naturality")
