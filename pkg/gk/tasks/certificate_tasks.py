from __future__ import annotations
from typing import Any, Mapping

from ..base_change import (
    COR_314,
    LEMMA_328,
    THM_B,
    THM_C,
    THM_D,
    VARIANT_G1,
    VARIANT_G2,
    ComparisonCertificate,
    comparison_iota,
    verify_cohomology_base_change,
    verify_hom_base_change,
    verify_invariants_base_change,
    verify_iota_naturality,
    verify_restriction_identity,
)
from ..errors import InternalInconsistency, ParseError
from ..functors import (
    adjunction_certificate,
    easy_duality,
    tensor_identity,
    triangle_identities_I,
    triangle_identities_ind,
)
from ..linalg import from_values
from .task import Task, TaskOutcome


class CertificateTask(Task):
    """
    A base change comparison. A certificate whose hypotheses fail is
    informational and surfaces as a warning; a non-iso verdict under the
    hypotheses fails the task.
    """

    kind = "certificate"
    required = ("statement", "ring_map")

    def _need(self, *names: str) -> None:
        for name in names:
            value = getattr(self.spec, name)
            if value is None or value == []:
                raise ParseError(f"task {self.id}: {self.spec.statement} needs '{name}'")

    def certify(self, outputs: Mapping[str, Any]) -> tuple[ComparisonCertificate, dict[str, Any]]:
        s = self.spec
        f = self.scenario.ring_map(s.ring_map)
        extra: dict[str, Any] = {}
        if s.statement in (THM_B, VARIANT_G1):
            X, Y = self.operands(outputs, 2)
            return verify_hom_base_change(f, X, Y), extra
        if s.statement in (THM_C, VARIANT_G2):
            self._need("pair_map", "module", "window")
            pm = self.scenario.pair_map(s.pair_map)
            W = self.module(outputs)
            window = self.scenario.window(s.window)
            cert = comparison_iota(f, pm, W, window)
            if s.morphism is not None:
                W2 = self.scenario.module(self._second_module(), outputs)
                phi = from_values(s.morphism, W.ring, W.rank)
                extra["naturality"] = verify_iota_naturality(f, pm, phi, W, W2, window).to_dict()
            return cert, extra
        if s.statement == THM_D:
            self._need("module")
            return verify_cohomology_base_change(f, self.module(outputs)), extra
        if s.statement == LEMMA_328:
            self._need("module")
            return verify_invariants_base_change(f, self.module(outputs).kmodule), extra
        self._need("pair_map", "module", "window")
        cert = verify_restriction_identity(
            f, self.scenario.pair_map(s.pair_map), self.module(outputs), self.scenario.window(s.window)
        )
        return cert, extra

    def _second_module(self) -> str:
        if len(self.spec.modules) != 1:
            raise ParseError(f"task {self.id}: naturality needs the target module in 'modules'")
        return self.spec.modules[0]

    def execute(self, outputs: Mapping[str, Any]) -> TaskOutcome:
        cert, extra = self.certify(outputs)
        result = {**cert.to_dict(), **extra}
        outcome = TaskOutcome(result, cert)
        if cert.tag != self.spec.statement and self.spec.statement != COR_314:
            outcome.warnings.append(f"requested {self.spec.statement}, certified as {cert.tag}")
        if cert.informational:
            outcome.warnings.extend(f"{cert.tag} informational: {note}" for note in cert.notes)
        elif not cert.is_iso:
            outcome.failure = InternalInconsistency(f"{cert.tag} {cert.instance}: {cert.verdict}")
        naturality = extra.get("naturality")
        if naturality is not None and not naturality["ok"] and outcome.failure is None:
            outcome.failure = InternalInconsistency(f"iota is not natural: {naturality['detail']}")
        return outcome


class AdjunctionTask(Task):
    """
    Hom(X, I(V)) -> Hom(F(X), V) as a lattice isomorphism, with the
    triangle identities of both adjunctions around the forgetful functor.
    """

    kind = "adjunction"
    required = ("pair_map", "modules", "window")

    def execute(self, outputs: Mapping[str, Any]) -> TaskOutcome:
        X, V = self.operands(outputs, 2)
        pm = self.scenario.pair_map(self.spec.pair_map)
        window = self.scenario.window(self.spec.window)
        cert = adjunction_certificate(pm, X, V, window)
        tri_I = triangle_identities_I(pm, X, V, window)
        tri_ind = triangle_identities_ind(pm, V, X, window)
        result = {
            "ranks": list(cert.ranks),
            "iso": cert.iso,
            "triangles_I": [tri_I.first, tri_I.second],
            "triangles_ind": [tri_ind.first, tri_ind.second],
        }
        outcome = TaskOutcome(result, cert)
        if tri_I.second is None:
            outcome.warnings.append(f"I({V.name}) is window-truncated; its triangle identity was not checked")
        if not (cert.iso and tri_I and tri_ind):
            outcome.failure = InternalInconsistency(f"adjunction certificate failed for {X.name}, {V.name}")
        return outcome


class _IdentityTask(Task):
    required = ("pair_map", "window")

    def check(self, pm, outputs, window):
        raise NotImplementedError

    def execute(self, outputs: Mapping[str, Any]) -> TaskOutcome:
        pm = self.scenario.pair_map(self.spec.pair_map)
        cert = self.check(pm, outputs, self.scenario.window(self.spec.window))
        result = {
            "name": cert.name,
            "iso": cert.iso,
            "intertwines": cert.intertwines,
            "graded_ranks_equal": cert.graded_ranks_equal,
        }
        outcome = TaskOutcome(result, cert)
        if not cert:
            outcome.failure = InternalInconsistency(f"{cert.name} does not hold on this window")
        return outcome


class TensorIdentityTask(_IdentityTask):
    kind = "tensor_identity"
    required = ("pair_map", "modules", "window")

    def check(self, pm, outputs, window):
        W, V = self.operands(outputs, 2)
        return tensor_identity(pm, W, V, window)


class EasyDualityTask(_IdentityTask):
    kind = "easy_duality"
    required = ("pair_map", "module", "window")

    def check(self, pm, outputs, window):
        return easy_duality(pm, self.module(outputs), window)
