from __future__ import annotations
from typing import Any, Mapping

from ..base_change import verify_cohomology_base_change
from ..cohomology import build_ce_complex, compute_cohomology, euler_characteristic, ext_gk
from ..errors import InternalInconsistency
from .task import Task, TaskOutcome


class CohomologyTask(Task):
    """
    H^*(q, M; V) with torsion. With a ring map the base change comparison
    of the complex is attached to the result.
    """

    kind = "cohomology"
    required = ("module",)

    def execute(self, outputs: Mapping[str, Any]) -> TaskOutcome:
        V = self.module(outputs)
        C = build_ce_complex(V, self.spec.degree)
        top = self.spec.degree + 1 if self.spec.degree is not None else None
        report = compute_cohomology(C, top)
        result: dict[str, Any] = {
            "complex": C.name,
            "cochain_ranks": list(C.ranks()),
            **report.to_dict(),
            "lines": report.lines(),
        }
        if self.spec.degree is None:
            chi = euler_characteristic(C)
            if chi != report.euler_characteristic():
                raise InternalInconsistency(
                    f"Euler characteristic {chi} of {C.name} differs from that of its cohomology"
                )
            result["euler_characteristic"] = chi
        outcome = TaskOutcome(result, report)
        if self.spec.ring_map is not None:
            cert = verify_cohomology_base_change(self.scenario.ring_map(self.spec.ring_map), V)
            result["base_change"] = cert.to_dict()
            if not cert.is_iso:
                outcome.failure = InternalInconsistency(f"{cert.tag} {cert.instance}: {cert.verdict}")
        return outcome


class ExtTask(Task):
    kind = "ext"
    required = ("modules", "degree")

    def execute(self, outputs: Mapping[str, Any]) -> TaskOutcome:
        X, Y = self.operands(outputs, 2)
        report = ext_gk(X, Y, self.spec.degree)
        result = {"name": report.name, **report.to_dict(), "lines": report.lines()}
        return TaskOutcome(result, report)
