from __future__ import annotations
from typing import Any, Mapping

from ..errors import InternalInconsistency, ValidationFailure
from ..lie import LieAlgebraData, validate_lie
from ..pairs import (
    PairDatum,
    PairMap,
    currying_map,
    hom_space_gk,
    validate_pair,
    validate_pair_module,
)
from .task import STRUCTURE_LIMIT, Task, TaskOutcome, format_matrix


class ValidateTask(Task):
    """Structural check of an algebra, pair, pair map or module; a failed check fails the task."""

    kind = "validate"
    required = ("target",)

    def execute(self, outputs: Mapping[str, Any]) -> TaskOutcome:
        obj = self.scenario.target(self.spec.target, outputs)
        if isinstance(obj, LieAlgebraData):
            report = validate_lie(obj)
        elif isinstance(obj, PairDatum):
            report = validate_pair(obj)
        elif isinstance(obj, PairMap):
            report = obj.validate()
        else:
            report = validate_pair_module(obj)
        outcome = TaskOutcome(report.to_dict(), obj)
        if not report:
            outcome.failure = ValidationFailure(report)
        return outcome


class HomTask(Task):
    kind = "hom"
    required = ("modules",)

    def execute(self, outputs: Mapping[str, Any]) -> TaskOutcome:
        X, Y = self.operands(outputs, 2)
        H = hom_space_gk(X, Y)
        result: dict[str, Any] = {"source": X.name, "target": Y.name, "rank": H.rank}
        if H.rank <= STRUCTURE_LIMIT:
            result["basis"] = [format_matrix(H.matrix(c), X.ring) for c in range(H.rank)]
        return TaskOutcome(result, H)


class CurryingTask(Task):
    kind = "currying"
    required = ("modules",)

    def execute(self, outputs: Mapping[str, Any]) -> TaskOutcome:
        U, V, W = self.operands(outputs, 3)
        cert = currying_map(U, V, W)
        result = {"ranks": [cert.left.rank, cert.right.rank], "iso": cert.iso}
        outcome = TaskOutcome(result, cert)
        if not cert.iso:
            outcome.failure = InternalInconsistency(
                f"currying Hom({U.name}⊗{V.name}, {W.name}) -> Hom({U.name}, F({V.name}, {W.name})) is not an isomorphism"
            )
        return outcome
