from __future__ import annotations
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, ClassVar, Mapping, Optional

from sympy.polys.matrices import DomainMatrix

from ..errors import GKError, ParseError
from ..linalg import entries
from ..pairs import GKModule
from ..rings import BaseRing
from ..schemas import TaskSpec

if TYPE_CHECKING:
    from ..scenario import Scenario

STRUCTURE_LIMIT = 12  # largest rank whose action matrices are written into a report


@dataclass
class TaskOutcome:
    """What a task hands back to the runner. ``value`` feeds ``@id`` references."""

    result: dict[str, Any]
    value: Any = None
    warnings: list[str] = field(default_factory=list)
    failure: Optional[GKError] = None


class Task(ABC):
    """
    One scenario task. Subclasses declare their ``kind`` and the TaskSpec
    fields they cannot run without, and implement ``execute``, which runs
    in a worker thread and must not touch shared state.
    """

    kind: ClassVar[str]
    required: ClassVar[tuple[str, ...]] = ()

    def __init__(self, spec: TaskSpec, scenario: "Scenario") -> None:
        self.spec = spec
        self.scenario = scenario
        self.requires()

    # ─────────────────────────────── public API
    @property
    def id(self) -> str:
        return self.spec.id

    def requires(self) -> None:
        for name in self.required:
            value = getattr(self.spec, name)
            if value is None or value == []:
                raise ParseError(f"task {self.id} ({self.kind}) needs '{name}'")

    def inputs(self) -> dict[str, Any]:
        """Echo of the fields this task was given."""
        return self.spec.model_dump(exclude={"id", "kind", "after"}, exclude_none=True, exclude_defaults=True)

    @abstractmethod
    def execute(self, outputs: Mapping[str, Any]) -> TaskOutcome:
        pass

    # ─────────────────────────────── helpers for subclasses
    def module(self, outputs: Mapping[str, Any]) -> GKModule:
        return self.scenario.module(self.spec.module, outputs)

    def operands(self, outputs: Mapping[str, Any], count: int) -> list[GKModule]:
        if len(self.spec.modules) != count:
            raise ParseError(f"task {self.id} ({self.kind}) needs {count} modules, got {len(self.spec.modules)}")
        return [self.scenario.module(ref, outputs) for ref in self.spec.modules]


###### Serialization helpers ######

def format_matrix(M: DomainMatrix, ring: BaseRing) -> list[list[str]]:
    return [[ring.format(x) for x in row] for row in entries(M)]


def format_ranks(ranks: Mapping[tuple[int, ...], int]) -> list[dict[str, Any]]:
    return [{"weight": list(w), "rank": r} for w, r in sorted(ranks.items(), reverse=True)]


def describe_module(V: GKModule, *, structure: bool = True) -> dict[str, Any]:
    out: dict[str, Any] = {
        "name": V.name,
        "ring": V.ring.label,
        "pair": V.pair.name,
        "rank": V.rank,
        "labels": list(V.labels),
        "graded_ranks": format_ranks(V.graded_ranks()),
    }
    if V.window is not None:
        out["window"] = V.window.to_dict()
    if structure and V.rank <= STRUCTURE_LIMIT and not V.is_windowed:
        out["action"] = {lab: format_matrix(M, V.ring) for lab, M in zip(V.pair.g.labels, V.action)}
    return out
