# schemas.py

from __future__ import annotations
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

Entry = Union[int, str, List[Union[int, str]]]
Matrix = List[List[Entry]]
WeightSpec = Union[int, List[int]]

###### Scenario file ######

class AlgebraSpec(BaseModel):
    """
    A Lie algebra over a declared ring: either a preset or explicit sparse
    structure constants ``[x, y, {z: c}]`` meaning [x, y] = sum c z.
    """
    ring: str = Field(..., description="Name of a declared ring")
    preset: Optional[Literal["sl2", "gl", "abelian", "borel-lower", "borel-upper"]] = None
    n: Optional[int] = Field(None, description="Rank for the gl and abelian presets")
    labels: Optional[List[str]] = None
    brackets: List[List[Any]] = Field(default_factory=list)
    validate_axioms: bool = Field(True, alias="validate")

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    @model_validator(mode="after")
    def _preset_or_labels(self) -> "AlgebraSpec":
        if (self.preset is None) == (self.labels is None):
            raise ValueError("give exactly one of 'preset' and 'labels'")
        return self


class GroupSpec(BaseModel):
    kind: Literal["trivial", "torus", "sl2", "gl2", "chevalley"]
    rank: int = 1
    root: Optional[List[int]] = None
    coroot: Optional[List[int]] = None

    model_config = ConfigDict(extra="forbid")


class PairSpec(BaseModel):
    """A pair (g, K). Presets cover the standard pairs; otherwise give weights and psi."""
    ring: Optional[str] = None
    preset: Optional[Literal["sl2", "borel", "torus", "trivial", "abelian", "gl2"]] = None
    group: Optional[str] = Field(None, description="Preset variant (torus|sl2|gl2|lower|upper) or a declared group")
    rank: Optional[int] = None
    algebra: Optional[str] = None
    weights: Dict[str, WeightSpec] = Field(default_factory=dict)
    psi: Dict[str, Dict[str, Entry]] = Field(default_factory=dict)

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _preset_or_algebra(self) -> "PairSpec":
        if (self.preset is None) == (self.algebra is None):
            raise ValueError("give exactly one of 'preset' and 'algebra'")
        if self.preset is not None and self.ring is None:
            raise ValueError("a preset pair needs a ring")
        return self


class PairMapSpec(BaseModel):
    """The label-matching inclusion q -> g, or an explicit lie part."""
    source: str
    target: str
    lie_part: Optional[Matrix] = Field(None, description="dim(g) x dim(q), row-major")
    restriction: Optional[List[List[int]]] = Field(None, description="r_M x r_K integer matrix")

    model_config = ConfigDict(extra="forbid")


class ModuleSpec(BaseModel):
    """
    A (g, K)-module over a declared pair. Presets: trivial, character,
    adjoint, divided-power, symmetric-power, tensor, dual, base-change.
    """
    pair: Optional[str] = None
    preset: Optional[
        Literal[
            "trivial",
            "character",
            "adjoint",
            "divided-power",
            "symmetric-power",
            "tensor",
            "dual",
            "base-change",
        ]
    ] = None
    rank: Optional[int] = None
    n: Optional[int] = None
    weight: Optional[WeightSpec] = None
    of: List[str] = Field(default_factory=list, description="Operand modules of tensor, dual and base-change")
    ring_map: Optional[str] = None
    labels: Optional[List[str]] = None
    weights: Optional[List[WeightSpec]] = None
    action: Dict[str, Matrix] = Field(default_factory=dict)
    e: Optional[Matrix] = None
    f: Optional[Matrix] = None

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _preset_or_table(self) -> "ModuleSpec":
        if self.preset is None and (self.labels is None or self.weights is None):
            raise ValueError("an explicit module needs labels and weights")
        if self.preset not in ("tensor", "dual", "base-change") and self.pair is None:
            raise ValueError("a module needs a pair")
        return self


class WindowSpec(BaseModel):
    degree_cap: int = Field(..., ge=0)
    weights: Optional[List[WeightSpec]] = None

    model_config = ConfigDict(extra="forbid")


class ThetaSpec(BaseModel):
    values: List[List[int]] = Field(..., description="alpha_i(h_x), one row per representative")
    permutations: List[List[int]] = Field(default_factory=list)
    root_weights: List[List[int]] = Field(default_factory=list)

    model_config = ConfigDict(extra="forbid")


TaskKind = Literal[
    "validate",
    "forgetful",
    "ind",
    "pro",
    "gamma",
    "I",
    "aq_lambda",
    "closure",
    "orbits",
    "cohomology",
    "ext",
    "hom",
    "certificate",
    "adjunction",
    "currying",
    "tensor_identity",
    "easy_duality",
]

Statement = Literal["ThmB", "ThmC", "ThmD-instance", "VariantG1", "VariantG2", "Lemma328", "Cor314"]


class TaskSpec(BaseModel):
    """
    One requested computation. Which fields are required depends on the
    kind; module references of the form ``@id`` name an earlier task's
    output.
    """
    id: str
    kind: TaskKind
    target: Optional[str] = Field(None, description="'algebra:x', 'pair:x', 'pair_map:x' or 'module:x'")
    pair_map: Optional[str] = None
    module: Optional[str] = None
    modules: List[str] = Field(default_factory=list)
    window: Optional[str] = None
    ring_map: Optional[str] = None
    statement: Optional[Statement] = None
    degree: Optional[int] = None
    theta: Optional[ThetaSpec] = None
    u_labels: Optional[List[str]] = None
    vector: Optional[int] = None
    morphism: Optional[Matrix] = None
    after: List[str] = Field(default_factory=list)

    model_config = ConfigDict(extra="forbid")


class ScenarioFile(BaseModel):
    """The whole scenario: declarations by name, then the task list."""
    name: str
    description: str = ""
    rings: Dict[str, str] = Field(default_factory=dict)
    ring_maps: Dict[str, str] = Field(default_factory=dict)
    algebras: Dict[str, AlgebraSpec] = Field(default_factory=dict)
    groups: Dict[str, GroupSpec] = Field(default_factory=dict)
    pairs: Dict[str, PairSpec] = Field(default_factory=dict)
    pair_maps: Dict[str, PairMapSpec] = Field(default_factory=dict)
    modules: Dict[str, ModuleSpec] = Field(default_factory=dict)
    windows: Dict[str, WindowSpec] = Field(default_factory=dict)
    tasks: List[TaskSpec] = Field(default_factory=list)

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _unique_task_ids(self) -> "ScenarioFile":
        ids = [t.id for t in self.tasks]
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        if dupes:
            raise ValueError(f"duplicate task ids {dupes}")
        return self


###### Report ######

TaskStatus = Literal["ok", "failed", "skipped"]


class TaskResult(BaseModel):
    id: str
    kind: TaskKind
    status: TaskStatus
    inputs: Dict[str, Any] = Field(default_factory=dict)
    result: Dict[str, Any] = Field(default_factory=dict)
    warnings: List[str] = Field(default_factory=list)
    error: Optional[str] = None
    error_kind: Optional[str] = None

    model_config = ConfigDict(extra="forbid")


class Report(BaseModel):
    scenario: str
    version: str
    tasks: List[TaskResult] = Field(default_factory=list)
    timing: Dict[str, float] = Field(default_factory=dict, description="Seconds per task; not deterministic")

    model_config = ConfigDict(extra="forbid")

    def deterministic(self) -> Dict[str, Any]:
        return self.model_dump(exclude={"timing"})
