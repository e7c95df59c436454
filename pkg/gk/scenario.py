# scenario.py

from __future__ import annotations

import logging
from functools import reduce
from pathlib import Path
from typing import Any, Iterable, Mapping

from pydantic import ValidationError

from .base_change import base_change_module
from .comodules import CHEVALLEY, GroupDatum, KModule, divided_power_form, symmetric_power_form
from .errors import ParseError, ValidationFailure
from .functors import WeightWindow
from .lie import LieAlgebraData, abelian, gl, sl2
from .linalg import LatticeModule, from_values
from .orbits import ThetaStableDatum
from .pairs import (
    GKModule,
    PairDatum,
    PairMap,
    abelian_pair,
    adjoint_gk,
    borel_pair,
    character_gk,
    dual_gk,
    gk_module,
    gl2_pair,
    sl2_form_gk,
    sl2_pair,
    tensor_gk,
    torus_pair,
    trivial_gk,
    trivial_pair,
)
from .rings import BaseRing, RingMap
from .schemas import AlgebraSpec, ModuleSpec, PairSpec, ScenarioFile, TaskSpec, ThetaSpec

logger = logging.getLogger("gk.scenario")

TASK_REF = "@"  # prefix of a module reference naming an earlier task's output


def _weight(w: int | list[int]) -> tuple[int, ...]:
    return (w,) if isinstance(w, int) else tuple(w)


def _triples(brackets: Iterable[list[Any]]) -> list[tuple]:
    """Accept ``[x, y, {z: c, ...}]`` or flat ``[x, y, z, c]`` entries."""
    out = []
    for entry in brackets:
        if len(entry) == 3 and isinstance(entry[2], Mapping):
            x, y, terms = entry
            out.extend((x, y, z, c) for z, c in terms.items())
        elif len(entry) == 4:
            out.append(tuple(entry))
        else:
            raise ParseError(f"cannot read bracket entry {entry!r}")
    return out


class Scenario:
    """
    A parsed scenario with its declarations resolved to domain objects.
    Declarations that do not depend on task outputs are built once, up
    front; modules built from ``@task`` references are rebuilt on demand.
    """

    def __init__(self, spec: ScenarioFile, source: str | None = None):
        self.spec = spec
        self.source = source
        self.rings: dict[str, BaseRing] = {}
        self.ring_maps: dict[str, RingMap] = {}
        self.algebras: dict[str, LieAlgebraData] = {}
        self.groups: dict[str, GroupDatum] = {}
        self.pairs: dict[str, PairDatum] = {}
        self.pair_maps: dict[str, PairMap] = {}
        self.windows: dict[str, WeightWindow] = {}
        self.modules: dict[str, GKModule] = {}
        self._resolved = False

    # ─────────────────────────────── loading
    @classmethod
    def from_text(cls, text: str, source: str | None = None) -> "Scenario":
        try:
            spec = ScenarioFile.model_validate_json(text)
        except ValidationError as exc:
            raise ParseError(f"{source or 'scenario'}: {exc}") from exc
        scenario = cls(spec, source)
        scenario.check_references()
        return scenario

    @classmethod
    def load(cls, path: str | Path) -> "Scenario":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read scenario {path}: {exc}") from exc
        return cls.from_text(text, str(path))

    @property
    def name(self) -> str:
        return self.spec.name

    @property
    def tasks(self) -> list[TaskSpec]:
        return self.spec.tasks

    # ─────────────────────────────── references
    def _module_refs(self, name: str, seen: frozenset[str] = frozenset()) -> set[str]:
        """Task ids a module reference depends on, through nested declarations."""
        if name.startswith(TASK_REF):
            return {name[1:]}
        if name in seen:
            raise ParseError(f"module {name!r} is defined in terms of itself")
        decl = self.spec.modules.get(name)
        if decl is None:
            raise ParseError(f"unknown module {name!r}")
        out: set[str] = set()
        for ref in decl.of:
            out |= self._module_refs(ref, seen | {name})
        return out

    def dependencies(self, task: TaskSpec) -> set[str]:
        deps = set(task.after)
        for ref in [task.module, *task.modules]:
            if ref is not None:
                deps |= self._module_refs(ref)
        return deps

    def check_references(self) -> None:
        """Every name resolves and every task only waits on earlier tasks."""
        s = self.spec
        declared = {
            "ring": set(s.rings),
            "ring_map": set(s.ring_maps),
            "algebra": set(s.algebras),
            "group": set(s.groups),
            "pair": set(s.pairs),
            "pair_map": set(s.pair_maps),
            "module": set(s.modules),
            "window": set(s.windows),
        }

        def need(kind: str, name: str | None, where: str) -> None:
            if name is not None and name not in declared[kind]:
                raise ParseError(f"{where}: unknown {kind} {name!r}")

        for name, a in s.algebras.items():
            self._ring_label(a.ring, f"algebra {name}")
        for name, p in s.pairs.items():
            if p.ring is not None:
                self._ring_label(p.ring, f"pair {name}")
            need("algebra", p.algebra, f"pair {name}")
            if p.algebra is not None:
                need("group", p.group, f"pair {name}")
        for name, m in s.pair_maps.items():
            need("pair", m.source, f"pair map {name}")
            need("pair", m.target, f"pair map {name}")
        for name, mod in s.modules.items():
            need("pair", mod.pair, f"module {name}")
            self._module_refs(name)
            if mod.preset == "base-change" and mod.ring_map is None:
                raise ParseError(f"module {name}: base-change needs a ring_map")

        earlier: set[str] = set()
        for task in s.tasks:
            where = f"task {task.id}"
            need("pair_map", task.pair_map, where)
            need("window", task.window, where)
            if task.ring_map is not None and task.ring_map not in declared["ring_map"]:
                self._parse_ring_map(task.ring_map, where)
            if task.target is not None:
                kind, _, name = task.target.partition(":")
                if kind not in ("algebra", "pair", "pair_map", "module") or not name:
                    raise ParseError(f"{where}: cannot read target {task.target!r}")
                if kind == "module" and name.startswith(TASK_REF):
                    if name[1:] not in earlier:
                        raise ParseError(f"{where}: {name} does not name an earlier task")
                else:
                    need(kind, name, where)
            for ref in [task.module, *task.modules]:
                if ref is not None and not ref.startswith(TASK_REF):
                    need("module", ref, where)
            missing = self.dependencies(task) - earlier
            if missing:
                raise ParseError(f"{where} depends on {sorted(missing)}, which are not earlier tasks")
            earlier.add(task.id)

    # ─────────────────────────────── resolution
    def _ring_label(self, name: str, where: str) -> BaseRing:
        label = self.spec.rings.get(name, name)
        try:
            return BaseRing.parse(label)
        except ParseError as exc:
            raise ParseError(f"{where}: {exc}") from exc

    def _parse_ring_map(self, label: str, where: str) -> RingMap:
        try:
            src, tgt = (part.strip() for part in label.split("->"))
        except ValueError as exc:
            raise ParseError(f"{where}: ring map must read 'A -> B', got {label!r}") from exc
        src = self.spec.rings.get(src, src)
        tgt = self.spec.rings.get(tgt, tgt)
        return RingMap.parse(f"{src} -> {tgt}")

    def resolve(self) -> "Scenario":
        """Build every declaration; structural validation failures raise here."""
        if self._resolved:
            return self
        s = self.spec
        for name, label in s.rings.items():
            self.rings[name] = self._ring_label(label, f"ring {name}")
        for name, label in s.ring_maps.items():
            self.ring_maps[name] = self._parse_ring_map(label, f"ring map {name}")
        for name, a in s.algebras.items():
            self.algebras[name] = self._build_algebra(name, a)
        for name, g in s.groups.items():
            self.groups[name] = self._build_group(name, g)
        for name, p in s.pairs.items():
            self.pairs[name] = self._build_pair(name, p)
        for name, m in s.pair_maps.items():
            self.pair_maps[name] = self._build_pair_map(name)
        for name, w in s.windows.items():
            weights = frozenset(_weight(x) for x in w.weights) if w.weights is not None else None
            self.windows[name] = WeightWindow(w.degree_cap, weights)
        for name in s.modules:
            if not self._module_refs(name):
                self.modules[name] = self._build_module(name, {})
        self._resolved = True
        logger.info(
            "resolved %s: %d pairs, %d modules, %d tasks",
            self.name,
            len(self.pairs),
            len(self.modules),
            len(self.tasks),
        )
        return self

    def _build_algebra(self, name: str, a: AlgebraSpec) -> LieAlgebraData:
        ring = self._ring_label(a.ring, f"algebra {name}")
        if a.preset == "sl2":
            return sl2(ring)
        if a.preset == "gl":
            return gl(ring, a.n or 2)
        if a.preset == "abelian":
            return abelian(ring, a.n or 1, name=name)
        if a.preset == "borel-lower":
            return sl2(ring).subalgebra(("h", "f"), name="b-")
        if a.preset == "borel-upper":
            return sl2(ring).subalgebra(("e", "h"), name="b+")
        return LieAlgebraData.from_triples(
            ring, a.labels, _triples(a.brackets), name=name, validate=a.validate_axioms
        )

    @staticmethod
    def _build_group(name: str, g) -> GroupDatum:
        if g.kind == "trivial":
            return GroupDatum.trivial()
        if g.kind == "torus":
            return GroupDatum.torus(g.rank)
        if g.kind == "sl2":
            return GroupDatum.sl2()
        if g.kind == "gl2":
            return GroupDatum.gl2()
        if g.root is None or g.coroot is None:
            raise ParseError(f"group {name}: a chevalley group needs root and coroot")
        return GroupDatum(CHEVALLEY, g.rank, tuple(g.root), tuple(g.coroot), name=name)

    def _build_pair(self, name: str, p: PairSpec) -> PairDatum:
        if p.preset is not None:
            ring = self._ring_label(p.ring, f"pair {name}")
            if p.preset == "sl2":
                return sl2_pair(ring, p.group or "torus")
            if p.preset == "borel":
                return borel_pair(ring, p.group or "lower")
            if p.preset == "torus":
                return torus_pair(ring, p.rank or 1)
            if p.preset == "trivial":
                return trivial_pair(ring)
            if p.preset == "abelian":
                return abelian_pair(ring, p.rank or 1)
            return gl2_pair(ring, p.group or "torus")
        g = self.algebras[p.algebra]
        group = self.groups[p.group]
        missing = [lab for lab in g.labels if lab not in p.weights]
        if missing:
            raise ParseError(f"pair {name}: no weight given for {missing}")
        weights = [_weight(p.weights[lab]) for lab in g.labels]
        return PairDatum.build(name, g, group, weights, p.psi)

    def _build_pair_map(self, name: str) -> PairMap:
        m = self.spec.pair_maps[name]
        source, target = self.pairs[m.source], self.pairs[m.target]
        restriction = tuple(tuple(r) for r in m.restriction) if m.restriction is not None else None
        if m.lie_part is None:
            return PairMap.inclusion(source, target, restriction)
        lie_part = from_values(m.lie_part, target.ring, source.g.dim)
        pm = PairMap(source, target, lie_part, restriction)
        report = pm.validate()
        if not report:
            raise ValidationFailure(report)
        return pm

    def _build_module(self, name: str, outputs: Mapping[str, Any]) -> GKModule:
        d: ModuleSpec = self.spec.modules[name]
        operands = [self.module(ref, outputs) for ref in d.of]
        if d.preset == "tensor":
            if not operands:
                raise ParseError(f"module {name}: tensor needs at least one operand")
            return reduce(tensor_gk, operands).renamed(name)
        if d.preset == "dual":
            return dual_gk(self._single(name, operands)).renamed(name)
        if d.preset == "base-change":
            f = self.ring_map(d.ring_map)
            return base_change_module(f, self._single(name, operands)).renamed(name)
        pair = self.pairs[d.pair]
        if d.preset == "trivial":
            return trivial_gk(pair, d.rank or 1, name)
        if d.preset == "character":
            return character_gk(pair, _weight(d.weight if d.weight is not None else 0), name)
        if d.preset == "adjoint":
            return adjoint_gk(pair).renamed(name)
        if d.preset == "divided-power":
            return sl2_form_gk(pair, divided_power_form(d.n or 0, pair.ring), name)
        if d.preset == "symmetric-power":
            return sl2_form_gk(pair, symmetric_power_form(d.n or 0, pair.ring), name)
        ring, rank = pair.ring, len(d.labels)
        e = from_values(d.e, ring, rank) if d.e is not None else None
        f = from_values(d.f, ring, rank) if d.f is not None else None
        km = KModule(pair.group, LatticeModule(ring, tuple(d.labels)), [_weight(w) for w in d.weights], e, f)
        action = {lab: from_values(rows, ring, rank) for lab, rows in d.action.items()}
        return gk_module(pair, km, action, name)

    @staticmethod
    def _single(name: str, operands: list[GKModule]) -> GKModule:
        if len(operands) != 1:
            raise ParseError(f"module {name} takes exactly one operand")
        return operands[0]

    # ─────────────────────────────── lookups used by tasks
    def ring_map(self, name: str) -> RingMap:
        if name in self.ring_maps:
            return self.ring_maps[name]
        return self._parse_ring_map(name, "ring map")

    def pair_map(self, name: str | None) -> PairMap:
        if name is None:
            raise ParseError("a pair map is required")
        return self.pair_maps[name]

    def window(self, name: str | None) -> WeightWindow:
        if name is None:
            raise ParseError("a window is required")
        return self.windows[name]

    def module(self, ref: str, outputs: Mapping[str, Any]) -> GKModule:
        if ref.startswith(TASK_REF):
            value = outputs.get(ref[1:])
            if not isinstance(value, GKModule):
                raise ParseError(f"{ref} did not produce a module")
            return value
        if ref in self.modules:
            return self.modules[ref]
        return self._build_module(ref, outputs)

    def target(self, ref: str, outputs: Mapping[str, Any]) -> Any:
        kind, _, name = ref.partition(":")
        if kind == "algebra":
            return self.algebras[name]
        if kind == "pair":
            return self.pairs[name]
        if kind == "pair_map":
            return self.pair_maps[name]
        return self.module(name, outputs)

    @staticmethod
    def theta(spec: ThetaSpec) -> ThetaStableDatum:
        return ThetaStableDatum(spec.values, spec.permutations, spec.root_weights)
