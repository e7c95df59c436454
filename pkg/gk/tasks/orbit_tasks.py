from __future__ import annotations
from typing import Any, Mapping

from ..comodules import descent_check
from ..errors import InternalInconsistency, ParseError, ValidationFailure
from ..orbits import (
    block_hom_ranks,
    block_projections,
    check_partition,
    check_pro_decomposition,
    orbit_blocks_as_kmodule,
    orbit_decomposition,
)
from .task import Task, TaskOutcome


class OrbitsTask(Task):
    """
    Orbit blocks of U(u_bar) up to a degree. Optional extras: the pro
    decomposition check (pair map, module and window), the blockwise Hom
    coincidence (module alone) and descent of the blocks along a ring map.
    """

    kind = "orbits"
    required = ("theta", "degree")

    def execute(self, outputs: Mapping[str, Any]) -> TaskOutcome:
        d = self.scenario.theta(self.spec.theta)
        cap = self.spec.degree
        blocks = orbit_decomposition(d, cap)
        partition = check_partition(d, blocks, cap)
        result: dict[str, Any] = {
            "blocks": [
                {"label": list(b.label), "rank": b.rank, "complete": b.complete} for b in blocks
            ],
            "partition": partition.to_dict(),
        }
        outcome = TaskOutcome(result, blocks)
        if not partition:
            outcome.failure = ValidationFailure(partition)
            return outcome

        if self.spec.pair_map is not None:
            if self.spec.module is None or self.spec.window is None:
                raise ParseError(f"task {self.id}: the pro decomposition needs a module and a window")
            report = check_pro_decomposition(
                self.scenario.pair_map(self.spec.pair_map),
                self.module(outputs),
                d,
                self.scenario.window(self.spec.window),
            )
            result["pro_decomposition"] = report.to_dict()
            if not report:
                outcome.failure = InternalInconsistency(report.detail)
        elif self.spec.module is not None:
            V = self.module(outputs)
            homs = block_hom_ranks(V.kmodule, d, blocks, V.ring)
            result["block_hom"] = {
                "direct": homs.direct,
                "blockwise": list(homs.blockwise),
                "nonzero_blocks": [list(b) for b in homs.nonzero_blocks],
                "coincide": homs.coincide,
            }
            if not homs.coincide:
                outcome.failure = InternalInconsistency("Hom into the block sum is not the blockwise product")

        if self.spec.ring_map is not None:
            f = self.scenario.ring_map(self.spec.ring_map)
            total = orbit_blocks_as_kmodule(d, blocks, f.source)
            report = descent_check(f, total, block_projections(blocks, f.source))
            result["descent"] = report.to_dict()
            if not report and outcome.failure is None:
                outcome.failure = ValidationFailure(report)
        return outcome
