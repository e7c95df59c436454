from __future__ import annotations
from typing import Any, Mapping

from ..comodules import generated_subcomodule
from ..errors import UnsupportedRegime
from ..functors import (
    I_functor,
    aq_lambda,
    forgetful,
    ind,
    interior_ranks,
    pro,
    zuckerman_gamma,
)
from ..linalg import identity, select_columns
from ..rings import GAUSSIAN, BaseRing
from .task import Task, TaskOutcome, describe_module, format_ranks


class _FunctorTask(Task):
    """Apply one functor to a module along a pair map."""

    required = ("pair_map", "module", "window")

    def apply(self, pm, V, window):
        raise NotImplementedError

    def execute(self, outputs: Mapping[str, Any]) -> TaskOutcome:
        pm = self.scenario.pair_map(self.spec.pair_map)
        V = self.module(outputs)
        window = self.scenario.window(self.spec.window) if self.spec.window else None
        out = self.apply(pm, V, window)
        result = describe_module(out)
        if out.keys is not None and window is not None:
            result["interior_ranks"] = format_ranks(interior_ranks(out, window.degree_cap))
        return TaskOutcome(result, out)


class ForgetfulTask(_FunctorTask):
    kind = "forgetful"
    required = ("pair_map", "module")

    def apply(self, pm, V, window):
        return forgetful(pm, V)


class IndTask(_FunctorTask):
    kind = "ind"

    def apply(self, pm, V, window):
        return ind(pm, V, window)


class ProTask(_FunctorTask):
    kind = "pro"

    def apply(self, pm, V, window):
        return pro(pm, V, window)


class GammaTask(_FunctorTask):
    kind = "gamma"
    required = ("pair_map", "module")

    def apply(self, pm, V, window):
        return zuckerman_gamma(pm, V, window)


class ITask(_FunctorTask):
    kind = "I"

    def apply(self, pm, V, window):
        return I_functor(pm, V, window)


class AqLambdaTask(_FunctorTask):
    kind = "aq_lambda"

    def apply(self, pm, V, window):
        return aq_lambda(pm, V, window, self.spec.u_labels)


class ClosureTask(Task):
    """
    The K-subcomodule generated by each basis vector, over the fraction
    field. The module is irreducible as a K-module when every one of them
    is the whole module.
    """

    kind = "closure"
    required = ("module",)

    def execute(self, outputs: Mapping[str, Any]) -> TaskOutcome:
        V = self.module(outputs)
        if V.ring.kind == GAUSSIAN:
            raise UnsupportedRegime("closure is read over QQ; base change the module first")
        QQ = BaseRing.rationals()
        I = identity(V.rank, V.ring.field)
        generated = [generated_subcomodule(V.kmodule, select_columns(I, [i]), QQ).rank for i in range(V.rank)]
        result = {
            "name": V.name,
            "rank": V.rank,
            "generated_ranks": dict(zip(V.labels, generated)),
            "irreducible": V.rank > 0 and all(r == V.rank for r in generated),
        }
        return TaskOutcome(result, V)
