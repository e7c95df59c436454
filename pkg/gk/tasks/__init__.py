from __future__ import annotations

from ..errors import ParseError
from .certificate_tasks import AdjunctionTask, CertificateTask, EasyDualityTask, TensorIdentityTask
from .cohomology_tasks import CohomologyTask, ExtTask
from .functor_tasks import AqLambdaTask, ClosureTask, ForgetfulTask, GammaTask, IndTask, ITask, ProTask
from .orbit_tasks import OrbitsTask
from .structure_tasks import CurryingTask, HomTask, ValidateTask
from .task import Task, TaskOutcome

TASKS: dict[str, type[Task]] = {
    cls.kind: cls
    for cls in (
        ValidateTask,
        ForgetfulTask,
        IndTask,
        ProTask,
        GammaTask,
        ITask,
        AqLambdaTask,
        ClosureTask,
        OrbitsTask,
        CohomologyTask,
        ExtTask,
        HomTask,
        CertificateTask,
        AdjunctionTask,
        CurryingTask,
        TensorIdentityTask,
        EasyDualityTask,
    )
}


def make_task(spec, scenario) -> Task:
    try:
        cls = TASKS[spec.kind]
    except KeyError:
        raise ParseError(f"unknown task kind {spec.kind!r}") from None
    return cls(spec, scenario)


__all__ = ["TASKS", "Task", "TaskOutcome", "make_task"]
