# gk.py

from __future__ import annotations

import asyncio
import logging
import time
from pathlib import Path
from typing import Any

from . import __version__
from .errors import GKError, InternalInconsistency, ParseError
from .scenario import Scenario
from .schemas import Report, TaskResult
from .tasks import Task, make_task

# exit codes by error kind; anything unlisted is an internal inconsistency
EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_INTERNAL = 4


class gk:
    def __init__(
        self,
        scenario: Scenario | str | Path,
        *,
        max_concurrent_tasks: int = 4,
        verbosity: int = logging.INFO,
    ):
        # logging
        self.logger = logging.getLogger("gk")
        self.logger.setLevel(verbosity)
        if not self.logger.handlers:
            h = logging.StreamHandler()
            h.setFormatter(logging.Formatter("%(asctime)s - %(levelname)s - %(message)s"))
            self.logger.addHandler(h)

        # runtime
        self.scenario = scenario if isinstance(scenario, Scenario) else Scenario.load(scenario)
        self._task_sem = asyncio.Semaphore(max_concurrent_tasks)
        self._tasks: set[asyncio.Task] = set()

    async def __aenter__(self):
        await asyncio.to_thread(self.scenario.resolve)
        return self

    async def __aexit__(self, exc_type, exc, tb):
        for t in self._tasks:
            t.cancel()
        if self._tasks:
            await asyncio.gather(*self._tasks, return_exceptions=True)
        self._tasks.clear()

    # ─────────────────────────────── running
    async def run(self) -> Report:
        """
        Run every task once its dependencies have finished. A task whose
        dependency failed or was skipped is itself skipped.
        """
        await asyncio.to_thread(self.scenario.resolve)
        plugins = [make_task(spec, self.scenario) for spec in self.scenario.tasks]
        done = {p.id: asyncio.Event() for p in plugins}
        results: dict[str, TaskResult] = {}
        outputs: dict[str, Any] = {}
        timing: dict[str, float] = {}

        async def run_one(task: Task) -> None:
            deps = sorted(self.scenario.dependencies(task.spec))
            for d in deps:
                await done[d].wait()
            blocked = [d for d in deps if results[d].status != "ok"]
            if blocked:
                results[task.id] = TaskResult(
                    id=task.id,
                    kind=task.kind,
                    status="skipped",
                    inputs=task.inputs(),
                    error=f"depends on {blocked[0]}, which did not succeed",
                )
                self.logger.warning("task %s skipped: %s did not succeed", task.id, blocked[0])
            else:
                snapshot = {d: outputs.get(d) for d in deps}
                async with self._task_sem:
                    start = time.perf_counter()
                    results[task.id], value = await self._execute(task, snapshot)
                    timing[task.id] = round(time.perf_counter() - start, 6)
                if value is not None:
                    outputs[task.id] = value
            done[task.id].set()

        for p in plugins:
            t = asyncio.create_task(run_one(p))
            self._tasks.add(t)
            t.add_done_callback(self._tasks.discard)
        if plugins:
            await asyncio.gather(*(t for t in list(self._tasks)))

        report = Report(
            scenario=self.scenario.name,
            version=__version__,
            tasks=[results[p.id] for p in plugins],
            timing={p.id: timing[p.id] for p in plugins if p.id in timing},
        )
        self.logger.info(
            "%s: %d ok, %d failed, %d skipped",
            report.scenario,
            *(sum(1 for r in report.tasks if r.status == s) for s in ("ok", "failed", "skipped")),
        )
        return report

    async def _execute(self, task: Task, outputs: dict[str, Any]) -> tuple[TaskResult, Any]:
        base = dict(id=task.id, kind=task.kind, inputs=task.inputs())
        try:
            outcome = await asyncio.to_thread(task.execute, outputs)
        except GKError as exc:
            self.logger.error("task %s failed: %s", task.id, exc)
            return TaskResult(**base, status="failed", error=str(exc), error_kind=type(exc).__name__), None
        except Exception as exc:
            self.logger.exception("task %s raised unexpectedly", task.id)
            return (
                TaskResult(**base, status="failed", error=repr(exc), error_kind=InternalInconsistency.__name__),
                None,
            )
        for w in outcome.warnings:
            self.logger.warning("task %s: %s", task.id, w)
        if outcome.failure is not None:
            self.logger.error("task %s failed: %s", task.id, outcome.failure)
            return (
                TaskResult(
                    **base,
                    status="failed",
                    result=outcome.result,
                    warnings=outcome.warnings,
                    error=str(outcome.failure),
                    error_kind=type(outcome.failure).__name__,
                ),
                None,
            )
        self.logger.info("task %s (%s) ok", task.id, task.kind)
        return TaskResult(**base, status="ok", result=outcome.result, warnings=outcome.warnings), outcome.value


###### Report output ######

def exit_code(report: Report) -> int:
    code = EXIT_OK
    for r in report.tasks:
        if r.status != "failed":
            continue
        if r.error_kind == ParseError.__name__:
            code = max(code, EXIT_PARSE)
        elif r.error_kind == InternalInconsistency.__name__:
            code = max(code, EXIT_INTERNAL)
        else:
            code = max(code, EXIT_VALIDATION)
    return code


def _text(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "-"
    if isinstance(value, list):
        return "[" + ", ".join(_text(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_text(v)}" for k, v in value.items()) + "}"
    return str(value)


def report_text(report: Report, *, timing: bool = True) -> str:
    lines = [f"gk report: {report.scenario}"]
    for r in report.tasks:
        lines.append(f"[{r.status}] {r.id} ({r.kind})")
        if r.error is not None:
            lines.append(f"  error: {r.error_kind or 'skipped'}: {r.error}")
        for w in r.warnings:
            lines.append(f"  warning: {w}")
        has_lines = "lines" in r.result
        for key, value in r.result.items():
            if key == "lines":
                lines.extend(f"  {line}" for line in value)
            elif not (has_lines and key == "groups"):
                lines.append(f"  {key}: {_text(value)}")
    if timing and report.timing:
        lines.append("timing:")
        lines.extend(f"  {k}: {v:.6f}s" for k, v in report.timing.items())
    return "\n".join(lines) + "\n"


def emit_report(report: Report, fmt: str = "text", *, timing: bool = True) -> str:
    if fmt == "json":
        return report.model_dump_json(indent=2, exclude=None if timing else {"timing"}) + "\n"
    if fmt == "text":
        return report_text(report, timing=timing)
    raise ParseError(f"unknown report format {fmt!r}")


async def run_scenario(path: str | Path, **kwargs) -> Report:
    async with gk(path, **kwargs) as runner:
        return await runner.run()
