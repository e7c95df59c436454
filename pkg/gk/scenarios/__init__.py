from __future__ import annotations
from importlib.resources import as_file, files as get_package_file
from pathlib import Path

SUFFIX = ".gk"


def bundled_scenarios() -> list[str]:
    """Names of the scenarios shipped with the package, without suffix."""
    root = get_package_file("gk.scenarios")
    return sorted(p.name[: -len(SUFFIX)] for p in root.iterdir() if p.name.endswith(SUFFIX))


def read_scenario(name: str) -> str:
    fname = name if name.endswith(SUFFIX) else f"{name}{SUFFIX}"
    return get_package_file("gk.scenarios").joinpath(fname).read_text(encoding="utf-8")


def bundled_path(name: str) -> Path:
    fname = name if name.endswith(SUFFIX) else f"{name}{SUFFIX}"
    with as_file(get_package_file("gk.scenarios").joinpath(fname)) as path:
        return Path(path)
