import asyncio

import pytest

from gk.cli import main
from gk.gk import EXIT_OK, exit_code, run_scenario
from gk.scenarios import bundled_path, bundled_scenarios


def run(name):
    report = asyncio.run(run_scenario(bundled_path(name), max_concurrent_tasks=2))
    return report, {r.id: r for r in report.tasks}


def free_ranks(result):
    return [g["free_rank"] for g in result["groups"]]


def weights(result):
    return [tuple(entry["weight"]) for entry in result["graded_ranks"]]


@pytest.mark.parametrize("name", bundled_scenarios())
def test_bundled_scenario_succeeds(name):
    report, results = run(name)
    assert exit_code(report) == EXIT_OK
    failed = {i: r.error for i, r in results.items() if r.status != "ok"}
    assert failed == {}


def test_bundled_scenario_by_name(capsys):
    assert main(["run", "sl2-torus", "--no-timing"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("gk report: sl2-torus\n")


def test_sl2_torus():
    _, r = run("sl2-torus")
    assert r["hom-adj-V2"].result["rank"] == 1
    assert r["curry"].result["iso"] is True
    assert r["adjunction"].result["iso"] is True
    assert r["hom-bc-Q"].result["verdict"] == "iso"
    assert r["forget-V2"].result["pair"] == "b+-T"


def test_borel_weil():
    _, r = run("sl2-borel-weil")
    for lam in range(6):
        res = r[f"I{lam}"].result
        assert res["rank"] == lam + 1
        assert weights(res) == [(lam - 2 * i,) for i in range(lam + 1)]
    assert r["Im1"].result["rank"] == 0
    assert r["irreducible2"].result["irreducible"] is True
    assert r["irreducible5"].result["irreducible"] is True
    for lam in range(6):
        assert r[f"iota{lam}-Q"].result["verdict"] == "iso"
    assert r["iota2-half"].result["verdict"] == "iso"
    assert r["iota3-half-Q"].result["verdict"] == "iso"


def test_aq_lambda():
    _, r = run("su11-aq")
    assert weights(r["aq0-first3"].result) == [(6,), (4,), (2,)]
    for lam in range(3):
        assert min(w[0] for w in weights(r[f"aq{lam}"].result)) == lam + 2
    # q + Lie(T) misses f, so iota is reported but not certified
    assert r["iota0-Q"].result["informational"] is True
    assert r["iota0-Q"].warnings


def test_ce_torsion():
    _, r = run("ce-torsion")
    lines = r["H-sl2-Z"].result["lines"]
    assert lines[2] == "H^2: free 0, torsion [2, 2]"
    assert free_ranks(r["H-sl2-Z"].result) == [1, 0, 0, 1]
    assert r["H-sl2-Z"].result["base_change"]["verdict"] == "iso"
    assert r["H-sl2-half"].result["base_change"]["verdict"] == "iso"
    assert r["H-sl2-i"].result["verdict"] == "iso"
    assert free_ranks(r["H-adjoint"].result) == [0, 0, 0, 0]
    assert free_ranks(r["H-rel"].result) == [1, 0, 1]
    assert free_ranks(r["ext-ZT"].result) == [1, 0, 1]


def test_base_change():
    _, r = run("base-change")
    for task in ("thmB-Q", "thmB-half", "varG1", "invariants", "restriction"):
        assert r[task].result["verdict"] == "iso", task
    assert r["varG1"].result["tag"] == "VariantG1"
    assert r["naturality"].result["naturality"]["ok"] is True


def test_reports_are_reproducible():
    first, _ = run("gl2-u11")
    second, _ = run("gl2-u11")
    assert first.deterministic() == second.deterministic()
