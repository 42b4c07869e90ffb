import csv
import json

import numpy as np
import pytest

from agtic.bench import (RESULT_COLUMNS, CombinatorialAxis, ExperimentGrid,
                         NoiseAxis, PowerResult, SampleSizeAxis, estimate_power,
                         export, load_map, load_result, make_dataset,
                         run_experiment, write_report)
from agtic.errors import AgticError
from agtic.inference import PermutationPlan
from agtic.statistic import evaluate_grid
from agtic.synthesis import NoiseLadder, PatternSpec


def _small_grid(**kw):
    base = dict(methods=("t1s1", "dcor"), patterns=("linear", "circular"),
                axis=NoiseAxis(NoiseLadder(0.1, 2), m=30), n_datasets=4,
                plan=PermutationPlan(19), master_seed=3)
    base.update(kw)
    return ExperimentGrid(**base)


def test_power_is_rejections_over_datasets():
    cell = estimate_power("t1s1", PatternSpec("linear", 40, 0.0, seed=1), 5,
                          PermutationPlan(19))
    assert cell.power == 1.0
    assert cell.rejections == 5
    assert len(cell.statistics) == 5 and len(cell.thresholds) == 5


def test_null_pattern_power_is_low():
    cell = estimate_power("t1s1", PatternSpec("random", 30, 0.0, seed=2), 40,
                          PermutationPlan(19))
    assert cell.power == cell.rejections / 40
    assert cell.power <= 0.2


def test_single_cell_delegates_to_estimate_power():
    grid = _small_grid(methods=("t1s1",), patterns=("linear",),
                       axis=SampleSizeAxis((25,), 0.2))
    result = run_experiment(grid)
    (_, _, spec), = grid.cell_specs()
    direct = estimate_power("t1s1", spec, grid.n_datasets, grid.plan, axis_value=25)
    assert result.cells == [direct]


def test_cell_order_and_power_rule():
    result = run_experiment(_small_grid())
    keys = [(c.method, c.pattern) for c in result.cells]
    assert keys == [("t1s1", "linear")] * 2 + [("t1s1", "circular")] * 2 + \
        [("dcor", "linear")] * 2 + [("dcor", "circular")] * 2
    for c in result.cells:
        assert c.power == c.rejections / c.n_datasets


def test_parallel_matches_serial():
    grid = _small_grid()
    assert run_experiment(grid, workers=1) == run_experiment(grid, workers=2)


def test_common_datasets_across_methods():
    grid = _small_grid()
    (_, _, spec) = grid.cell_specs()[0]
    a = make_dataset(spec, 2)
    b = make_dataset(spec, 2)
    assert np.array_equal(a[0].data, b[0].data)


def test_rerun_gives_identical_files(tmp_path):
    grid = _small_grid()
    for sub in ("a", "b"):
        write_report(grid, run_experiment(grid), tmp_path / sub)
    for name in ("results.csv", "results.json", "summary.csv", "manifest.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert (tmp_path / "a" / "power.svg").read_bytes() == (tmp_path / "b" / "power.svg").read_bytes()


def test_csv_layout(tmp_path):
    result = run_experiment(_small_grid())
    export(result, tmp_path / "r.csv")
    rows = list(csv.reader(open(tmp_path / "r.csv")))
    assert tuple(rows[0]) == RESULT_COLUMNS
    assert len(rows) == 1 + len(result.cells)


def test_empty_result_csv_is_header_only(tmp_path):
    export(PowerResult([], {}), tmp_path / "empty.csv")
    assert (tmp_path / "empty.csv").read_text() == ",".join(RESULT_COLUMNS) + "\n"


def test_json_round_trip(tmp_path):
    result = run_experiment(_small_grid())
    export(result, tmp_path / "r.json")
    assert load_result(tmp_path / "r.json") == result


def test_map_exports(tmp_path, rng):
    x, y = make_dataset(PatternSpec("spiral", 60, 0.05, seed=1), 0)
    ev = evaluate_grid(x, y)
    export(ev, tmp_path / "map.csv")
    rows = list(csv.reader(open(tmp_path / "map.csv")))
    assert rows[0] == ["l", "u", "value"]
    assert len(rows) == 11
    export(ev, tmp_path / "map.json")
    assert load_map(tmp_path / "map.json") == ev
    export(ev, tmp_path / "map.svg")
    svg = (tmp_path / "map.svg").read_text()
    assert svg.startswith("<?xml") and "<svg" in svg
    with pytest.raises(AgticError):
        export(run_experiment(_small_grid(methods=("dcor",), patterns=("linear",))),
               tmp_path / "x.svg")


def test_report_with_maps(tmp_path):
    grid = _small_grid(maps=True, methods=("t1s1", "t1s2", "pagtic-t3s1", "hsic"))
    write_report(grid, run_experiment(grid), tmp_path)
    maps = sorted(p.name for p in (tmp_path / "maps").iterdir())
    # One map per (transform, mode) x pattern x axis point.
    assert len(maps) == 2 * 2 * 2 * 2
    assert "t1_linear_0.1.csv" in maps
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["status"] == "complete"
    assert len(manifest["cells"]) == 4
    summary = list(csv.reader(open(tmp_path / "summary.csv")))
    assert summary[0][:3] == ["method", "linear_mean", "linear_std"]
    assert summary[0][-2:] == ["average_mean", "average_std"]


def test_checkpoint_resume(tmp_path):
    grid = _small_grid()
    ck = tmp_path / "ck.jsonl"
    full = run_experiment(grid, checkpoint=ck)
    assert len(ck.read_text().splitlines()) == len(full.cells)
    # Keep only the first three finished cells, as after an interruption.
    lines = ck.read_text().splitlines()[:3]
    ck.write_text("\n".join(lines) + "\n")
    timings = []
    resumed = run_experiment(grid, checkpoint=ck, timings=timings)
    assert resumed == full
    assert len(timings) == len(full.cells) - 3


def test_combinatorial_axis():
    grid = ExperimentGrid(methods=("t1s1",), axis=CombinatorialAxis(
        (("linear", "linear"), ("random", "random")), m=30, sigma=0.0),
        n_datasets=3, plan=PermutationPlan(19))
    result = run_experiment(grid)
    assert [c.pattern for c in result.cells] == ["linear+linear", "random+random"]
    assert result.cells[0].power == 1.0


def test_grid_from_dict_round_trip():
    grid = _small_grid()
    assert ExperimentGrid.from_dict(grid.to_dict()) == grid


def test_grid_validation():
    with pytest.raises(AgticError):
        _small_grid(methods=())
    with pytest.raises(AgticError):
        _small_grid(methods=("mic",))
    with pytest.raises(AgticError):
        _small_grid(n_datasets=0)


def test_power_slope_not_positive_on_linear():
    grid = ExperimentGrid(methods=("t1s1",), patterns=("linear",),
                          axis=NoiseAxis(NoiseLadder(0.3, 4), m=40), n_datasets=50,
                          plan=PermutationPlan(19), master_seed=1)
    result = run_experiment(grid)
    sigma = np.log([c.axis_value for c in result.cells])
    power = np.array([c.power for c in result.cells])
    slope = np.polyfit(sigma, power, 1)[0]
    assert slope <= 0
