"""Power experiments: repeated datasets, per-dataset permutation tests,
aggregation, and result files.

Seeds. Cell ``(pattern_index, axis_index)`` gets
``cell_seed = derive_seed(master_seed, pattern_index, axis_index)``.
Dataset ``d`` of that cell is generated from
``derive_seed(cell_seed, DATA_KEY, d)``, its permutations use
``derive_seed(cell_seed, PERMUTATION_KEY, d)`` and the s2 null copies use
``derive_seed(cell_seed, NULL_COPY_KEY, d)``. Every method therefore sees
the same datasets and the same shuffles. Nothing depends on the worker
count or completion order.
"""

import csv
import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import seeding
from .errors import AgticError, IoFailure
from .inference import PermutationPlan, run_test
from .methods import is_method_name, make_statistic, parse_agtic_name
from .statistic import AgticConfig, GridEvaluation, evaluate_grid
from .synthesis import (NoiseLadder, PatternId, PatternSpec, generate,
                        generate_combinatorial, noise_ladder)

RESULT_COLUMNS = ("method", "pattern", "axis_value", "power", "stat_mean",
                  "stat_std", "l_mean", "u_mean")

DEFAULT_PATTERNS = ("linear", "parabolic", "sin4pi", "circular", "checkerboard")


# Axes --------------------------------------------------------------------

@dataclass(frozen=True)
class NoiseAxis:
    ladder: NoiseLadder = NoiseLadder()
    m: int = 200
    kind: str = field(default="noise", init=False)

    def points(self):
        return noise_ladder(self.ladder)

    def to_dict(self):
        return {"kind": self.kind, "sigma_min": self.ladder.sigma_min,
                "count": self.ladder.count, "m": self.m}


@dataclass(frozen=True)
class SampleSizeAxis:
    sizes: tuple = (20, 50, 100, 200, 400)
    sigma: float = 0.1
    kind: str = field(default="sample_size", init=False)

    def points(self):
        return tuple(int(s) for s in self.sizes)

    def to_dict(self):
        return {"kind": self.kind, "sizes": list(self.sizes), "sigma": self.sigma}


@dataclass(frozen=True)
class CombinatorialAxis:
    pairs: tuple = ()
    m: int = 50
    sigma: float = 0.1
    kind: str = field(default="combinatorial", init=False)

    def points(self):
        return (self.sigma,)

    def to_dict(self):
        return {"kind": self.kind, "pairs": [list(p) for p in self.pairs],
                "m": self.m, "sigma": self.sigma}


def axis_from_dict(d):
    kind = d.get("kind", "noise")
    if kind == "noise":
        return NoiseAxis(NoiseLadder(d.get("sigma_min", 0.05), d.get("count", 10)),
                         d.get("m", 200))
    if kind == "sample_size":
        return SampleSizeAxis(tuple(d.get("sizes", (20, 50, 100, 200, 400))),
                              d.get("sigma", 0.1))
    if kind == "combinatorial":
        pairs = tuple((PatternId(a).value, PatternId(b).value) for a, b in d["pairs"])
        return CombinatorialAxis(pairs, d.get("m", 50), d.get("sigma", 0.1))
    raise AgticError(f"unknown axis kind {kind!r}")


@dataclass(frozen=True)
class CombinatorialSpec:
    id_a: PatternId
    id_b: PatternId
    m: int
    sigma: float = 0.0
    seed: int = 0

    @property
    def label(self):
        return f"{PatternId(self.id_a).value}+{PatternId(self.id_b).value}"


@dataclass(frozen=True)
class ExperimentGrid:
    methods: tuple
    patterns: tuple = DEFAULT_PATTERNS
    axis: object = NoiseAxis()
    n_datasets: int = 50
    plan: PermutationPlan = PermutationPlan(n_perms=100)
    master_seed: int = 0
    k: int = 5
    maps: bool = False

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        if not self.methods:
            raise AgticError("an experiment needs at least one method")
        for name in self.methods:
            if not is_method_name(name):
                raise AgticError(f"unknown method {name!r}")
        if isinstance(self.axis, CombinatorialAxis):
            object.__setattr__(self, "patterns",
                               tuple(f"{a}+{b}" for a, b in self.axis.pairs))
        else:
            object.__setattr__(self, "patterns",
                               tuple(PatternId(p).value for p in self.patterns))
        if not self.patterns:
            raise AgticError("an experiment needs at least one pattern")
        if self.n_datasets < 1:
            raise AgticError("n_datasets must be >= 1")

    def to_dict(self):
        return {"methods": list(self.methods), "patterns": list(self.patterns),
                "axis": self.axis.to_dict(), "n_datasets": self.n_datasets,
                "n_perms": self.plan.n_perms, "alpha": self.plan.alpha,
                "master_seed": self.master_seed, "k": self.k, "maps": self.maps}

    @classmethod
    def from_dict(cls, d):
        axis = axis_from_dict(d.get("axis", {"kind": "noise"}))
        return cls(methods=tuple(d["methods"]),
                   patterns=tuple(d.get("patterns", DEFAULT_PATTERNS)),
                   axis=axis,
                   n_datasets=int(d.get("n_datasets", 50)),
                   plan=PermutationPlan(int(d.get("n_perms", 100)),
                                        float(d.get("alpha", 0.05))),
                   master_seed=int(d.get("master_seed", 0)),
                   k=int(d.get("k", 5)),
                   maps=bool(d.get("maps", False)))

    def cell_specs(self):
        """``(pattern_label, axis_value, spec)`` for every data cell, in grid order."""
        out = []
        for pi, pattern in enumerate(self.patterns):
            for ai, point in enumerate(self.axis.points()):
                seed = seeding.derive_seed(self.master_seed, pi, ai)
                if isinstance(self.axis, CombinatorialAxis):
                    a, b = self.axis.pairs[pi]
                    spec = CombinatorialSpec(PatternId(a), PatternId(b), self.axis.m,
                                             self.axis.sigma, seed)
                elif isinstance(self.axis, SampleSizeAxis):
                    spec = PatternSpec(pattern, point, self.axis.sigma, seed)
                else:
                    spec = PatternSpec(pattern, self.axis.m, point, seed)
                out.append((pattern, point, spec))
        return out


# Results -----------------------------------------------------------------

@dataclass
class CellResult:
    method: str
    pattern: str
    axis_value: float
    power: float
    rejections: int
    n_datasets: int
    stat_mean: float
    stat_std: float
    l_mean: float
    u_mean: float
    statistics: list
    thresholds: list
    seed: int

    def row(self):
        return {c: getattr(self, c) for c in RESULT_COLUMNS}


@dataclass
class PowerResult:
    cells: list
    manifest: dict

    def to_dict(self):
        return {"manifest": self.manifest, "cells": [asdict(c) for c in self.cells]}

    @classmethod
    def from_dict(cls, d):
        cells = []
        for c in d["cells"]:
            c = dict(c)
            c["thresholds"] = [tuple(t) if t is not None else None
                               for t in c["thresholds"]]
            cells.append(CellResult(**c))
        return cls(cells, d["manifest"])

    def __eq__(self, other):
        return isinstance(other, PowerResult) and _nan_safe(self.to_dict()) == _nan_safe(other.to_dict())

    def summary(self):
        """Mean and std of power over axis points, per (method, pattern), plus
        an ``average`` column over patterns (the layout of a results table)."""
        out = []
        methods = list(dict.fromkeys(c.method for c in self.cells))
        patterns = list(dict.fromkeys(c.pattern for c in self.cells))
        for method in methods:
            row = {"method": method}
            means = []
            for pattern in patterns:
                powers = [c.power for c in self.cells
                          if c.method == method and c.pattern == pattern]
                mean = float(np.mean(powers))
                row[pattern] = (mean, float(np.std(powers)))
                means.append(mean)
            row["average"] = (float(np.mean(means)), float(np.std(means)))
            out.append(row)
        return out


def _nan_safe(obj):
    if isinstance(obj, float) and obj != obj:
        return "nan"
    if isinstance(obj, dict):
        return {k: _nan_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_nan_safe(v) for v in obj]
    return obj


# Execution ---------------------------------------------------------------

def make_dataset(spec, index):
    """Dataset ``index`` of a cell whose generator spec is ``spec``."""
    seed = seeding.derive_seed(spec.seed, seeding.DATA_KEY, index)
    if isinstance(spec, CombinatorialSpec):
        return generate_combinatorial(spec.id_a, spec.id_b, spec.m, spec.sigma, seed)
    return generate(PatternSpec(spec.id, spec.m, spec.sigma, seed))


def _run_dataset(task):
    method, spec, index, n_perms, alpha, k = task
    x, y = make_dataset(spec, index)
    stat = make_statistic(method, k=k,
                          seed=seeding.derive_seed(spec.seed, seeding.NULL_COPY_KEY, index))
    plan = PermutationPlan(n_perms, alpha,
                           seeding.derive_seed(spec.seed, seeding.PERMUTATION_KEY, index))
    outcome = run_test(x, y, stat, plan)
    return outcome.statistic, outcome.optimal_thresholds, outcome.reject


def _summarize(method, pattern, axis_value, spec, rows):
    stats = np.array([r[0] for r in rows])
    thresholds = [tuple(r[1]) if r[1] is not None else None for r in rows]
    rejections = int(sum(bool(r[2]) for r in rows))
    n = len(rows)
    if all(t is not None for t in thresholds):
        l_mean = float(np.mean([t[0] for t in thresholds]))
        u_mean = float(np.mean([t[1] for t in thresholds]))
    else:
        l_mean = u_mean = float("nan")
    return CellResult(method=method, pattern=pattern, axis_value=axis_value,
                      power=rejections / n, rejections=rejections, n_datasets=n,
                      stat_mean=float(stats.mean()), stat_std=float(stats.std()),
                      l_mean=l_mean, u_mean=u_mean,
                      statistics=stats.tolist(), thresholds=thresholds,
                      seed=spec.seed)


class _Runner:
    """Maps dataset tasks either inline or over a process pool."""

    def __init__(self, workers):
        self.workers = workers if workers and workers > 0 else (os.cpu_count() or 1)
        self.pool = None

    def __enter__(self):
        if self.workers > 1:
            self.pool = ProcessPoolExecutor(max_workers=self.workers)
        return self

    def __exit__(self, *exc):
        if self.pool is not None:
            self.pool.shutdown(cancel_futures=True)

    def map(self, tasks):
        if self.pool is None:
            return [_run_dataset(t) for t in tasks]
        chunk = max(1, len(tasks) // (4 * self.workers))
        return list(self.pool.map(_run_dataset, tasks, chunksize=chunk))


def estimate_power(method, spec, n_datasets, plan, k=5, axis_value=None,
                   pattern=None, workers=1):
    """Run ``n_datasets`` permutation tests on fresh datasets from ``spec``.

    Power is the rejection count divided by ``n_datasets``.
    """
    tasks = [(method, spec, d, plan.n_perms, plan.alpha, k) for d in range(n_datasets)]
    with _Runner(workers) as runner:
        rows = runner.map(tasks)
    if pattern is None:
        pattern = spec.label if isinstance(spec, CombinatorialSpec) else PatternId(spec.id).value
    if axis_value is None:
        axis_value = spec.sigma
    return _summarize(method, pattern, axis_value, spec, rows)


def _config_hash(grid):
    return hashlib.sha256(json.dumps(grid.to_dict(), sort_keys=True).encode()).hexdigest()[:16]


def build_manifest(grid, status="complete"):
    return {
        "config": grid.to_dict(),
        "config_hash": _config_hash(grid),
        "master_seed": grid.master_seed,
        "seed_mixing": seeding.MIXING_FUNCTION,
        "axis": grid.axis.to_dict(),
        "cells": [{"pattern": p, "axis_value": v, "seed": s.seed}
                  for p, v, s in grid.cell_specs()],
        "status": status,
    }


def run_experiment(grid, workers=1, checkpoint=None, timings=None):
    """Evaluate every ``(method, pattern, axis point)`` cell of ``grid``.

    Cells are ordered method-major, then pattern, then axis point. With
    ``checkpoint`` (a JSON-lines path), finished cells are appended as
    they complete and reused on the next call with the same config, so an
    interrupted run can resume. ``timings``, if a list, receives
    ``(method, pattern, axis_value, seconds)`` per computed cell.
    """
    key = _config_hash(grid)
    done = {}
    if checkpoint is not None and Path(checkpoint).exists():
        for line in Path(checkpoint).read_text().splitlines():
            rec = json.loads(line)
            if rec.get("config_hash") == key:
                done[rec["index"]] = PowerResult.from_dict(
                    {"cells": [rec["cell"]], "manifest": {}}).cells[0]
    cells = []
    specs = grid.cell_specs()
    index = 0
    with _Runner(workers) as runner:
        for method in grid.methods:
            for pattern, point, spec in specs:
                if index in done:
                    cells.append(done[index])
                    index += 1
                    continue
                start = time.perf_counter()
                tasks = [(method, spec, d, grid.plan.n_perms, grid.plan.alpha, grid.k)
                         for d in range(grid.n_datasets)]
                cell = _summarize(method, pattern, point, spec, runner.map(tasks))
                cells.append(cell)
                if timings is not None:
                    timings.append((method, pattern, point, time.perf_counter() - start))
                if checkpoint is not None:
                    with open(checkpoint, "a") as fh:
                        fh.write(json.dumps({"config_hash": key, "index": index,
                                             "cell": asdict(cell)}) + "\n")
                index += 1
    return PowerResult(cells, build_manifest(grid))


def agtic_maps(grid):
    """AGTIC maps of dataset 0 for every AGTIC method, pattern and axis point."""
    out = []
    seen = set()
    for method in grid.methods:
        parsed = parse_agtic_name(method)
        if parsed is None:
            continue
        transform, _, mode = parsed
        if (transform, mode) in seen:
            continue
        seen.add((transform, mode))
        cfg = AgticConfig(transform=transform, mode=mode, k=grid.k)
        label = ("pagtic-" if mode == "percentile" else "") + transform
        for pattern, point, spec in grid.cell_specs():
            x, y = make_dataset(spec, 0)
            out.append((f"{label}_{pattern}_{point:g}", evaluate_grid(x, y, cfg)))
    return out


# Export ------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, float):
        return "" if v != v else repr(v)
    return str(v)


def export(obj, path, format=None):
    """Write a :class:`PowerResult` or :class:`GridEvaluation` to ``path``.

    ``format`` is ``csv``, ``json`` or ``svg`` (maps only); by default it is
    taken from the file suffix.
    """
    path = Path(path)
    format = (format or path.suffix.lstrip(".")).lower()
    try:
        if format == "csv":
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                if isinstance(obj, GridEvaluation):
                    writer.writerow(("l", "u", "value"))
                    for row in obj.rows():
                        writer.writerow([_fmt(float(v)) for v in row])
                else:
                    writer.writerow(RESULT_COLUMNS)
                    for cell in obj.cells:
                        writer.writerow([_fmt(v) for v in cell.row().values()])
        elif format == "json":
            payload = obj.to_dict()
            with open(path, "w") as fh:
                json.dump(payload, fh, indent=2, sort_keys=True)
                fh.write("\n")
        elif format == "svg":
            if not isinstance(obj, GridEvaluation):
                raise AgticError("svg export is only available for AGTIC maps")
            from .plotting import plot_agtic_map
            plot_agtic_map(obj, path)
        else:
            raise AgticError(f"unknown export format {format!r}")
    except OSError as exc:
        raise IoFailure(f"could not write {path}: {exc}") from exc
    return path


def load_result(path):
    with open(path) as fh:
        return PowerResult.from_dict(json.load(fh))


def load_map(path):
    with open(path) as fh:
        return GridEvaluation.from_dict(json.load(fh))


def write_summary(result, path):
    rows = result.summary()
    patterns = [k for k in rows[0] if k not in ("method", "average")] if rows else []
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = ["method"]
        for p in patterns + ["average"]:
            header += [f"{p}_mean", f"{p}_std"]
        writer.writerow(header)
        for row in rows:
            line = [row["method"]]
            for p in patterns + ["average"]:
                line += [_fmt(row[p][0]), _fmt(row[p][1])]
            writer.writerow(line)


def write_report(grid, result, out_dir, timings=None):
    """Write results.csv/json, summary.csv, manifest.json, power figures and maps."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    export(result, out / "results.csv")
    export(result, out / "results.json")
    write_summary(result, out / "summary.csv")
    with open(out / "manifest.json", "w") as fh:
        json.dump(result.manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if timings:
        with open(out / "timing.csv", "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("method", "pattern", "axis_value", "seconds"))
            for row in timings:
                writer.writerow([_fmt(v) for v in row])
    from .plotting import plot_power
    plot_power(result, out / "power.svg")
    plot_power(result, out / "power.png")
    if grid.maps:
        maps_dir = out / "maps"
        maps_dir.mkdir(exist_ok=True)
        for name, evaluation in agtic_maps(grid):
            export(evaluation, maps_dir / f"{name}.csv")
            export(evaluation, maps_dir / f"{name}.svg")
    return out
