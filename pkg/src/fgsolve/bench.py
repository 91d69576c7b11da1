"""Timed runs of the solvers over grids of random instances, written as CSV."""

from __future__ import annotations

import csv
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields
from itertools import product
from pathlib import Path

from .errors import SolverTimeout
from .oracle import InstanceSpec, SplitMix64, gen_instance
from .solver_graph import solve_graph, solve_graph_naive

ALGORITHMS = ("naive", "exact", "exact+height")


@dataclass(frozen=True)
class BenchRecord:
    instance_id: str
    n_a: int
    n_x: int
    n_b: int
    p_a: int
    p_x: int
    p_b: int
    max_indegree: int
    algorithm: str
    time_ms: float
    solutions_found: int
    explored_assignments: int
    timed_out: bool


HEADER = [f.name for f in fields(BenchRecord)]


@dataclass(frozen=True)
class Suite:
    p_a: tuple[int, ...]
    p_x: tuple[int, ...]
    n: int
    degrees: tuple[int, ...]
    per_cell: int
    seed: int

    def cells(self) -> list[tuple[int, int, int]]:
        return [(a, x, d) for a, x, d in product(self.p_a, self.p_x, self.degrees) if a != x]

    def specs(self) -> list[tuple[str, InstanceSpec]]:
        rng = SplitMix64(self.seed)
        out = []
        for a, x, d in self.cells():
            for k in range(self.per_cell):
                seed = rng.next_u64()
                spec = InstanceSpec(self.n, self.n, a, x, d, seed)
                out.append((f"pa{a}-px{x}-d{d}-{k}", spec))
        return out


def parse_suite(text: str) -> Suite:
    """``pa=2,3;px=3,5;n=60;deg=3;k=5;seed=1``; pa and px lists may be empty."""
    vals: dict[str, str] = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ValueError(f"bad suite entry {part!r}")
        k, v = part.split("=", 1)
        vals[k.strip()] = v.strip()
    unknown = set(vals) - {"pa", "px", "n", "deg", "k", "seed"}
    if unknown:
        raise ValueError(f"unknown suite keys: {sorted(unknown)}")

    def ints(key: str, default: str) -> tuple[int, ...]:
        raw = vals.get(key, default)
        return tuple(int(t) for t in raw.split(",") if t.strip())

    return Suite(
        p_a=ints("pa", ""),
        p_x=ints("px", ""),
        n=int(vals.get("n", "60")),
        degrees=ints("deg", "3"),
        per_cell=int(vals.get("k", "1")),
        seed=int(vals.get("seed", "1")),
    )


def run_one(name: str, spec: InstanceSpec, algorithm: str, timeout_ms: float) -> BenchRecord:
    a, _, b = gen_instance(spec)
    t0 = time.perf_counter()
    timed_out = False
    found = explored = 0
    try:
        if algorithm == "naive":
            res = solve_graph_naive(a, b, spec.p_x, first_only=True, timeout=timeout_ms / 1000)
        elif algorithm in ("exact", "exact+height"):
            res = solve_graph(
                a, b, spec.p_x,
                height_pruning=algorithm == "exact+height",
                first_only=True,
                timeout=timeout_ms / 1000,
            )
        else:
            raise ValueError(f"unknown algorithm {algorithm!r}")
        found = len(res)
        explored = res.stats.explored_assignments
    except SolverTimeout:
        timed_out = True
    elapsed = (time.perf_counter() - t0) * 1000
    if elapsed > timeout_ms:
        timed_out = True
    return BenchRecord(
        name, spec.n_a, spec.n_x, b.n, spec.p_a, spec.p_x, b.cycle_length(),
        spec.max_indegree, algorithm, round(elapsed, 3), found, explored, timed_out,
    )


def _job(args) -> BenchRecord:
    return run_one(*args)


def pool_size() -> int:
    env = os.environ.get("FGSOLVE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_suite(
    suite: Suite,
    csv_path,
    *,
    timeout_ms: float = 1000,
    algorithms=ALGORITHMS,
    workers: int | None = None,
) -> list[BenchRecord]:
    jobs = [(name, spec, alg, timeout_ms) for name, spec in suite.specs() for alg in algorithms]
    workers = pool_size() if workers is None else workers
    path = Path(csv_path)
    fresh = not path.exists() or path.stat().st_size == 0
    records = []
    with open(path, "a", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if fresh:
            writer.writerow(HEADER)
        if workers <= 1 or len(jobs) <= 1:
            results = map(_job, jobs)
        else:
            pool = ProcessPoolExecutor(max_workers=workers)
            results = pool.map(_job, jobs)
        for rec in results:
            writer.writerow(_row(rec))
            fh.flush()
            records.append(rec)
        if workers > 1 and len(jobs) > 1:
            pool.shutdown()
    return records


def _row(rec: BenchRecord) -> list:
    return [int(v) if isinstance(v, bool) else v for v in astuple(rec)]


def read_records(csv_path) -> list[BenchRecord]:
    out = []
    with open(csv_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.append(
                BenchRecord(
                    row["instance_id"],
                    *(int(row[k]) for k in HEADER[1:8]),
                    row["algorithm"],
                    float(row["time_ms"]),
                    int(row["solutions_found"]),
                    int(row["explored_assignments"]),
                    row["timed_out"] in ("1", "True", "true"),
                )
            )
    return out


def solved_proportions(records) -> dict[tuple[int, int, int, str], float]:
    """(p_a, p_x, max_indegree, algorithm) -> share solved within the budget."""
    tally: dict[tuple, list[int]] = {}
    for r in records:
        key = (r.p_a, r.p_x, r.max_indegree, r.algorithm)
        t = tally.setdefault(key, [0, 0])
        t[1] += 1
        if not r.timed_out and r.solutions_found > 0:
            t[0] += 1
    return {k: ok / n for k, (ok, n) in sorted(tally.items())}
