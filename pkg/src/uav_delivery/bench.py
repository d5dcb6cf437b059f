"""Scaling benchmark: full coordinated missions over a grid of (n, plans) cells.

Each cell runs in its own process so an over-budget cell can be killed and
marked without taking the sweep down.
"""

from __future__ import annotations

import csv
import multiprocessing as mp
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .engine import EngineConfig
from .errors import DeliveryError
from .geo import HEATHROW, generate_instance
from .mission import MissionConfig, run_mission
from .schemas import BENCH_COLUMNS


def n_grid(n_max: int, n_min: int = 10) -> list[int]:
    """Powers of ten from ``n_min`` up to ``n_max`` (``n_max`` itself always included)."""
    grid = []
    n = n_min
    while n < n_max:
        grid.append(n)
        n *= 10
    grid.append(n_max)
    return grid


def run_cell(n: int, k: int, iterations: int = 50, seed: int = 0, radius_m: float = 10_000.0) -> dict:
    """One benchmark cell, in-process."""
    inst = generate_instance(n, HEATHROW, radius_m, seed=seed)
    config = MissionConfig(engine=EngineConfig(iterations=iterations, plans_per_agent=k, seed=seed), seed=seed)
    row = {"n": n, "k": k, "iterations": iterations, "seed": seed}
    start = time.perf_counter()
    try:
        result = run_mission(inst, config)
        status = "ok"
    except DeliveryError as exc:
        result = getattr(exc, "result", None)
        status = f"error: {type(exc).__name__}"
    row["total_s"] = time.perf_counter() - start
    row["status"] = status
    if result is not None:
        row.update(result.phase_times())
        row.update(
            final_global_cost=result.final_global_cost,
            first_pass_coverage=result.first_pass_coverage,
            coverage=len(result.assignments) / n if n else 1.0,
            uav_count=result.uav_count,
            rounds=result.rounds_used,
        )
    return row


def _cell_worker(conn, args):
    try:
        conn.send(run_cell(*args))
    except Exception as exc:  # report, never hang the parent
        conn.send({"status": f"error: {type(exc).__name__}: {exc}"})
    finally:
        conn.close()


@dataclass
class BenchReport:
    rows: list[dict] = field(default_factory=list)

    def sort(self) -> "BenchReport":
        self.rows.sort(key=lambda r: (r["n"], r["k"], r["seed"]))
        return self

    def write_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=BENCH_COLUMNS, extrasaction="ignore")
            writer.writeheader()
            for row in self.rows:
                writer.writerow({c: row.get(c, "") for c in BENCH_COLUMNS})
        return path


def run_bench(
    ns: Sequence[int],
    plans_list: Sequence[int] = (10, 100),
    iterations: int = 50,
    seeds: Sequence[int] = (0,),
    time_budget_s: float = 600.0,
    workers: int = 1,
) -> BenchReport:
    """Sweep every (n, k, seed) cell; cells exceeding ``time_budget_s`` are killed and marked."""
    cells = [(n, k, iterations, s) for n in ns for k in plans_list for s in seeds]
    ctx = mp.get_context("spawn")
    pending = list(cells)
    running = []
    rows = []
    while pending or running:
        while pending and len(running) < max(1, workers):
            cell = pending.pop(0)
            parent, child = ctx.Pipe(duplex=False)
            proc = ctx.Process(target=_cell_worker, args=(child, cell), daemon=True)
            proc.start()
            child.close()
            running.append((proc, parent, cell, time.monotonic()))
        still = []
        for proc, conn, cell, started in running:
            base = dict(zip(("n", "k", "iterations", "seed"), cell))
            if conn.poll():
                try:
                    rows.append({**base, **conn.recv()})
                except EOFError:
                    rows.append({**base, "status": "error: worker died"})
                proc.join()
            elif not proc.is_alive():
                rows.append({**base, "status": f"error: exit code {proc.exitcode}"})
            elif time.monotonic() - started > time_budget_s:
                proc.terminate()
                proc.join()
                rows.append({**base, "status": "timeout", "total_s": time.monotonic() - started})
            else:
                still.append((proc, conn, cell, started))
        running = still
        if running:
            time.sleep(0.05)
    return BenchReport(rows).sort()
