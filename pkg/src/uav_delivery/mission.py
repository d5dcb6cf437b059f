"""Full missions: plan, select, de-duplicate and repeat until every customer is served."""

from __future__ import annotations

import dataclasses
import statistics
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .engine import EngineConfig, Selection, build_tree, epos_select, uncoordinated_select
from .errors import DeliveryError, PartialCoverageError
from .geo import DistanceMatrix, Instance, build_distance_matrix
from .physics import route_savings
from .plangen import PlanSet, Route, generate_plan_sets

COORDINATED = "coordinated"
UNCOORDINATED = "uncoordinated"
MODES = (COORDINATED, UNCOORDINATED)


@dataclass
class MissionConfig:
    mode: str = COORDINATED
    engine: EngineConfig = field(default_factory=EngineConfig)
    max_rounds: int = 50
    seed: int = 0
    # coordinated mode: independent random tree placements per round, best one kept
    placements: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")
        if self.placements < 1:
            raise ValueError("placements must be at least 1")


@dataclass
class RoundStats:
    round_index: int
    active_customers: int
    agents: int
    selection_coverage: float
    served: int
    global_cost: float
    iterations_executed: int
    cost_history: list[float]
    plan_time_s: float
    select_time_s: float
    resolve_time_s: float
    launched: int = 0


@dataclass
class MissionResult:
    assignments: dict[int, tuple[int, int]]
    final_routes: list[Route]
    uav_count: int
    total_distance_m: float
    total_savings: float
    rounds_used: int
    # cumulative fraction of all customers served after each round
    per_round_coverage: list[float]
    wall_time_s: float
    rounds: list[RoundStats] = field(default_factory=list)

    @property
    def first_pass_coverage(self) -> float:
        return self.rounds[0].selection_coverage if self.rounds else 1.0

    @property
    def final_global_cost(self) -> float:
        """Engine cost of the first (full-size) round."""
        return self.rounds[0].global_cost if self.rounds else 0.0

    def phase_times(self) -> dict[str, float]:
        return {
            "plan_s": sum(r.plan_time_s for r in self.rounds),
            "select_s": sum(r.select_time_s for r in self.rounds),
            "resolve_s": sum(r.resolve_time_s for r in self.rounds),
        }

    def comparable(self) -> tuple:
        """Everything except wall-clock timings; used for determinism checks."""
        return (
            self.assignments,
            self.final_routes,
            self.uav_count,
            self.total_distance_m,
            self.total_savings,
            self.rounds_used,
            self.per_round_coverage,
            [(r.round_index, r.active_customers, r.agents, r.selection_coverage, r.served, r.global_cost,
              r.cost_history) for r in self.rounds],
        )


def resolve_selection(
    selection: Selection,
    plan_sets: Sequence[PlanSet],
    inst: Instance,
    dmat: DistanceMatrix,
    customers: Sequence[int] | None = None,
    first_uav: int = 0,
) -> tuple[list[Route], set[int]]:
    """Turn selected plans into flyable routes with every customer served at most once.

    A customer claimed by several routes stays with the lowest agent index
    (earliest launch) and is spliced out of the others, whose metrics are then
    recomputed. Routes left empty are dropped; survivors get consecutive UAV
    ids from ``first_uav``.
    """
    claimed: set[int] = set()
    routes: list[Route] = []
    for agent, q in enumerate(selection.choices):
        plan = plan_sets[agent].plans[q]
        if plan.is_empty:
            continue
        keep = tuple(c for c in plan.visit_sequence if c not in claimed)
        if not keep:
            continue
        uav_id = first_uav + len(routes)
        if keep == plan.visit_sequence:
            route = dataclasses.replace(plan, uav_index=uav_id)
        else:
            metrics = route_savings([0, *keep, 0], inst, dmat)
            route = Route(uav_id, keep, metrics.distance_m, metrics.energy_joule, metrics.savings)
        if route.total_energy_joule > inst.uav.battery_capacity_joule * (1 + 1e-12):
            raise DeliveryError(f"route {keep} exceeds the battery after splicing")
        claimed.update(keep)
        routes.append(route)
    pool = selection.customers if customers is None else customers
    return routes, set(pool) - claimed


def _round_seeds(seed: int, round_index: int):
    plans_ss, tree_ss = np.random.SeedSequence([seed, round_index]).spawn(2)
    return np.random.default_rng(plans_ss), np.random.default_rng(tree_ss)


def _selected_distance(sel: Selection, plan_sets: Sequence[PlanSet]) -> float:
    return float(sum(plan_sets[a].plans[q].total_distance_m for a, q in enumerate(sel.choices)))


def coordinated_select(
    plan_sets: Sequence[PlanSet],
    engine: EngineConfig,
    customers: Sequence[int],
    tree_rng: np.random.Generator,
    placements: int = 1,
) -> Selection:
    """Run the engine over ``placements`` random trees and keep the best outcome.

    Best means lowest global cost, then shortest total flight distance, then
    lowest total local cost.
    """
    best, best_key = None, None
    for _ in range(placements):
        tree = build_tree(len(plan_sets), tree_rng)
        sel = epos_select(plan_sets, engine, customers=customers, tree=tree)
        key = (sel.response.global_cost, _selected_distance(sel, plan_sets), sel.response.total_local_cost)
        if best_key is None or key < best_key:
            best, best_key = sel, key
    return best


def run_mission(inst: Instance, config: MissionConfig | None = None, dmat: DistanceMatrix | None = None) -> MissionResult:
    """Plan and select repeatedly over the unserved customers until all are served.

    Each round launches fresh UAVs, so no UAV flies twice. Raises
    :class:`PartialCoverageError` (carrying the partial result) when a round
    serves nobody or ``max_rounds`` runs out.
    """
    config = config or MissionConfig()
    start = time.perf_counter()
    dmat = dmat if dmat is not None else build_distance_matrix(inst)
    engine = config.engine
    unserved = set(range(1, inst.n + 1))
    routes: list[Route] = []
    rounds: list[RoundStats] = []
    coverage: list[float] = []

    def result() -> MissionResult:
        assignments = {c: (r.uav_index, pos) for r in routes for pos, c in enumerate(r.visit_sequence)}
        return MissionResult(
            assignments=assignments,
            final_routes=list(routes),
            uav_count=len(routes),
            total_distance_m=float(sum(r.total_distance_m for r in routes)),
            total_savings=float(sum(r.savings for r in routes)),
            rounds_used=len(rounds),
            per_round_coverage=list(coverage),
            wall_time_s=time.perf_counter() - start,
            rounds=rounds,
        )

    for rnd in range(config.max_rounds):
        if not unserved:
            break
        active = sorted(unserved)
        plan_rng, tree_rng = _round_seeds(config.seed, rnd)
        t0 = time.perf_counter()
        plan_sets = generate_plan_sets(inst, dmat, engine.plans_per_agent, plan_rng, customers=active)
        t1 = time.perf_counter()
        if config.mode == COORDINATED:
            sel = coordinated_select(plan_sets, engine, active, tree_rng, config.placements)
        else:
            sel = uncoordinated_select(plan_sets, customers=active)
        t2 = time.perf_counter()
        new_routes, unserved = resolve_selection(sel, plan_sets, inst, dmat, active, first_uav=len(routes))
        t3 = time.perf_counter()
        routes.extend(new_routes)
        served = len(active) - len(unserved)
        rounds.append(
            RoundStats(rnd, len(active), len(plan_sets), sel.coverage, served, sel.response.global_cost,
                       sel.iterations_executed, list(sel.history), t1 - t0, t2 - t1, t3 - t2,
                       len(new_routes))
        )
        coverage.append((inst.n - len(unserved)) / inst.n)
        if served == 0:
            raise PartialCoverageError(f"round {rnd} served no new customers; {len(unserved)} left", result())

    if unserved:
        raise PartialCoverageError(
            f"{len(unserved)} customers unserved after {config.max_rounds} rounds", result()
        )
    return result()


_METRICS = ("total_distance_m", "total_savings", "uav_count", "rounds_used", "first_pass_coverage")


@dataclass
class ModeSummary:
    mode: str
    runs: list[MissionResult | None]
    errors: list[str | None]

    def values(self, metric: str) -> list[float]:
        return [float(getattr(r, metric)) for r in self.runs if r is not None]

    def mean(self, metric: str) -> float:
        vals = self.values(metric)
        return statistics.fmean(vals) if vals else float("nan")

    def std(self, metric: str) -> float:
        vals = self.values(metric)
        return statistics.stdev(vals) if len(vals) > 1 else 0.0

    def coverage_per_round(self) -> list[float]:
        """Mean cumulative coverage by round index (runs that finished earlier count as 1.0)."""
        done = [r for r in self.runs if r is not None]
        depth = max((len(r.per_round_coverage) for r in done), default=0)
        return [
            statistics.fmean(r.per_round_coverage[i] if i < len(r.per_round_coverage) else 1.0 for r in done)
            for i in range(depth)
        ]


@dataclass
class ComparisonReport:
    n_customers: int
    seeds: list[int]
    coordinated: ModeSummary
    uncoordinated: ModeSummary

    def _paired(self, metric: str) -> list[float]:
        return [
            float(getattr(c, metric)) - float(getattr(u, metric))
            for c, u in zip(self.coordinated.runs, self.uncoordinated.runs)
            if c is not None and u is not None
        ]

    @property
    def savings_difference(self) -> list[float]:
        """Coordinated minus uncoordinated savings per seed."""
        return self._paired("total_savings")

    @property
    def uav_count_difference(self) -> list[float]:
        """Uncoordinated minus coordinated UAV count per seed."""
        return [-d for d in self._paired("uav_count")]

    def row(self) -> dict[str, float]:
        out: dict[str, float] = {"n": self.n_customers, "reps": len(self.seeds)}
        for summary in (self.coordinated, self.uncoordinated):
            for metric in _METRICS:
                out[f"{summary.mode}_{metric}_mean"] = summary.mean(metric)
                out[f"{summary.mode}_{metric}_std"] = summary.std(metric)
            out[f"{summary.mode}_failures"] = sum(e is not None for e in summary.errors)
        for name, series in (("savings_diff", self.savings_difference), ("uav_diff", self.uav_count_difference)):
            out[f"{name}_mean"] = statistics.fmean(series) if series else float("nan")
            out[f"{name}_std"] = statistics.stdev(series) if len(series) > 1 else 0.0
        return out


def compare_modes(inst: Instance, config: MissionConfig | None = None, repetitions: int = 25) -> ComparisonReport:
    """Run both modes on seeds ``config.seed .. config.seed + repetitions - 1``.

    Mission failures are recorded per run rather than raised.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    config = config or MissionConfig()
    dmat = build_distance_matrix(inst)
    seeds = [config.seed + i for i in range(repetitions)]
    summaries = {}
    for mode in MODES:
        runs, errors = [], []
        for s in seeds:
            try:
                runs.append(run_mission(inst, dataclasses.replace(config, mode=mode, seed=s), dmat))
                errors.append(None)
            except DeliveryError as exc:
                runs.append(None)
                errors.append(f"{type(exc).__name__}: {exc}")
        summaries[mode] = ModeSummary(mode, runs, errors)
    return ComparisonReport(inst.n, seeds, summaries[COORDINATED], summaries[UNCOORDINATED])
