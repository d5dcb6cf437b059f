"""Randomised nearest-neighbour route construction and per-agent plan sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InfeasibleInstanceError
from .geo import DistanceMatrix, Instance
from .physics import discount_factor, energy_coefficient

_WEIGHT_SLACK = 1e-9


@dataclass(frozen=True)
class Route:
    """One UAV flight: depot -> visit_sequence -> depot."""

    uav_index: int
    visit_sequence: tuple[int, ...]
    total_distance_m: float = 0.0
    total_energy_joule: float = 0.0
    savings: float = 0.0

    @property
    def nodes(self) -> list[int]:
        return [0, *self.visit_sequence, 0]

    @property
    def is_empty(self) -> bool:
        return not self.visit_sequence

    def payload_kg(self, inst: Instance) -> float:
        return float(inst.weights[list(self.visit_sequence)].sum()) if self.visit_sequence else 0.0

    def visit_vector(self, n: int) -> np.ndarray:
        v = np.zeros(n, dtype=np.int8)
        if self.visit_sequence:
            v[np.asarray(self.visit_sequence) - 1] = 1
        return v


@dataclass
class Partition:
    routes: list[Route]
    # candidate (current node, customer) pairs examined while building
    pair_evaluations: int = 0
    # per extension: (current node, chosen customer, feasible candidate ids)
    trace: list[tuple[int, int, tuple[int, ...]]] | None = None


@dataclass(frozen=True)
class PlanSet:
    agent_index: int
    plans: tuple[Route, ...]

    @property
    def local_costs(self) -> list[float]:
        return [-p.savings for p in self.plans]

    def __len__(self):
        return len(self.plans)


@dataclass
class _Builder:
    """Incremental state of the route under construction."""

    seq: list[int] = field(default_factory=list)
    legs: list[float] = field(default_factory=list)
    leg_payload: list[float] = field(default_factory=list)
    payload: float = 0.0
    distance: float = 0.0
    clock: float = 0.0
    savings: float = 0.0


def _check_reachable(ids, w, d_depot, inst: Instance):
    c = energy_coefficient(inst.uav, inst.env)
    m0 = inst.uav.empty_mass_kg
    round_trip = d_depot * c * ((m0 + w) ** 1.5 + m0**1.5)
    bad = np.flatnonzero(round_trip > inst.uav.battery_capacity_joule)
    if bad.size:
        i = bad[0]
        raise InfeasibleInstanceError(int(ids[i]), float(round_trip[i]), inst.uav.battery_capacity_joule)


def generate_partition(
    inst: Instance,
    dmat: DistanceMatrix,
    rng: np.random.Generator,
    customers: Sequence[int] | None = None,
    uav_offset: int = 0,
    record_trace: bool = False,
) -> Partition:
    """Split ``customers`` (default: all) into capacity- and energy-feasible routes.

    Each route starts at a uniformly random unassigned customer and grows by
    the nearest unassigned customer that still fits the payload limit and
    leaves enough battery to fly home, until none qualifies.
    """
    uav, econ = inst.uav, inst.econ
    ids = np.arange(1, inst.n + 1) if customers is None else np.array(sorted(customers), dtype=int)
    m = len(ids)
    w = inst.weights[ids]
    d_depot = dmat.depot_row[ids]
    _check_reachable(ids, w, d_depot, inst)

    coef = energy_coefficient(uav, inst.env)
    m0 = uav.empty_mass_kg
    battery = uav.battery_capacity_joule
    capacity = uav.capacity_kg + _WEIGHT_SLACK
    per_m_loaded = coef * (m0 + w) ** 1.5
    return_cost = d_depot * coef * m0**1.5
    w_levels, w_level_of = np.unique(w, return_inverse=True)

    alive = np.ones(m, dtype=bool)
    routes: list[Route] = []
    evaluations = 0
    trace = [] if record_trace else None
    k_price = econ.price_constant_k

    def extend(b: _Builder, pos: int, dist_from: float):
        j = int(ids[pos])
        b.seq.append(j)
        b.leg_payload = [p + w[pos] for p in b.leg_payload] + [float(w[pos])]
        b.legs.append(dist_from)
        b.payload += w[pos]
        b.distance += dist_from
        if len(b.seq) > 1:
            b.clock += uav.service_time_s
        b.clock += dist_from / uav.speed_mps
        r = discount_factor(b.clock, econ)
        b.savings += k_price * w[pos] * (d_depot[pos] * r - dist_from)
        alive[pos] = False

    while alive.any():
        free = np.flatnonzero(alive)
        first = int(free[rng.integers(len(free))])
        b = _Builder()
        extend(b, first, float(d_depot[first]))
        cur = first
        energy = float(d_depot[first] * per_m_loaded[first] + return_cost[first])
        while True:
            cand = np.flatnonzero(alive)
            evaluations += len(cand)
            if cand.size == 0:
                break
            cand = cand[w[cand] <= capacity - b.payload]
            if cand.size == 0:
                break
            legs = np.asarray(b.legs)
            carried = np.asarray(b.leg_payload)
            # energy of already-flown legs once each candidate's package is also on board
            prefix = (legs[:, None] * coef * (m0 + carried[:, None] + w_levels[None, :]) ** 1.5).sum(axis=0)
            d_next = dmat.row(int(ids[cur]), ids[cand])
            need = prefix[w_level_of[cand]] + d_next * per_m_loaded[cand] + return_cost[cand]
            ok = need <= battery
            if not ok.any():
                break
            feas = cand[ok]
            best = int(np.argmin(d_next[ok]))
            nxt = int(feas[best])
            if trace is not None:
                trace.append((int(ids[cur]), int(ids[nxt]), tuple(int(x) for x in ids[feas])))
            extend(b, nxt, float(d_next[ok][best]))
            energy = float(need[ok][best])
            cur = nxt
        routes.append(
            Route(
                uav_offset + len(routes),
                tuple(b.seq),
                b.distance + float(d_depot[cur]),
                energy,
                float(b.savings),
            )
        )
    return Partition(routes, evaluations, trace)


def generate_plan_sets(
    inst: Instance,
    dmat: DistanceMatrix,
    k: int,
    rng: np.random.Generator,
    customers: Sequence[int] | None = None,
) -> list[PlanSet]:
    """Run the route construction ``k`` times; route i of run r is plan r of agent i.

    Agents missing an i-th route in some run get the empty (stay-home) plan
    there, so every plan set has exactly ``k`` entries.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    runs = [generate_partition(inst, dmat, child, customers).routes for child in rng.spawn(k)]
    n_agents = max((len(r) for r in runs), default=0)
    plan_sets = []
    for a in range(n_agents):
        plans = tuple(run[a] if a < len(run) else Route(a, ()) for run in runs)
        plan_sets.append(PlanSet(a, plans))
    return plan_sets
