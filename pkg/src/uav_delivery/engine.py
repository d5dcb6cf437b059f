"""Tree-structured collective plan selection (I-EPOS style) and the uncoordinated baseline.

Agents sit in a balanced binary tree. Each iteration runs a bottom-up pass in
which every agent

1. decides which of its children's subtree changes to accept, judged by the
   global cost they would cause against the previous global response, and
2. picks its own plan given the accepted subtree changes,

followed by a top-down pass in which rejected subtrees roll back to their
previous selection. Subtree changes travel as sparse ``{customer: delta}``
maps, so an agent only ever sees its own subtree plus the previous iteration's
aggregate, never its siblings' current choices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .plangen import PlanSet


@dataclass
class EngineConfig:
    iterations: int = 50
    lam: float = 0.0
    plans_per_agent: int = 10
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lambda must lie in [0, 1]")
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if self.plans_per_agent < 1:
            raise ValueError("plans_per_agent must be at least 1")


@dataclass
class AgentNode:
    agent_index: int
    position: int
    parent: "AgentNode | None" = None
    children: list["AgentNode"] = field(default_factory=list)
    plan_set: PlanSet | None = None
    selected: int | None = None


@dataclass
class AgentTree:
    """Complete binary tree in heap layout; ``order[p]`` is the agent at position ``p``."""

    order: list[int]
    nodes: list[AgentNode]

    @property
    def size(self) -> int:
        return len(self.order)

    @property
    def depth(self) -> int:
        return math.ceil(math.log2(self.size + 1)) if self.size else 0

    @property
    def root(self) -> AgentNode:
        return self.nodes[0]

    def children_of(self, pos: int) -> list[int]:
        return [c for c in (2 * pos + 1, 2 * pos + 2) if c < len(self.order)]


def build_tree(num_agents: int, rng: np.random.Generator) -> AgentTree:
    """Balanced binary tree over a seeded random placement of the agents."""
    if num_agents < 1:
        raise ValueError("need at least one agent")
    order = [int(a) for a in rng.permutation(num_agents)]
    nodes = [AgentNode(agent, pos) for pos, agent in enumerate(order)]
    for pos, node in enumerate(nodes):
        if pos:
            node.parent = nodes[(pos - 1) // 2]
            node.parent.children.append(node)
    return AgentTree(order, nodes)


def global_cost(aggregate, target) -> float:
    """Squared deviation of the visit counts from the target (exactly-once) vector."""
    aggregate = np.asarray(aggregate, dtype=float)
    target = np.asarray(target, dtype=float)
    if aggregate.shape != target.shape:
        raise ValueError(f"length mismatch: {aggregate.shape} vs {target.shape}")
    return float(np.sum((aggregate - target) ** 2))


@dataclass
class GlobalResponse:
    aggregate: np.ndarray
    total_local_cost: float
    global_cost: float


@dataclass
class Selection:
    choices: list[int]
    response: GlobalResponse
    customers: tuple[int, ...]
    # accepted global cost after each iteration
    history: list[float] = field(default_factory=list)
    iterations_executed: int = 0
    tree: AgentTree | None = None

    @property
    def coverage(self) -> float:
        """Fraction of customers picked by at least one selected plan."""
        if not self.customers:
            return 1.0
        return float(np.mean(self.response.aggregate >= 1))


class _Problem:
    """Plan sets re-indexed to a dense 0..m-1 customer axis."""

    def __init__(self, plan_sets: Sequence[PlanSet], customers: Sequence[int] | None):
        if customers is None:
            customers = sorted({c for ps in plan_sets for p in ps.plans for c in p.visit_sequence})
        self.customers = tuple(int(c) for c in customers)
        index = {c: i for i, c in enumerate(self.customers)}
        self.m = len(self.customers)
        self.plans = [[tuple(index[c] for c in p.visit_sequence) for p in ps.plans] for ps in plan_sets]
        self.arrays = [[np.asarray(p, dtype=np.intp) for p in plans] for plans in self.plans]
        self.local = [ps.local_costs for ps in plan_sets]
        self.norm_local = []
        for costs in self.local:
            lo, hi = min(costs), max(costs)
            span = hi - lo
            self.norm_local.append([(c - lo) / span if span > 0 else 0.0 for c in costs])

    def aggregate(self, choices: Sequence[int]) -> np.ndarray:
        if not self.plans:
            return np.zeros(self.m, dtype=np.int64)
        idx = np.concatenate([self.arrays[a][q] for a, q in enumerate(choices)])
        return np.bincount(idx, minlength=self.m).astype(np.int64)

    def response(self, choices: Sequence[int]) -> GlobalResponse:
        agg = self.aggregate(choices)
        local = float(sum(self.local[a][q] for a, q in enumerate(choices)))
        return GlobalResponse(agg, local, float(np.sum((agg - 1.0) ** 2)))


def _change_cost(dev: list[float], delta: dict[int, int]) -> float:
    """Increase of sum((agg-1)^2) when ``delta`` is added to an aggregate whose deviation is ``dev``."""
    return sum(v * (2.0 * dev[i] + v) for i, v in delta.items())


def _cross(d1: dict[int, int], d2: dict[int, int]) -> float:
    if len(d2) < len(d1):
        d1, d2 = d2, d1
    get = d2.get
    return 2.0 * sum(v * get(i, 0) for i, v in d1.items())


def _merge(dicts: list[dict[int, int]]) -> dict[int, int]:
    if not dicts:
        return {}
    dicts = sorted(dicts, key=len, reverse=True)
    out = dicts[0]
    for d in dicts[1:]:
        for i, v in d.items():
            s = out.get(i, 0) + v
            if s:
                out[i] = s
            else:
                out.pop(i, None)
    return out


def _approve(dev, child_deltas):
    """Choose the subset of child changes that minimises the global cost; ties favour accepting."""
    if len(child_deltas) == 1:
        return [_change_cost(dev, child_deltas[0]) <= 0.0]
    f1 = _change_cost(dev, child_deltas[0])
    f2 = _change_cost(dev, child_deltas[1])
    both = f1 + f2 + _cross(child_deltas[0], child_deltas[1])
    options = [(both, (True, True)), (f1, (True, False)), (f2, (False, True)), (0.0, (False, False))]
    best = min(range(4), key=lambda i: (options[i][0], i))
    return list(options[best][1])


def epos_select(
    plan_sets: Sequence[PlanSet],
    config: EngineConfig | None = None,
    customers: Sequence[int] | None = None,
    tree: AgentTree | None = None,
) -> Selection:
    """Cooperatively pick one plan per agent to minimise the coverage cost.

    ``customers`` fixes the axis of the aggregate (default: every customer
    appearing in some plan); the target is one visit per customer. With
    ``config.lam > 0`` each agent blends the global-cost change with its
    min-max normalised local cost.
    """
    config = config or EngineConfig()
    prob = _Problem(plan_sets, customers)
    n_agents = len(plan_sets)
    if n_agents == 0:
        resp = prob.response([])
        return Selection([], resp, prob.customers, [resp.global_cost] * config.iterations, 0)
    if tree is None:
        tree = build_tree(n_agents, np.random.default_rng(config.seed))
    order = tree.order
    n_pos = len(order)
    lam = config.lam

    prev: list[int] | None = None
    prev_resp: GlobalResponse | None = None
    dev = [-1.0] * prob.m
    history: list[float] = []
    executed = 0

    for it in range(config.iterations):
        executed += 1
        choice = [0] * n_agents if prev is None else list(prev)
        deltas: list[dict[int, int] | None] = [None] * n_pos
        rejected = [False] * n_pos

        for pos in range(n_pos - 1, -1, -1):
            a = order[pos]
            kids = [c for c in (2 * pos + 1, 2 * pos + 2) if c < n_pos]
            kid_deltas = [deltas[c] for c in kids]
            if prev is None or not kids:
                accept = [True] * len(kids)
            else:
                accept = _approve(dev, kid_deltas)
            for c, ok in zip(kids, accept):
                if not ok:
                    rejected[c] = True
            merged = _merge([d for d, ok in zip(kid_deltas, accept) if ok and d])
            for c in kids:
                deltas[c] = None

            plans = prob.plans[a]
            old = plans[prev[a]] if prev is not None else ()
            old_set = set(old)
            get = merged.get
            best_key = None
            best_q = 0
            for q, plan in enumerate(plans):
                g = 0.0
                for i in plan:
                    g += 2.0 * (dev[i] + get(i, 0) - (i in old_set)) + 1.0
                score = g if lam == 0.0 else (1.0 - lam) * g + lam * prob.norm_local[a][q]
                key = (score, prob.local[a][q], q)
                if best_key is None or key < best_key:
                    best_key, best_q = key, q
            choice[a] = best_q
            new = plans[best_q]
            if new != old:
                for i in old:
                    s = merged.get(i, 0) - 1
                    if s:
                        merged[i] = s
                    else:
                        merged.pop(i, None)
                for i in new:
                    s = merged.get(i, 0) + 1
                    if s:
                        merged[i] = s
                    else:
                        merged.pop(i, None)
            deltas[pos] = merged

        if prev is not None:
            reverted = [False] * n_pos
            for pos in range(n_pos):
                if rejected[pos] or (pos and reverted[(pos - 1) // 2]):
                    reverted[pos] = True
                    choice[order[pos]] = prev[order[pos]]

        resp = prob.response(choice)
        if prev_resp is not None and resp.global_cost > prev_resp.global_cost:
            choice, resp = list(prev), prev_resp
        history.append(resp.global_cost)
        converged = prev is not None and choice == prev
        prev, prev_resp = choice, resp
        dev = (resp.aggregate - 1.0).tolist()
        if converged:
            # identical inputs from here on; remaining iterations are no-ops
            history.extend([resp.global_cost] * (config.iterations - len(history)))
            break

    for node in tree.nodes:
        node.plan_set = plan_sets[node.agent_index]
        node.selected = prev[node.agent_index]
    return Selection(prev, prev_resp, prob.customers, history, executed, tree)


def uncoordinated_select(plan_sets: Sequence[PlanSet], customers: Sequence[int] | None = None) -> Selection:
    """Every agent takes its own cheapest plan (lowest index on ties)."""
    prob = _Problem(plan_sets, customers)
    choices = [min(range(len(costs)), key=lambda q: (costs[q], q)) for costs in prob.local]
    resp = prob.response(choices)
    return Selection(choices, resp, prob.customers, [resp.global_cost], 1)
