"""Flight energy, pricing, delivery-time discounts and route savings."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import MalformedRouteError
from .geo import Customer, DistanceMatrix, EconomicParams, Environment, Instance, UavSpec


@dataclass(frozen=True)
class EnergyState:
    remaining_joule: float
    payload_kg: float

    def __post_init__(self):
        if self.remaining_joule < 0:
            raise ValueError("remaining energy cannot be negative")
        if self.payload_kg < 0:
            raise ValueError("payload cannot be negative")


@dataclass(frozen=True)
class LegMetrics:
    distance_m: float
    energy_joule: float
    elapsed_s: float


@dataclass(frozen=True)
class SavingsBreakdown:
    revenue: float
    transport_cost: float
    net: float


def energy_coefficient(uav: UavSpec, env: Environment) -> float:
    """Constant c such that energy per meter is c * M**1.5."""
    return env.gravity_mps2**1.5 / (
        uav.speed_mps * math.sqrt(2.0 * uav.rotor_count * env.air_density_kgm3 * uav.rotor_disc_area_m2)
    )


def energy_per_meter(total_mass_kg, uav: UavSpec, env: Environment):
    """Steady-flight energy per meter (J/m) for a craft of the given total mass.

    Accepts scalars or arrays.
    """
    mass = np.asarray(total_mass_kg, dtype=float)
    if np.any(mass < 0):
        raise ValueError("mass must be non-negative")
    out = energy_coefficient(uav, env) * mass**1.5
    return float(out) if out.ndim == 0 else out


def leg_energy(distance_m: float, payload_kg: float, uav: UavSpec, env: Environment) -> float:
    """Energy for one leg flown at a constant payload."""
    if distance_m < 0:
        raise ValueError("distance must be non-negative")
    if not 0 <= payload_kg <= uav.capacity_kg + 1e-9:
        raise ValueError(f"payload {payload_kg} kg outside [0, {uav.capacity_kg}]")
    return distance_m * energy_per_meter(uav.empty_mass_kg + payload_kg, uav, env)


def base_price(customer: Customer | float, depot_distance_m: float, econ: EconomicParams) -> float:
    """Full (undiscounted) price: k * weight * depot distance."""
    weight = customer.package_weight_kg if isinstance(customer, Customer) else float(customer)
    return econ.price_constant_k * weight * depot_distance_m


def discount_factor(delivery_time_s: float, econ: EconomicParams) -> float:
    # closed upper bounds: a delivery exactly at a threshold keeps the better tier
    if delivery_time_s < 0:
        raise ValueError("delivery time must be non-negative")
    return econ.discount_tiers[bisect.bisect_left(econ.tier_times_s, delivery_time_s)]


def arc_savings(
    from_node: int,
    to_node: int,
    weight_kg: float,
    arrival_time_s: float,
    dmat: DistanceMatrix,
    econ: EconomicParams,
) -> SavingsBreakdown:
    """Operator savings for serving ``to_node`` via the arc from ``from_node``.

    ``arrival_time_s`` is the cumulative flight time from depot launch.
    """
    revenue = base_price(weight_kg, dmat[0, to_node], econ) * discount_factor(arrival_time_s, econ)
    cost = econ.price_constant_k * weight_kg * dmat[from_node, to_node]
    return SavingsBreakdown(revenue, cost, revenue - cost)


@dataclass(frozen=True)
class RouteMetrics:
    savings: float
    legs: tuple[LegMetrics, ...]
    arrival_s: tuple[float, ...]
    discounts: tuple[float, ...]

    @property
    def distance_m(self) -> float:
        return float(sum(leg.distance_m for leg in self.legs))

    @property
    def energy_joule(self) -> float:
        return float(sum(leg.energy_joule for leg in self.legs))


def _check_nodes(nodes: Sequence[int]) -> list[int]:
    nodes = [int(v) for v in nodes]
    if len(nodes) == 1 and nodes[0] == 0:
        nodes = [0, 0]
    if len(nodes) < 2 or nodes[0] != 0 or nodes[-1] != 0:
        raise MalformedRouteError(f"route must start and end at the depot: {nodes}")
    if 0 in nodes[1:-1]:
        raise MalformedRouteError(f"route revisits the depot mid-flight: {nodes}")
    if len(set(nodes[1:-1])) != len(nodes) - 2:
        raise MalformedRouteError(f"route visits a customer twice: {nodes}")
    return nodes


def route_savings(nodes: Sequence[int], inst: Instance, dmat: DistanceMatrix) -> RouteMetrics:
    """Score a depot-to-depot node sequence from scratch.

    Every package is loaded at launch and dropped at its customer, so each leg
    carries the weight of all not-yet-delivered packages. The return leg burns
    energy but carries no money term.
    """
    nodes = _check_nodes(nodes)
    uav, env, econ = inst.uav, inst.env, inst.econ
    stops = np.asarray(nodes[1:-1], dtype=int)
    legs_d = dmat.path(nodes)
    w = inst.weights[stops]
    # payload on leg l = weight of stops l.. (delivered at the end of leg l or later)
    payload = np.concatenate([np.cumsum(w[::-1])[::-1], [0.0]])
    energy = legs_d * energy_per_meter(uav.empty_mass_kg + payload, uav, env)
    elapsed = legs_d / uav.speed_mps

    legs = tuple(LegMetrics(float(d), float(e), float(t)) for d, e, t in zip(legs_d, energy, elapsed))
    arrivals, discounts = [], []
    total = 0.0
    clock = 0.0
    for pos, j in enumerate(stops):
        clock += elapsed[pos]
        r = discount_factor(clock, econ)
        arrivals.append(float(clock))
        discounts.append(r)
        total += econ.price_constant_k * w[pos] * (dmat.depot_row[j] * r - legs_d[pos])
        clock += uav.service_time_s
    return RouteMetrics(float(total), legs, tuple(arrivals), tuple(discounts))
