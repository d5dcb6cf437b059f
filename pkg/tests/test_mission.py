import dataclasses

import numpy as np
import pytest

from uav_delivery import geo, physics
from uav_delivery.engine import EngineConfig, epos_select
from uav_delivery.errors import InfeasibleInstanceError, PartialCoverageError
from uav_delivery.mission import (
    MissionConfig,
    compare_modes,
    resolve_selection,
    run_mission,
)
from uav_delivery.plangen import PlanSet, Route


def assert_bijection(result, inst):
    served = [c for r in result.final_routes for c in r.visit_sequence]
    assert sorted(served) == list(range(1, inst.n + 1))
    assert set(result.assignments) == set(range(1, inst.n + 1))
    ids = [r.uav_index for r in result.final_routes]
    assert ids == list(range(len(ids)))
    for c, (uav, pos) in result.assignments.items():
        assert result.final_routes[uav].visit_sequence[pos] == c


@pytest.mark.parametrize("mode", ["coordinated", "uncoordinated"])
def test_mission_serves_everyone_once(small_instance, mode):
    result = run_mission(small_instance, MissionConfig(mode=mode, seed=4))
    assert_bijection(result, small_instance)
    assert result.per_round_coverage[-1] == 1.0
    assert all(b >= a for a, b in zip(result.per_round_coverage, result.per_round_coverage[1:]))
    assert result.uav_count == len(result.final_routes)
    assert result.rounds_used == len(result.rounds)
    assert sum(r.launched for r in result.rounds) == result.uav_count


def test_routes_are_feasible_and_rescored(small_instance):
    dm = geo.build_distance_matrix(small_instance)
    result = run_mission(small_instance, MissionConfig(mode="uncoordinated", seed=2), dm)
    for r in result.final_routes:
        ref = physics.route_savings(r.nodes, small_instance, dm)
        assert r.savings == pytest.approx(ref.savings, abs=1e-9)
        assert r.total_distance_m == pytest.approx(ref.distance_m, rel=1e-12)
        assert r.total_energy_joule <= small_instance.uav.battery_capacity_joule
        assert r.payload_kg(small_instance) <= small_instance.uav.capacity_kg
    assert result.total_distance_m == pytest.approx(sum(r.total_distance_m for r in result.final_routes))
    assert result.total_savings == pytest.approx(sum(r.savings for r in result.final_routes))


def test_mission_deterministic(small_instance):
    a = run_mission(small_instance, MissionConfig(seed=8))
    b = run_mission(small_instance, MissionConfig(seed=8))
    assert a.comparable() == b.comparable()


def test_modes_differ(heathrow):
    c = run_mission(heathrow, MissionConfig(mode="coordinated", seed=1))
    u = run_mission(heathrow, MissionConfig(mode="uncoordinated", seed=1))
    assert c.comparable() != u.comparable()


def test_empty_instance():
    inst = geo.generate_instance(0, geo.HEATHROW)
    result = run_mission(inst)
    assert result.uav_count == 0 and result.rounds_used == 0 and result.first_pass_coverage == 1.0


def test_resolve_keeps_earliest_agent(small_instance):
    dm = geo.build_distance_matrix(small_instance)
    sets = [
        PlanSet(0, (Route(0, (1, 2, 3)),)),
        PlanSet(1, (Route(1, (3, 4)),)),
        PlanSet(2, (Route(2, (2, 3)),)),
    ]
    sel = epos_select(sets, EngineConfig(iterations=1), customers=[1, 2, 3, 4, 5])
    routes, unserved = resolve_selection(sel, sets, small_instance, dm, first_uav=10)
    assert [r.visit_sequence for r in routes] == [(1, 2, 3), (4,)]
    assert [r.uav_index for r in routes] == [10, 11]
    assert unserved == {5}
    spliced = physics.route_savings([0, 4, 0], small_instance, dm)
    assert routes[1].savings == pytest.approx(spliced.savings)


def test_partial_coverage_carries_result(small_instance):
    with pytest.raises(PartialCoverageError) as info:
        run_mission(small_instance, MissionConfig(mode="uncoordinated", max_rounds=1, seed=0))
    partial = info.value.result
    assert 0 < len(partial.assignments) < small_instance.n
    assert partial.rounds_used == 1


def test_infeasible_instance_propagates():
    lat, lon = geo.destination_point(geo.HEATHROW, 0.0, 14_000.0)
    inst = geo.Instance(geo.HEATHROW, [geo.Customer(1, geo.GeoPoint(float(lat), float(lon)), 2.0)])
    with pytest.raises(InfeasibleInstanceError):
        run_mission(inst)


def test_config_validation():
    with pytest.raises(ValueError):
        MissionConfig(mode="solo")
    with pytest.raises(ValueError):
        MissionConfig(placements=0)
    with pytest.raises(ValueError):
        MissionConfig(max_rounds=0)


def test_placements_never_worse_in_first_round(heathrow):
    one = run_mission(heathrow, MissionConfig(seed=5, placements=1))
    many = run_mission(heathrow, MissionConfig(seed=5, placements=8))
    assert many.final_global_cost <= one.final_global_cost


def test_compare_modes(heathrow):
    report = compare_modes(heathrow, MissionConfig(seed=10), repetitions=4)
    assert report.seeds == [10, 11, 12, 13]
    assert len(report.savings_difference) == 4
    c = report.coordinated.runs
    u = report.uncoordinated.runs
    assert report.uav_count_difference == [u[i].uav_count - c[i].uav_count for i in range(4)]
    row = report.row()
    assert row["n"] == 10 and row["reps"] == 4
    assert row["coordinated_failures"] == 0
    assert len(report.coordinated.coverage_per_round()) >= 1
    with pytest.raises(ValueError):
        compare_modes(heathrow, repetitions=0)


def test_compare_modes_records_failures(small_instance):
    config = MissionConfig(max_rounds=1, seed=0)
    report = compare_modes(small_instance, config, repetitions=2)
    assert any(e and "PartialCoverageError" in e for e in report.uncoordinated.errors)
    assert report.row()["uncoordinated_failures"] >= 1
