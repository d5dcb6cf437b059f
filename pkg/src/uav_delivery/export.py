"""Result files: route geometry (GeoJSON), per-route CSV, run summary and manifest."""

from __future__ import annotations

import csv
import dataclasses
import datetime as _dt
import json
import platform
from pathlib import Path
from typing import Any

from . import __version__
from .geo import DistanceMatrix, Instance, build_distance_matrix
from .mission import MissionConfig, MissionResult
from .physics import route_savings
from .schemas import ROUTE_TABLE_COLUMNS as ROUTE_COLUMNS


def _round_of(result: MissionResult) -> dict[int, int]:
    """UAV id -> round in which it launched."""
    owner = {}
    it = iter(result.final_routes)
    for r in result.rounds:
        for _ in range(r.launched):
            owner[next(it).uav_index] = r.round_index
    return owner


def route_features(result: MissionResult, inst: Instance, dmat: DistanceMatrix | None = None) -> dict:
    dmat = dmat if dmat is not None else build_distance_matrix(inst)
    depot = [inst.depot.lon_deg, inst.depot.lat_deg]
    features = []
    for route in result.final_routes:
        metrics = route_savings(route.nodes, inst, dmat)
        coords = [depot]
        coords += [[inst.customers[c - 1].location.lon_deg, inst.customers[c - 1].location.lat_deg]
                   for c in route.visit_sequence]
        coords.append(depot)
        deliveries = [
            {"customer": c, "arrival_s": t, "arrival_min": t / 60.0, "discount": r}
            for c, t, r in zip(route.visit_sequence, metrics.arrival_s, metrics.discounts)
        ]
        features.append({
            "type": "Feature",
            "geometry": {"type": "LineString", "coordinates": coords},
            "properties": {
                "uav_id": route.uav_index,
                "distance_m": route.total_distance_m,
                "energy_joule": route.total_energy_joule,
                "savings": route.savings,
                "deliveries": deliveries,
            },
        })
    return {"type": "FeatureCollection", "features": features}


def export_routes(result: MissionResult, inst: Instance, path, dmat: DistanceMatrix | None = None,
                  manifest: str | None = None) -> Path:
    """Write one closed LineString per UAV route, depot first and last, in (lon, lat) order."""
    doc = route_features(result, inst, dmat)
    if manifest is not None:
        doc["manifest"] = manifest
    path = Path(path)
    path.write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
    return path


def write_route_table(result: MissionResult, inst: Instance, path) -> Path:
    rounds = _round_of(result)
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(ROUTE_COLUMNS)
        for route in result.final_routes:
            writer.writerow([
                route.uav_index,
                rounds.get(route.uav_index, ""),
                len(route.visit_sequence),
                " ".join(str(c) for c in route.visit_sequence),
                repr(route.payload_kg(inst)),
                repr(route.total_distance_m),
                repr(route.total_energy_joule),
                repr(route.savings),
            ])
    return path


def summary_dict(result: MissionResult, inst: Instance, config: MissionConfig, complete: bool) -> dict:
    return {
        "n_customers": inst.n,
        "instance_hash": inst.digest(),
        "mode": config.mode,
        "status": "complete" if complete else "partial",
        "uav_count": result.uav_count,
        "total_distance_m": result.total_distance_m,
        "total_savings": result.total_savings,
        "rounds_used": result.rounds_used,
        "served": len(result.assignments),
        "per_round_coverage": result.per_round_coverage,
        "first_pass_coverage": result.first_pass_coverage,
        "final_global_cost": result.final_global_cost,
        "rounds": [
            {
                "round": r.round_index,
                "active_customers": r.active_customers,
                "agents": r.agents,
                "selection_coverage": r.selection_coverage,
                "served": r.served,
                "global_cost": r.global_cost,
                "iterations_executed": r.iterations_executed,
            }
            for r in result.rounds
        ],
    }


def config_snapshot(config: MissionConfig) -> dict[str, Any]:
    return dataclasses.asdict(config)


def manifest_dict(config: MissionConfig, inst: Instance, result: MissionResult | None,
                  outputs: list[str], command: str) -> dict:
    return {
        "tool": "uav-delivery",
        "version": __version__,
        "command": command,
        "created_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "python": platform.python_version(),
        "instance_hash": inst.digest(),
        "config": config_snapshot(config),
        "seeds": {"mission": config.seed, "engine": config.engine.seed, "instance": inst.seed},
        "timings_s": ({"total": result.wall_time_s, **result.phase_times()} if result is not None else {}),
        "outputs": outputs,
    }


def write_json(doc: dict, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_run(result: MissionResult, inst: Instance, config: MissionConfig, out_dir, complete: bool = True,
              dmat: DistanceMatrix | None = None) -> dict[str, Path]:
    """Write routes.geojson, routes.csv, summary.json and manifest.json into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "routes": export_routes(result, inst, out_dir / "routes.geojson", dmat, manifest="manifest.json"),
        "table": write_route_table(result, inst, out_dir / "routes.csv"),
    }
    summary = summary_dict(result, inst, config, complete)
    summary["manifest"] = "manifest.json"
    paths["summary"] = write_json(summary, out_dir / "summary.json")
    manifest = manifest_dict(config, inst, result, sorted(p.name for p in paths.values()), "solve")
    paths["manifest"] = write_json(manifest, out_dir / "manifest.json")
    return paths
