"""Multi-package UAV delivery planning with tree-based collective plan selection."""

__version__ = "0.1.0"

from .engine import EngineConfig, build_tree, epos_select, global_cost, uncoordinated_select
from .geo import (
    HEATHROW,
    Customer,
    DistanceMatrix,
    EconomicParams,
    Environment,
    GeoPoint,
    Instance,
    UavSpec,
    build_distance_matrix,
    generate_instance,
    haversine_distance,
    heathrow_fixture,
    load_instance,
    save_instance,
)
from .mission import MissionConfig, MissionResult, compare_modes, resolve_selection, run_mission
from .plangen import PlanSet, Route, generate_partition, generate_plan_sets

__all__ = [
    "HEATHROW",
    "Customer",
    "DistanceMatrix",
    "EconomicParams",
    "EngineConfig",
    "Environment",
    "GeoPoint",
    "Instance",
    "MissionConfig",
    "MissionResult",
    "PlanSet",
    "Route",
    "UavSpec",
    "build_distance_matrix",
    "build_tree",
    "compare_modes",
    "epos_select",
    "generate_instance",
    "generate_partition",
    "generate_plan_sets",
    "global_cost",
    "haversine_distance",
    "heathrow_fixture",
    "load_instance",
    "resolve_selection",
    "run_mission",
    "save_instance",
    "uncoordinated_select",
]
