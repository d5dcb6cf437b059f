"""Problem instances: depot, customers, fleet parameters and geodesic distances."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    CapacityViolationError,
    InstanceFileNotFound,
    SchemaError,
    SchemaVersionError,
)

EARTH_RADIUS_M = 6_371_000.0
SCHEMA_VERSION = 1

# Matrices up to this many nodes are materialised; larger ones compute rows on demand.
DENSE_NODE_LIMIT = 2500


@dataclass(frozen=True)
class GeoPoint:
    lat_deg: float
    lon_deg: float

    def __post_init__(self):
        if not -90.0 <= self.lat_deg <= 90.0:
            raise ValueError(f"latitude {self.lat_deg} outside [-90, 90]")
        if not -180.0 <= self.lon_deg <= 180.0:
            raise ValueError(f"longitude {self.lon_deg} outside [-180, 180]")


@dataclass(frozen=True)
class Customer:
    id: int
    location: GeoPoint
    package_weight_kg: float

    def __post_init__(self):
        if self.id < 1:
            raise ValueError("customer ids start at 1 (0 is the depot)")
        if not self.package_weight_kg > 0:
            raise ValueError(f"customer {self.id}: package weight must be positive")


@dataclass(frozen=True)
class UavSpec:
    """Rotorcraft parameters. Defaults describe a commercial octocopter with an 800 Wh pack."""

    frame_mass_kg: float = 10.0
    battery_mass_kg: float = 10.0
    capacity_kg: float = 5.0
    battery_capacity_joule: float = 800.0 * 3600.0
    speed_mps: float = 10.0
    rotor_count: int = 8
    rotor_disc_area_m2: float = 0.27
    # hover time spent at each delivery stop; consumes no energy
    service_time_s: float = 0.0

    def __post_init__(self):
        for name in (
            "frame_mass_kg",
            "battery_mass_kg",
            "capacity_kg",
            "battery_capacity_joule",
            "speed_mps",
            "rotor_count",
            "rotor_disc_area_m2",
        ):
            if not getattr(self, name) > 0:
                raise ValueError(f"UavSpec.{name} must be strictly positive")
        if self.service_time_s < 0:
            raise ValueError("UavSpec.service_time_s must be non-negative")

    @property
    def empty_mass_kg(self) -> float:
        return self.frame_mass_kg + self.battery_mass_kg


@dataclass(frozen=True)
class Environment:
    gravity_mps2: float = 9.81
    air_density_kgm3: float = 1.2250

    def __post_init__(self):
        if not (self.gravity_mps2 > 0 and self.air_density_kgm3 > 0):
            raise ValueError("gravity and air density must be strictly positive")


@dataclass(frozen=True)
class EconomicParams:
    """Pricing constant and delivery-time discount schedule.

    ``price_constant_k`` is money per (kg * m); the default corresponds to
    one monetary unit per kg per km.
    """

    price_constant_k: float = 1e-3
    discount_tiers: tuple[float, ...] = (1.0, 1.0 / 2.0, 1.0 / 3.0)
    tier_times_s: tuple[float, ...] = (600.0, 1200.0)

    def __post_init__(self):
        object.__setattr__(self, "discount_tiers", tuple(float(r) for r in self.discount_tiers))
        object.__setattr__(self, "tier_times_s", tuple(float(t) for t in self.tier_times_s))
        if self.price_constant_k < 0:
            raise ValueError("price constant must be non-negative")
        if len(self.discount_tiers) != len(self.tier_times_s) + 1:
            raise ValueError("need exactly one more discount tier than tier thresholds")
        if any(b >= a for a, b in zip(self.discount_tiers, self.discount_tiers[1:])):
            raise ValueError("discount factors must be strictly decreasing")
        if any(b <= a for a, b in zip(self.tier_times_s, self.tier_times_s[1:])):
            raise ValueError("tier thresholds must be strictly increasing")


@dataclass(frozen=True)
class Instance:
    depot: GeoPoint
    customers: tuple[Customer, ...]
    uav: UavSpec = field(default_factory=UavSpec)
    env: Environment = field(default_factory=Environment)
    econ: EconomicParams = field(default_factory=EconomicParams)
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "customers", tuple(self.customers))
        for expected, c in enumerate(self.customers, start=1):
            if c.id != expected:
                raise SchemaError(f"customer ids must be 1..n in order; got {c.id} at position {expected}")
            if c.package_weight_kg > self.uav.capacity_kg:
                raise CapacityViolationError(
                    f"customer {c.id}: package of {c.package_weight_kg} kg exceeds "
                    f"UAV capacity {self.uav.capacity_kg} kg"
                )

    @property
    def n(self) -> int:
        return len(self.customers)

    @cached_property
    def weights(self) -> np.ndarray:
        """Package weights indexed by node; entry 0 (depot) is zero."""
        w = np.zeros(self.n + 1)
        w[1:] = [c.package_weight_kg for c in self.customers]
        return w

    @cached_property
    def node_lat(self) -> np.ndarray:
        return np.array([self.depot.lat_deg] + [c.location.lat_deg for c in self.customers])

    @cached_property
    def node_lon(self) -> np.ndarray:
        return np.array([self.depot.lon_deg] + [c.location.lon_deg for c in self.customers])

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "seed": self.seed,
            "depot": {"lat": self.depot.lat_deg, "lon": self.depot.lon_deg},
            "uav": asdict(self.uav),
            "environment": asdict(self.env),
            "economics": {
                "price_constant_k": self.econ.price_constant_k,
                "discount_tiers": list(self.econ.discount_tiers),
                "tier_times_s": list(self.econ.tier_times_s),
            },
            "customers": [
                {
                    "id": c.id,
                    "lat": c.location.lat_deg,
                    "lon": c.location.lon_deg,
                    "weight_kg": c.package_weight_kg,
                }
                for c in self.customers
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Instance":
        if not isinstance(doc, dict):
            raise SchemaError("instance document must be an object")
        version = doc.get("schema_version")
        if version is None:
            raise SchemaError("missing 'schema_version'")
        if version != SCHEMA_VERSION:
            raise SchemaVersionError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
        for key in ("depot", "customers"):
            if key not in doc:
                raise SchemaError(f"missing {key!r}")
        try:
            depot = GeoPoint(float(doc["depot"]["lat"]), float(doc["depot"]["lon"]))
            uav = UavSpec(**doc.get("uav", {}))
            env = Environment(**doc.get("environment", {}))
            econ = EconomicParams(**doc.get("economics", {}))
            customers = [
                Customer(
                    int(c["id"]),
                    GeoPoint(float(c["lat"]), float(c["lon"])),
                    float(c["weight_kg"]),
                )
                for c in doc["customers"]
            ]
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed instance document: {exc}") from exc
        return cls(depot, tuple(customers), uav, env, econ, doc.get("seed"))

    def digest(self) -> str:
        """SHA-256 of the canonical JSON encoding."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def haversine_m(lat1, lon1, lat2, lon2):
    """Great-circle distance in meters; arguments in degrees, numpy-broadcastable."""
    p1 = np.radians(lat1)
    p2 = np.radians(lat2)
    a = np.sin((p2 - p1) / 2.0) ** 2 + np.cos(p1) * np.cos(p2) * np.sin(np.radians(lon2 - lon1) / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * np.arcsin(np.sqrt(np.minimum(a, 1.0)))


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    return float(haversine_m(a.lat_deg, a.lon_deg, b.lat_deg, b.lon_deg))


class DistanceMatrix:
    """Symmetric node-to-node distances in meters, node 0 being the depot.

    Small instances hold the full array. Large ones (10^4 customers would need
    ~800 MB dense) evaluate rows lazily from the node coordinates; both modes
    return identical values.
    """

    def __init__(self, lat_deg: np.ndarray, lon_deg: np.ndarray, dense: bool | None = None):
        self._lat = np.radians(np.asarray(lat_deg, dtype=float))
        self._lon = np.radians(np.asarray(lon_deg, dtype=float))
        self._cos = np.cos(self._lat)
        self.lat_deg = np.asarray(lat_deg, dtype=float)
        self.lon_deg = np.asarray(lon_deg, dtype=float)
        self.size = len(self._lat)
        if dense is None:
            dense = self.size <= DENSE_NODE_LIMIT
        self._dense = self._compute_all() if dense else None
        self.depot_row = self._dense[0].copy() if dense else self._row(0, None)

    @property
    def is_dense(self) -> bool:
        return self._dense is not None

    def _row(self, i: int, cols) -> np.ndarray:
        lat = self._lat if cols is None else self._lat[cols]
        lon = self._lon if cols is None else self._lon[cols]
        cos = self._cos if cols is None else self._cos[cols]
        a = np.sin((lat - self._lat[i]) * 0.5) ** 2 + self._cos[i] * cos * np.sin((lon - self._lon[i]) * 0.5) ** 2
        d = 2.0 * EARTH_RADIUS_M * np.arcsin(np.sqrt(np.minimum(a, 1.0)))
        if cols is None:
            d[i] = 0.0
        return d

    def _compute_all(self) -> np.ndarray:
        lat = self._lat
        a = (
            np.sin((lat[None, :] - lat[:, None]) * 0.5) ** 2
            + self._cos[:, None] * self._cos[None, :] * np.sin((self._lon[None, :] - self._lon[:, None]) * 0.5) ** 2
        )
        d = 2.0 * EARTH_RADIUS_M * np.arcsin(np.sqrt(np.minimum(a, 1.0)))
        # enforce exact symmetry and zero diagonal against rounding
        d = np.triu(d, 1)
        return d + d.T

    def row(self, i: int, cols=None) -> np.ndarray:
        """Distances from node ``i`` to ``cols`` (all nodes when None)."""
        if self._dense is not None:
            return self._dense[i] if cols is None else self._dense[i, cols]
        return self._row(i, cols)

    def __getitem__(self, ij) -> float:
        i, j = ij
        if i == j:
            return 0.0
        if self._dense is not None:
            return float(self._dense[i, j])
        a, b = (i, j) if i < j else (j, i)
        return float(self._row(a, np.array([b]))[0])

    def path(self, nodes: Sequence[int]) -> np.ndarray:
        """Leg lengths along a node sequence."""
        nodes = np.asarray(nodes, dtype=int)
        if len(nodes) < 2:
            return np.zeros(0)
        if self._dense is not None:
            return self._dense[nodes[:-1], nodes[1:]]
        a, b = np.minimum(nodes[:-1], nodes[1:]), np.maximum(nodes[:-1], nodes[1:])
        lat1, lat2 = self._lat[a], self._lat[b]
        h = np.sin((lat2 - lat1) * 0.5) ** 2 + self._cos[a] * self._cos[b] * np.sin((self._lon[b] - self._lon[a]) * 0.5) ** 2
        d = 2.0 * EARTH_RADIUS_M * np.arcsin(np.sqrt(np.minimum(h, 1.0)))
        d[a == b] = 0.0
        return d

    def to_array(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense.copy()
        return self._compute_all()


def build_distance_matrix(inst: Instance, dense: bool | None = None) -> DistanceMatrix:
    return DistanceMatrix(inst.node_lat, inst.node_lon, dense=dense)


def destination_point(origin: GeoPoint, bearing_rad, distance_m):
    """Spherical forward geodesic; vectorised over bearing/distance. Returns (lat, lon) in degrees."""
    phi1 = math.radians(origin.lat_deg)
    lam1 = math.radians(origin.lon_deg)
    delta = np.asarray(distance_m, dtype=float) / EARTH_RADIUS_M
    theta = np.asarray(bearing_rad, dtype=float)
    sin_phi2 = np.sin(phi1) * np.cos(delta) + np.cos(phi1) * np.sin(delta) * np.cos(theta)
    phi2 = np.arcsin(np.clip(sin_phi2, -1.0, 1.0))
    lam2 = lam1 + np.arctan2(
        np.sin(theta) * np.sin(delta) * np.cos(phi1),
        np.cos(delta) - np.sin(phi1) * sin_phi2,
    )
    lon = (np.degrees(lam2) + 540.0) % 360.0 - 180.0
    return np.degrees(phi2), lon


def generate_instance(
    n: int,
    depot: GeoPoint,
    radius_m: float = 10_000.0,
    weight_choices: Sequence[float] = (0.5, 1.0, 1.5, 2.0),
    uav: UavSpec | None = None,
    env: Environment | None = None,
    econ: EconomicParams | None = None,
    seed: int | None = 0,
) -> Instance:
    """Scatter ``n`` customers uniformly (by area) over a disc around the depot."""
    uav = uav or UavSpec()
    env = env or Environment()
    econ = econ or EconomicParams()
    if n < 0:
        raise ValueError("n must be non-negative")
    if not radius_m > 0:
        raise ValueError("radius must be positive")
    weight_choices = [float(w) for w in weight_choices]
    if not weight_choices:
        raise ValueError("weight_choices must be non-empty")
    heavy = [w for w in weight_choices if w > uav.capacity_kg]
    if heavy:
        raise CapacityViolationError(f"weight choices {heavy} exceed UAV capacity {uav.capacity_kg} kg")
    if any(w <= 0 for w in weight_choices):
        raise ValueError("weight choices must be positive")

    rng = np.random.default_rng(seed)
    dist = radius_m * np.sqrt(rng.random(n))
    bearing = rng.uniform(0.0, 2.0 * math.pi, n)
    weights = rng.choice(np.asarray(weight_choices), size=n)
    lat, lon = destination_point(depot, bearing, dist)
    customers = tuple(
        Customer(i + 1, GeoPoint(float(lat[i]), float(lon[i])), float(weights[i])) for i in range(n)
    )
    return Instance(depot, customers, uav, env, econ, seed)


HEATHROW = GeoPoint(51.4700, -0.4543)

# Package weights of a ten-customer reference scenario near Heathrow. Coordinates are not
# known, so heathrow_fixture() pairs these with seeded random positions.
HEATHROW_WEIGHTS = (0.5, 2.0, 1.0, 0.5, 2.0, 2.0, 2.0, 2.0, 1.0, 2.0)


def heathrow_fixture(seed: int = 2023, radius_m: float = 10_000.0) -> Instance:
    """Ten-customer Heathrow instance with the reference weights (non-canonical coordinates)."""
    base = generate_instance(len(HEATHROW_WEIGHTS), HEATHROW, radius_m, seed=seed)
    customers = tuple(
        Customer(c.id, c.location, w) for c, w in zip(base.customers, HEATHROW_WEIGHTS)
    )
    return Instance(HEATHROW, customers, base.uav, base.env, base.econ, seed)


def save_instance(inst: Instance, path) -> None:
    path = Path(path)
    path.write_text(json.dumps(inst.to_dict(), indent=2) + "\n", encoding="utf-8")


def load_instance(path) -> Instance:
    path = Path(path)
    if not path.exists():
        raise InstanceFileNotFound(f"instance file not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    return Instance.from_dict(doc)
