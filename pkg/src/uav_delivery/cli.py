"""Command-line entry point: ``uav-delivery {gen,solve,compare,bench}``."""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

from .bench import n_grid, run_bench
from .engine import EngineConfig
from .errors import (
    CapacityViolationError,
    InfeasibleInstanceError,
    InstanceFileNotFound,
    PartialCoverageError,
    SchemaError,
)
from .export import manifest_dict, write_json, write_run
from .geo import GeoPoint, generate_instance, load_instance, save_instance
from .mission import MODES, MissionConfig, compare_modes, run_mission

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_PARTIAL = 4
EXIT_INPUT = 5

SEED_ENV = "UAV_DELIVERY_SEED"

log = logging.getLogger("uav_delivery")


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"{SEED_ENV} must be an integer, got {raw!r}")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _unit_interval(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return value


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values or any(v < 0 for v in values):
        raise argparse.ArgumentTypeError("expected non-negative integers")
    return values


def _engine_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--plans", type=_positive_int, default=10, help="plans per agent (default 10)")
    p.add_argument("--iterations", type=_positive_int, default=50, help="learning iterations (default 50)")
    p.add_argument("--lambda", dest="lam", type=_unit_interval, default=0.0, help="local-cost weight in [0, 1]")
    p.add_argument("--placements", type=_positive_int, default=1,
                   help="random tree placements per round, best kept (coordinated mode)")
    p.add_argument("--max-rounds", type=_positive_int, default=50)


def _mission_config(args, mode: str, seed: int) -> MissionConfig:
    return MissionConfig(
        mode=mode,
        engine=EngineConfig(iterations=args.iterations, lam=args.lam, plans_per_agent=args.plans, seed=seed),
        max_rounds=args.max_rounds,
        seed=seed,
        placements=args.placements,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uav-delivery", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a random instance file")
    gen.add_argument("--n", type=_non_negative_int, required=True)
    gen.add_argument("--depot-lat", type=float, default=51.4700)
    gen.add_argument("--depot-lon", type=float, default=-0.4543)
    gen.add_argument("--radius-km", type=float, default=10.0)
    gen.add_argument("--weights", type=_float_list, default=[0.5, 1.0, 1.5, 2.0])
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--out", type=Path, required=True)

    solve = sub.add_parser("solve", help="plan a mission for an instance file")
    solve.add_argument("--instance", type=Path, required=True)
    solve.add_argument("--mode", choices=MODES, default="coordinated")
    solve.add_argument("--seed", type=int, default=None)
    solve.add_argument("--out-dir", type=Path, required=True)
    _engine_args(solve)

    cmp_ = sub.add_parser("compare", help="coordinated vs uncoordinated over repeated seeds")
    src = cmp_.add_mutually_exclusive_group(required=True)
    src.add_argument("--instance", type=Path)
    src.add_argument("--n-grid", type=_int_list)
    cmp_.add_argument("--reps", type=_positive_int, default=25)
    cmp_.add_argument("--seed", type=int, default=None)
    cmp_.add_argument("--radius-km", type=float, default=10.0)
    cmp_.add_argument("--out", type=Path, required=True, help="CSV report; a .series.json is written alongside")
    _engine_args(cmp_)

    bench = sub.add_parser("bench", help="scaling benchmark")
    bench.add_argument("--n-max", type=_positive_int, default=10_000)
    bench.add_argument("--plans-list", type=_int_list, default=[10, 100])
    bench.add_argument("--iterations", type=_positive_int, default=50)
    bench.add_argument("--seeds", type=_int_list, default=None)
    bench.add_argument("--time-budget", type=float, default=600.0, help="seconds per cell")
    bench.add_argument("--workers", type=_positive_int, default=1)
    bench.add_argument("--out", type=Path, default=Path("bench.csv"))
    return parser


def _cmd_gen(args) -> int:
    seed = _default_seed() if args.seed is None else args.seed
    if args.radius_km <= 0:
        print("error: --radius-km must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        depot = GeoPoint(args.depot_lat, args.depot_lon)
        inst = generate_instance(args.n, depot, args.radius_km * 1000.0, args.weights, seed=seed)
    except (ValueError, CapacityViolationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    save_instance(inst, args.out)
    print(inst.digest())
    return EXIT_OK


def _load(path: Path):
    try:
        return load_instance(path)
    except (InstanceFileNotFound, SchemaError, CapacityViolationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None


def _cmd_solve(args) -> int:
    inst = _load(args.instance)
    if inst is None:
        return EXIT_INPUT
    seed = _default_seed() if args.seed is None else args.seed
    config = _mission_config(args, args.mode, seed)
    try:
        result = run_mission(inst, config)
        complete = True
    except InfeasibleInstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except PartialCoverageError as exc:
        print(f"warning: {exc}", file=sys.stderr)
        result, complete = exc.result, False
    write_run(result, inst, config, args.out_dir, complete)
    print(
        f"{config.mode}: {len(result.assignments)}/{inst.n} customers, {result.uav_count} UAVs, "
        f"{result.total_distance_m / 1000:.2f} km, savings {result.total_savings:.3f}, "
        f"{result.rounds_used} round(s)"
    )
    return EXIT_OK if complete else EXIT_PARTIAL


def _cmd_compare(args) -> int:
    seed = _default_seed() if args.seed is None else args.seed
    config = _mission_config(args, "coordinated", seed)
    if args.instance is not None:
        inst = _load(args.instance)
        if inst is None:
            return EXIT_INPUT
        instances = [inst]
    else:
        instances = [generate_instance(n, GeoPoint(51.4700, -0.4543), args.radius_km * 1000.0, seed=seed)
                     for n in args.n_grid]
    rows, failures = [], 0
    for inst in instances:
        log.info("comparing modes at n=%d over %d seeds", inst.n, args.reps)
        try:
            report = compare_modes(inst, config, args.reps)
        except InfeasibleInstanceError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INFEASIBLE
        row = report.row()
        failures += int(row["coordinated_failures"] + row["uncoordinated_failures"])
        rows.append(row)

    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    series = {
        "n": [int(r["n"]) for r in rows],
        "savings_diff_mean": [r["savings_diff_mean"] for r in rows],
        "savings_diff_std": [r["savings_diff_std"] for r in rows],
        "uav_diff_mean": [r["uav_diff_mean"] for r in rows],
        "uav_diff_std": [r["uav_diff_std"] for r in rows],
        "x_scale": "log",
    }
    series_path = args.out.with_suffix(".series.json")
    write_json(series, series_path)
    manifest = manifest_dict(config, instances[0], None, [args.out.name, series_path.name], "compare")
    manifest["instance_hashes"] = [i.digest() for i in instances]
    manifest["reps"] = args.reps
    write_json(manifest, args.out.with_suffix(".manifest.json"))
    for r in rows:
        print(f"n={int(r['n'])}: savings diff {r['savings_diff_mean']:.3f} +/- {r['savings_diff_std']:.3f}, "
              f"UAV diff {r['uav_diff_mean']:.2f} +/- {r['uav_diff_std']:.2f}")
    return EXIT_PARTIAL if failures else EXIT_OK


def _cmd_bench(args) -> int:
    seeds = args.seeds if args.seeds is not None else [_default_seed()]
    report = run_bench(n_grid(args.n_max), args.plans_list, args.iterations, seeds, args.time_budget, args.workers)
    report.write_csv(args.out)
    for row in report.rows:
        total = row.get("total_s")
        timing = f"{total:.1f}s" if isinstance(total, float) else "-"
        print(f"n={row['n']:>6} k={row['k']:>4} seed={row['seed']}: {row['status']:<8} {timing}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    handler = {"gen": _cmd_gen, "solve": _cmd_solve, "compare": _cmd_compare, "bench": _cmd_bench}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
