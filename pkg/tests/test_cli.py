import csv
import json

import pytest

from uav_delivery import cli, geo
from uav_delivery.schemas import INSTANCE, SERIES, SUMMARY, validate


def run(argv, capsys=None):
    try:
        return cli.main([str(a) for a in argv])
    except SystemExit as exc:  # argparse usage errors
        return exc.code


def test_gen_writes_valid_instance_and_echoes_hash(tmp_path, capsys):
    out = tmp_path / "inst.json"
    assert run(["gen", "--n", 10, "--depot-lat", 51.47, "--depot-lon", -0.4543, "--seed", 7, "--out", out]) == 0
    doc = json.loads(out.read_text())
    validate(doc, INSTANCE)
    assert len(doc["customers"]) == 10
    assert capsys.readouterr().out.strip() == geo.load_instance(out).digest()


def test_gen_empty(tmp_path):
    out = tmp_path / "empty.json"
    assert run(["gen", "--n", 0, "--out", out]) == 0
    assert geo.load_instance(out).n == 0


@pytest.mark.parametrize("bad", [["--n", "-3"], ["--n", "x"], ["--n", "5", "--weights", "9"],
                                 ["--n", "5", "--radius-km", "0"]])
def test_gen_usage_errors(tmp_path, bad):
    assert run(["gen", *bad, "--out", tmp_path / "x.json"]) == cli.EXIT_USAGE


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.SEED_ENV, "42")
    run(["gen", "--n", 5, "--out", tmp_path / "a.json"])
    run(["gen", "--n", 5, "--seed", 42, "--out", tmp_path / "b.json"])
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


@pytest.fixture
def inst_file(tmp_path):
    path = tmp_path / "inst.json"
    geo.save_instance(geo.heathrow_fixture(), path)
    return path


def test_solve_is_deterministic(tmp_path, inst_file):
    for name in ("a", "b"):
        assert run(["solve", "--instance", inst_file, "--seed", 3, "--out-dir", tmp_path / name]) == 0
    for f in ("routes.geojson", "routes.csv", "summary.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    validate(summary, SUMMARY)
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["config"]["engine"]["plans_per_agent"] == 10
    assert manifest["config"]["engine"]["iterations"] == 50


def test_solve_uncoordinated_differs(tmp_path, inst_file):
    run(["solve", "--instance", inst_file, "--out-dir", tmp_path / "c"])
    run(["solve", "--instance", inst_file, "--mode", "uncoordinated", "--out-dir", tmp_path / "u"])
    c = json.loads((tmp_path / "c" / "summary.json").read_text())
    u = json.loads((tmp_path / "u" / "summary.json").read_text())
    assert c["per_round_coverage"][-1] == u["per_round_coverage"][-1] == 1.0
    assert (c["total_distance_m"], c["uav_count"]) != (u["total_distance_m"], u["uav_count"])


def test_solve_partial_coverage_exit_code(tmp_path):
    path = tmp_path / "inst.json"
    geo.save_instance(geo.generate_instance(40, geo.HEATHROW, seed=1), path)
    out = tmp_path / "run"
    code = run(["solve", "--instance", path, "--mode", "uncoordinated", "--max-rounds", 1, "--out-dir", out])
    assert code == cli.EXIT_PARTIAL
    summary = json.loads((out / "summary.json").read_text())
    assert summary["status"] == "partial"
    assert (out / "routes.geojson").exists()


def test_solve_infeasible_exit_code(tmp_path):
    lat, lon = geo.destination_point(geo.HEATHROW, 0.0, 14_000.0)
    inst = geo.Instance(geo.HEATHROW, [geo.Customer(1, geo.GeoPoint(float(lat), float(lon)), 2.0)])
    path = tmp_path / "far.json"
    geo.save_instance(inst, path)
    assert run(["solve", "--instance", path, "--out-dir", tmp_path / "o"]) == cli.EXIT_INFEASIBLE


def test_solve_missing_or_bad_instance(tmp_path):
    assert run(["solve", "--instance", tmp_path / "nope.json", "--out-dir", tmp_path]) == cli.EXIT_INPUT
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1}')
    assert run(["solve", "--instance", bad, "--out-dir", tmp_path]) == cli.EXIT_INPUT


def test_exit_codes_distinct():
    codes = {cli.EXIT_OK, cli.EXIT_USAGE, cli.EXIT_INFEASIBLE, cli.EXIT_PARTIAL, cli.EXIT_INPUT}
    assert len(codes) == 5 and cli.EXIT_OK == 0


def test_compare_grid(tmp_path):
    out = tmp_path / "cmp.csv"
    assert run(["compare", "--n-grid", "10,30,60", "--reps", 3, "--out", out]) == 0
    with out.open() as fh:
        rows = list(csv.DictReader(fh))
    assert [int(float(r["n"])) for r in rows] == [10, 30, 60]
    assert {"savings_diff_mean", "savings_diff_std", "uav_diff_mean", "uav_diff_std"} <= set(rows[0])
    series = json.loads(out.with_suffix(".series.json").read_text())
    validate(series, SERIES)
    assert series["n"] == [10, 30, 60]


def test_compare_instance(tmp_path, inst_file):
    out = tmp_path / "one.csv"
    assert run(["compare", "--instance", inst_file, "--reps", 2, "--out", out]) == 0
    assert out.with_suffix(".manifest.json").exists()


def test_compare_requires_source(tmp_path):
    assert run(["compare", "--out", tmp_path / "x.csv"]) == cli.EXIT_USAGE
