import json

import pytest

from skyroute.cli import main
from skyroute.errors import ConfigError
from skyroute.geo import GeoPoint
from skyroute.harness import (BENCH_COLUMNS, PlanRequest, bench_fwd,
                              bench_width, default_requests, load_airports,
                              make_weather, plan, read_bench_csv,
                              resolve_point, route_json_without_timings,
                              write_bench_csv)

MUC = GeoPoint(48.35, 11.79, 10_000)
BER = GeoPoint(52.37, 13.52, 10_000)

SMALL_DIMS = (9, 5, 3)


def small_request(**overrides):
    base = dict(origin=MUC, destination=BER, dims=SMALL_DIMS, width=3,
                substeps=1)
    base.update(overrides)
    return PlanRequest(**base)


class TestResolvePoint:
    def test_coordinates(self):
        p = resolve_point("48.35,11.79")
        assert p.lat_deg == 48.35 and p.lon_deg == 11.79
        assert p.alt_m == 10_000.0

    def test_coordinates_with_altitude(self):
        assert resolve_point("48.35,11.79,9000").alt_m == 9_000.0

    def test_airport_code(self):
        p = resolve_point("fra")
        airports = load_airports()
        assert (p.lat_deg, p.lon_deg) == airports["FRA"]

    def test_unknown_code(self):
        with pytest.raises(ConfigError):
            resolve_point("XXX")

    def test_garbage_coordinates(self):
        with pytest.raises(ConfigError):
            resolve_point("abc,def")


class TestMakeWeather:
    def test_uniform_covers_route(self):
        fld = make_weather("uniform", MUC, BER)
        lat_min, lat_max, lon_min, lon_max = fld.bbox()
        assert lat_min < MUC.lat_deg and lat_max > BER.lat_deg
        assert lon_min < MUC.lon_deg and lon_max > BER.lon_deg

    def test_jet_deterministic(self):
        a = make_weather("jet", MUC, BER, seed=4)
        b = make_weather("jet", MUC, BER, seed=4)
        assert a.max_wind_speed() == b.max_wind_speed()

    def test_csv_source(self, tmp_path):
        from skyroute.weather import save_csv
        fld = make_weather("uniform", MUC, BER)
        path = tmp_path / "wx.csv"
        save_csv(fld, str(path))
        back = make_weather(f"csv:{path}", MUC, BER)
        assert back.bbox() == pytest.approx(fld.bbox())

    def test_unknown_source(self):
        with pytest.raises(ConfigError):
            make_weather("storm", MUC, BER)


class TestPlan:
    def test_document_structure(self):
        doc = plan(small_request())
        for key in ("request", "waypoints", "segments", "totals", "search",
                    "timings"):
            assert key in doc
        assert doc["totals"]["fuel_kg"] > 0
        assert len(doc["waypoints"]) == SMALL_DIMS[0]
        assert len(doc["segments"]) == SMALL_DIMS[0] - 1
        assert doc["search"]["expanded_nodes"] > 0

    def test_segment_fuel_sums_to_total(self):
        doc = plan(small_request())
        total = sum(s["fuel_kg"] for s in doc["segments"])
        assert total == pytest.approx(doc["totals"]["fuel_kg"], rel=1e-12)

    def test_unconstrained_skips_guide(self):
        doc = plan(small_request(unconstrained=True))
        assert doc["request"]["width"] is None
        assert doc["timings"]["guide_s"] == 0.0

    def test_full_width_matches_unconstrained(self):
        field = make_weather("jet", MUC, BER, seed=1)
        free = plan(small_request(unconstrained=True, weather="jet", seed=1),
                    field)
        full = plan(small_request(width=5, weather="jet", seed=1), field)
        assert full["totals"]["fuel_kg"] == free["totals"]["fuel_kg"]
        assert full["waypoints"] == free["waypoints"]

    def test_policy_guide_requires_checkpoint(self):
        with pytest.raises(ConfigError):
            plan(small_request(guide_kind="policy"))

    def test_deterministic_json(self):
        d1 = route_json_without_timings(plan(small_request(weather="jet")))
        d2 = route_json_without_timings(plan(small_request(weather="jet")))
        assert d1 == d2
        assert "timings" not in json.loads(d1)


class TestBenchFwd:
    def test_rows_and_schema(self):
        reqs = [small_request(weather="jet")]
        rows = bench_fwd(reqs, fwd_list=[7, 9])
        assert [r["param_value"] for r in rows] == [7, 9]
        for row in rows:
            for col in BENCH_COLUMNS:
                assert col in row
            assert row["expanded_hybrid"] <= row["expanded_solver"]
            assert row["fuel_hybrid_kg"] >= row["fuel_solver_kg"] - 1e-9


class TestBenchWidth:
    def test_full_width_row_is_exact_zero(self):
        reqs = [small_request(weather="jet")]
        rows = bench_width(reqs, w_list=[1, 3, 5])
        by_w = {r["param_value"]: r for r in rows}
        assert by_w[5]["pct_diff"] == 0.0
        assert by_w[5]["fuel_hybrid_kg"] == by_w[5]["fuel_solver_kg"]

    def test_fuel_non_increasing_in_width(self):
        reqs = [small_request(weather="jet")]
        rows = bench_width(reqs, w_list=[1, 3, 5])
        fuels = [r["fuel_hybrid_kg"] for r in rows]
        for a, b in zip(fuels, fuels[1:]):
            assert b <= a * (1 + 1e-6)

    def test_two_routes_get_per_route_columns(self):
        reqs = [small_request(weather="jet"),
                small_request(origin=resolve_point("FRA"),
                              destination=resolve_point("CDG"), weather="jet")]
        rows = bench_width(reqs, w_list=[3])
        assert "fuel_route1_kg" in rows[0]
        assert "fuel_route2_kg" in rows[0]


class TestBenchCsv:
    def test_round_trip(self, tmp_path):
        rows = bench_width([small_request(weather="jet")], w_list=[1, 5])
        path = tmp_path / "bench.csv"
        write_bench_csv(rows, str(path))
        back = read_bench_csv(str(path))
        assert len(back) == 2
        assert back[0]["param_value"] == 1
        assert back[0]["fuel_hybrid_kg"] == pytest.approx(
            rows[0]["fuel_hybrid_kg"], rel=1e-12)
        header = path.read_text().splitlines()[0]
        assert header.startswith(",".join(BENCH_COLUMNS))


def test_default_requests():
    reqs = default_requests(weather="uniform", seed=3)
    assert len(reqs) == 5
    assert all(r.weather == "uniform" for r in reqs)
    assert all(r.dims == (41, 11, 3) for r in reqs)


class TestCli:
    def test_plan_writes_route_json(self, tmp_path, capsys):
        rc = main(["plan", "--origin", "MUC", "--destination", "BER",
                   "--fwd", "9", "--cols", "5", "--levels", "1",
                   "--width", "3", "--substeps", "1",
                   "--out-dir", str(tmp_path)])
        assert rc == 0
        doc = json.loads((tmp_path / "route.json").read_text())
        assert doc["totals"]["fuel_kg"] > 0
        assert "fuel" in capsys.readouterr().out

    def test_plan_bad_airport_exit_code(self, tmp_path, capsys):
        rc = main(["plan", "--origin", "XXX", "--destination", "BER",
                   "--out-dir", str(tmp_path)])
        assert rc == 2
        assert "error" in capsys.readouterr().err

    def test_bench_width_cli(self, tmp_path, capsys):
        rc = main(["bench-width", "--routes", "MUC:BER",
                   "--fwd", "9", "--cols", "5", "--levels", "1",
                   "--substeps", "1", "--w-list", "1", "5",
                   "--out-dir", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "bench_width.csv").exists()

    def test_bench_fwd_cli(self, tmp_path):
        rc = main(["bench-fwd", "--routes", "MUC:BER",
                   "--fwd", "9", "--cols", "5", "--levels", "1",
                   "--substeps", "1", "--fwd-list", "7", "9",
                   "--out-dir", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "bench_fwd.csv").exists()

    def test_train_cli(self, tmp_path):
        config = {"seed": 0, "instances": 4, "rollout_episodes": 2,
                  "epochs_per_update": 2, "minibatch_size": 8}
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(config))
        rc = main(["train", "--config", str(cfg_path),
                   "--out-dir", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "policy.json").exists()
        assert (tmp_path / "training_log.csv").exists()

    def test_train_bad_config_exit_code(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"instances": 4}))
        rc = main(["train", "--config", str(cfg_path),
                   "--out-dir", str(tmp_path)])
        assert rc == 2
