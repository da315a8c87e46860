"""Planning front-end and the two sensitivity benchmarks.

`plan` wires guide -> corridor -> A* for one request and returns a
JSON-ready summary. `bench_fwd` sweeps the number of forward rows,
`bench_width` sweeps the corridor width; both emit schema-stable CSV
rows with timings, fuel, and node-expansion counts.
"""

from __future__ import annotations

import csv
import json
import statistics
import time
from dataclasses import dataclass, field as dc_field

from .errors import ConfigError
from .geo import GeoPoint, great_circle_distance
from .guide import GuideConfig, PolicyParams, load_checkpoint, roll_out
from .lattice import build_corridor, build_lattice
from .perfmodel import (AircraftSpec, AircraftState, default_spec, fly_segment,
                        DEFAULT_SUBSTEPS)
from .search import astar
from .weather import (ISA_TEMPERATURE_K, WeatherField, load_csv, make_jet_stream,
                      make_uniform)

DEFAULT_DIMS = (41, 11, 3)
DEFAULT_WIDTH = 5
DEFAULT_CRUISE_ALT_M = 10_000.0

#: Fraction of trip length used as default lateral half-width.
DEFAULT_LATERAL_FRACTION = 0.15

BENCH_COLUMNS = ["param_value", "solver_time_s", "solver_time_std",
                 "hybrid_time_s", "hybrid_time_std", "guide_time_s",
                 "fuel_solver_kg", "fuel_hybrid_kg",
                 "expanded_solver", "expanded_hybrid", "pct_diff"]

#: Timing keys stripped when comparing route JSON for determinism.
TIMING_KEYS = ("timings",)

DEFAULT_ROUTE_SET = [("FRA", "CDG"), ("LHR", "AMS"), ("ARN", "CPH"),
                     ("FCO", "VIE"), ("BCN", "BRU")]


def load_airports() -> dict[str, tuple[float, float]]:
    from importlib.resources import files
    raw = json.loads(files("skyroute.data").joinpath("airports.json")
                     .read_text(encoding="utf-8"))
    return {k: tuple(v) for k, v in raw.items()}


def resolve_point(text: str, alt_m: float = DEFAULT_CRUISE_ALT_M) -> GeoPoint:
    """Parse 'lat,lon[,alt]' or an airport code into a GeoPoint."""
    if "," in text:
        parts = text.split(",")
        if len(parts) not in (2, 3):
            raise ConfigError(f"cannot parse coordinates: {text!r}")
        try:
            lat, lon = float(parts[0]), float(parts[1])
            alt = float(parts[2]) if len(parts) == 3 else alt_m
        except ValueError:
            raise ConfigError(f"cannot parse coordinates: {text!r}") from None
        return GeoPoint(lat, lon, alt)
    airports = load_airports()
    code = text.strip().upper()
    if code not in airports:
        raise ConfigError(f"unknown airport code: {code}")
    lat, lon = airports[code]
    return GeoPoint(lat, lon, alt_m)


@dataclass
class PlanRequest:
    """Everything needed to plan one route."""

    origin: GeoPoint
    destination: GeoPoint
    dims: tuple[int, int, int] = DEFAULT_DIMS
    width: int = DEFAULT_WIDTH
    guide_kind: str = "great_circle"
    checkpoint: str | None = None
    weather: str = "uniform"
    aircraft: AircraftSpec = dc_field(default_factory=default_spec)
    substeps: int = DEFAULT_SUBSTEPS
    seed: int = 0
    unconstrained: bool = False
    lateral_halfwidth_m: float | None = None
    alt_band: tuple[float, float] = (9_000.0, 11_000.0)
    n_waypoints: int = 5


def make_weather(spec_text: str, origin: GeoPoint, destination: GeoPoint,
                 seed: int = 0) -> WeatherField:
    """Build the weather field for a request: uniform | jet | csv:<path>.

    Synthetic fields cover the route bounding box with generous padding
    so guide rollouts cannot leave the domain.
    """
    lat_min = min(origin.lat_deg, destination.lat_deg)
    lat_max = max(origin.lat_deg, destination.lat_deg)
    lon_min = min(origin.lon_deg, destination.lon_deg)
    lon_max = max(origin.lon_deg, destination.lon_deg)
    trip_deg = great_circle_distance(origin, destination) / 111_000.0
    pad = max(5.0, 1.2 * trip_deg)
    bbox = (max(lat_min - pad, -89.0), min(lat_max + pad, 89.0),
            max(lon_min - pad, -179.0), min(lon_max + pad, 179.0))
    if spec_text == "uniform":
        return make_uniform(0.0, 0.0, ISA_TEMPERATURE_K, bbox)
    if spec_text == "jet":
        core_lat = 0.5 * (origin.lat_deg + destination.lat_deg) + 1.5
        return make_jet_stream(bbox, core_lat=core_lat, core_speed=40.0,
                               half_width=4.0, seed=seed)
    if spec_text.startswith("csv:"):
        return load_csv(spec_text[4:])
    raise ConfigError(f"unknown weather source: {spec_text!r} "
                      "(expected uniform | jet | csv:<path>)")


def _guide_route(req: PlanRequest, field: WeatherField):
    cfg = GuideConfig(n=req.n_waypoints, guide_kind=req.guide_kind)
    params: PolicyParams | None = None
    if req.guide_kind == "policy":
        if not req.checkpoint:
            raise ConfigError("policy guide requires a checkpoint path")
        params, ck_cfg = load_checkpoint(req.checkpoint)
        cfg = GuideConfig(n=ck_cfg.n, guide_kind="policy",
                          wind_scale_ms=ck_cfg.wind_scale_ms,
                          temp_scale_k=ck_cfg.temp_scale_k)
    alts = [req.origin.alt_m] * cfg.n
    return roll_out(cfg, params, req.origin, req.destination, field, alts)


def plan(req: PlanRequest, field: WeatherField | None = None) -> dict:
    """Run the full pipeline for one request and return the route summary."""
    field = field or make_weather(req.weather, req.origin, req.destination,
                                  req.seed)
    I, J, H = req.dims
    halfwidth = req.lateral_halfwidth_m
    if halfwidth is None:
        halfwidth = DEFAULT_LATERAL_FRACTION * great_circle_distance(
            req.origin, req.destination)
    lattice = build_lattice(req.origin, req.destination, I, J, H, halfwidth,
                            req.alt_band)
    initial = AircraftState(req.origin, req.aircraft.ref_mass_kg)

    guide_time = 0.0
    corridor_time = 0.0
    corridor = None
    if not req.unconstrained:
        t0 = time.perf_counter()
        coarse = _guide_route(req, field)
        guide_time = time.perf_counter() - t0
        t0 = time.perf_counter()
        corridor = build_corridor(lattice, coarse, req.width)
        corridor_time = time.perf_counter() - t0

    result = astar(lattice, corridor, req.aircraft, initial, field,
                   req.substeps)

    segments = []
    state = AircraftState(result.geo_path[0], initial.mass_kg)
    for wp in result.geo_path[1:]:
        seg = fly_segment(req.aircraft, state, wp, field, req.substeps)
        segments.append({"fuel_kg": seg.fuel_kg, "time_s": seg.time_s})
        state = seg.end_state

    return {
        "request": {
            "origin": [req.origin.lat_deg, req.origin.lon_deg, req.origin.alt_m],
            "destination": [req.destination.lat_deg, req.destination.lon_deg,
                            req.destination.alt_m],
            "dims": list(req.dims),
            "width": None if req.unconstrained else req.width,
            "guide_kind": None if req.unconstrained else req.guide_kind,
            "weather": req.weather,
            "substeps": req.substeps,
            "seed": req.seed,
        },
        "waypoints": [{"lat_deg": p.lat_deg, "lon_deg": p.lon_deg,
                       "alt_m": p.alt_m} for p in result.geo_path],
        "segments": segments,
        "totals": {"fuel_kg": result.total_fuel_kg,
                   "search_cost_kg": result.search_cost_kg},
        "search": {"expanded_nodes": result.expanded_nodes,
                   "generated_nodes": result.generated_nodes},
        "timings": {"guide_s": guide_time, "corridor_s": corridor_time,
                    "search_s": result.wall_time_s,
                    "total_s": guide_time + corridor_time + result.wall_time_s},
    }


def route_json_without_timings(doc: dict) -> str:
    """Canonical serialization with wall-time fields removed."""
    trimmed = {k: v for k, v in doc.items() if k not in TIMING_KEYS}
    return json.dumps(trimmed, sort_keys=True)


def _run_pair(req: PlanRequest, field: WeatherField) -> tuple[dict, dict]:
    """(solver, hybrid) plan results on the same lattice configuration."""
    solver_req = PlanRequest(**{**req.__dict__, "unconstrained": True})
    solver = plan(solver_req, field)
    hybrid = plan(req, field)
    return solver, hybrid


def _mean(xs):
    return sum(xs) / len(xs)


def _std(xs):
    return statistics.pstdev(xs) if len(xs) > 1 else 0.0


def _bench_rows(requests: list[PlanRequest], param_values: list[int],
                apply_param, repetitions: int = 1,
                extra_fuel_columns: bool = False) -> list[dict]:
    rows = []
    for value in param_values:
        solver_times, hybrid_times, guide_times = [], [], []
        fuel_solver, fuel_hybrid = [], []
        exp_solver, exp_hybrid = [], []
        per_route_fuel = []
        failures = 0
        for req in requests:
            req_v = apply_param(req, value)
            field = make_weather(req_v.weather, req_v.origin,
                                 req_v.destination, req_v.seed)
            route_fuels = []
            for _ in range(repetitions):
                try:
                    solver, hybrid = _run_pair(req_v, field)
                except Exception:
                    failures += 1
                    continue
                solver_times.append(solver["timings"]["search_s"])
                hybrid_times.append(hybrid["timings"]["total_s"])
                guide_times.append(hybrid["timings"]["guide_s"])
                fuel_solver.append(solver["totals"]["fuel_kg"])
                fuel_hybrid.append(hybrid["totals"]["fuel_kg"])
                exp_solver.append(solver["search"]["expanded_nodes"])
                exp_hybrid.append(hybrid["search"]["expanded_nodes"])
                route_fuels.append(hybrid["totals"]["fuel_kg"])
            if route_fuels:
                per_route_fuel.append(_mean(route_fuels))
        if not solver_times:
            rows.append({"param_value": value, "failures": failures})
            continue
        st, ht = _mean(solver_times), _mean(hybrid_times)
        row = {
            "param_value": value,
            "solver_time_s": st,
            "solver_time_std": _std(solver_times),
            "hybrid_time_s": ht,
            "hybrid_time_std": _std(hybrid_times),
            "guide_time_s": _mean(guide_times),
            "fuel_solver_kg": _mean(fuel_solver),
            "fuel_hybrid_kg": _mean(fuel_hybrid),
            "expanded_solver": _mean(exp_solver),
            "expanded_hybrid": _mean(exp_hybrid),
            "pct_diff": (ht - st) / st * 100.0,
        }
        if failures:
            row["failures"] = failures
        if extra_fuel_columns and len(requests) == 2 and len(per_route_fuel) == 2:
            row["fuel_route1_kg"] = per_route_fuel[0]
            row["fuel_route2_kg"] = per_route_fuel[1]
        rows.append(row)
    return rows


def bench_fwd(requests: list[PlanRequest],
              fwd_list: list[int] | None = None,
              repetitions: int = 1) -> list[dict]:
    """Sweep the number of forward rows at fixed J, H, and width."""
    fwd_list = fwd_list or list(range(11, 52, 5))

    def apply(req: PlanRequest, fwd: int) -> PlanRequest:
        return PlanRequest(**{**req.__dict__,
                              "dims": (fwd, req.dims[1], req.dims[2])})

    return _bench_rows(requests, fwd_list, apply, repetitions)


def bench_width(requests: list[PlanRequest],
                w_list: list[int] | None = None,
                repetitions: int = 1) -> list[dict]:
    """Sweep the corridor width at fixed lattice dims.

    The solver baseline is the full-width (w = J) hybrid run, whose graph
    coincides with the unconstrained one, so the w = J row has pct_diff 0
    by construction. With exactly two requests, per-route fuel columns
    are added so short/long-trip plateaus can be compared side by side.
    """
    J = requests[0].dims[1] if requests else DEFAULT_DIMS[1]
    w_list = w_list or list(range(1, J + 1))

    baselines = []
    fields = []
    for req in requests:
        field = make_weather(req.weather, req.origin, req.destination, req.seed)
        fields.append(field)
        base_req = PlanRequest(**{**req.__dict__, "width": req.dims[1]})
        baselines.append(plan(base_req, field))

    rows = []
    for w in w_list:
        hybrid_times, guide_times = [], []
        solver_times, fuel_solver, fuel_hybrid = [], [], []
        exp_solver, exp_hybrid = [], []
        per_route_fuel = []
        failures = 0
        for req, field, base in zip(requests, fields, baselines):
            req_w = PlanRequest(**{**req.__dict__, "width": w})
            route_fuels = []
            for rep in range(repetitions):
                try:
                    if w == req.dims[1] and rep == 0:
                        hybrid = base
                    else:
                        hybrid = plan(req_w, field)
                except Exception:
                    failures += 1
                    continue
                solver_times.append(base["timings"]["total_s"])
                hybrid_times.append(hybrid["timings"]["total_s"])
                guide_times.append(hybrid["timings"]["guide_s"])
                fuel_solver.append(base["totals"]["fuel_kg"])
                fuel_hybrid.append(hybrid["totals"]["fuel_kg"])
                exp_solver.append(base["search"]["expanded_nodes"])
                exp_hybrid.append(hybrid["search"]["expanded_nodes"])
                route_fuels.append(hybrid["totals"]["fuel_kg"])
            if route_fuels:
                per_route_fuel.append(_mean(route_fuels))
        if not hybrid_times:
            rows.append({"param_value": w, "failures": failures})
            continue
        st, ht = _mean(solver_times), _mean(hybrid_times)
        row = {
            "param_value": w,
            "solver_time_s": st,
            "solver_time_std": _std(solver_times),
            "hybrid_time_s": ht,
            "hybrid_time_std": _std(hybrid_times),
            "guide_time_s": _mean(guide_times),
            "fuel_solver_kg": _mean(fuel_solver),
            "fuel_hybrid_kg": _mean(fuel_hybrid),
            "expanded_solver": _mean(exp_solver),
            "expanded_hybrid": _mean(exp_hybrid),
            "pct_diff": 0.0 if w == J and repetitions == 1
                        else (ht - st) / st * 100.0,
        }
        if failures:
            row["failures"] = failures
        if len(requests) == 2 and len(per_route_fuel) == 2:
            row["fuel_route1_kg"] = per_route_fuel[0]
            row["fuel_route2_kg"] = per_route_fuel[1]
        rows.append(row)
    return rows


def write_bench_csv(rows: list[dict], path: str) -> None:
    """Schema-stable CSV; optional columns appended after the fixed set."""
    extra = [k for k in ("fuel_route1_kg", "fuel_route2_kg", "failures")
             if any(k in r for r in rows)]
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=BENCH_COLUMNS + extra,
                                restval="")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in BENCH_COLUMNS + extra})


def read_bench_csv(path: str) -> list[dict]:
    """Parse a benchmark CSV back into typed rows (round-trip partner)."""
    out = []
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            typed = {}
            for k, v in row.items():
                if v == "" or v is None:
                    continue
                typed[k] = int(v) if k in ("param_value", "failures") \
                    else float(v)
            out.append(typed)
    return out


def default_requests(weather: str = "jet", seed: int = 0,
                     **overrides) -> list[PlanRequest]:
    """The shipped 5-route benchmark set (airport pairs, defaults per plan)."""
    reqs = []
    for a, b in DEFAULT_ROUTE_SET:
        reqs.append(PlanRequest(origin=resolve_point(a),
                                destination=resolve_point(b),
                                weather=weather, seed=seed, **overrides))
    return reqs
