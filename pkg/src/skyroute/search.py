"""A* over the (optionally corridor-masked) lattice, plus a DP oracle.

Edge costs come from the performance model evaluated at a precomputed
per-row nominal mass (A* needs state-independent edge costs); the
winning path is then re-flown with threaded mass for the reported fuel.
The heuristic is a provable lower bound on remaining fuel per meter,
so the search is optimal within the graph it is given.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass

from .errors import NoPath
from .geo import GeoPoint, great_circle_distance
from .lattice import Corridor, Lattice, NodeIndex, is_reachable, successors
from .perfmodel import (AircraftSpec, AircraftState, fly_segment, route_cost,
                        DEFAULT_SUBSTEPS)
from .weather import WeatherField


@dataclass
class SearchResult:
    """Optimal path plus search-effort statistics."""

    node_path: list[NodeIndex]
    geo_path: list[GeoPoint]
    total_fuel_kg: float       # winning path re-flown with threaded mass
    search_cost_kg: float      # objective value under nominal-mass edge costs
    expanded_nodes: int
    generated_nodes: int
    wall_time_s: float
    final_state: AircraftState


def nominal_mass_profile(lattice: Lattice, spec: AircraftSpec,
                         initial_state: AircraftState, field: WeatherField,
                         substeps: int) -> list[float]:
    """Mass at the start of each row, estimated by flying the centerline."""
    I, _J, _H = lattice.dims
    cj, ch = lattice.center_column, lattice.center_level
    masses = [initial_state.mass_kg]
    state = AircraftState(lattice.node((0, cj, ch)), initial_state.mass_kg)
    for i in range(1, I):
        result = fly_segment(spec, state, lattice.node((i, cj, ch)), field, substeps)
        state = result.end_state
        masses.append(state.mass_kg)
    return masses


def min_specific_burn(spec: AircraftSpec, field: WeatherField) -> float:
    """Lower bound on fuel per meter of ground distance, from field extremes."""
    w_max = field.max_wind_speed()
    dt_max = field.max_temp_deviation()
    flow_min = (spec.base_fuel_flow_kgps
                * (spec.empty_mass_kg / spec.ref_mass_kg) ** spec.mass_exponent
                * max(0.0, 1.0 - abs(spec.temp_sensitivity) * dt_max))
    return flow_min / (spec.tas_ms + w_max)


class _EdgeCoster:
    """Caches nominal-mass edge costs keyed by (from, to) node indices."""

    def __init__(self, lattice: Lattice, spec: AircraftSpec, masses: list[float],
                 field: WeatherField, substeps: int):
        self.lattice = lattice
        self.spec = spec
        self.masses = masses
        self.field = field
        self.substeps = substeps
        self.cache: dict[tuple[NodeIndex, NodeIndex], float] = {}

    def cost(self, u: NodeIndex, v: NodeIndex) -> float:
        key = (u, v)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        state = AircraftState(self.lattice.node(u), self.masses[u[0]])
        fuel = fly_segment(self.spec, state, self.lattice.node(v),
                           self.field, self.substeps).fuel_kg
        self.cache[key] = fuel
        return fuel


def _start_and_goal(lattice: Lattice, corridor: Corridor | None):
    if corridor is not None:
        start = corridor.start_node
    else:
        start = (0, lattice.center_column, lattice.center_level)
    goal = (lattice.dims[0] - 1, lattice.center_column, lattice.center_level)
    return start, goal


def _finish(lattice: Lattice, spec: AircraftSpec, initial_state: AircraftState,
            field: WeatherField, substeps: int, node_path: list[NodeIndex],
            search_cost: float, expanded: int, generated: int,
            t0: float) -> SearchResult:
    geo_path = [lattice.node(idx) for idx in node_path]
    fuel, final_state = route_cost(spec, AircraftState(geo_path[0], initial_state.mass_kg),
                                   geo_path, field, substeps)
    return SearchResult(node_path, geo_path, fuel, search_cost, expanded,
                        generated, time.perf_counter() - t0, final_state)


def astar(lattice: Lattice, corridor: Corridor | None, spec: AircraftSpec,
          initial_state: AircraftState, field: WeatherField,
          substeps: int = DEFAULT_SUBSTEPS) -> SearchResult:
    """Minimum-fuel path under nominal-mass edge costs.

    Ties on f are broken toward larger g (deeper nodes), then smaller j,
    then smaller h, for run-to-run determinism.
    """
    t0 = time.perf_counter()
    I = lattice.dims[0]
    masses = nominal_mass_profile(lattice, spec, initial_state, field, substeps)
    coster = _EdgeCoster(lattice, spec, masses, field, substeps)
    msb = min_specific_burn(spec, field)
    start, goal = _start_and_goal(lattice, corridor)

    def heuristic(idx: NodeIndex) -> float:
        if idx == goal:
            return 0.0
        return great_circle_distance(lattice.node(idx), lattice.destination) * msb

    g_score: dict[NodeIndex, float] = {start: 0.0}
    parent: dict[NodeIndex, NodeIndex] = {}
    closed: set[NodeIndex] = set()
    open_heap: list[tuple] = []
    heapq.heappush(open_heap, (heuristic(start), 0.0, start[1], start[2], start))
    expanded = 0
    generated = 1

    while open_heap:
        f, neg_g, _j, _h, u = heapq.heappop(open_heap)
        if u in closed:
            continue
        if -neg_g > g_score.get(u, float("inf")):
            continue
        closed.add(u)
        expanded += 1
        if u == goal:
            path = [u]
            while path[-1] != start:
                path.append(parent[path[-1]])
            path.reverse()
            return _finish(lattice, spec, initial_state, field, substeps,
                           path, g_score[goal], expanded, generated, t0)
        for v in successors(lattice, u):
            if corridor is not None and not is_reachable(corridor, v, I):
                continue
            if v in closed:
                continue
            g_new = g_score[u] + coster.cost(u, v)
            if g_new < g_score.get(v, float("inf")):
                g_score[v] = g_new
                parent[v] = u
                heapq.heappush(open_heap,
                               (g_new + heuristic(v), -g_new, v[1], v[2], v))
                generated += 1
    raise NoPath("corridor disconnects origin from destination")


def dp_oracle(lattice: Lattice, corridor: Corridor | None, spec: AircraftSpec,
              initial_state: AircraftState, field: WeatherField,
              substeps: int = DEFAULT_SUBSTEPS) -> SearchResult:
    """Exhaustive layer-by-layer dynamic program over the same edge costs."""
    I, J, H = lattice.dims
    if I * J * H > 50_000:
        raise ValueError("dp_oracle limited to I*J*H <= 50,000")
    t0 = time.perf_counter()
    masses = nominal_mass_profile(lattice, spec, initial_state, field, substeps)
    coster = _EdgeCoster(lattice, spec, masses, field, substeps)
    start, goal = _start_and_goal(lattice, corridor)

    best: dict[NodeIndex, float] = {start: 0.0}
    parent: dict[NodeIndex, NodeIndex] = {}
    expanded = 0
    generated = 0
    for i in range(I - 1):
        layer = sorted(idx for idx in best if idx[0] == i)
        for u in layer:
            expanded += 1
            for v in successors(lattice, u):
                if corridor is not None and not is_reachable(corridor, v, I):
                    continue
                g_new = best[u] + coster.cost(u, v)
                generated += 1
                if g_new < best.get(v, float("inf")):
                    best[v] = g_new
                    parent[v] = u
    if goal not in best:
        raise NoPath("corridor disconnects origin from destination")
    path = [goal]
    while path[-1] != start:
        path.append(parent[path[-1]])
    path.reverse()
    return _finish(lattice, spec, initial_state, field, substeps,
                   path, best[goal], expanded, generated, t0)
