"""Plan one route three ways and compare the search effort.

Runs the unconstrained solver, then the corridor-guided hybrid at the
default width, then a very narrow corridor, all on the same Munich to
Berlin instance under a synthetic jet stream. Prints fuel, expanded
node counts, and the resulting waypoints.

Run with:  python3 demos/plan_route.py
"""

from skyroute import GeoPoint, PlanRequest, make_weather, plan

MUNICH = GeoPoint(48.35, 11.79, 10_000)
BERLIN = GeoPoint(52.37, 13.52, 10_000)


def show(label, doc):
    totals, search = doc["totals"], doc["search"]
    print(f"{label:>14}: fuel {totals['fuel_kg']:9.2f} kg, "
          f"expanded {search['expanded_nodes']:5d} nodes, "
          f"search {doc['timings']['search_s'] * 1000:6.1f} ms")


def main():
    # One shared weather field so all three runs see the same wind.
    field = make_weather("jet", MUNICH, BERLIN, seed=7)

    base = dict(origin=MUNICH, destination=BERLIN, weather="jet", seed=7)
    solver = plan(PlanRequest(**base, unconstrained=True), field)
    hybrid = plan(PlanRequest(**base, width=5), field)
    narrow = plan(PlanRequest(**base, width=1), field)

    print("Munich -> Berlin, 41x11x3 lattice, jet-stream weather\n")
    show("unconstrained", solver)
    show("hybrid w=5", hybrid)
    show("hybrid w=1", narrow)

    ratio = hybrid["search"]["expanded_nodes"] / solver["search"]["expanded_nodes"]
    print(f"\nhybrid w=5 expands {ratio:.0%} of the solver's nodes "
          f"while matching its fuel to "
          f"{hybrid['totals']['fuel_kg'] / solver['totals']['fuel_kg'] - 1:+.3%}.")

    print("\nhybrid w=5 waypoints (lat, lon, alt):")
    for wp in hybrid["waypoints"]:
        print(f"  {wp['lat_deg']:8.4f}  {wp['lon_deg']:8.4f}  {wp['alt_m']:7.0f}")


if __name__ == "__main__":
    main()
