"""Sweep the corridor width and watch fuel plateau.

Reproduces the width-sensitivity experiment on two trips of different
lengths: as the corridor widens, fuel drops quickly and then flattens,
while the number of expanded nodes keeps growing. The full-width run
coincides exactly with the unconstrained solver.

Run with:  python3 demos/corridor_sweep.py
"""

from skyroute import GeoPoint, PlanRequest, bench_width

ROUTES = [
    ("Munich -> Berlin (~460 km)",
     GeoPoint(48.35, 11.79, 10_000), GeoPoint(52.37, 13.52, 10_000)),
    ("Barcelona -> Brussels (~1100 km)",
     GeoPoint(41.30, 2.08, 10_000), GeoPoint(50.90, 4.48, 10_000)),
]


def main():
    requests = [PlanRequest(origin=o, destination=d, weather="jet", seed=3,
                            substeps=1)
                for _label, o, d in ROUTES]
    rows = bench_width(requests)

    print("corridor width sweep, 41x11x3 lattice, jet-stream weather")
    print(f"{'w':>3} {'fuel short kg':>14} {'fuel long kg':>13} "
          f"{'expanded':>9} {'pct_diff':>9}")
    for row in rows:
        print(f"{row['param_value']:>3} {row['fuel_route1_kg']:>14.2f} "
              f"{row['fuel_route2_kg']:>13.2f} "
              f"{row['expanded_hybrid']:>9.0f} {row['pct_diff']:>8.2f}%")

    w5 = next(r for r in rows if r["param_value"] == 5)
    w11 = next(r for r in rows if r["param_value"] == 11)
    gap = abs(w5["fuel_hybrid_kg"] - w11["fuel_hybrid_kg"]) / w11["fuel_hybrid_kg"]
    print(f"\nfuel at w=5 sits within {gap:.4%} of the full-width optimum; "
          "widths past the plateau only buy more node expansions.")


if __name__ == "__main__":
    main()
