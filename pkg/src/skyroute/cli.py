"""Command line front-end: plan, train, bench-fwd, bench-width.

Exit codes: 0 success, 1 I/O error, 2 domain/config error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import SkyrouteError
from .harness import (DEFAULT_DIMS, DEFAULT_WIDTH, PlanRequest, bench_fwd,
                      bench_width, default_requests, plan, resolve_point,
                      write_bench_csv)
from .perfmodel import AircraftSpec, default_spec
from .trainer import TrainConfig, train, write_training_log


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".", help="directory for all outputs")


def _add_plan_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--origin", required=True,
                   help="airport code or 'lat,lon[,alt]'")
    p.add_argument("--destination", required=True,
                   help="airport code or 'lat,lon[,alt]'")
    p.add_argument("--fwd", type=int, default=DEFAULT_DIMS[0],
                   help="forward rows I")
    p.add_argument("--cols", type=int, default=DEFAULT_DIMS[1],
                   help="lateral columns J")
    p.add_argument("--levels", type=int, default=DEFAULT_DIMS[2],
                   help="altitude levels H")
    p.add_argument("--width", type=int, default=DEFAULT_WIDTH,
                   help="corridor width w in columns")
    p.add_argument("--guide", choices=["great_circle", "policy"],
                   default="great_circle")
    p.add_argument("--checkpoint", default=None,
                   help="policy checkpoint (required with --guide policy)")
    p.add_argument("--weather", default="uniform",
                   help="uniform | jet | csv:<path>")
    p.add_argument("--aircraft", default=None, help="aircraft spec JSON path")
    p.add_argument("--substeps", type=int, default=4)
    p.add_argument("--unconstrained", action="store_true",
                   help="skip guide/corridor; search the full lattice")


def _request_from_args(args) -> PlanRequest:
    aircraft = (AircraftSpec.from_json(args.aircraft) if args.aircraft
                else default_spec())
    return PlanRequest(
        origin=resolve_point(args.origin),
        destination=resolve_point(args.destination),
        dims=(args.fwd, args.cols, args.levels),
        width=args.width,
        guide_kind=args.guide,
        checkpoint=args.checkpoint,
        weather=args.weather,
        aircraft=aircraft,
        substeps=args.substeps,
        seed=args.seed,
        unconstrained=args.unconstrained,
    )


def _cmd_plan(args) -> int:
    doc = plan(_request_from_args(args))
    os.makedirs(args.out_dir, exist_ok=True)
    out_path = os.path.join(args.out_dir, "route.json")
    with open(out_path, "w", encoding="utf-8") as f:
        json.dump(doc, f, sort_keys=True, indent=2)
        f.write("\n")
    print(f"fuel {doc['totals']['fuel_kg']:.2f} kg, "
          f"expanded {doc['search']['expanded_nodes']} nodes, "
          f"wrote {out_path}")
    return 0


def _bench_requests(args) -> list[PlanRequest]:
    overrides = dict(dims=(args.fwd, args.cols, args.levels),
                     width=args.width, substeps=args.substeps,
                     guide_kind=args.guide, checkpoint=args.checkpoint)
    if args.routes:
        reqs = []
        for pair in args.routes:
            a, b = pair.split(":")
            reqs.append(PlanRequest(origin=resolve_point(a),
                                    destination=resolve_point(b),
                                    weather=args.weather, seed=args.seed,
                                    **overrides))
        return reqs
    return default_requests(weather=args.weather, seed=args.seed, **overrides)


def _cmd_bench_fwd(args) -> int:
    rows = bench_fwd(_bench_requests(args), args.fwd_list,
                     repetitions=args.repetitions)
    os.makedirs(args.out_dir, exist_ok=True)
    out_path = os.path.join(args.out_dir, "bench_fwd.csv")
    write_bench_csv(rows, out_path)
    print(f"wrote {out_path} ({len(rows)} rows)")
    return 0


def _cmd_bench_width(args) -> int:
    rows = bench_width(_bench_requests(args), args.w_list,
                       repetitions=args.repetitions)
    os.makedirs(args.out_dir, exist_ok=True)
    out_path = os.path.join(args.out_dir, "bench_width.csv")
    write_bench_csv(rows, out_path)
    print(f"wrote {out_path} ({len(rows)} rows)")
    return 0


def _cmd_train(args) -> int:
    with open(args.config, encoding="utf-8") as f:
        raw = json.load(f)
    if args.seed is not None and "seed" not in raw:
        raw["seed"] = args.seed
    cfg = TrainConfig.from_dict(raw)
    os.makedirs(args.out_dir, exist_ok=True)
    ckpt = os.path.join(args.out_dir, "policy.json")
    _params, log = train(cfg, progress_sink=print, checkpoint_path=ckpt)
    log_path = os.path.join(args.out_dir, "training_log.csv")
    write_training_log(log.rows, log_path)
    print(f"wrote {ckpt} and {log_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skyroute",
        description="Corridor-guided flight route optimization")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="plan a single route")
    _add_plan_args(p)
    _add_common(p)
    p.set_defaults(func=_cmd_plan)

    for name, func, extra in (
            ("bench-fwd", _cmd_bench_fwd, "fwd_list"),
            ("bench-width", _cmd_bench_width, "w_list")):
        p = sub.add_parser(name, help=f"sensitivity sweep ({extra})")
        p.add_argument("--routes", nargs="*", default=None,
                       help="route pairs like FRA:CDG (default: shipped set)")
        p.add_argument("--fwd", type=int, default=DEFAULT_DIMS[0])
        p.add_argument("--cols", type=int, default=DEFAULT_DIMS[1])
        p.add_argument("--levels", type=int, default=DEFAULT_DIMS[2])
        p.add_argument("--width", type=int, default=DEFAULT_WIDTH)
        p.add_argument("--guide", choices=["great_circle", "policy"],
                       default="great_circle")
        p.add_argument("--checkpoint", default=None)
        p.add_argument("--weather", default="jet")
        p.add_argument("--substeps", type=int, default=4)
        p.add_argument("--repetitions", type=int, default=1)
        if extra == "fwd_list":
            p.add_argument("--fwd-list", dest="fwd_list", type=int, nargs="*",
                           default=None)
        else:
            p.add_argument("--w-list", dest="w_list", type=int, nargs="*",
                           default=None)
        _add_common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("train", help="train the guide policy")
    p.add_argument("--config", required=True, help="TrainConfig JSON path")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_train)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SkyrouteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
