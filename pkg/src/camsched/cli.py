"""Command-line front end: generate / schedule / solve / sweep / replay.

All commands are deterministic for a fixed seed; outputs carry no timestamps,
so reruns are byte-identical.  A single JSON config file can pre-set any
option; explicit flags override it.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .channel import EnvConfig, SpectrumConfig, build_channel_state
from .harness import (
    DEFAULT_SWEEP_VALUES,
    SWEEP_ANGLE,
    SWEEP_CAMERAS,
    SWEEP_DEFAULT_BITRATES,
    SWEEP_DISTANCE,
    SWEEP_OBJECTS,
    ExperimentConfig,
    generate_event_trace,
    run_sweep,
    run_timeline,
)
from .oracle import solve_exact
from .scenario import FeasibilityExhausted, GenParams, QoVWeights, generate_scenario
from .sched import InfeasibleError, ScheduleInstance, schedule_baseline, schedule_mqbs
from . import serialize

_VAR_BY_FLAG = {
    "objects": SWEEP_OBJECTS,
    "cameras": SWEEP_CAMERAS,
    "angle": SWEEP_ANGLE,
    "distance": SWEEP_DISTANCE,
}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, dict):
        raise ValueError("config file must hold a JSON object")
    return doc


def _pick(args_value, config: dict, section: str, key: str, default):
    if args_value is not None:
        return args_value
    return config.get(section, {}).get(key, default)


def _gen_params(args, config: dict, default_bitrates=(512_000.0, 1_000_000.0, 2_000_000.0)) -> GenParams:
    sec = "generate"
    angle_deg = _pick(args.angle, config, sec, "angle_of_view_deg", 150.0)
    weights_doc = config.get(sec, {}).get("weights", {})
    return GenParams(
        cell_radius=_pick(args.cell_radius, config, sec, "cell_radius", 250.0),
        num_cameras=_pick(args.cameras, config, sec, "cameras", 50),
        num_objects=_pick(args.objects, config, sec, "objects", 50),
        angle_of_view=math.radians(angle_deg),
        distance_of_view=_pick(args.distance, config, sec, "distance_of_view", 100.0),
        bitrates=tuple(_pick(args.bitrates, config, sec, "bitrates", list(default_bitrates))),
        best_distance=_pick(args.best_distance, config, sec, "best_distance", None),
        weights=serialize.weights_from_jsonable(weights_doc) if weights_doc else QoVWeights(),
    )


def _spectrum(args, config: dict) -> SpectrumConfig:
    return SpectrumConfig(
        total_rbs=_pick(args.total_rbs, config, "spectrum", "total_rbs", 48),
        sub_bands=_pick(args.sub_bands, config, "spectrum", "sub_bands", 4),
    )


def _env(args, config: dict, seed: int) -> EnvConfig:
    return EnvConfig(
        tx_power_dbm=_pick(args.tx_power, config, "env", "tx_power_dbm", 24.0),
        shadowing_sigma_db=_pick(args.shadowing_sigma, config, "env", "shadowing_sigma_db", 8.0),
        interference_dbm_per_subband=_pick(
            args.interference, config, "env", "interference_dbm_per_subband", -110.0
        ),
        noise_figure_db=_pick(args.noise_figure, config, "env", "noise_figure_db", 5.0),
        seed=seed,
    )


def _write_or_print(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------
def _cmd_generate(args) -> int:
    config = _load_config(args.config)
    params = _gen_params(args, config)
    spectrum = _spectrum(args, config)
    env = _env(args, config, args.seed)
    try:
        scenario = generate_scenario(params, args.seed)
    except FeasibilityExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    channel = build_channel_state(scenario, spectrum, env)
    inst = ScheduleInstance(scenario, channel, spectrum)
    _write_or_print(serialize.dumps(serialize.instance_to_jsonable(inst, env)), args.out)
    return 0


def _cmd_schedule(args) -> int:
    inst = serialize.load_instance(args.instance)
    try:
        alloc = schedule_mqbs(inst) if args.algo == "mqbs" else schedule_baseline(inst)
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    doc = {"algorithm": args.algo, **serialize.allocation_to_jsonable(alloc, inst.scenario)}
    _write_or_print(serialize.dumps(doc), args.out)
    if args.grid:
        print(alloc.format_grid())
    return 0


def _cmd_solve(args) -> int:
    inst = serialize.load_instance(args.instance)
    try:
        sol = solve_exact(inst, node_budget=args.budget)
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    doc = {
        "z_star": sol.z_star,
        "assignment": {str(k): m for k, m in sorted(sol.assignment.items())},
        "proven_optimal": sol.proven_optimal,
        "nodes_explored": sol.nodes_explored,
    }
    _write_or_print(serialize.dumps(doc), args.out)
    return 0


def _cmd_sweep(args) -> int:
    config = _load_config(args.config)
    variable = _VAR_BY_FLAG[args.var]
    values = tuple(float(v) for v in args.values) if args.values else tuple(
        config.get("sweep", {}).get("values", DEFAULT_SWEEP_VALUES[variable])
    )
    exp = ExperimentConfig(
        sweep_variable=variable,
        sweep_values=values,
        runs_per_point=_pick(args.runs, config, "sweep", "runs_per_point", 500),
        base_seed=_pick(args.seed, config, "sweep", "base_seed", 0),
        base_params=_gen_params(args, config, default_bitrates=SWEEP_DEFAULT_BITRATES),
        spectrum=_spectrum(args, config),
        env=_env(args, config, 0),
    )
    rows = run_sweep(exp, out_dir=args.out, workers=args.workers)
    print(f"wrote sweep_{variable}.csv with {len(rows)} rows to {args.out}")
    return 0


def _cmd_replay(args) -> int:
    inst = serialize.load_instance(args.instance)
    if args.events is not None:
        events = serialize.load_events(args.events)
    else:
        events = generate_event_trace(
            inst.spectrum,
            duration_ms=args.duration_ms or 60_000,
            seed=args.traffic_seed,
            arrival_rate_per_s=args.arrival_rate,
            mean_lifetime_ms=args.mean_lifetime_ms,
        )
    log = run_timeline(inst, events, period_ms=args.period_ms, duration_ms=args.duration_ms)
    text = "".join(json.dumps(rec) + "\n" for rec in log)
    _write_or_print(text, args.out)
    return 0


# ---------------------------------------------------------------------------
def _add_generate_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--cameras", type=int)
    p.add_argument("--objects", type=int)
    p.add_argument("--angle", type=float, help="angle of view, degrees")
    p.add_argument("--distance", type=float, help="distance of view, metres")
    p.add_argument("--cell-radius", dest="cell_radius", type=float)
    p.add_argument("--best-distance", dest="best_distance", type=float)
    p.add_argument("--bitrates", type=float, nargs="+")
    p.add_argument("--total-rbs", dest="total_rbs", type=int)
    p.add_argument("--sub-bands", dest="sub_bands", type=int)
    p.add_argument("--tx-power", dest="tx_power", type=float)
    p.add_argument("--shadowing-sigma", dest="shadowing_sigma", type=float)
    p.add_argument("--interference", type=float)
    p.add_argument("--noise-figure", dest="noise_figure", type=float)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="camsched",
        description="Uplink resource-block scheduling simulator for camera cells",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a feasible instance, write JSON")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", help="output file (stdout if omitted)")
    _add_generate_opts(p)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("schedule", help="run a scheduler on an instance file")
    p.add_argument("--instance", required=True)
    p.add_argument("--algo", choices=["mqbs", "baseline"], required=True)
    p.add_argument("--out")
    p.add_argument("--grid", action="store_true", help="also print the RB grid")
    p.set_defaults(func=_cmd_schedule)

    p = sub.add_parser("solve", help="exact optimum of a small instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--budget", type=int, default=10_000_000)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("sweep", help="parameter sweep, CSV output")
    p.add_argument("--var", choices=sorted(_VAR_BY_FLAG), required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--values", type=float, nargs="+")
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    _add_generate_opts(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("replay", help="replay an event trace with periodic rescheduling")
    p.add_argument("--instance", required=True)
    p.add_argument("--events", help="JSON event trace; synthesized when omitted")
    p.add_argument("--period-ms", dest="period_ms", type=int, default=10_000)
    p.add_argument("--duration-ms", dest="duration_ms", type=int)
    p.add_argument("--traffic-seed", dest="traffic_seed", type=int, default=0)
    p.add_argument("--arrival-rate", dest="arrival_rate", type=float, default=0.5)
    p.add_argument("--mean-lifetime-ms", dest="mean_lifetime_ms", type=float, default=5000.0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_replay)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
