"""Command-line entry point.

    fabs run SCENARIO [--trace PATH] [--format csv|jsonl] [--metrics PATH]
                      [--plot PATH --style tracks|snapshot]
    fabs check TRACE
    fabs metrics TRACE [--output PATH]
    fabs sweep SCENARIO [--seeds N] [--first-seed S] [--ticks T]

Exit status: 0 on success, 1 on validation or invariant failure, 2 on usage
error. A scenario or trace argument that does not name an existing file is a
usage error; failing to write an output file exits 1.
"""

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Optional

from app.core.config import settings
from app.core.errors import FabsError
from app.core.logging import configure_logging
from app.io.plotting import plot_tracks
from app.io.scenario import parse_scenario, resolve
from app.io.traces import ParsedTrace, build_metadata, export_metrics, export_trace, parse_trace
from app.sim.engine import check_trace, init_simulation, run, simulate
from app.sim.metrics import compute_tick_metrics
from app.sim.models import SimConfig

logger = logging.getLogger("app.cli")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _input_file(value: str) -> Path:
    path = Path(value)
    if not path.is_file():
        raise argparse.ArgumentTypeError(f"no such file: {value}")
    return path


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fabs", description="Boids flock monitored by proximity sensors")
    parser.add_argument("--log-level", default=settings.log_level)
    sub = parser.add_subparsers(dest="command", required=True)

    run_cmd = sub.add_parser("run", help="execute a scenario")
    run_cmd.add_argument("scenario", type=_input_file)
    run_cmd.add_argument("--trace", type=Path)
    run_cmd.add_argument("--format", choices=["csv", "jsonl"])
    run_cmd.add_argument("--metrics", type=Path)
    run_cmd.add_argument("--plot", type=Path)
    run_cmd.add_argument("--style", choices=["tracks", "snapshot"])

    check_cmd = sub.add_parser("check", help="re-validate every invariant over a stored trace")
    check_cmd.add_argument("trace", type=_input_file)

    metrics_cmd = sub.add_parser("metrics", help="recompute flocking metrics from a stored trace")
    metrics_cmd.add_argument("trace", type=_input_file)
    metrics_cmd.add_argument("--output", type=Path)

    sweep_cmd = sub.add_parser("sweep", help="compare unflocked and final states over several seeds")
    sweep_cmd.add_argument("scenario", type=_input_file)
    sweep_cmd.add_argument("--seeds", type=int, default=10)
    sweep_cmd.add_argument("--first-seed", type=int)
    sweep_cmd.add_argument("--ticks", type=int)
    return parser


def _trace_format(path: Path, explicit: Optional[str]) -> str:
    if explicit:
        return explicit
    return "jsonl" if path.suffix == ".jsonl" else "csv"


def _config_for(parsed: ParsedTrace) -> SimConfig:
    if parsed.metadata is not None:
        return parsed.metadata.config()
    logger.warning("Trace carries no metadata; assuming default world and flock parameters")
    return SimConfig(n_boids=len(parsed.traces[0].boids), seed=0, ticks=0)


def _cmd_run(args: argparse.Namespace) -> int:
    document = parse_scenario(args.scenario.read_text(encoding="utf-8"))
    config = resolve(document)
    traces = run(config)
    metadata = build_metadata(config)

    trace_path = args.trace or (Path(document.trace_path) if document.trace_path else None)
    if trace_path:
        fmt = _trace_format(trace_path, args.format or document.trace_format)
        trace_path.write_text(export_trace(traces, fmt, metadata), encoding="utf-8")
        logger.info("Wrote %s trace to %s", fmt, trace_path)

    rows = [compute_tick_metrics(row, config.flock_params, config.bounds) for row in traces]
    metrics_path = args.metrics or (Path(document.metrics_path) if document.metrics_path else None)
    if metrics_path:
        metrics_path.write_text(export_metrics(rows), encoding="utf-8")
        logger.info("Wrote metrics to %s", metrics_path)

    plot_path = args.plot or (Path(document.plot_path) if document.plot_path else None)
    if plot_path:
        style = args.style or document.plot_style
        plot_path.write_text(plot_tracks(traces, config.bounds, style), encoding="utf-8")
        logger.info("Wrote %s plot to %s", style, plot_path)

    print(json.dumps({"metadata": metadata.model_dump(), "final": rows[-1].model_dump()}, sort_keys=True))
    return EXIT_OK


def _cmd_check(args: argparse.Namespace) -> int:
    parsed = parse_trace(args.trace.read_text(encoding="utf-8"))
    violations = check_trace(parsed.traces, _config_for(parsed))
    for violation in violations:
        print(
            f"tick {violation.tick}: {violation.entity_kind} {violation.entity_id} "
            f"violates {violation.predicate}: {violation.detail}",
            file=sys.stderr,
        )
    if violations:
        return EXIT_FAILURE
    print(f"ok: {len(parsed.traces)} ticks, no violations")
    return EXIT_OK


def _cmd_metrics(args: argparse.Namespace) -> int:
    parsed = parse_trace(args.trace.read_text(encoding="utf-8"))
    config = _config_for(parsed)
    rows = [compute_tick_metrics(row, config.flock_params, config.bounds) for row in parsed.traces]
    output = export_metrics(rows)
    if args.output:
        args.output.write_text(output, encoding="utf-8")
    else:
        sys.stdout.write(output)
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = resolve(parse_scenario(args.scenario.read_text(encoding="utf-8")))
    first_seed = config.seed if args.first_seed is None else args.first_seed
    ticks = config.ticks if args.ticks is None else args.ticks
    print("seed,initial_mean_flockmates,final_mean_flockmates,ratio,final_mean_component_polarization")
    for seed in range(first_seed, first_seed + args.seeds):
        seeded = config.model_copy(update={"seed": seed, "ticks": ticks})
        initial = final = None
        for state in simulate(init_simulation(seeded), ticks):
            if initial is None:
                initial = compute_tick_metrics(state.to_trace(), seeded.flock_params, seeded.bounds)
            final = state
        last = compute_tick_metrics(final.to_trace(), seeded.flock_params, seeded.bounds)
        ratio = last.mean_flockmates / initial.mean_flockmates if initial.mean_flockmates else float("inf")
        print(
            f"{seed},{initial.mean_flockmates:.6f},{last.mean_flockmates:.6f},"
            f"{ratio:.6f},{last.mean_component_polarization:.6f}"
        )
    return EXIT_OK


COMMANDS = {"run": _cmd_run, "check": _cmd_check, "metrics": _cmd_metrics, "sweep": _cmd_sweep}


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    configure_logging(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except FabsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
