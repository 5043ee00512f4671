"""Command-line interface: predict, simulate, elicit, fit, select, report.

Exit codes: 0 success, 2 usage, 3 data, 4 auth/network-fatal.
"""
import argparse
import asyncio
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from prior_lens import __version__
from prior_lens.elicitation import (
    REFERENCE_PRIORS,
    ElicitationRecord,
    Elicitor,
    ScriptedChatServer,
    load_scenarios,
)
from prior_lens.fitting import FitResult, ModelRanking, select_model
from prior_lens.priors import (
    ErlangPrior,
    GaussianPrior,
    PowerLawPrior,
    PriorSpec,
    TabulatedPrior,
    prediction_curve,
)
from prior_lens.report import build_scenario_report, write_report
from prior_lens.store import build_manifest, read_pairs, records_to_csv, write_fit, write_records, write_records_csv
from prior_lens.utils.config import Settings, get_settings
from prior_lens.utils.errors import DataFormatError, PriorLensError, UsageError

logger = logging.getLogger("prior_lens.cli")

FAMILY_ALIASES = {
    "powerlaw": "power-law",
    "power-law": "power-law",
    "erlang": "erlang",
    "gaussian": "gaussian",
    "tabulated": "tabulated",
}
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _add_prior_flags(parser: argparse.ArgumentParser, required: bool) -> None:
    group = parser.add_argument_group("prior")
    group.add_argument("--family", choices=sorted(FAMILY_ALIASES), required=required)
    group.add_argument("--gamma", type=float, help="power-law exponent")
    group.add_argument("--beta", type=float, help="Erlang scale")
    group.add_argument("--mu", type=float, help="Gaussian mean")
    group.add_argument("--sigma", type=float, help="Gaussian standard deviation")
    group.add_argument("--table", type=Path, help="CSV of x,density for a tabulated prior")


def prior_from_args(args: argparse.Namespace) -> PriorSpec:
    """Build the prior named by --family and its parameter flags."""
    family = FAMILY_ALIASES[args.family]
    needed = {
        "power-law": ("gamma",),
        "erlang": ("beta",),
        "gaussian": ("mu", "sigma"),
        "tabulated": ("table",),
    }[family]
    missing = [f"--{name}" for name in needed if getattr(args, name) is None]
    if missing:
        raise UsageError(f"--family {args.family} requires {', '.join(missing)}")
    if family == "power-law":
        return PowerLawPrior(gamma=args.gamma)
    if family == "erlang":
        return ErlangPrior(beta=args.beta)
    if family == "gaussian":
        return GaussianPrior(mu=args.mu, sigma=args.sigma)
    try:
        table = np.loadtxt(args.table, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as e:
        raise DataFormatError(f"{args.table}: not an x,density table: {e}") from e
    return TabulatedPrior(support=table[:, 0].tolist(), density=table[:, 1].tolist())


def _fixed_timestamp() -> datetime:
    epoch = int(os.environ.get("SOURCE_DATE_EPOCH", "0"))
    return datetime.fromtimestamp(epoch, tz=timezone.utc)


def cmd_predict(args: argparse.Namespace, settings: Settings) -> int:
    prior = prior_from_args(args)
    curve = prediction_curve(prior, args.t, settings.quadrature_config(), args.parallel)
    for pair in curve:
        print(f"{pair.t_star:.6g}")
    return 0


def cmd_simulate(args: argparse.Namespace, settings: Settings) -> int:
    if args.noise_sd < 0:
        raise UsageError("--noise-sd must be >= 0")
    scenario_id = args.scenario or "simulated"
    t_min, t_max, step = args.t_min, args.t_max, args.step
    if args.scenario:
        scenarios = load_scenarios(settings.scenarios_file)
        if args.scenario not in scenarios:
            raise UsageError(f"unknown scenario '{args.scenario}'")
        scenario = scenarios[args.scenario]
        t_min = t_min if t_min is not None else scenario.t_min
        t_max = t_max if t_max is not None else scenario.t_max
        step = step if step is not None else scenario.t_step
    if t_min is None or t_max is None:
        raise UsageError("--t-min and --t-max are required without --scenario")
    step = step or 1
    if t_min < 1 or t_max < t_min or step < 1:
        raise UsageError("need 1 <= --t-min <= --t-max and --step >= 1")

    if args.family:
        prior = prior_from_args(args)
    elif args.scenario in REFERENCE_PRIORS:
        prior = REFERENCE_PRIORS[args.scenario]
    else:
        raise UsageError("--family is required unless --scenario has a reference prior")

    t_values = list(range(t_min, t_max + 1, step))
    curve = prediction_curve(prior, t_values, settings.quadrature_config(), args.parallel)
    rng = np.random.default_rng(args.seed)
    timestamp = _fixed_timestamp()
    records = []
    for pair in curve:
        for replicate in range(args.replicates):
            noise = float(rng.normal(0.0, args.noise_sd)) if args.noise_sd > 0 else 0.0
            value = pair.t_star + noise
            records.append(
                ElicitationRecord.from_value(
                    value,
                    scenario_id=scenario_id,
                    t=int(pair.t),
                    replicate=replicate,
                    raw_response=repr(value),
                    model_id=f"simulated:{prior.family}",
                    timestamp=timestamp,
                )
            )
    if args.out:
        write_records_csv(records, args.out)
    else:
        sys.stdout.write(records_to_csv(records))
    return 0


def _print_ranking(label: str, ranking: ModelRanking) -> None:
    print(f"{label}: winner {ranking.best.family} {_format_params(ranking.best)}")
    for result in ranking:
        flag = " (boundary)" if result.boundary_flag else ""
        print(f"  {result.family:<10} {_format_params(result):<32} mse={result.mse:.6g} n={result.n}{flag}")
    for family, reason in ranking.excluded.items():
        print(f"  {family:<10} excluded: {reason}")
    if ranking.rejected:
        print(f"  rejected pairs: {ranking.rejected}")


def _format_params(result: FitResult) -> str:
    return " ".join(f"{name}={value:.6g}" for name, value in result.params.items())


def _rank(path: Path, scenario: Optional[str], settings: Settings, aggregation: str):
    dataset = read_pairs(path, aggregation, scenario)
    options = settings.fit_options().model_copy(update={"replicate_aggregation": aggregation})
    ranking = select_model(dataset.pairs, options, settings.quadrature_config())
    ranking.rejected += dataset.rejected
    label = scenario or ",".join(dataset.scenario_ids) or path.stem
    return label, dataset, ranking


def cmd_fit(args: argparse.Namespace, settings: Settings) -> int:
    label, dataset, ranking = _rank(args.input, args.scenario, settings, args.aggregation)
    out = args.out or args.input.with_suffix(".fit.json")
    write_fit(list(ranking), out)
    _print_ranking(label, ranking)
    print(f"fit written to {out}")
    if args.report:
        report = build_scenario_report(
            label, dataset.pairs, list(ranking), settings.quadrature_config()
        )
        write_report([report], args.report)
        print(f"report written to {args.report}")
    return 0


def cmd_select(args: argparse.Namespace, settings: Settings) -> int:
    label, _, ranking = _rank(args.input, args.scenario, settings, args.aggregation)
    _print_ranking(label, ranking)
    return 0


def cmd_report(args: argparse.Namespace, settings: Settings) -> int:
    bundle = []
    for path in args.inputs:
        scenario_ids = read_pairs(path, args.aggregation).scenario_ids
        for scenario_id in scenario_ids:
            label, dataset, ranking = _rank(path, scenario_id, settings, args.aggregation)
            _print_ranking(label, ranking)
            bundle.append(
                build_scenario_report(
                    label, dataset.pairs, list(ranking), settings.quadrature_config()
                )
            )
    for path in write_report(bundle, args.out):
        print(f"wrote {path}")
    return 0


def cmd_elicit(args: argparse.Namespace, settings: Settings) -> int:
    api_key = settings.require_api_key()
    scenarios = load_scenarios(args.scenarios_file)
    if args.scenario not in scenarios:
        raise UsageError(f"unknown scenario '{args.scenario}'")
    scenario = scenarios[args.scenario]
    if scenario.non_canonical:
        logger.warning(f"Scenario '{scenario.id}' uses a prompt known not to match it")

    settings = settings.model_copy(
        update={
            "endpoint_url": args.endpoint,
            "model_id": args.model,
            "temperature": args.temperature,
            "max_in_flight": args.max_in_flight,
            "retry_max": args.retry_max,
            "retry_base_delay": args.retry_base_delay,
            "timeout": args.timeout,
            "requests_per_minute": args.requests_per_minute,
            "replicates": args.replicates,
        }
    )
    client_config = settings.client_config()
    client = None
    if args.mock_script:
        client = ScriptedChatServer.from_file(args.mock_script).client(
            api_key, timeout=client_config.timeout
        )
    elicitor = Elicitor(client_config, api_key=api_key, client=client)
    records = asyncio.run(elicitor.run(scenario, args.replicates))

    manifest = build_manifest(
        scenario, client_config, args.replicates, settings.effective_config()
    )
    manifest_path, records_path = write_records(manifest, records, args.out)
    valid = sum(record.valid for record in records)
    print(f"{scenario.id}: {valid} valid, {len(records) - valid} invalid, {elicitor.retries} retries")
    print(f"records written to {records_path}")
    print(f"manifest written to {manifest_path}")
    return 0


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    """Argument parser whose defaults come from the loaded settings."""
    parser = argparse.ArgumentParser(
        prog="prior-lens",
        description="Bayesian predictions for everyday quantities and implicit-prior recovery.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=Path, help="YAML file of setting defaults")
    parser.add_argument(
        "--log-level", type=str.upper, default=settings.log_level.upper(),
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
    )
    parser.add_argument("--grid-points", type=int, default=settings.grid_points)
    parser.add_argument("--tail-mass-epsilon", type=float, default=settings.tail_mass_epsilon)
    parser.add_argument("--scenarios-file", type=Path, default=settings.scenarios_file)
    sub = parser.add_subparsers(dest="command", required=True)

    predict = sub.add_parser("predict", help="print posterior-median predictions")
    _add_prior_flags(predict, required=True)
    predict.add_argument("--t", type=float, nargs="+", required=True)
    predict.add_argument("--parallel", type=int, default=None, metavar="N")
    predict.set_defaults(handler=cmd_predict)

    simulate = sub.add_parser("simulate", help="emit synthetic records from a prior")
    _add_prior_flags(simulate, required=False)
    simulate.add_argument("--scenario", help="take the t grid (and prior) from a scenario")
    simulate.add_argument("--t-min", type=int)
    simulate.add_argument("--t-max", type=int)
    simulate.add_argument("--step", type=int)
    simulate.add_argument("--replicates", type=int, default=1)
    simulate.add_argument("--noise-sd", type=float, default=0.0)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--out", type=Path, help="records CSV (default stdout)")
    simulate.add_argument("--parallel", type=int, default=None, metavar="N")
    simulate.set_defaults(handler=cmd_simulate)

    for name, handler, help_text in (
        ("fit", cmd_fit, "fit all families and write the ranked results"),
        ("select", cmd_select, "print the ranked families for a records file"),
    ):
        command = sub.add_parser(name, help=help_text)
        command.add_argument("input", type=Path)
        command.add_argument("--scenario", help="use only rows of this scenario")
        command.add_argument(
            "--aggregation", choices=("median", "mean", "none"),
            default=settings.replicate_aggregation,
        )
        command.set_defaults(handler=handler)
        if name == "fit":
            command.add_argument("--out", type=Path, help="fit JSON (default <input>.fit.json)")
            command.add_argument("--report", type=Path, metavar="DIR")

    report = sub.add_parser("report", help="tables and SVG for one or more records files")
    report.add_argument("inputs", type=Path, nargs="+")
    report.add_argument("--out", type=Path, required=True, metavar="DIR")
    report.add_argument(
        "--aggregation", choices=("median", "mean", "none"),
        default=settings.replicate_aggregation,
    )
    report.set_defaults(handler=cmd_report)

    elicit = sub.add_parser("elicit", help="query a chat model over a scenario grid")
    elicit.add_argument("--scenario", required=True)
    elicit.add_argument("--endpoint", default=settings.endpoint_url)
    elicit.add_argument("--model", default=settings.model_id)
    elicit.add_argument("--temperature", type=float, default=settings.temperature)
    elicit.add_argument("--replicates", type=int, default=settings.replicates)
    elicit.add_argument("--max-in-flight", type=int, default=settings.max_in_flight)
    elicit.add_argument("--retry-max", type=int, default=settings.retry_max)
    elicit.add_argument("--retry-base-delay", type=float, default=settings.retry_base_delay)
    elicit.add_argument("--timeout", type=float, default=settings.timeout)
    elicit.add_argument("--requests-per-minute", type=float, default=settings.requests_per_minute)
    elicit.add_argument("--out", type=Path, default=Path("runs"), metavar="DIR")
    elicit.add_argument("--mock-script", type=Path, help="answer from a scripted chat server")
    elicit.set_defaults(handler=cmd_elicit)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return its exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path)
    known, _ = pre.parse_known_args(argv)
    try:
        settings = get_settings(known.config)
    except (ValidationError, PriorLensError, OSError) as e:
        print(f"error: invalid configuration: {e}", file=sys.stderr)
        return 2

    args = build_parser(settings).parse_args(argv)
    logging.basicConfig(level=args.log_level, format=LOG_FORMAT)
    logging.getLogger("prior_lens").setLevel(args.log_level)

    try:
        settings = settings.model_copy(
            update={
                "grid_points": args.grid_points,
                "tail_mass_epsilon": args.tail_mass_epsilon,
                "scenarios_file": args.scenarios_file,
            }
        )
        settings.quadrature_config()
        return args.handler(args, settings)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except PriorLensError as e:
        logger.debug("command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        logger.debug("command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return DataFormatError.exit_code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
