"""``bobtail`` command line.

Configuration layers, lowest first: model defaults (several seeded from
``BOBTAIL_*`` settings), an optional dotenv-style ``key=value`` file given with
``--config``, then flags. The resolved config is echoed into
every result file header.
"""

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, NamedTuple

import pydash
from dotenv import dotenv_values
from pydantic import ValidationError

from bobtaillab.__version__ import __version__
from bobtaillab.apps.selfcheck import run_selfcheck
from bobtaillab.core import BobtailError, ConfigError, ConvergenceError, DomainError, settings
from bobtaillab.helpers.rng import entropy_seed
from bobtaillab.protocol.types import RewardParams
from bobtaillab.repositories.results import write_results
from bobtaillab.schemas.experiments import AttackConfig, BlocktimeModel, Command, ExperimentConfig, OutputFormat
from bobtaillab.schemas.results import (
    AttackRow,
    BlocktimeRow,
    CheckRow,
    MomentsRow,
    OrphanRow,
    ResultRow,
    RewardRow,
    TrafficRow,
)
from bobtaillab.simulations.attacks import (
    simulate_dor,
    simulate_doublespend,
    simulate_selfish_mining,
    simulate_withholding,
    simulate_zczc,
)
from bobtaillab.simulations.mining import (
    MinerSpec,
    rank_time_correlation,
    run_blocktime_experiment,
    run_moments_experiment,
    run_reward_experiment,
)
from bobtaillab.simulations.network import run_orphan_experiment, run_traffic_experiment, traced_orphan_trial
from bobtaillab.stats.params import MiningParams
from bobtaillab.utils import setup_logger

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_SELFCHECK = 4

LIST_FIELDS = frozenset({"k", "q", "z", "x", "split"})
RUN_CONTROL = ("config", "verbose", "log_file")


class Outcome(NamedTuple):
    """Rows for the main result file plus any companion files keyed by suffix"""

    rows: list[ResultRow]
    row_type: type[ResultRow]
    extra: dict[str, list[ResultRow]] = {}


def _csv_list(value: str) -> list[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def read_config_file(path: Path) -> dict[str, Any]:
    """Dotenv-style ``key=value`` file; ``#`` comments and quoting follow python-dotenv, keys may use dashes"""
    if not path.is_file():
        raise ConfigError(f"cannot read config file {path}: no such file")
    try:
        raw = dotenv_values(path, encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    values: dict[str, Any] = {}
    for key, value in raw.items():
        if value is None:
            raise ConfigError(f"{path}: expected key=value, got {key!r}")
        key = key.replace("-", "_")
        values[key] = _csv_list(value) if key in LIST_FIELDS else value
    return values


def _replace_lists(dest: Any, src: Any, *_: Any) -> Any:
    return src if isinstance(src, list) else None


def resolve_config(flags: dict[str, Any]) -> ExperimentConfig:
    """Merge the config file under the flags and validate; seeds drawn from entropy when absent"""
    file_values = read_config_file(Path(flags["config"])) if flags.get("config") else {}
    given = {key: value for key, value in flags.items() if key not in RUN_CONTROL}
    merged = pydash.merge_with({}, file_values, given, _replace_lists)
    if merged.get("seed") is None:
        merged["seed"] = entropy_seed()
        logger.info(f"No --seed given; using {merged['seed']}")
    try:
        return ExperimentConfig.model_validate(merged)
    except ValidationError as e:
        raise ConfigError(str(e)) from e


def _add_common(parser: argparse.ArgumentParser) -> None:
    s = argparse.SUPPRESS
    parser.add_argument("--config", default=s, help="key=value file of defaults")
    parser.add_argument("--seed", type=int, default=s, help="master seed; drawn from entropy if omitted")
    parser.add_argument("--trials", type=int, default=s)
    parser.add_argument("--jobs", type=int, default=s, help="worker processes")
    parser.add_argument("--output", default=s, help=f"result file (default under ${{BOBTAIL_OUTPUT_DIR}}, now {settings.output_dir})")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=s)
    parser.add_argument("--log-file", dest="log_file", default=s)
    parser.add_argument("--verbose", "-v", action="store_true", default=s)


def build_parser() -> argparse.ArgumentParser:
    s = argparse.SUPPRESS
    parser = argparse.ArgumentParser(prog="bobtail", description="Bobtail proof-of-work experiments")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def command(name: Command, help_text: str, *, ks: bool = True) -> argparse.ArgumentParser:
        sub = commands.add_parser(name.value, help=help_text)
        _add_common(sub)
        if ks:
            sub.add_argument("--k", type=_csv_list, default=s, help="comma-separated k values")
        return sub

    sub = command(Command.BLOCKTIME, "block-time mean, variance and CDF per k")
    sub.add_argument("--model", choices=[m.value for m in BlocktimeModel], default=s)

    command(Command.MOMENTS, "mean and variance of W_k against closed forms")

    sub = command(Command.TRAFFIC, "proofs announced per block under the broadcast filter")
    sub.add_argument("--p", type=float, default=s)
    sub.add_argument("--h", type=int, default=s, help="hashes per interval")

    sub = command(Command.ORPHANS, "orphan rate with propagation delay")
    sub.add_argument("--tau", type=float, default=s, help="propagation delay, seconds")
    sub.add_argument("--T", dest="T", type=float, default=s, help="block interval, seconds")
    sub.add_argument("--n-miners", dest="n_miners", type=int, default=s)
    sub.add_argument("--no-rules", dest="rules", action="store_false", default=s, help="disable orphan prevention rules")
    sub.add_argument("--p", type=float, default=s)
    sub.add_argument("--trace", default=s, help="write the event trace of trial 0 to this file")

    sub = command(Command.REWARDS, "per-miner R and B earnings")
    sub.add_argument("--x", type=_csv_list, default=s, help="comma-separated hash fractions")
    sub.add_argument("--R", dest="R", type=float, default=s)
    sub.add_argument("--B", dest="B", type=float, default=s)
    sub.add_argument("--rank-time", dest="rank_time", action="store_true", default=s)

    sub = command(Command.DOUBLESPEND, "doublespend success against an embargo of z blocks")
    sub.add_argument("--q", type=_csv_list, default=s)
    sub.add_argument("--z", type=_csv_list, default=s)
    sub.add_argument("--reuse-first-block", dest="reuse_first_block", action="store_true", default=s)

    sub = command(Command.SELFISH, "selfish mining main-chain share")
    sub.add_argument("--q", type=_csv_list, default=s)
    sub.add_argument("--horizon", type=int, default=s, help="main-chain blocks per trial")

    sub = command(Command.WITHHOLDING, "proof withholding rewards")
    sub.add_argument("--q", type=_csv_list, default=s)
    sub.add_argument("--R", dest="R", type=float, default=s)
    sub.add_argument("--B", dest="B", type=float, default=s)
    sub.add_argument("--n-honest", dest="n_honest", type=int, default=s)
    sub.add_argument("--release-factor", dest="release_factor", type=float, default=s)

    sub = command(Command.ZCZC, "zero-confirmation doublespend with and without forfeiture")
    sub.add_argument("--q", type=_csv_list, default=s)
    sub.add_argument("--R", dest="R", type=float, default=s)
    sub.add_argument("--B", dest="B", type=float, default=s)

    sub = command(Command.DOR, "denial of reward: naive policy against the grace-period convention")
    sub.add_argument("--split", type=_csv_list, default=s)
    sub.add_argument("--latency", type=float, default=s, help="seconds")
    sub.add_argument("--grace", type=float, default=s, help="seconds")
    sub.add_argument("--release", type=float, default=s, help="fraction of the interval")
    sub.add_argument("--T", dest="T", type=float, default=s)

    command(Command.SELFCHECK, "closed forms against Monte Carlo oracles", ks=False)
    return parser


def _reward(config: ExperimentConfig) -> RewardParams:
    return RewardParams(R=str(config.R), B=str(config.B))


def _run_blocktime(config: ExperimentConfig) -> Outcome:
    result = run_blocktime_experiment(
        MiningParams.unit(config.k[0]), config.k, config.trials, config.seed, model=config.model, jobs=config.jobs
    )
    return Outcome(list(result.rows), BlocktimeRow, {"cdf": list(result.cdf)})


def _run_moments(config: ExperimentConfig) -> Outcome:
    rows = run_moments_experiment(MiningParams.unit(config.k[0]), config.k, config.trials, config.seed, jobs=config.jobs)
    return Outcome(list(rows), MomentsRow)


def _run_traffic(config: ExperimentConfig) -> Outcome:
    params = MiningParams.build(config.k[0], h=config.h)
    rows = [run_traffic_experiment(k, config.p, params, config.trials, config.seed, jobs=config.jobs) for k in config.k]
    return Outcome(list(rows), TrafficRow)


def _run_orphans(config: ExperimentConfig) -> Outcome:
    rows = [
        run_orphan_experiment(
            k, config.tau, config.T, config.n_miners, config.trials, config.seed, rules=config.rules, p=config.p, jobs=config.jobs
        )
        for k in config.k
    ]
    if config.trace is not None:
        traced = traced_orphan_trial(config.k[0], config.tau, config.T, config.n_miners, config.seed, rules=config.rules, p=config.p)
        config.trace.parent.mkdir(parents=True, exist_ok=True)
        config.trace.write_text("\n".join(traced.trace or []) + "\n", encoding="utf-8")
        logger.info(f"Event trace of trial 0 (k={config.k[0]}, digest {traced.trace_digest}) written to {config.trace}")
    return Outcome(list(rows), OrphanRow)


def _run_rewards(config: ExperimentConfig) -> Outcome:
    miners = [MinerSpec(id=f"m{i}", x=x) for i, x in enumerate(config.x)]
    rows: list[ResultRow] = []
    for k in config.k:
        rows.extend(run_reward_experiment(miners, MiningParams.unit(k), _reward(config), config.trials, config.seed, jobs=config.jobs))
    extra: dict[str, list[ResultRow]] = {}
    if config.rank_time:
        extra["rank-time"] = [
            rank_time_correlation(MiningParams.unit(k), config.trials, config.seed, sort_by_value=sort, jobs=config.jobs)
            for k in config.k
            if k >= 2
            for sort in (False, True)
        ]
    return Outcome(rows, RewardRow, extra)


def _attack_configs(config: ExperimentConfig, zs: Sequence[int] = (0,)) -> list[AttackConfig]:
    return [
        AttackConfig(q=q, k=k, z=z, trials=config.trials, seed=config.seed)
        for q in config.q
        for z in zs
        for k in config.k
    ]


def _run_doublespend(config: ExperimentConfig) -> Outcome:
    rows = [
        simulate_doublespend(cfg, reuse_first_block=config.reuse_first_block, jobs=config.jobs)
        for cfg in _attack_configs(config, config.z)
    ]
    return Outcome(list(rows), AttackRow)


def _run_selfish(config: ExperimentConfig) -> Outcome:
    rows = [simulate_selfish_mining(cfg, config.horizon, jobs=config.jobs) for cfg in _attack_configs(config)]
    return Outcome(list(rows), AttackRow)


def _run_withholding(config: ExperimentConfig) -> Outcome:
    rows: list[ResultRow] = []
    for cfg in _attack_configs(config):
        rows.extend(
            simulate_withholding(
                cfg, _reward(config), n_honest=config.n_honest, release_factor=config.release_factor, jobs=config.jobs
            )
        )
    return Outcome(rows, AttackRow)


def _run_zczc(config: ExperimentConfig) -> Outcome:
    rows: list[ResultRow] = []
    for cfg in _attack_configs(config):
        rows.extend(simulate_zczc(cfg, _reward(config), jobs=config.jobs))
    return Outcome(rows, AttackRow)


def _run_dor(config: ExperimentConfig) -> Outcome:
    ks = [k for k in config.k if k >= 2]
    if len(ks) < len(config.k):
        logger.warning("dor: skipping k=1, a single-proof block has nothing to forfeit")
    if not ks:
        raise DomainError("dor needs at least one k >= 2")
    rows: list[ResultRow] = []
    for split in config.split:
        for k in ks:
            rows.extend(
                simulate_dor(
                    split,
                    config.latency,
                    config.grace,
                    k,
                    config.trials,
                    config.seed,
                    release=config.release,
                    T=config.T,
                    jobs=config.jobs,
                )
            )
    return Outcome(rows, AttackRow)


def _run_selfcheck(config: ExperimentConfig) -> Outcome:
    return Outcome(list(run_selfcheck(config.seed, config.trials)), CheckRow)


DISPATCH: dict[Command, Callable[[ExperimentConfig], Outcome]] = {
    Command.BLOCKTIME: _run_blocktime,
    Command.MOMENTS: _run_moments,
    Command.TRAFFIC: _run_traffic,
    Command.ORPHANS: _run_orphans,
    Command.REWARDS: _run_rewards,
    Command.DOUBLESPEND: _run_doublespend,
    Command.SELFISH: _run_selfish,
    Command.WITHHOLDING: _run_withholding,
    Command.ZCZC: _run_zczc,
    Command.DOR: _run_dor,
    Command.SELFCHECK: _run_selfcheck,
}


def _companion(path: Path, suffix: str) -> Path:
    return path.with_name(f"{path.stem}-{suffix}{path.suffix}")


def _format_cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return "" if value is None else str(value)


def format_table(rows: Sequence[ResultRow]) -> str:
    """Aligned plain-text table of ``rows``"""
    if not rows:
        return "(no rows)"
    columns = type(rows[0]).columns()
    cells = [[_format_cell(getattr(row, c)) for c in columns] for row in rows]
    widths = [max(len(c), *(len(r[i]) for r in cells)) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines.extend("  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in cells)
    return "\n".join(lines)


def execute(config: ExperimentConfig) -> tuple[Outcome, Path]:
    """Run one configured experiment and write its result files"""
    outcome = DISPATCH[config.command](config)
    path = settings.resolve_output(config.output, default_name=config.default_name())
    header = config.to_dict(by_alias=False)
    write_results(outcome.rows, path, fmt=config.format, config=header, row_type=outcome.row_type)
    for suffix, rows in outcome.extra.items():
        if rows:
            write_results(rows, _companion(path, suffix), fmt=config.format, config=header)
    return outcome, path


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run the experiment and return the process exit code"""
    parser = build_parser()
    try:
        flags = vars(parser.parse_args(argv))
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK

    log_file = Path(flags["log_file"]) if flags.get("log_file") else settings.log_file
    level = "DEBUG" if flags.get("verbose") else settings.log_level
    setup_logger(str(flags.get("seed", "entropy")), flags["command"], level=level, log_file=log_file)

    try:
        config = resolve_config(flags)
        outcome, path = execute(config)
    except ConvergenceError as e:
        logger.error(f"Numeric failure: {e}")
        return EXIT_NUMERIC
    except (ConfigError, DomainError) as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"Cannot write results: {e}")
        return EXIT_USAGE
    except BobtailError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_UNEXPECTED
    except Exception:
        logger.exception("Unexpected error")
        return EXIT_UNEXPECTED

    print(format_table(outcome.rows))
    print(f"\nseed={config.seed} results={path}")
    if config.command is Command.SELFCHECK and not all(row.passed for row in outcome.rows if isinstance(row, CheckRow)):
        return EXIT_SELFCHECK
    return EXIT_OK


def main() -> int:
    return run(sys.argv[1:])
