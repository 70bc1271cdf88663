# =============================================================================
# CLI.PY - COMMAND-LINE FRONT END
# =============================================================================
# One console script, "hpdiv", with a subcommand per task. Every command
# writes CSV (to --output or stdout) that starts with a comment line
# "# hpdiv <version> <flags>" and a header row.
#
# Exit codes:
#   0  success
#   1  bad data or input (missing column, unparsable cell, ...)
#   2  bad command-line usage (argparse)
#   3  a structural invariant was violated (verify-structure)

"""
Command-line interface for the HP-divergence toolkit

EXAMPLE USAGE:
hpdiv estimate --input data.csv --label-col class --classes a,b --bootstrap 1000
hpdiv simulate --config fig2.env --output mse.csv
hpdiv table2
hpdiv verify-structure --trials 500 --dims 2 --seed 1
"""

# IMPORT STATEMENTS
# =============================================================================

import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import ValidationError

from . import __version__
from .config import get_config
from .data import feature_sweep_frame, load_labeled_csv, sample_size_sweep
from .emst import validate_tree
from .errors import HPDivError, InvariantViolation
from .estimator import bootstrap_interval, estimate_divergence
from .fr import degree_constant, dual_fr_statistic, fr_statistic, fr_test, partition_fr, perturb_one_point_delta
from .models import BoundParams, DatasetSpec, DensityModel, ExperimentConfig, ExperimentReport, LabeledPointSet
from .seeding import rng_for, sub_seed
from .sim import (
    default_distribution_configs,
    load_experiment_config,
    run_distribution_comparison,
    run_mse_experiment,
    write_csv,
    write_report_csv,
)
from .theory import concentration_curve, evaluate_bounds, mse_rate_table, optimize_epsilon, reproduce_table2

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DATA = 1
EXIT_USAGE = 2
EXIT_INVARIANT = 3


# ARGUMENT HELPERS
# =============================================================================

def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")


def _class_pair(text: str) -> tuple:
    parts = [v.strip() for v in text.split(",")]
    if len(parts) != 2 or not all(parts) or parts[0] == parts[1]:
        raise argparse.ArgumentTypeError(f"--classes needs two different labels 'a,b', got '{text}'")
    return tuple(parts)


def _level(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"level must lie in (0, 1), got {text}")
    return value


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="master seed (default: HPDIV_DEFAULT_SEED)")
    parser.add_argument("--output", "-o", default=None, help="CSV output path (default: stdout)")
    parser.add_argument("--format", choices=["csv"], default="csv", help="output format")


def _add_dataset(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="labeled CSV file")
    parser.add_argument("--label-col", required=True, help="label column name or 0-based index")
    parser.add_argument("--classes", required=True, type=_class_pair, help="the two labels mapped to X and Y, 'a,b'")
    parser.add_argument("--features", default=None, help="comma-separated feature columns (default: all others)")
    parser.add_argument("--max-rows", type=int, default=None, help="subsample each class to at most this many rows")
    parser.add_argument("--normalize", choices=["none", "unit-cube", "z-score"], default="none")
    parser.add_argument("--delimiter", default=None, help="field delimiter (default: detect , ; or tab)")
    parser.add_argument("--no-header", action="store_true", help="the file has no header row")
    parser.add_argument("--dedupe", action="store_true", help="drop repeated feature rows")
    parser.add_argument("--jitter", type=float, default=0.0, help="standard deviation of added Gaussian noise")


def build_parser() -> argparse.ArgumentParser:
    """The argparse parser with all subcommands"""
    parser = argparse.ArgumentParser(
        prog="hpdiv",
        description="Henze-Penrose divergence estimation with the Friedman-Rafsky statistic",
    )
    parser.add_argument("--version", action="version", version=f"hpdiv {__version__}")
    parser.add_argument("--log-level", default=None, help="override HPDIV_LOG_LEVEL")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    estimate = commands.add_parser("estimate", help="estimate the divergence between two classes of a CSV")
    _add_common(estimate)
    _add_dataset(estimate)
    estimate.add_argument("--bootstrap", type=int, default=0, metavar="T", help="bootstrap trials (>= 100)")
    estimate.add_argument("--level", type=_level, default=0.95, help="bootstrap interval level")

    test = commands.add_parser("test", help="Friedman-Rafsky two-sample test on a CSV")
    _add_common(test)
    _add_dataset(test)
    test.add_argument("--permutations", type=int, default=0, help="random relabellings for a permutation p-value")

    simulate = commands.add_parser("simulate", help="MSE of the estimator against the true divergence")
    _add_common(simulate)
    simulate.add_argument("--config", default=None, help="KEY=value experiment file")
    simulate.add_argument("--dim", type=int, default=2)
    simulate.add_argument("--n-grid", type=_int_list, default=[100, 200, 300, 400, 500, 600, 700, 800])
    simulate.add_argument("--trials", type=int, default=100)
    simulate.add_argument("--eta", type=float, default=1.0)

    compare = commands.add_parser("compare-dists", help="null MSE curves for the three density families")
    _add_common(compare)
    compare.add_argument("--dim", type=int, default=2)
    compare.add_argument("--n-grid", type=_int_list, default=[100, 300, 500])
    compare.add_argument("--trials", type=int, default=100)

    bounds = commands.add_parser("bounds", help="evaluate the rate and concentration bounds")
    _add_common(bounds)
    bounds.add_argument("--m", type=int, required=True)
    bounds.add_argument("--n", type=int, required=True)
    bounds.add_argument("--d", type=int, required=True)
    bounds.add_argument("--eta", type=float, default=1.0)
    bounds.add_argument("--h", type=int, default=7)
    bounds.add_argument("--c-delta", type=float, default=None, help="default: HPDIV_C_DELTA")
    bounds.add_argument("--c-d", type=float, default=6.0)
    bounds.add_argument("--t", type=float, default=None)
    bounds.add_argument("--delta", type=float, default=None)
    bounds.add_argument("--curve", type=_float_list, default=None, metavar="T_LIST",
                        help="emit the optimal bound for each t in this list instead")

    epsilon = commands.add_parser("epsilon-star", help="minimize the concentration bound over epsilon")
    _add_common(epsilon)
    epsilon.add_argument("--t", type=float, required=True)
    epsilon.add_argument("--m", type=int, required=True)
    epsilon.add_argument("--n", type=int, required=True)
    epsilon.add_argument("--d", type=int, required=True)
    epsilon.add_argument("--h", type=int, default=7)
    epsilon.add_argument("--c-delta", type=float, default=None)

    table2 = commands.add_parser("table2", help="recompute the published concentration table")
    _add_common(table2)

    heatmap = commands.add_parser("heatmap", help="MSE rate grid (N, d, rate)")
    _add_common(heatmap)
    heatmap.add_argument("--n-grid", type=_int_list, default=[10 ** k for k in range(1, 8)])
    heatmap.add_argument("--d-grid", type=_int_list, default=list(range(2, 16)))
    heatmap.add_argument("--eta", type=float, default=1.0)

    sweep = commands.add_parser("feature-sweep", help="divergence using the first k features, k = 1..D")
    _add_common(sweep)
    _add_dataset(sweep)
    sweep.add_argument("--max-dim", type=int, default=None)

    size_sweep = commands.add_parser("sweep-size", help="divergence against per-class sample size")
    _add_common(size_sweep)
    _add_dataset(size_sweep)
    size_sweep.add_argument("--sizes", type=_int_list, required=True)
    size_sweep.add_argument("--parts", type=int, default=1)

    verify = commands.add_parser("verify-structure", help="check the deterministic MST inequalities")
    _add_common(verify)
    verify.add_argument("--trials", type=int, default=500)
    verify.add_argument("--dims", type=_int_list, default=[2])
    verify.add_argument("--sizes", type=_int_list, default=list(range(20, 201, 20)))
    verify.add_argument("--levels", type=_int_list, default=[2, 3])

    return parser


# COMMANDS
# =============================================================================

def _dataset_spec(args: argparse.Namespace) -> DatasetSpec:
    features = [v.strip() for v in args.features.split(",")] if args.features else None
    return DatasetSpec(
        path=args.input,
        label_column=args.label_col,
        feature_columns=features,
        class_pair=args.classes,
        max_rows_per_class=args.max_rows,
        normalize=args.normalize,
        delimiter=args.delimiter,
        has_header=not args.no_header,
        dedupe=args.dedupe,
        jitter=args.jitter,
        seed=args.seed,
    )


def cmd_estimate(args: argparse.Namespace) -> pd.DataFrame:
    sample = load_labeled_csv(_dataset_spec(args))
    estimate = estimate_divergence(sample)
    row = estimate.model_dump(include={"m", "n", "r_statistic", "d_hat_raw", "d_hat", "a_hat"})
    columns = ["m", "n", "r_statistic", "d_hat_raw", "d_hat", "a_hat"]
    if args.bootstrap:
        interval = bootstrap_interval(sample, trials=args.bootstrap, level=args.level, seed=args.seed)
        row.update({"low": interval.low, "point": interval.point, "high": interval.high})
        columns += ["low", "point", "high"]
    return pd.DataFrame([row], columns=columns)


def cmd_test(args: argparse.Namespace) -> pd.DataFrame:
    result = fr_test(load_labeled_csv(_dataset_spec(args)), permutations=args.permutations, seed=args.seed)
    return pd.DataFrame([result.model_dump()])


def cmd_simulate(args: argparse.Namespace) -> ExperimentReport:
    if args.config:
        config = load_experiment_config(args.config, seed=args.seed if args.seed_given else None)
        args.seed = config.seed
    else:
        shifted = [1.0] + [0.0] * (args.dim - 1)
        config = ExperimentConfig(
            name="shifted-gaussians",
            f0=DensityModel.gaussian([0.0] * args.dim),
            f1=DensityModel.gaussian(shifted),
            n_grid=tuple(args.n_grid),
            trials=args.trials,
            seed=args.seed,
            eta=args.eta,
            oracle_samples=get_config().ORACLE_SAMPLES,
        )
    report = run_mse_experiment(config)
    if report.partial:
        raise HPDivError(f"experiment stopped early: {report.metadata.get('error', 'unknown error')}")
    return report


def cmd_compare_dists(args: argparse.Namespace) -> pd.DataFrame:
    configs = default_distribution_configs(dim=args.dim, n_grid=args.n_grid, trials=args.trials, seed=args.seed)
    return run_distribution_comparison(configs)


def _c_delta(args: argparse.Namespace) -> float:
    return args.c_delta if args.c_delta is not None else get_config().C_DELTA


def cmd_bounds(args: argparse.Namespace) -> pd.DataFrame:
    if args.curve:
        return concentration_curve(args.curve, args.m, args.n, args.d, args.h, _c_delta(args))
    params = BoundParams(
        m=args.m, n=args.n, d=args.d, eta=args.eta, h=args.h, c_delta=_c_delta(args),
        c_d=args.c_d, holder_k=get_config().HOLDER_K, t=args.t, delta=args.delta,
    )
    return pd.DataFrame([evaluate_bounds(params)])


def cmd_epsilon_star(args: argparse.Namespace) -> pd.DataFrame:
    result = optimize_epsilon(args.t, args.m, args.n, args.d, args.h, _c_delta(args))
    return pd.DataFrame([result.model_dump()])


def cmd_table2(args: argparse.Namespace) -> pd.DataFrame:
    return reproduce_table2()


def cmd_heatmap(args: argparse.Namespace) -> pd.DataFrame:
    return mse_rate_table(args.n_grid, args.d_grid, args.eta)


def cmd_feature_sweep(args: argparse.Namespace) -> pd.DataFrame:
    return feature_sweep_frame(load_labeled_csv(_dataset_spec(args)), args.max_dim)


def cmd_sweep_size(args: argparse.Namespace) -> pd.DataFrame:
    return sample_size_sweep(load_labeled_csv(_dataset_spec(args)), args.sizes, args.parts, args.seed)


def verify_instance(seed: int, d: int, total: int, levels: Sequence[int]) -> Dict:
    """
    Structural margins of one random instance on [0,1]^d

    Every margin is nonnegative when its inequality holds:
    - subadditivity_l{l}: sum(R_i) + 2|D| - R
    - dual_lower: R* - R (one cell)
    - dual_upper: R + c_d 2^d - R* (one cell)
    - smoothness: 4 c_d - |delta R| for one relocated point
    """
    rng = rng_for(seed)
    m = total // 2
    sample = LabeledPointSet.from_arrays(rng.random((m, d)), rng.random((total - m, d)))
    result = fr_statistic(sample)
    validate_tree(result.tree, np.vstack([sample.x_points.points, sample.y_points.points]))
    c_d = degree_constant(d, result.tree)

    row = {"seed": seed, "d": d, "N": total, "r_statistic": result.r_statistic, "c_d": c_d}
    for l in levels:
        row[f"subadditivity_l{l}"] = partition_fr(sample, l).inequality_margin
    dual_r = dual_fr_statistic(sample, 1).dual_r_total
    row["dual_lower"] = dual_r - result.r_statistic
    row["dual_upper"] = result.r_statistic + c_d * 2 ** d - dual_r
    index = int(rng.integers(0, total))
    row["smoothness"] = 4 * c_d - perturb_one_point_delta(sample, index, rng.random(d))
    return row


def cmd_verify_structure(args: argparse.Namespace) -> pd.DataFrame:
    if args.trials < 1:
        raise HPDivError("--trials must be at least 1")
    rows = []
    for k in range(args.trials):
        d = args.dims[k % len(args.dims)]
        total = args.sizes[(k // len(args.dims)) % len(args.sizes)]
        rows.append({"instance": k, **verify_instance(sub_seed(args.seed, k), d, total, args.levels)})
    frame = pd.DataFrame(rows)
    margins = [c for c in frame.columns if c.startswith(("subadditivity_", "dual_", "smoothness"))]
    frame["violated"] = (frame[margins] < 0).any(axis=1)
    return frame


def raise_on_violations(frame: pd.DataFrame) -> None:
    """Raise InvariantViolation naming the seeds of every violating instance"""
    failing = frame.loc[frame["violated"], "seed"].tolist()
    if failing:
        raise InvariantViolation(f"{len(failing)} instance(s) violate a structural inequality", seeds=failing)


COMMANDS: Dict[str, Callable[[argparse.Namespace], object]] = {
    "estimate": cmd_estimate,
    "test": cmd_test,
    "simulate": cmd_simulate,
    "compare-dists": cmd_compare_dists,
    "bounds": cmd_bounds,
    "epsilon-star": cmd_epsilon_star,
    "table2": cmd_table2,
    "heatmap": cmd_heatmap,
    "feature-sweep": cmd_feature_sweep,
    "sweep-size": cmd_sweep_size,
    "verify-structure": cmd_verify_structure,
}


# ENTRY POINT
# =============================================================================

def configure_logging(level: Optional[str] = None) -> None:
    """Send log records to stderr at the configured level"""
    level = (level or get_config().LOG_LEVEL).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _flag_echo(argv: Sequence[str], seed: int) -> str:
    echo = " ".join(argv)
    return echo if any(a.startswith("--seed") for a in argv) else f"{echo} --seed {seed}"


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand; returns the process exit code"""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK

    configure_logging(args.log_level)
    args.seed_given = args.seed is not None
    if args.seed is None:
        args.seed = get_config().DEFAULT_SEED

    try:
        result = COMMANDS[args.command](args)
        target = args.output or sys.stdout
        echo = _flag_echo(argv, args.seed)
        if isinstance(result, pd.DataFrame):
            write_csv(result, target, echo)
        else:
            write_report_csv(result, target, echo)
        if args.command == "verify-structure":
            raise_on_violations(result)
    except InvariantViolation as exc:
        logger.error("❌ %s; failing seeds: %s", exc, ", ".join(map(str, exc.seeds)))
        return EXIT_INVARIANT
    except (HPDivError, ValidationError) as exc:
        logger.error("❌ %s", exc)
        return EXIT_DATA

    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
