# =============================================================================
# SIM.PY - SEEDED MONTE CARLO EXPERIMENTS
# =============================================================================
# The simulation studies draw two samples from known densities many times,
# estimate the divergence each time, and compare the estimates with the
# true value. This module runs those sweeps and writes their reports.
#
# Reproducibility rules:
# - trial k at grid position i always uses the stream (seed, i, k)
# - trials may run on several threads; results are reduced in trial order
# - the same ExperimentConfig therefore gives the same report, bit for bit

"""
Monte Carlo experiment harness

EXAMPLE USAGE:
from hpdiv.models import DensityModel, ExperimentConfig
from hpdiv.sim import run_mse_experiment, write_report_csv

config = ExperimentConfig(
    f0=DensityModel.gaussian([0, 0]),
    f1=DensityModel.gaussian([1, 0]),
    n_grid=(100, 200, 400, 800),
    trials=100,
    seed=7,
)
report = run_mse_experiment(config)
write_report_csv(report, "mse.csv")
"""

# IMPORT STATEMENTS
# =============================================================================

import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
import pandas as pd
from dotenv import dotenv_values
from pydantic import ValidationError

from . import __version__
from .config import get_config
from .densities import draw
from .errors import HPDivError, InvalidInputError
from .estimator import estimate_divergence, true_hp_divergence
from .fr import fr_statistic
from .models import (
    DensityKind,
    DensityModel,
    ExperimentConfig,
    ExperimentReport,
    ExperimentRow,
    LabeledPointSet,
    OracleConfig,
    PointCloud,
    validation_message,
)
from .seeding import ordered_map, resolve_workers, rng_for, sub_seed
from .theory import bias_rate, variance_bound

logger = logging.getLogger(__name__)

# Default per-class sample sizes of the MSE sweep
DEFAULT_N_GRID = (100, 200, 300, 400, 500, 600, 700, 800)

# Stream key of the oracle seed, kept apart from grid indices
_ORACLE_KEY = 2 ** 31 - 1

REPORT_COLUMNS = [
    "n", "empirical_mse", "empirical_bias", "empirical_variance", "mse_se",
    "mean_estimate", "mean_estimate_se", "theory_mse", "oracle_truth", "oracle_se",
]


# SAMPLING
# =============================================================================

def sample(model: DensityModel, count: int, seed: int) -> PointCloud:
    """
    count seeded draws from model

    EXAMPLE USAGE:
    cloud = sample(DensityModel.gaussian([1, 0]), 1000, seed=3)
    """
    if count < 1:
        raise InvalidInputError(f"count must be at least 1, got {count}")
    return PointCloud.from_array(draw(model, count, rng_for(seed)))


def class_sizes(N: int, p: float) -> Tuple[int, int]:
    """Split a total of 2N points into (m, n) with m / (m + n) as close to p as possible"""
    m = int(round(2 * N * p))
    m = min(max(m, 1), 2 * N - 1)
    return m, 2 * N - m


# EXPERIMENTS
# =============================================================================

def oracle_truth(config: ExperimentConfig) -> Tuple[float, float]:
    """True HP-divergence of the config's densities and its standard error"""
    if config.f0 == config.f1:
        return 0.0, 0.0
    oracle = OracleConfig(
        samples=config.oracle_samples,
        seed=sub_seed(config.seed, _ORACLE_KEY),
        se_tolerance=get_config().ORACLE_SE_TOLERANCE,
    )
    result = true_hp_divergence(config.f0, config.f1, config.p, oracle)
    return result.value, result.standard_error


def _trial_estimates(config: ExperimentConfig, grid_index: int, N: int, workers: Optional[int]) -> np.ndarray:
    m, n = class_sizes(N, config.p)

    def one_trial(trial: int) -> float:
        rng = rng_for(config.seed, grid_index, trial)
        x_points = draw(config.f0, m, rng)
        y_points = draw(config.f1, n, rng)
        return estimate_divergence(LabeledPointSet.from_arrays(x_points, y_points)).d_hat

    return np.array(ordered_map(one_trial, range(config.trials), workers))


def summarize_trials(N: int, estimates: np.ndarray, truth: float, truth_se: float, theory: float) -> ExperimentRow:
    """
    Error statistics of one grid point

    bias and variance come from the same errors as the MSE, with the
    population (ddof=0) variance, so mse = bias^2 + variance.
    """
    errors = estimates - truth
    squared = errors ** 2
    bias = float(errors.mean())
    return ExperimentRow(
        n=N,
        empirical_mse=float(squared.mean()),
        empirical_bias=bias,
        empirical_variance=float(((errors - bias) ** 2).mean()),
        mse_se=standard_error(squared),
        mean_estimate=float(estimates.mean()),
        mean_estimate_se=standard_error(estimates),
        theory_mse=theory,
        oracle_truth=truth,
        oracle_se=truth_se,
    )


def standard_error(values: np.ndarray) -> float:
    """Standard error of the mean of values (0 for a single value)"""
    if values.size < 2:
        return 0.0
    return float(values.std(ddof=1) / np.sqrt(values.size))


def theory_mse(N: int, d: int, eta: float) -> float:
    """Theory overlay bias_rate(2N)^2 + 1/(2N), constants set to 1"""
    if d < 2:
        return float("nan")
    return bias_rate(2 * N, d, eta) ** 2 + 1.0 / (2 * N)


def run_mse_experiment(
    config: ExperimentConfig,
    workers: Optional[int] = None,
    truth: Optional[Tuple[float, float]] = None,
) -> ExperimentReport:
    """
    MSE, bias and variance of d_hat against the true divergence, per N

    For every N of config.n_grid, config.trials independent pairs of samples
    are drawn (N points per class when p = 0.5). If the oracle or a trial
    fails, the rows finished so far are returned with partial=True.

    PARAMETERS:
    truth: (value, standard error) to use instead of running the oracle
    """
    workers = resolve_workers(workers)
    metadata = experiment_metadata(config, workers)
    rows: List[ExperimentRow] = []

    try:
        truth, truth_se = truth if truth is not None else oracle_truth(config)
        logger.info("Oracle truth for %s: %.6f (se %.2g)", config.name, truth, truth_se)
        for grid_index, N in enumerate(config.n_grid):
            estimates = _trial_estimates(config, grid_index, N, workers)
            row = summarize_trials(N, estimates, truth, truth_se, theory_mse(N, config.dim, config.eta))
            rows.append(row)
            logger.info("N=%d: mse=%.3e bias=%.3e (%d trials)", N, row.empirical_mse, row.empirical_bias, config.trials)
    except HPDivError as exc:
        logger.error("❌ Experiment %s stopped after %d of %d sizes: %s", config.name, len(rows), len(config.n_grid), exc)
        metadata["error"] = str(exc)
        return ExperimentReport(config=config, rows=rows, metadata=metadata, partial=True)

    logger.info("✅ Experiment %s finished (%d sizes)", config.name, len(rows))
    return ExperimentReport(config=config, rows=rows, metadata=metadata)


def default_distribution_configs(
    dim: int = 2,
    n_grid: Sequence[int] = (100, 300, 500),
    trials: int = 100,
    seed: int = 0,
) -> List[ExperimentConfig]:
    """Null experiments (f0 == f1) for the normal, gamma-copula and Student-t families"""
    models = [
        DensityModel.gaussian([0.0] * dim),
        DensityModel.gamma_copula(dim=dim, alpha=1.0, beta=1.0, rho=0.5),
        DensityModel.student_t(dim=dim),
    ]
    return [
        ExperimentConfig(name=model.kind.value, f0=model, f1=model, n_grid=tuple(n_grid), trials=trials, seed=seed)
        for model in models
    ]


def run_distribution_comparison(configs: Sequence[ExperimentConfig], workers: Optional[int] = None) -> pd.DataFrame:
    """
    Null MSE curves of several distributions in one table

    Config i runs with the seed sub_seed(config.seed, i), so configs that
    share a master seed still get distinct streams.
    """
    frames = []
    for index, config in enumerate(configs):
        if config.f0 != config.f1:
            raise InvalidInputError(f"config '{config.name}' compares different densities; f0 must equal f1")
        seeded = config.model_copy(update={"seed": sub_seed(config.seed, index)})
        report = run_mse_experiment(seeded, workers)
        frame = report_frame(report)
        frame.insert(0, "distribution", config.f0.label())
        frames.append(frame)
        if report.partial:
            break
    return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=["distribution"] + REPORT_COLUMNS)


def run_variance_check(
    m: int = 500,
    n: int = 500,
    d: int = 2,
    trials: int = 200,
    seed: int = 0,
    model: Optional[DensityModel] = None,
    workers: Optional[int] = None,
) -> Tuple[float, float]:
    """
    Empirical variance of R / (m + n) over seeded trials, and its bound

    Both samples come from model (standard normal by default).

    RETURNS:
    (empirical variance with ddof=1, variance_bound(m, n, c_d=6))
    """
    model = model or DensityModel.gaussian([0.0] * d)

    def one_trial(trial: int) -> float:
        rng = rng_for(seed, trial)
        pair = LabeledPointSet.from_arrays(draw(model, m, rng), draw(model, n, rng))
        return fr_statistic(pair).r_statistic / (m + n)

    values = np.array(ordered_map(one_trial, range(trials), workers))
    return float(values.var(ddof=1)), variance_bound(m, n, 6.0)


# CONFIG FILES AND REPORTS
# =============================================================================

def _parse_floats(text: str, key: str) -> Tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise InvalidInputError(f"{key} must be a comma-separated list of numbers, got '{text}'")


def _density_from(values: Dict[str, str], prefix: str, dim: int) -> DensityModel:
    kind = values.get(f"{prefix}_KIND", "gaussian").strip().lower()
    if kind == DensityKind.GAUSSIAN.value:
        mean = _parse_floats(values.get(f"{prefix}_MEAN", ",".join(["0"] * dim)), f"{prefix}_MEAN")
        return DensityModel(kind=DensityKind.GAUSSIAN, dim=dim, mean=mean)
    if kind == DensityKind.GAMMA_COPULA.value:
        return DensityModel.gamma_copula(
            dim=dim,
            alpha=float(values.get(f"{prefix}_ALPHA", 1.0)),
            beta=float(values.get(f"{prefix}_BETA", 1.0)),
            rho=float(values.get(f"{prefix}_RHO", 0.5)),
        )
    if kind == DensityKind.STUDENT_T.value:
        return DensityModel.student_t(dim=dim, df=float(values.get(f"{prefix}_DF", 5.0)))
    raise InvalidInputError(f"{prefix}_KIND '{kind}' is not one of gaussian, gamma_copula, student_t")


def load_experiment_config(path: Union[str, Path], seed: Optional[int] = None) -> ExperimentConfig:
    """
    Read an ExperimentConfig from a KEY=value file

    Keys: F0_KIND, F1_KIND, F0_MEAN/F1_MEAN (gaussian), F*_ALPHA/BETA/RHO
    (gamma_copula), F*_DF (student_t), DIM, P, N_GRID, TRIALS, SEED, ETA,
    ORACLE_SAMPLES, NAME. An explicit seed argument overrides SEED.
    """
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"config file {path} does not exist")
    values = {key.upper(): value for key, value in dotenv_values(path).items() if value is not None}

    try:
        dim = int(values.get("DIM", 2))
        n_grid = tuple(int(v) for v in _parse_floats(values.get("N_GRID", ",".join(map(str, DEFAULT_N_GRID))), "N_GRID"))
        config = ExperimentConfig(
            name=values.get("NAME", path.stem),
            f0=_density_from(values, "F0", dim),
            f1=_density_from(values, "F1", dim),
            p=float(values.get("P", 0.5)),
            n_grid=n_grid,
            trials=int(values.get("TRIALS", 100)),
            seed=int(seed if seed is not None else values.get("SEED", get_config().DEFAULT_SEED)),
            eta=float(values.get("ETA", 1.0)),
            oracle_samples=int(values.get("ORACLE_SAMPLES", get_config().ORACLE_SAMPLES)),
        )
    except ValidationError as exc:
        raise InvalidInputError(f"{path}: {validation_message(exc)}") from exc
    except ValueError as exc:
        if isinstance(exc, InvalidInputError):
            raise
        raise InvalidInputError(f"{path}: {exc}") from exc

    logger.debug("Loaded experiment config %s from %s", config.name, path)
    return config


def experiment_metadata(config: ExperimentConfig, workers: int) -> Dict:
    """Config echo plus the software and environment details of a run"""
    return {
        "package": "hpdiv",
        "version": __version__,
        "workers": workers,
        "config": config.model_dump(mode="json"),
        "settings": get_config().describe(),
    }


def report_frame(report: ExperimentReport) -> pd.DataFrame:
    """Rows of a report as a DataFrame with REPORT_COLUMNS"""
    return pd.DataFrame([row.model_dump() for row in report.rows], columns=REPORT_COLUMNS)


def comment_line(echo: str) -> str:
    """The '# hpdiv <version> <echo>' line every CSV starts with"""
    return f"# hpdiv {__version__} {echo}".rstrip()


def write_csv(frame: pd.DataFrame, target: Union[str, Path, TextIO], echo: str = "") -> None:
    """Write a comment line, a header row and the rows of frame"""
    if isinstance(target, (str, Path)):
        with open(target, "w", newline="") as handle:
            write_csv(frame, handle, echo)
        return
    target.write(comment_line(echo) + "\n")
    frame.to_csv(target, index=False, lineterminator="\n")


def write_report_csv(
    report: Union[ExperimentReport, pd.DataFrame],
    target: Union[str, Path, TextIO],
    echo: str = "",
    metadata: Optional[Dict] = None,
) -> None:
    """
    Write an experiment report as CSV

    When target is a path, a '<path>.meta.json' sidecar with the report
    metadata is written next to it.
    """
    if isinstance(report, ExperimentReport):
        frame = report_frame(report)
        metadata = {**report.metadata, "partial": report.partial, **(metadata or {})}
    else:
        frame = report
    write_csv(frame, target, echo)

    if isinstance(target, (str, Path)) and metadata is not None:
        sidecar = Path(str(target) + ".meta.json")
        sidecar.write_text(json.dumps(metadata, indent=2, sort_keys=True, default=str))
        logger.info("✅ Wrote %s and %s", target, sidecar.name)
