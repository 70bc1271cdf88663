# =============================================================================
# ESTIMATOR.PY - HENZE-PENROSE DIVERGENCE FROM THE FRIEDMAN-RAFSKY STATISTIC
# =============================================================================
# The estimator itself is one line of arithmetic on top of fr_statistic:
#
#     A_hat = R * (m + n) / (2 m n)       (HP-integral)
#     D_hat = 1 - A_hat                   (HP-divergence)
#
# The rest of this file supplies what the experiments need around it:
# - Monte Carlo "oracles" giving the true divergence and Bayes error of two
#   synthetic densities
# - a percentile bootstrap interval for real data

"""
HP-divergence estimation, numerical ground truth and bootstrap intervals

EXAMPLE USAGE:
from hpdiv.estimator import estimate_divergence, true_hp_divergence
from hpdiv.models import DensityModel, OracleConfig

estimate = estimate_divergence(sample)
estimate.d_hat

truth = true_hp_divergence(DensityModel.gaussian([0, 0]), DensityModel.gaussian([1, 0]), 0.5,
                           OracleConfig(samples=10**6, seed=1))
truth.value, truth.standard_error
"""

# IMPORT STATEMENTS
# =============================================================================

import logging
import math
from typing import Callable, Optional

import numpy as np
from scipy.special import expit

from .config import get_config
from .densities import draw_mixture, logpdf
from .errors import BootstrapError, InvalidInputError, OracleError
from .fr import fr_statistic
from .models import (
    BootstrapInterval,
    DensityModel,
    DivergenceEstimate,
    LabeledPointSet,
    OracleConfig,
    OracleResult,
)
from .seeding import ordered_map, rng_for

logger = logging.getLogger(__name__)

# Mixture draws evaluated per chunk by the oracles
ORACLE_CHUNK = 200_000

# Stream keys separating the oracles' random draws
_HP_STREAM = 1
_BAYES_STREAM = 2


# POINT ESTIMATE
# =============================================================================

def divergence_from_r(r_statistic: int, m: int, n: int) -> DivergenceEstimate:
    """Turn a Friedman-Rafsky count into HP-integral and HP-divergence estimates"""
    if m < 1 or n < 1:
        raise InvalidInputError("both classes need at least one point")
    a_hat = r_statistic * (m + n) / (2.0 * m * n)
    d_hat_raw = 1.0 - a_hat
    return DivergenceEstimate(
        r_statistic=r_statistic,
        m=m,
        n=n,
        a_hat=a_hat,
        d_hat_raw=d_hat_raw,
        d_hat=min(1.0, max(0.0, d_hat_raw)),
    )


def estimate_divergence(sample: LabeledPointSet, method: str = "auto") -> DivergenceEstimate:
    """
    Estimate the HP-divergence between the X and Y samples

    d_hat_raw can be negative at finite sample sizes (R may exceed
    2mn/(m+n)); d_hat is the same value clamped to [0, 1].
    """
    result = fr_statistic(sample, method)
    return divergence_from_r(result.r_statistic, result.m, result.n)


# MONTE CARLO ORACLES
# =============================================================================

def _mixture_average(
    f0: DensityModel,
    f1: DensityModel,
    p: float,
    integration: OracleConfig,
    stream: int,
    integrand: Callable[[np.ndarray, np.ndarray], np.ndarray],
):
    """
    Mean and standard error of integrand(log p f0, log q f1) under the mixture

    Draws are processed in chunks; chunk c uses the stream (seed, stream, c)
    so the result does not depend on the chunk being evaluated elsewhere.
    """
    if not 0.0 < p < 1.0:
        raise InvalidInputError(f"p must lie strictly between 0 and 1, got {p}")
    if f0.dim != f1.dim:
        raise OracleError("f0 and f1 must have the same dimension")

    q = 1.0 - p
    total, total_sq, done, chunk = 0.0, 0.0, 0, 0
    while done < integration.samples:
        size = min(ORACLE_CHUNK, integration.samples - done)
        rng = rng_for(integration.seed, stream, chunk)
        x = draw_mixture(f0, f1, p, size, rng)
        log_a = math.log(p) + logpdf(f0, x)
        log_b = math.log(q) + logpdf(f1, x)
        if np.any(np.isneginf(log_a) & np.isneginf(log_b)) or np.any(np.isnan(log_a) | np.isnan(log_b)):
            raise OracleError("a mixture draw has zero or undefined density under both models")
        values = integrand(log_a, log_b)
        total += math.fsum(values.tolist())
        total_sq += math.fsum((values * values).tolist())
        done += size
        chunk += 1

    mean = total / done
    variance = max(0.0, total_sq / done - mean * mean) * done / max(done - 1, 1)
    return mean, math.sqrt(variance / done)


def _finish(value: float, standard_error: float, integration: OracleConfig, what: str, **extra) -> OracleResult:
    flagged = standard_error > integration.se_tolerance
    if flagged:
        logger.warning(
            "⚠️ %s oracle standard error %.3g exceeds the tolerance %.3g", what, standard_error, integration.se_tolerance
        )
    return OracleResult(value=value, standard_error=standard_error, samples=integration.samples, flagged=flagged, **extra)


def _default_oracle() -> OracleConfig:
    return OracleConfig(**get_config().get_oracle_config())


def true_hp_divergence(
    f0: DensityModel,
    f1: DensityModel,
    p: float,
    integration: Optional[OracleConfig] = None,
) -> OracleResult:
    """
    HP-divergence D_p(f0, f1) by Monte Carlo integration

    With x drawn from the mixture p f0 + q f1,

        D_p = (E[((p f0 - q f1) / (p f0 + q f1))^2] - (p - q)^2) / (4 p q)

    and the squared ratio is tanh((log p f0 - log q f1) / 2)^2, which stays
    finite where one density vanishes.
    """
    integration = integration or _default_oracle()
    q = 1.0 - p
    mean, se = _mixture_average(
        f0, f1, p, integration, _HP_STREAM, lambda a, b: np.tanh((a - b) / 2.0) ** 2
    )
    value = (mean - (p - q) ** 2) / (4.0 * p * q)
    result = _finish(value, se / (4.0 * p * q), integration, "HP-divergence", hp_integral=1.0 - value)
    logger.debug("HP-divergence oracle: %.6f +/- %.2g (%d draws)", result.value, result.standard_error, result.samples)
    return result


def true_bayes_error(
    f0: DensityModel,
    f1: DensityModel,
    p: float,
    integration: Optional[OracleConfig] = None,
) -> OracleResult:
    """
    Bayes error rate of integral min(p f0, q f1) by Monte Carlo integration

    Under the mixture the integrand is min(p f0, q f1) / (p f0 + q f1),
    i.e. 1 / (1 + exp|log p f0 - log q f1|).
    """
    integration = integration or _default_oracle()
    mean, se = _mixture_average(f0, f1, p, integration, _BAYES_STREAM, lambda a, b: expit(-np.abs(a - b)))
    return _finish(mean, se, integration, "Bayes error")


# BOOTSTRAP
# =============================================================================

def _collapsed(points: np.ndarray) -> bool:
    return points.shape[0] > 1 and bool(np.all(points == points[0]))


def bootstrap_interval(
    sample: LabeledPointSet,
    trials: int = 1000,
    level: float = 0.95,
    seed: int = 0,
    max_retries: Optional[int] = None,
    workers: Optional[int] = None,
) -> BootstrapInterval:
    """
    Percentile bootstrap interval for the Friedman-Rafsky statistic R

    Each trial resamples m of the X points and n of the Y points with
    replacement and recomputes R. A resample in which a class collapses to
    one repeated point (while the original class has distinct points) is
    redrawn, at most max_retries times per trial.

    The matching interval for D_hat follows by mapping the R bounds through
    D_hat = 1 - R (m+n) / (2mn), which is decreasing in R.

    PARAMETERS:
    trials: number of resamples, at least 100
    level: coverage, strictly between 0 and 1
    seed: master seed; trial k uses its own derived stream
    """
    if trials < 100:
        raise InvalidInputError(f"the bootstrap needs at least 100 trials, got {trials}")
    if not 0.0 < level < 1.0:
        raise InvalidInputError(f"level must lie strictly between 0 and 1, got {level}")
    if max_retries is None:
        max_retries = get_config().BOOTSTRAP_MAX_RETRIES

    x_points, y_points = sample.x_points.points, sample.y_points.points
    x_can_collapse = not _collapsed(x_points)
    y_can_collapse = not _collapsed(y_points)

    def one_trial(trial: int):
        for attempt in range(max_retries + 1):
            rng = rng_for(seed, trial, attempt)
            x_new = x_points[rng.integers(0, sample.m, size=sample.m)]
            y_new = y_points[rng.integers(0, sample.n, size=sample.n)]
            if (x_can_collapse and _collapsed(x_new)) or (y_can_collapse and _collapsed(y_new)):
                continue
            resampled = LabeledPointSet.from_arrays(x_new, y_new)
            return fr_statistic(resampled).r_statistic, attempt
        raise BootstrapError(f"bootstrap trial {trial} stayed degenerate after {max_retries} retries")

    outcomes = ordered_map(one_trial, range(trials), workers)
    r_values = np.array([r for r, _ in outcomes], dtype=np.float64)
    retries = sum(attempt for _, attempt in outcomes)

    tail = 100.0 * (1.0 - level) / 2.0
    low, high = np.percentile(r_values, [tail, 100.0 - tail])
    point = fr_statistic(sample).r_statistic

    return BootstrapInterval(
        low=float(low),
        high=float(high),
        point=float(point),
        level=level,
        trials=trials,
        bootstrap_mean=float(r_values.mean()),
        d_hat_low=_clamped_d(high, sample.m, sample.n),
        d_hat_high=_clamped_d(low, sample.m, sample.n),
        retries=retries,
    )


def _clamped_d(r_value: float, m: int, n: int) -> float:
    return min(1.0, max(0.0, 1.0 - r_value * (m + n) / (2.0 * m * n)))
