# =============================================================================
# DENSITIES.PY - SYNTHETIC DENSITY MODELS FOR THE EXPERIMENTS
# =============================================================================
# The simulation studies and the Monte Carlo oracles need densities that
# can be both evaluated and sampled. Each DensityModel kind is handled here
# by a scipy.stats distribution (or a copula built from them).

"""
Evaluation and sampling of the synthetic density models

Three families, matching DensityKind:
- gaussian: N(mean, I)
- gamma_copula: Gamma(alpha, rate beta) marginals joined by a Gaussian
  copula whose correlation matrix has rho off the diagonal
- student_t: independent standard Student-t marginals with df degrees of
  freedom

Log densities are returned (-inf outside the support) so that the oracles
can form density ratios without underflow.
"""

# IMPORT STATEMENTS
# =============================================================================

import logging

import numpy as np
from scipy import stats

from .errors import OracleError
from .models import DensityKind, DensityModel

logger = logging.getLogger(__name__)


# HELPERS
# =============================================================================

def _as_points(model: DensityModel, x) -> np.ndarray:
    points = np.asarray(x, dtype=np.float64)
    if points.ndim == 1:
        points = points.reshape(1, -1) if model.dim > 1 else points.reshape(-1, 1)
    if points.ndim != 2 or points.shape[1] != model.dim:
        raise OracleError(f"{model.label()} is {model.dim}-dimensional, got points of shape {points.shape}")
    return points


def copula_correlation(model: DensityModel) -> np.ndarray:
    """Equicorrelation matrix of the Gaussian copula"""
    corr = np.full((model.dim, model.dim), model.rho)
    np.fill_diagonal(corr, 1.0)
    return corr


def _gamma_to_normal_scores(model: DensityModel, x: np.ndarray) -> np.ndarray:
    """z = Phi^-1(G(x)), computed from whichever tail keeps precision"""
    marginal = stats.gamma(model.alpha, scale=1.0 / model.beta)
    lower = marginal.cdf(x)
    upper = marginal.sf(x)
    return np.where(lower < 0.5, stats.norm.ppf(lower), stats.norm.isf(upper))


# EVALUATION
# =============================================================================

def logpdf(model: DensityModel, x) -> np.ndarray:
    """
    Log density of model at every row of x

    PARAMETERS:
    model: the density
    x: (n, d) points, or a single d-vector

    RETURNS:
    (n,) array, -inf where the density is zero
    """
    points = _as_points(model, x)

    if model.kind == DensityKind.GAUSSIAN:
        return stats.norm.logpdf(points - model.mean_vector).sum(axis=1)

    if model.kind == DensityKind.STUDENT_T:
        return stats.t.logpdf(points, model.df).sum(axis=1)

    if model.kind == DensityKind.GAMMA_COPULA:
        out = np.full(points.shape[0], -np.inf)
        inside = np.all(points > 0.0, axis=1)
        if not inside.any():
            return out
        x_in = points[inside]
        marginal = stats.gamma.logpdf(x_in, model.alpha, scale=1.0 / model.beta).sum(axis=1)
        if model.dim == 1:
            out[inside] = marginal
            return out
        # Gaussian copula density: joint normal over the product of its marginals
        z = _gamma_to_normal_scores(model, x_in)
        joint = stats.multivariate_normal(mean=np.zeros(model.dim), cov=copula_correlation(model))
        copula = np.atleast_1d(joint.logpdf(z)) - stats.norm.logpdf(z).sum(axis=1)
        out[inside] = marginal + copula
        return out

    raise OracleError(f"unsupported density kind {model.kind}")


def pdf(model: DensityModel, x) -> np.ndarray:
    """Density of model at every row of x"""
    return np.exp(logpdf(model, x))


# SAMPLING
# =============================================================================

def draw(model: DensityModel, count: int, rng: np.random.Generator) -> np.ndarray:
    """
    count independent draws from model as a (count, d) array

    Gaussian draws shift standard normals; gamma-copula draws push
    correlated normals through the normal CDF and the gamma quantile
    function; Student-t draws are componentwise.
    """
    if count < 0:
        raise OracleError(f"cannot draw {count} points")
    d = model.dim

    if model.kind == DensityKind.GAUSSIAN:
        return model.mean_vector + rng.standard_normal((count, d))

    if model.kind == DensityKind.STUDENT_T:
        return rng.standard_t(model.df, size=(count, d))

    if model.kind == DensityKind.GAMMA_COPULA:
        # correlated normals, then Phi and the gamma quantile, each from its precise tail
        chol = np.linalg.cholesky(copula_correlation(model))
        z = rng.standard_normal((count, d)) @ chol.T
        marginal = stats.gamma(model.alpha, scale=1.0 / model.beta)
        return np.where(z < 0.0, marginal.ppf(stats.norm.cdf(z)), marginal.isf(stats.norm.sf(z)))

    raise OracleError(f"unsupported density kind {model.kind}")


def draw_mixture(f0: DensityModel, f1: DensityModel, p: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """count draws from the mixture p * f0 + (1 - p) * f1"""
    if f0.dim != f1.dim:
        raise OracleError("mixture components must share a dimension")
    # rows: f0 draws first, then f1 draws
    from_f0 = int(rng.binomial(count, p))
    return np.vstack([draw(f0, from_f0, rng), draw(f1, count - from_f0, rng)])
