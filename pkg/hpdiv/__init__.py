# =============================================================================
# __INIT__.PY - PACKAGE INITIALIZATION FILE
# =============================================================================
# Marks 'hpdiv' as a package, records its metadata and re-exports the
# functions most callers need, so that
#
#     from hpdiv import estimate_divergence
#
# works without knowing which module each one lives in.

"""
HP-divergence estimation with the Friedman-Rafsky statistic

The package estimates the Henze-Penrose divergence between two samples
from the number of minimum-spanning-tree edges joining them, and evaluates
the bounds that come with that estimator. It includes:

- emst.py: exact and accelerated Euclidean minimum spanning trees
- fr.py: the Friedman-Rafsky statistic, its partitioned and dual variants
  and the two-sample test
- estimator.py: divergence estimates, Monte Carlo ground truth, bootstrap
- densities.py: the synthetic density models used in experiments
- theory.py: bias, variance and concentration bounds
- sim.py: seeded Monte Carlo experiments and CSV reports
- data.py: labeled CSV ingestion and real-data sweeps
- cli.py: the 'hpdiv' command
"""

# PACKAGE METADATA
# =============================================================================
# Defined before the imports below: sim and cli read __version__ while the
# package is still initializing.

__version__ = "0.1.0"
__author__ = "Divergence Estimation Team"
__description__ = "Henze-Penrose divergence estimation via Friedman-Rafsky minimum spanning trees"

from .emst import brute_force_mst, build_emst, build_emst_fast, max_degree, validate_tree  # noqa: E402
from .estimator import bootstrap_interval, estimate_divergence, true_bayes_error, true_hp_divergence  # noqa: E402
from .fr import dual_fr_statistic, fr_statistic, fr_test, partition_fr, perturb_one_point_delta  # noqa: E402
from .models import DensityModel, LabeledPointSet, PointCloud  # noqa: E402

__all__ = [
    "__version__",
    "PointCloud",
    "LabeledPointSet",
    "DensityModel",
    "build_emst",
    "build_emst_fast",
    "brute_force_mst",
    "max_degree",
    "validate_tree",
    "fr_statistic",
    "partition_fr",
    "dual_fr_statistic",
    "perturb_one_point_delta",
    "fr_test",
    "estimate_divergence",
    "true_hp_divergence",
    "true_bayes_error",
    "bootstrap_interval",
]
