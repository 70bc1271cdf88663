#!/usr/bin/env python3
# =============================================================================
# MAIN.PY - GUIDED DEMONSTRATION OF THE HP-DIVERGENCE TOOLKIT
# =============================================================================
# A short tour of the package, runnable without any data files:
# 1. Draws two Gaussian samples and estimates their HP-divergence
# 2. Compares the estimate with the Monte Carlo ground truth and the Bayes error
# 3. Runs the Friedman-Rafsky two-sample test and a bootstrap interval
# 4. Checks the partition and dual inequalities on the same sample
# 5. Evaluates the rate and concentration bounds
#
# HOW TO RUN THIS SCRIPT:
# python main.py
#
# Settings (oracle accuracy, seed, log level) come from HPDIV_* environment
# variables or a .env file; see hpdiv/config.py.

"""
HP-divergence toolkit - demo script

Everything shown here is also reachable through the 'hpdiv' command; this
script calls the library directly so each step can be read in order.
"""

# IMPORT STATEMENTS
# =============================================================================

import logging

from hpdiv.cli import configure_logging
from hpdiv.config import get_config
from hpdiv.densities import draw
from hpdiv.errors import HPDivError
from hpdiv.estimator import bootstrap_interval, estimate_divergence, true_bayes_error, true_hp_divergence
from hpdiv.fr import dual_fr_statistic, fr_test, partition_fr
from hpdiv.models import BoundParams, DensityModel, LabeledPointSet, OracleConfig
from hpdiv.seeding import rng_for
from hpdiv.theory import evaluate_bounds

logger = logging.getLogger(__name__)


def main():
    """Run the demo from start to finish"""
    config = get_config()
    configure_logging("WARNING")
    seed = config.DEFAULT_SEED

    print("🚀 HP-Divergence Toolkit Demo")
    print("=" * 60)

    # STEP 1: TWO SAMPLES AND ONE ESTIMATE
    # -------------------------------------------------------------------------
    print("\n1. Drawing 500 points from N([0,0], I) and 500 from N([1,0], I)...")
    f0 = DensityModel.gaussian([0.0, 0.0])
    f1 = DensityModel.gaussian([1.0, 0.0])
    rng = rng_for(seed)
    sample = LabeledPointSet.from_arrays(draw(f0, 500, rng), draw(f1, 500, rng))

    estimate = estimate_divergence(sample)
    print(f"✅ R = {estimate.r_statistic} dichotomous edges")
    print(f"   HP-integral A_hat = {estimate.a_hat:.4f}")
    print(f"   HP-divergence D_hat = {estimate.d_hat:.4f}")

    # STEP 2: GROUND TRUTH
    # -------------------------------------------------------------------------
    print("\n2. Computing the true divergence by Monte Carlo integration...")
    oracle = OracleConfig(samples=config.ORACLE_SAMPLES, seed=seed, se_tolerance=config.ORACLE_SE_TOLERANCE)
    try:
        truth = true_hp_divergence(f0, f1, 0.5, oracle)
        bayes = true_bayes_error(f0, f1, 0.5, oracle)
    except HPDivError as exc:
        print(f"❌ Oracle failed: {exc}")
        return
    print(f"   D_p = {truth.value:.4f} (standard error {truth.standard_error:.1e})")
    print(f"   Bayes error = {bayes.value:.4f}")
    print(f"   Estimate error = {estimate.d_hat - truth.value:+.4f}")

    # STEP 3: TESTING AND UNCERTAINTY
    # -------------------------------------------------------------------------
    print("\n3. Two-sample test and bootstrap interval...")
    test = fr_test(sample, permutations=199, seed=seed)
    print(f"   E[R] under equal distributions = {test.null_mean:.1f}, z = {test.z_score:.2f}")
    print(f"   p-value (normal) = {test.p_value_normal:.2e}, (permutation) = {test.p_value_permutation:.3f}")

    interval = bootstrap_interval(sample, trials=200, seed=seed)
    print(f"   95% interval for R: [{interval.low:.0f}, {interval.high:.0f}]")
    print(f"   95% interval for D_hat: [{interval.d_hat_low:.4f}, {interval.d_hat_high:.4f}]")

    # STEP 4: STRUCTURAL INEQUALITIES
    # -------------------------------------------------------------------------
    print("\n4. Partitioning the sample into a 3 x 3 grid...")
    partition = partition_fr(sample, 3)
    print(f"   sum of cell R values = {sum(partition.per_cell_r)}, edges crossing cells = {partition.crossing_edge_count}")
    print(f"   subadditivity margin = {partition.inequality_margin} (never negative)")
    dual = dual_fr_statistic(sample, 3)
    print(f"   dual statistic R* = {dual.dual_r_total} >= R = {dual.global_r}")

    # STEP 5: BOUNDS
    # -------------------------------------------------------------------------
    print("\n5. Rate and concentration bounds for m = n = 500, d = 2...")
    bounds = evaluate_bounds(BoundParams(m=500, n=500, d=2, t=2e7, c_delta=config.C_DELTA, holder_k=config.HOLDER_K))
    print(f"   bias rate = {bounds['bias_rate']:.4f}, MSE rate = {bounds['mse_rate']:.4f}")
    print(f"   best partition level l = {bounds['optimal_l']}")
    print(f"   P(|R - E R| >= 2e7) <= {bounds['concentration_mean']:.4f} at epsilon = {bounds['epsilon_star']:.4g}")

    print("\n" + "=" * 60)
    print("🎉 Demo finished. Try 'hpdiv --help' for the command-line tools.")


if __name__ == "__main__":
    main()
