# =============================================================================
# CONFIG.PY - CONFIGURATION SETTINGS FOR THE HP-DIVERGENCE TOOLKIT
# =============================================================================
# All tunable settings live here instead of being hardcoded in the modules.
# Values come from environment variables (or a .env file) with defaults.

"""
Configuration settings for the HP-divergence toolkit

This file manages the settings the estimator, the oracles and the command-line
front end need:
- Logging level and environment name
- Worker parallelism for Monte Carlo trials
- Default sample counts and tolerances of the numerical oracles
- The theory constants the bounds leave unvalued (all default to 1)

The configuration is organized into classes: one base class that reads the
environment, and one subclass per environment that overrides a few values.
"""

# IMPORT STATEMENTS
# =============================================================================

# os: read environment variables
import os

# typing: type labels for the helper methods
from typing import Dict, Any, Optional

# dotenv: load KEY=value pairs from a .env file into the environment
from dotenv import load_dotenv

# Pick up a .env file in the working directory, if there is one.
# Variables already set in the environment win over the file.
load_dotenv()


# MAIN CONFIGURATION CLASS
# =============================================================================

class Config:
    """
    Configuration class for the toolkit

    Every setting is a class attribute read once from the environment.
    Use get_config() to obtain the right subclass for the current environment.
    """

    # APPLICATION CONFIGURATION SECTION
    # -------------------------------------------------------------------------

    # ENVIRONMENT: development, production or testing
    ENVIRONMENT = os.getenv("HPDIV_ENVIRONMENT", "development")

    # LOG_LEVEL: DEBUG, INFO, WARNING or ERROR
    LOG_LEVEL = os.getenv("HPDIV_LOG_LEVEL", "INFO")

    # WORKERS: maximum number of threads used for independent trials
    # Results never depend on this value, only the wall-clock time does
    WORKERS = int(os.getenv("HPDIV_WORKERS", "1"))

    # DEFAULT_SEED: master seed used when a command is run without --seed
    DEFAULT_SEED = int(os.getenv("HPDIV_DEFAULT_SEED", "20180101"))

    # ORACLE SETTINGS SECTION
    # -------------------------------------------------------------------------
    # The "true" divergence of two synthetic densities is computed by
    # Monte Carlo integration; these control its accuracy

    # ORACLE_SAMPLES: number of mixture draws per oracle evaluation
    ORACLE_SAMPLES = int(os.getenv("HPDIV_ORACLE_SAMPLES", "1000000"))

    # ORACLE_SE_TOLERANCE: results with a larger standard error are flagged
    ORACLE_SE_TOLERANCE = float(os.getenv("HPDIV_ORACLE_SE_TOLERANCE", "0.01"))

    # BOOTSTRAP SETTINGS SECTION
    # -------------------------------------------------------------------------

    # BOOTSTRAP_MAX_RETRIES: redraws allowed when a resampled class collapses
    # to a single repeated point
    BOOTSTRAP_MAX_RETRIES = int(os.getenv("HPDIV_BOOTSTRAP_MAX_RETRIES", "20"))

    # THEORY CONSTANTS SECTION
    # -------------------------------------------------------------------------
    # The rate and concentration theorems are stated with O(.) constants that
    # never receive values. They all default to 1.

    # HOLDER_K: Lipschitz constant K of the strong Holder class
    HOLDER_K = float(os.getenv("HPDIV_HOLDER_K", "1"))

    # C_DELTA: constant c in the boundary-edge scale c * h^(d-1) * N^(1/d)
    C_DELTA = float(os.getenv("HPDIV_C_DELTA", "1"))

    # C_GENERIC: constant c of the mean-median gap bound
    # |E R - median R| <= c * (...) * N^((d-1)/d)
    C_GENERIC = float(os.getenv("HPDIV_C_GENERIC", "1"))

    # CLASS METHODS
    # -------------------------------------------------------------------------

    @classmethod
    def get_oracle_config(cls) -> Dict[str, Any]:
        """
        Get the oracle settings as keyword arguments for OracleConfig

        EXAMPLE USAGE:
        oracle = OracleConfig(**get_config().get_oracle_config())
        """
        return {
            "samples": cls.ORACLE_SAMPLES,
            "se_tolerance": cls.ORACLE_SE_TOLERANCE,
        }

    @classmethod
    def get_theory_constants(cls) -> Dict[str, float]:
        """Get the unvalued theory constants as a dictionary"""
        return {
            "holder_k": cls.HOLDER_K,
            "c_delta": cls.C_DELTA,
            "c_generic": cls.C_GENERIC,
        }

    @classmethod
    def describe(cls) -> Dict[str, Any]:
        """
        Describe the current configuration

        Used for the metadata sidecar of experiment reports, so a CSV can
        always be traced back to the settings that produced it.
        """
        return {
            "environment": cls.ENVIRONMENT,
            "log_level": cls.LOG_LEVEL,
            "workers": cls.WORKERS,
            "default_seed": cls.DEFAULT_SEED,
            "oracle_samples": cls.ORACLE_SAMPLES,
            "oracle_se_tolerance": cls.ORACLE_SE_TOLERANCE,
            "bootstrap_max_retries": cls.BOOTSTRAP_MAX_RETRIES,
            **cls.get_theory_constants(),
        }


# ENVIRONMENT-SPECIFIC CONFIGURATION CLASSES
# =============================================================================

class DevelopmentConfig(Config):
    """Development environment: verbose logging"""
    ENVIRONMENT = "development"
    LOG_LEVEL = os.getenv("HPDIV_LOG_LEVEL", "DEBUG")


class ProductionConfig(Config):
    """Production environment: long batch runs, quieter logs"""
    ENVIRONMENT = "production"
    LOG_LEVEL = os.getenv("HPDIV_LOG_LEVEL", "INFO")


class TestingConfig(Config):
    """
    Testing environment configuration

    Smaller oracle sample counts so the test-suite stays fast. Tests that need
    the full accuracy pass their own OracleConfig.
    """
    ENVIRONMENT = "testing"
    LOG_LEVEL = "DEBUG"
    ORACLE_SAMPLES = 200000
    ORACLE_SE_TOLERANCE = 0.02


# CONFIGURATION FACTORY FUNCTION
# =============================================================================

def get_config(environment: Optional[str] = None) -> Config:
    """
    Get configuration based on environment

    PARAMETERS:
    environment: name of the environment; falls back to HPDIV_ENVIRONMENT and
    then to "development". Unknown names also fall back to development.
    """
    environment = environment or os.getenv("HPDIV_ENVIRONMENT", "development")

    config_map = {
        "development": DevelopmentConfig,
        "production": ProductionConfig,
        "testing": TestingConfig,
    }

    return config_map.get(environment, DevelopmentConfig)()
