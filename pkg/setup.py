# =============================================================================
# SETUP.PY - PYTHON PACKAGE INSTALLATION CONFIGURATION FILE
# =============================================================================
# Tells pip how to install the hpdiv package and its 'hpdiv' command.
# Run "pip install ." (or "pip install -e ." while developing).

# IMPORT STATEMENTS
# =============================================================================

# setuptools bundles the package for installation
from setuptools import setup, find_packages

# THE MAIN SETUP FUNCTION
# =============================================================================
setup(
    # PACKAGE IDENTIFICATION
    # -------------------------------------------------------------------------

    # name: the distribution name used by pip
    name="hp-divergence-fr",

    # version: kept in step with hpdiv.__version__
    version="0.1.0",

    description="Henze-Penrose divergence estimation via Friedman-Rafsky minimum spanning trees",
    author="Divergence Estimation Team",

    # PACKAGE DISCOVERY
    # -------------------------------------------------------------------------

    # find_packages() picks up 'hpdiv'; the tests stay out of the install
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),

    # DEPENDENCIES
    # -------------------------------------------------------------------------
    install_requires=[
        # numpy: point arrays, distance computations and random generators
        "numpy>=1.25.2",

        # scipy: k-d tree neighbour queries, normal/gamma/t distributions,
        # special functions used by the theory bounds
        "scipy>=1.11.4",

        # pandas: CSV ingestion and every tabular report
        "pandas>=2.1.3",

        # pydantic: validated models for samples, trees, configs and results
        "pydantic>=2.6.1",

        # python-dotenv: HPDIV_* settings from a .env file and KEY=value
        # experiment files
        "python-dotenv>=1.0.0",

        # networkx: union-find for the accelerated tree and graph export
        "networkx>=3.2.1",
    ],

    # extras_require: tools only needed to run the test-suite
    extras_require={
        "test": ["pytest>=7.4.3"],
    },

    # ENTRY POINTS
    # -------------------------------------------------------------------------

    # console_scripts: installs the 'hpdiv' command that runs hpdiv.cli.main
    entry_points={
        "console_scripts": [
            "hpdiv = hpdiv.cli:main",
        ],
    },

    python_requires=">=3.9",
)
