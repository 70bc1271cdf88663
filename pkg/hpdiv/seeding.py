# =============================================================================
# SEEDING.PY - REPRODUCIBLE RANDOM STREAMS AND THE WORKER POOL
# =============================================================================
# Reproducibility rule for the whole package: a random draw is identified
# by (master seed, keys), never by the order in which work happens to run.

"""
Seed derivation and the ordered worker pool

Every random draw in hpdiv comes from a generator derived from a master seed
and a tuple of integer keys (grid index, trial index, ...). The derivation
is counter based: numpy's SeedSequence hashes (master, keys) into an
independent stream, so trial 17 gets the same numbers whether it runs first,
last, or on another thread.

ordered_map runs a function over items on a thread pool and returns the
results in item order, which keeps every reduction order fixed.
"""

# IMPORT STATEMENTS
# =============================================================================

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

import numpy as np

from .config import get_config

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


# SEED DERIVATION
# =============================================================================

def seed_sequence(master: int, *keys: int) -> np.random.SeedSequence:
    """SeedSequence for the stream identified by (master, keys)"""
    # SeedSequence entropy must be nonnegative; negative masters wrap to 64 bits
    return np.random.SeedSequence(int(master) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(int(k) for k in keys))


def rng_for(master: int, *keys: int) -> np.random.Generator:
    """
    Independent generator for the stream identified by (master, keys)

    EXAMPLE USAGE:
    rng = rng_for(42, 3, 17)   # grid point 3, trial 17
    rng.standard_normal(5)
    """
    return np.random.default_rng(seed_sequence(master, *keys))


def sub_seed(master: int, *keys: int) -> int:
    """64-bit integer seed derived from (master, keys), for nested derivations"""
    return int(seed_sequence(master, *keys).generate_state(1, dtype=np.uint64)[0])


# WORKER POOL
# =============================================================================

def resolve_workers(workers: Optional[int] = None) -> int:
    """Worker count from the argument or HPDIV_WORKERS, at least 1"""
    if workers is None:
        workers = get_config().WORKERS
    return max(1, int(workers))


def ordered_map(func: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """
    Apply func to every item, in parallel when workers > 1

    Results come back in the order of items regardless of which thread
    finished first. Exceptions raised by func propagate to the caller.
    """
    items: Sequence[T] = list(items)
    workers = resolve_workers(workers)
    if workers == 1 or len(items) <= 1:
        return [func(item) for item in items]
    logger.debug("Running %d tasks on %d worker threads", len(items), workers)
    # pool.map yields in submission order
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
