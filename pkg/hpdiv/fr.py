# =============================================================================
# FR.PY - THE FRIEDMAN-RAFSKY MULTIVARIATE RUNS STATISTIC
# =============================================================================
# Merge the two samples, build the minimum spanning tree of the merged
# cloud, and count the edges that join an X point to a Y point. That count
# is the Friedman-Rafsky statistic R. Few crossing edges mean the samples
# sit apart; many mean they are mixed together.
#
# Besides the plain statistic this module computes:
# - partition_fr: R inside every cell of an l x ... x l grid, plus the number
#   of global MST edges that cross between cells
# - dual_fr_statistic: per-cell trees that may also attach to the cell corners
# - perturb_one_point_delta: how much R moves when one point moves
# - fr_test: the two-sample test of equal distributions built on R
# - subadditivity_spot_check: Monte Carlo report on the partition inequality

"""
Friedman-Rafsky statistic and its partitioned and dual variants

EXAMPLE USAGE:
from hpdiv.models import LabeledPointSet
from hpdiv.fr import fr_statistic

sample = LabeledPointSet.from_arrays([[0, 0], [2, 0]], [[1, 0], [3, 0]])
fr_statistic(sample).r_statistic   # 3
"""

# IMPORT STATEMENTS
# =============================================================================

import itertools
import logging
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import stats

from .emst import build_emst, build_emst_fast, max_degree, point_distances, prim_tree
from .errors import InvalidInputError
from .models import (
    DualFrResult,
    FrResult,
    FrTestResult,
    LabeledPointSet,
    PartitionReport,
    SpanningTree,
    SpotCheckReport,
)
from .seeding import rng_for

logger = logging.getLogger(__name__)

# Above this many merged points the Boruvka path replaces dense Prim
FAST_PATH_THRESHOLD = 4000

# Largest grid partition_fr will lay out
MAX_CELLS = 1_000_000

# Relative distance to a cell face within which a point counts as on the face
CELL_SNAP = 1e-9

# Classical maximum vertex degree of a planar Euclidean MST
PLANAR_DEGREE_BOUND = 6


# THE STATISTIC
# =============================================================================

def merged_tree(points: np.ndarray, method: str = "auto") -> SpanningTree:
    """MST of a merged cloud with the requested builder ("prim", "boruvka" or "auto")"""
    if method == "prim" or (method == "auto" and points.shape[0] <= FAST_PATH_THRESHOLD):
        return build_emst(points)
    if method in ("boruvka", "auto"):
        return build_emst_fast(points)
    raise InvalidInputError(f"unknown MST method '{method}'")


def count_dichotomous(tree: SpanningTree, labels: np.ndarray) -> Tuple[int, np.ndarray]:
    """Number of tree edges whose endpoints carry different labels, and the per-edge mask"""
    if tree.edge_count == 0:
        return 0, np.zeros(0, dtype=bool)
    mask = labels[tree.edges[:, 0]] != labels[tree.edges[:, 1]]
    return int(mask.sum()), mask


def fr_statistic(sample: LabeledPointSet, method: str = "auto") -> FrResult:
    """
    Friedman-Rafsky statistic of a labeled sample

    Builds the MST over the merged m + n points (X first, then Y) and counts
    its dichotomous edges.

    PARAMETERS:
    sample: the two samples
    method: MST builder, "auto" picks Prim for small samples and Boruvka
            for large ones; both return the same tree
    """
    if sample.m < 1 or sample.n < 1:
        raise InvalidInputError("both classes need at least one point")
    points, labels = sample.merged()
    tree = merged_tree(points, method)
    r_statistic, mask = count_dichotomous(tree, labels)
    mask.setflags(write=False)
    return FrResult(r_statistic=r_statistic, m=sample.m, n=sample.n, tree=tree, dichotomous=mask)


def degree_constant(d: int, tree: Optional[SpanningTree] = None, override: Optional[int] = None) -> int:
    """
    The MST degree constant c_d

    An explicit override wins; in the plane the classical bound 6 applies;
    in higher dimensions the largest degree observed in tree is used.
    """
    if override is not None:
        if override < 1:
            raise InvalidInputError("the degree constant must be positive")
        return int(override)
    if d <= 2:
        return PLANAR_DEGREE_BOUND
    if tree is None:
        raise InvalidInputError(f"no degree constant for d={d} without a tree or an override")
    return max(1, max_degree(tree))


# GRID PARTITIONS
# =============================================================================

def _frame(points: np.ndarray, frame: str) -> Tuple[np.ndarray, float]:
    """Lower corner and side length of the cube that gets partitioned"""
    if frame == "unit":
        if points.min() < 0.0 or points.max() > 1.0:
            raise InvalidInputError("frame='unit' needs every coordinate inside [0, 1]")
        return np.zeros(points.shape[1]), 1.0
    if frame != "bounding":
        raise InvalidInputError(f"unknown frame '{frame}' (use 'bounding' or 'unit')")
    low = points.min(axis=0)
    side = float((points.max(axis=0) - low).max())
    return low, (side if side > 0.0 else 1.0)


def assign_cells(points: np.ndarray, l: int, frame: str = "bounding") -> Tuple[np.ndarray, np.ndarray, float]:
    """
    Grid coordinates of every point in an l^d partition of the frame cube

    Cells are half-open [a, b) along each axis except the last one, which
    is closed so the cube's upper faces belong to it.

    RETURNS:
    (cell coordinates (n, d), lower corner, side length)
    """
    if l < 1:
        raise InvalidInputError(f"partition parameter must be at least 1, got {l}")
    if l ** points.shape[1] > MAX_CELLS:
        raise InvalidInputError(f"{l}^{points.shape[1]} cells is more than the supported {MAX_CELLS}")
    low, side = _frame(points, frame)
    scaled = (points - low) / side * l
    # points on a cell face round to that face before flooring
    nearest = np.rint(scaled)
    scaled = np.where(np.abs(scaled - nearest) <= CELL_SNAP * max(1, l), nearest, scaled)
    coords = np.floor(scaled).astype(np.int64)
    return np.clip(coords, 0, l - 1), low, side


def _cell_groups(coords: np.ndarray, l: int) -> Tuple[np.ndarray, Dict[int, np.ndarray]]:
    """Flat cell id of every point and the ascending point indices of each occupied cell"""
    flat = np.ravel_multi_index(tuple(coords.T), (l,) * coords.shape[1])
    groups = {int(cell): np.flatnonzero(flat == cell) for cell in np.unique(flat)}
    return flat, groups


def partition_fr(sample: LabeledPointSet, l: int, frame: str = "bounding", method: str = "auto") -> PartitionReport:
    """
    Friedman-Rafsky statistic inside every cell of an l^d grid

    Each occupied cell gets its own MST and statistic; a cell missing one
    of the classes contributes 0. crossing_edge_count counts the edges of
    the global MST whose endpoints fall in different cells.

    The report lists occupied cells only, in row-major grid order.
    """
    points, labels = sample.merged()
    coords, _, _ = assign_cells(points, l, frame)
    flat, groups = _cell_groups(coords, l)

    global_result = fr_statistic(sample, method)
    tree = global_result.tree
    crossing = int((flat[tree.edges[:, 0]] != flat[tree.edges[:, 1]]).sum()) if tree.edge_count else 0

    cells, per_cell_r, counts = [], [], []
    for cell, members in groups.items():
        cell_labels = labels[members]
        r_cell = 0
        if cell_labels.min() != cell_labels.max():
            cell_tree = merged_tree(points[members], method)
            r_cell, _ = count_dichotomous(cell_tree, cell_labels)
        cells.append(tuple(int(c) for c in np.unravel_index(cell, (l,) * sample.dim)))
        per_cell_r.append(r_cell)
        counts.append(int(members.size))

    report = PartitionReport(
        l=l,
        cells=cells,
        per_cell_r=per_cell_r,
        cell_counts=counts,
        crossing_edge_count=crossing,
        global_r=global_result.r_statistic,
    )
    logger.debug(
        "Partition l=%d: %d occupied cells, R=%d, sum R_i=%d, |D|=%d",
        l, len(cells), report.global_r, sum(per_cell_r), crossing,
    )
    return report


def _corner_tree(cell_points: np.ndarray, low: np.ndarray, high: np.ndarray) -> SpanningTree:
    """
    MST over the points of a cell plus its 2^d corners

    The corners are joined to each other at zero cost, so they act as one
    node, placed last (index k for k points). A point reaches that node at
    the distance to its nearest corner.
    """
    k = cell_points.shape[0]
    corners = np.array(list(itertools.product(*zip(low, high))))
    to_corner = np.sqrt(((cell_points[:, None, :] - corners[None, :, :]) ** 2).sum(axis=2)).min(axis=1)

    def row(u: int) -> np.ndarray:
        if u == k:
            return np.append(to_corner, 0.0)
        return np.append(point_distances(cell_points, u), to_corner[u])

    edges, lengths = prim_tree(k + 1, row)
    return SpanningTree(edges=edges, lengths=lengths, node_count=k + 1)


def dual_fr_statistic(sample: LabeledPointSet, l: int, frame: str = "bounding") -> DualFrResult:
    """
    Dual Friedman-Rafsky statistic R* of every occupied cell

    R* counts the dichotomous point-to-point edges of the corner-augmented
    MST plus every edge that attaches a point to a corner.
    """
    points, labels = sample.merged()
    coords, low, side = assign_cells(points, l, frame)
    flat, groups = _cell_groups(coords, l)
    width = side / l

    cells, per_cell_dual, per_cell_corner = [], [], []
    for cell, members in groups.items():
        index = np.array(np.unravel_index(cell, (l,) * sample.dim))
        cell_low = low + index * width
        tree = _corner_tree(points[members], cell_low, cell_low + width)

        hub = members.size
        touches_hub = (tree.edges == hub).any(axis=1)
        point_edges = tree.edges[~touches_hub]
        cell_labels = labels[members]
        dichotomous = int((cell_labels[point_edges[:, 0]] != cell_labels[point_edges[:, 1]]).sum())
        corner_edges = int(touches_hub.sum())

        cells.append(tuple(int(c) for c in index))
        per_cell_dual.append(dichotomous + corner_edges)
        per_cell_corner.append(corner_edges)

    return DualFrResult(
        l=l,
        cells=cells,
        per_cell_dual_r=per_cell_dual,
        per_cell_corner_edges=per_cell_corner,
        corner_edge_count=sum(per_cell_corner),
        global_r=fr_statistic(sample).r_statistic,
    )


# ONE-POINT SMOOTHNESS
# =============================================================================

def perturb_one_point_delta(sample: LabeledPointSet, index: int, new_position) -> int:
    """
    |R(original) - R(perturbed)| after moving a single point

    index refers to the merged order (X points first, then Y points).
    """
    total = sample.total
    if not isinstance(index, (int, np.integer)) or not 0 <= index < total:
        raise InvalidInputError(f"point index {index} is outside 0..{total - 1}")
    position = np.asarray(new_position, dtype=np.float64).reshape(-1)
    if position.size != sample.dim:
        raise InvalidInputError(f"new position has {position.size} coordinates, expected {sample.dim}")

    x_points = np.array(sample.x_points.points)
    y_points = np.array(sample.y_points.points)
    if index < sample.m:
        x_points[index] = position
    else:
        y_points[index - sample.m] = position
    moved = LabeledPointSet.from_arrays(x_points, y_points)

    return abs(fr_statistic(sample).r_statistic - fr_statistic(moved).r_statistic)


# TWO-SAMPLE TEST
# =============================================================================

def null_moments(m: int, n: int, tree: SpanningTree) -> Tuple[float, float]:
    """
    Mean and variance of R under random relabelling of a fixed tree

    C is the number of edge pairs sharing a node, sum of deg * (deg - 1) / 2.
    """
    total = m + n
    mean = 2.0 * m * n / total
    degrees = tree.degrees().astype(np.float64)
    shared = float((degrees * (degrees - 1.0) / 2.0).sum())
    variance = (2.0 * m * n / (total * (total - 1.0))) * (
        (2.0 * m * n - total) / total
        + (shared - total + 2.0) / ((total - 2.0) * (total - 3.0)) * (total * (total - 1.0) - 4.0 * m * n + 2.0)
    )
    return mean, variance


def fr_test(sample: LabeledPointSet, permutations: int = 0, seed: int = 0) -> FrTestResult:
    """
    Friedman-Rafsky two-sample test of equal distributions

    Small values of R reject equality. The normal approximation uses the
    exact permutation mean and variance of R given the tree; with
    permutations > 0 a Monte Carlo permutation p-value is added, computed by
    relabelling the fixed tree (the tree does not depend on labels).

    PARAMETERS:
    sample: the two samples, m + n >= 4
    permutations: number of random relabellings (0 to skip)
    seed: master seed of the relabelling stream
    """
    if sample.total < 4:
        raise InvalidInputError("the runs test needs at least 4 points in total")
    result = fr_statistic(sample)
    mean, variance = null_moments(sample.m, sample.n, result.tree)
    z_score = (result.r_statistic - mean) / np.sqrt(variance) if variance > 0 else 0.0
    p_normal = float(stats.norm.cdf(z_score))

    p_permutation = None
    if permutations > 0:
        _, labels = sample.merged()
        rng = rng_for(seed, 0)
        a, b = result.tree.edges[:, 0], result.tree.edges[:, 1]
        at_most = 0
        for _ in range(permutations):
            shuffled = rng.permutation(labels)
            if int((shuffled[a] != shuffled[b]).sum()) <= result.r_statistic:
                at_most += 1
        p_permutation = (at_most + 1.0) / (permutations + 1.0)

    logger.info("FR test: R=%d, E[R]=%.3f, z=%.3f, p=%.4g", result.r_statistic, mean, z_score, p_normal)
    return FrTestResult(
        r_statistic=result.r_statistic,
        m=sample.m,
        n=sample.n,
        null_mean=mean,
        null_variance=variance,
        z_score=float(z_score),
        p_value_normal=p_normal,
        p_value_permutation=p_permutation,
        permutations=permutations,
    )


# PROBABILISTIC PARTITION INEQUALITY (REPORT ONLY)
# =============================================================================

def subadditivity_spot_check(
    trials: int,
    m: int,
    n: int,
    d: int,
    h: int = 7,
    seed: int = 0,
    c_delta: float = 1.0,
) -> SpotCheckReport:
    """
    How often R exceeds sum(R_i) + 2 * epsilon for uniform samples on [0,1]^d

    The unit cube is cut into h^d cells and epsilon = h^2 * delta with the
    boundary scale delta = c_delta * h^(d-1) * (m+n)^(1/d). The expected
    violation fraction is at most delta * h / epsilon. Nothing is asserted.
    """
    if trials < 1:
        raise InvalidInputError("trials must be at least 1")
    boundary_scale = c_delta * h ** (d - 1) * (m + n) ** (1.0 / d)
    epsilon = h ** 2 * boundary_scale

    violations = 0
    for trial in range(trials):
        rng = rng_for(seed, trial)
        sample = LabeledPointSet.from_arrays(rng.random((m, d)), rng.random((n, d)))
        report = partition_fr(sample, h, frame="unit")
        if report.global_r > sum(report.per_cell_r) + 2.0 * epsilon:
            violations += 1

    return SpotCheckReport(
        trials=trials,
        h=h,
        epsilon=epsilon,
        boundary_scale=boundary_scale,
        violations=violations,
        violation_fraction=violations / trials,
        bound=min(1.0, h * boundary_scale / epsilon),
    )
