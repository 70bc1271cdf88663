# =============================================================================
# EMST.PY - EUCLIDEAN MINIMUM SPANNING TREES
# =============================================================================
# Everything the estimator computes starts from the minimum spanning tree of
# a point cloud: the tree connecting all points with the smallest possible
# total edge length.
#
# Three builders live here:
# - build_emst: exact dense Prim, the reference implementation
# - build_emst_fast: Boruvka rounds driven by a k-d tree
# - brute_force_mst: exhaustive search over every labeled tree (tests only)
#
# All three order edges the same way, by the key (length, min index,
# max index). That key is a strict total order even when distances repeat,
# so the minimum spanning tree is unique and every builder returns it.

"""
Euclidean minimum spanning tree construction

EXAMPLE USAGE:
from hpdiv.emst import build_emst
tree = build_emst([[0, 0], [1, 0], [10, 0], [11, 0]])
tree.edge_set()      # {(0, 1), (1, 2), (2, 3)}
tree.total_length    # 11.0
"""

# IMPORT STATEMENTS
# =============================================================================

import logging
from typing import Callable, Optional, Tuple

import numpy as np
from networkx.utils import UnionFind
from scipy.spatial import cKDTree

from .errors import InvalidInputError, SizeLimitError
from .models import PointCloud, SpanningTree

logger = logging.getLogger(__name__)

# Largest cloud brute_force_mst accepts (8^6 = 262144 labeled trees)
BRUTE_FORCE_LIMIT = 8

# Relative slack on k-d tree distances when collecting tie candidates
_KD_SLACK = 1e-9


# DISTANCES
# =============================================================================

def point_distances(points: np.ndarray, u: int, others: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Euclidean distances from point u to the other points

    Every builder takes its lengths from this function, so equal geometry
    always gives bit-identical lengths whichever algorithm asked.

    PARAMETERS:
    points: (n, d) array
    u: index of the source point
    others: optional index array; defaults to all points
    """
    targets = points if others is None else points[others]
    return np.sqrt(((targets - points[u]) ** 2).sum(axis=1))


def _better(w, a, b, best_w, best_a, best_b) -> np.ndarray:
    """Elementwise "(w, a, b) < (best_w, best_a, best_b)" in lexicographic order"""
    return (w < best_w) | ((w == best_w) & ((a < best_a) | ((a == best_a) & (b < best_b))))


# PRIM (REFERENCE PATH)
# =============================================================================

def prim_tree(node_count: int, row: Callable[[int], np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Dense Prim over an implicit complete graph

    row(u) must return the weights from node u to all nodes. Returns the
    (node_count - 1, 2) edge array and the aligned lengths.

    The fr module reuses this for the corner-augmented trees of the dual
    statistic, where the last node is not a point.
    """
    if node_count <= 1:
        return np.empty((0, 2), dtype=np.int64), np.empty(0)

    nodes = np.arange(node_count)
    in_tree = np.zeros(node_count, dtype=bool)
    best_w = np.full(node_count, np.inf)
    best_a = np.full(node_count, node_count, dtype=np.int64)
    best_b = np.full(node_count, node_count, dtype=np.int64)

    edges = np.empty((node_count - 1, 2), dtype=np.int64)
    lengths = np.empty(node_count - 1)

    u = 0
    for step in range(node_count):
        in_tree[u] = True
        if step > 0:
            edges[step - 1] = (best_a[u], best_b[u])
            lengths[step - 1] = best_w[u]
        if step == node_count - 1:
            break

        w = row(u)
        a = np.minimum(nodes, u)
        b = np.maximum(nodes, u)
        improve = ~in_tree & _better(w, a, b, best_w, best_a, best_b)
        best_w[improve] = w[improve]
        best_a[improve] = a[improve]
        best_b[improve] = b[improve]

        # next node: smallest key among nodes still outside the tree
        outside = np.flatnonzero(~in_tree)
        w_out = best_w[outside]
        ties = outside[w_out == w_out.min()]
        if ties.size > 1:
            ties = ties[np.lexsort((best_b[ties], best_a[ties]))]
        u = int(ties[0])

    return edges, lengths


def build_emst(cloud) -> SpanningTree:
    """
    Exact Euclidean MST by dense Prim, O(n^2) time and O(n) memory

    PARAMETERS:
    cloud: PointCloud or anything PointCloud.from_array accepts

    RETURNS:
    The unique MST under the (length, min index, max index) edge order
    """
    cloud = PointCloud.from_array(cloud)
    points = cloud.points
    edges, lengths = prim_tree(cloud.size, lambda u: point_distances(points, u))
    logger.debug("Prim MST over %d points in %d dimensions", cloud.size, cloud.dim)
    return SpanningTree(edges=edges, lengths=lengths, node_count=cloud.size)


# BORUVKA WITH A K-D TREE (FAST PATH)
# =============================================================================

def _first_foreign_radius(kdtree: cKDTree, points: np.ndarray, component: np.ndarray) -> np.ndarray:
    """
    Distance from every point to its nearest point in another component

    Queries k neighbours at a time and doubles k for the points whose k
    neighbours all share their component.
    """
    n = points.shape[0]
    radius = np.full(n, np.inf)
    pending = np.arange(n)
    k = min(8, n)
    while pending.size:
        dist, idx = kdtree.query(points[pending], k=k)
        dist = dist.reshape(pending.size, -1)
        idx = idx.reshape(pending.size, -1)
        foreign = component[idx] != component[pending][:, None]
        found = foreign.any(axis=1)
        first = foreign.argmax(axis=1)
        radius[pending[found]] = dist[found, first[found]]
        if k == n:
            break
        pending = pending[~found]
        k = min(2 * k, n)
    return radius


def build_emst_fast(cloud) -> SpanningTree:
    """
    Exact Euclidean MST by Boruvka rounds with k-d tree neighbour search

    Each round every component picks its cheapest outgoing edge and all of
    them are merged at once, so there are at most log2(n) rounds. The k-d
    tree only proposes candidates: lengths and tie-breaks are recomputed
    exactly as build_emst does, so both builders return the same tree.
    """
    cloud = PointCloud.from_array(cloud)
    points = cloud.points
    n = cloud.size
    if n == 1:
        return SpanningTree(edges=np.empty((0, 2)), lengths=np.empty(0), node_count=1)

    kdtree = cKDTree(points)
    components = UnionFind(range(n))
    edges, lengths = [], []
    rounds = 0

    while len(edges) < n - 1:
        rounds += 1
        component = np.array([components[i] for i in range(n)])
        radius = _first_foreign_radius(kdtree, points, component)
        candidates = kdtree.query_ball_point(points, radius * (1 + _KD_SLACK) + 1e-300)

        # cheapest outgoing key per component: root -> (w, a, b)
        cheapest = {}
        for u in range(n):
            others = np.asarray(candidates[u], dtype=np.int64)
            others = others[component[others] != component[u]]
            if others.size == 0:
                continue
            w = point_distances(points, u, others)
            a = np.minimum(others, u)
            b = np.maximum(others, u)
            order = np.lexsort((b, a, w))
            key = (float(w[order[0]]), int(a[order[0]]), int(b[order[0]]))
            root = component[u]
            if root not in cheapest or key < cheapest[root]:
                cheapest[root] = key

        for w, a, b in sorted(set(cheapest.values())):
            if components[a] != components[b]:
                components.union(a, b)
                edges.append((a, b))
                lengths.append(w)

    logger.debug("Boruvka MST over %d points finished in %d rounds", n, rounds)
    return SpanningTree(edges=np.array(edges), lengths=np.array(lengths), node_count=n)


# BRUTE FORCE ORACLE
# =============================================================================

def _decode_pruefer(sequences: np.ndarray, n: int) -> np.ndarray:
    """
    Decode many Pruefer sequences at once

    sequences is a (K, n - 2) array; returns the (K, n - 1, 2) edge arrays.
    """
    count = sequences.shape[0]
    rows = np.arange(count)
    degree = np.ones((count, n), dtype=np.int64)
    for j in range(n - 2):
        degree[rows, sequences[:, j]] += 1

    edges = np.empty((count, n - 1, 2), dtype=np.int64)
    for j in range(n - 2):
        leaf = np.argmax(degree == 1, axis=1)
        parent = sequences[:, j]
        edges[:, j, 0] = leaf
        edges[:, j, 1] = parent
        degree[rows, leaf] -= 1
        degree[rows, parent] -= 1

    remaining = degree == 1
    edges[:, n - 2, 0] = np.argmax(remaining, axis=1)
    edges[:, n - 2, 1] = n - 1 - np.argmax(remaining[:, ::-1], axis=1)
    return np.sort(edges, axis=2)


def brute_force_mst(cloud) -> SpanningTree:
    """
    Minimum spanning tree by enumerating all n^(n-2) labeled trees

    Among the trees of minimal total length the one whose sorted edge keys
    are lexicographically smallest wins, which is the tree build_emst
    returns. Only for clouds of at most 8 points.
    """
    cloud = PointCloud.from_array(cloud)
    n = cloud.size
    if n > BRUTE_FORCE_LIMIT:
        raise SizeLimitError(f"brute_force_mst handles at most {BRUTE_FORCE_LIMIT} points, got {n}")
    if n == 1:
        return SpanningTree(edges=np.empty((0, 2)), lengths=np.empty(0), node_count=1)

    points = cloud.points
    distance = np.vstack([point_distances(points, u) for u in range(n)])

    # rank of every pair in the (length, min index, max index) order
    upper_a, upper_b = np.triu_indices(n, k=1)
    order = np.lexsort((upper_b, upper_a, distance[upper_a, upper_b]))
    rank = np.zeros((n, n), dtype=np.int64)
    rank[upper_a[order], upper_b[order]] = np.arange(order.size)

    if n == 2:
        trees = np.array([[[0, 1]]])
    else:
        sequences = np.indices((n,) * (n - 2)).reshape(n - 2, -1).T
        trees = _decode_pruefer(sequences, n)

    tree_lengths = distance[trees[:, :, 0], trees[:, :, 1]]
    totals = np.sort(tree_lengths, axis=1).sum(axis=1)
    best = totals.min()
    minimal = np.flatnonzero(totals - best <= 1e-12 * best)

    ranks = np.sort(rank[trees[minimal, :, 0], trees[minimal, :, 1]], axis=1)
    winner = minimal[np.lexsort(ranks.T[::-1])[0]]

    return SpanningTree(edges=trees[winner], lengths=tree_lengths[winner], node_count=n)


# TREE UTILITIES
# =============================================================================

def max_degree(tree: SpanningTree) -> int:
    """Largest vertex degree of the tree (0 for a single node)"""
    if tree.edge_count == 0:
        return 0
    return int(tree.degrees().max())


def validate_tree(tree: SpanningTree, cloud=None) -> None:
    """
    Check that tree really is a spanning tree, by union-find replay

    Raises InvalidInputError on a wrong edge count, an out-of-range index,
    a cycle, or (when cloud is given) a length that differs from the
    Euclidean distance between its endpoints.
    """
    n = tree.node_count
    if n < 1:
        raise InvalidInputError("a spanning tree needs at least one node")
    if tree.edge_count != n - 1:
        raise InvalidInputError(f"a tree over {n} nodes has {n - 1} edges, got {tree.edge_count}")
    if tree.edge_count and (tree.edges.min() < 0 or tree.edges.max() >= n):
        raise InvalidInputError("edge endpoint out of range")

    components = UnionFind(range(n))
    for a, b in tree.edges:
        a, b = int(a), int(b)
        if components[a] == components[b]:
            raise InvalidInputError(f"edge ({a}, {b}) closes a cycle")
        components.union(a, b)

    if cloud is not None:
        cloud = PointCloud.from_array(cloud)
        if cloud.size != n:
            raise InvalidInputError(f"tree spans {n} nodes but the cloud has {cloud.size} points")
        for (a, b), length in zip(tree.edges, tree.lengths):
            expected = point_distances(cloud.points, int(a), np.array([b]))[0]
            if not np.isclose(length, expected, rtol=1e-12, atol=0.0):
                raise InvalidInputError(f"edge ({a}, {b}) has length {length}, expected {expected}")
