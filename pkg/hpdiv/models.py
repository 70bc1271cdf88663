# =============================================================================
# MODELS.PY - DATA STRUCTURES FOR SAMPLES, TREES, ESTIMATES AND BOUNDS
# =============================================================================
# This file defines the "blueprints" every other module passes around:
# point clouds, spanning trees, labeled two-class samples, statistic results,
# density models, bound parameters and experiment definitions.
#
# All of them are pydantic models. Pydantic checks each field when an object
# is created, so a PointCloud with a NaN coordinate or a LabeledPointSet whose
# two clouds have different dimensions can never exist.
#
# Numeric arrays are stored as read-only numpy arrays inside the models, which
# makes every model safe to share between threads.

"""
Pydantic models for the HP-divergence toolkit

- PointCloud, SpanningTree: the geometry layer (emst)
- LabeledPointSet, FrResult, PartitionReport, DualFrResult, FrTestResult,
  SpotCheckReport: the Friedman-Rafsky layer (fr)
- DivergenceEstimate, DensityModel, OracleConfig, OracleResult,
  BootstrapInterval: the estimator layer
- BoundParams, EpsilonStarResult, VarianceLikeResult: the theory layer
- ExperimentConfig, ExperimentRow, ExperimentReport: the simulation layer
- DatasetSpec: CSV ingestion
"""

# IMPORT STATEMENTS
# =============================================================================

import math
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Union

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import InvalidInputError


def _frozen_array(values, dtype) -> np.ndarray:
    """Copy values into a new read-only array"""
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


# GEOMETRY LAYER
# =============================================================================

class PointCloud(BaseModel):
    """
    An ordered set of d-dimensional points

    The points are an (n, d) float64 array. Order matters: indices into the
    cloud are how spanning-tree edges refer to points, and ties between equal
    edge lengths are broken by index.

    EXAMPLE USAGE:
    cloud = PointCloud.from_array([[0.0, 0.0], [1.0, 0.0]])
    cloud.size  # 2
    cloud.dim   # 2
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    points: np.ndarray = Field(..., description="(n, d) array of coordinates")

    @field_validator("points", mode="before")
    @classmethod
    def check_points(cls, v):
        try:
            array = np.array(v, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise ValueError(f"points must form a rectangular numeric array: {exc}")
        if array.ndim == 1 and array.size > 0:
            array = array.reshape(-1, 1)
        if array.ndim != 2:
            raise ValueError(f"points must be a 2-D array, got {array.ndim} dimensions")
        if array.shape[0] < 1:
            raise ValueError("a point cloud needs at least one point")
        if array.shape[1] < 1:
            raise ValueError("points need at least one coordinate")
        if not np.all(np.isfinite(array)):
            raise ValueError("points contain non-finite coordinates")
        array.setflags(write=False)
        return array

    @classmethod
    def from_array(cls, points) -> "PointCloud":
        """Build a cloud, reporting bad input as InvalidInputError"""
        if isinstance(points, PointCloud):
            return points
        try:
            return cls(points=points)
        except ValidationError as exc:
            raise InvalidInputError(validation_message(exc)) from exc

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    def __len__(self) -> int:
        return self.size


class SpanningTree(BaseModel):
    """
    A spanning tree over the points of a cloud

    edges is a (k, 2) integer array with the smaller index first, sorted by
    (index_a, index_b); lengths holds the Euclidean length of each edge in the
    same order. A valid tree has k == node_count - 1.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    edges: np.ndarray = Field(..., description="(k, 2) endpoint indices, smaller index first")
    lengths: np.ndarray = Field(..., description="edge lengths aligned with edges")
    node_count: int = Field(..., ge=0, description="number of points spanned")

    @model_validator(mode="before")
    @classmethod
    def canonicalize(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        edges = np.array(data.get("edges", []), dtype=np.int64).reshape(-1, 2)
        lengths = np.array(data.get("lengths", []), dtype=np.float64).reshape(-1)
        if edges.shape[0] != lengths.shape[0]:
            raise ValueError("edges and lengths must have the same length")
        if edges.shape[0]:
            edges = np.sort(edges, axis=1)
            order = np.lexsort((edges[:, 1], edges[:, 0]))
            edges, lengths = edges[order], lengths[order]
        return {
            **data,
            "edges": _frozen_array(edges, np.int64),
            "lengths": _frozen_array(lengths, np.float64),
        }

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    @property
    def total_length(self) -> float:
        """Correctly rounded sum of the edge lengths (independent of edge order)"""
        return math.fsum(self.lengths.tolist())

    def edge_set(self) -> set:
        """Edges as a set of (index_a, index_b) tuples"""
        return {(int(a), int(b)) for a, b in self.edges}

    def degrees(self) -> np.ndarray:
        """Degree of every node"""
        return np.bincount(self.edges.reshape(-1), minlength=self.node_count)

    def adjacency(self) -> List[List[int]]:
        """Neighbour lists indexed by node"""
        neighbours = [[] for _ in range(self.node_count)]
        for a, b in self.edges:
            neighbours[int(a)].append(int(b))
            neighbours[int(b)].append(int(a))
        return neighbours

    def to_networkx(self) -> nx.Graph:
        """Export as an undirected networkx graph with a 'length' edge attribute"""
        graph = nx.Graph()
        graph.add_nodes_from(range(self.node_count))
        for (a, b), length in zip(self.edges, self.lengths):
            graph.add_edge(int(a), int(b), length=float(length))
        return graph


# FRIEDMAN-RAFSKY LAYER
# =============================================================================

class LabeledPointSet(BaseModel):
    """
    Two samples in the same space: X (class 0, m points) and Y (class 1, n points)

    The merged sample puts all X points first, then all Y points. Every index
    used by the fr module refers to that merged order.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    x_points: PointCloud
    y_points: PointCloud

    @model_validator(mode="after")
    def check_dimensions(self) -> "LabeledPointSet":
        if self.x_points.dim != self.y_points.dim:
            raise ValueError(
                f"both samples must share a dimension (got {self.x_points.dim} and {self.y_points.dim})"
            )
        return self

    @classmethod
    def from_arrays(cls, x_points, y_points) -> "LabeledPointSet":
        """Build a labeled sample from two arrays, reporting bad input as InvalidInputError"""
        x_cloud = PointCloud.from_array(x_points)
        y_cloud = PointCloud.from_array(y_points)
        try:
            return cls(x_points=x_cloud, y_points=y_cloud)
        except ValidationError as exc:
            raise InvalidInputError(validation_message(exc)) from exc

    @property
    def m(self) -> int:
        return self.x_points.size

    @property
    def n(self) -> int:
        return self.y_points.size

    @property
    def total(self) -> int:
        return self.m + self.n

    @property
    def dim(self) -> int:
        return self.x_points.dim

    def merged(self) -> Tuple[np.ndarray, np.ndarray]:
        """Merged (m+n, d) points and their 0/1 labels"""
        points = np.vstack([self.x_points.points, self.y_points.points])
        labels = np.concatenate([np.zeros(self.m, dtype=np.int8), np.ones(self.n, dtype=np.int8)])
        return points, labels

    def swapped(self) -> "LabeledPointSet":
        """The same sample with the roles of X and Y exchanged"""
        return LabeledPointSet(x_points=self.y_points, y_points=self.x_points)

    def first_features(self, k: int) -> "LabeledPointSet":
        """Keep only the first k coordinates of every point"""
        return LabeledPointSet.from_arrays(self.x_points.points[:, :k], self.y_points.points[:, :k])


class FrResult(BaseModel):
    """
    The Friedman-Rafsky statistic of a labeled sample

    r_statistic counts the "dichotomous" MST edges, the ones joining an X
    point to a Y point. dichotomous is aligned with tree.edges.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    r_statistic: int = Field(..., ge=0)
    m: int = Field(..., ge=1)
    n: int = Field(..., ge=1)
    tree: SpanningTree
    dichotomous: np.ndarray = Field(..., description="per-edge flag, True for X-Y edges")


class PartitionReport(BaseModel):
    """Per-cell Friedman-Rafsky statistics over an l^d grid of cells"""

    l: int = Field(..., ge=1)
    cells: List[Tuple[int, ...]] = Field(..., description="grid index of every occupied cell")
    per_cell_r: List[int]
    cell_counts: List[int]
    crossing_edge_count: int = Field(..., ge=0)
    global_r: int = Field(..., ge=0)

    @property
    def inequality_margin(self) -> int:
        """sum(R_i) + 2|D| - R, nonnegative whenever subadditivity holds"""
        return sum(self.per_cell_r) + 2 * self.crossing_edge_count - self.global_r


class DualFrResult(BaseModel):
    """Per-cell dual statistics R* computed on MSTs augmented with cell corners"""

    l: int = Field(..., ge=1)
    cells: List[Tuple[int, ...]] = Field(..., description="grid index of every occupied cell")
    per_cell_dual_r: List[int]
    per_cell_corner_edges: List[int]
    corner_edge_count: int = Field(..., ge=0)
    global_r: int = Field(..., ge=0)

    @property
    def dual_r_total(self) -> int:
        return sum(self.per_cell_dual_r)


class FrTestResult(BaseModel):
    """Outcome of the two-sample runs test of equality of distributions"""

    r_statistic: int
    m: int
    n: int
    null_mean: float
    null_variance: float
    z_score: float
    p_value_normal: float
    p_value_permutation: Optional[float] = None
    permutations: int = 0


class SpotCheckReport(BaseModel):
    """Monte Carlo report on the probabilistic partition inequality (report only)"""

    trials: int
    h: int
    epsilon: float
    boundary_scale: float
    violations: int
    violation_fraction: float
    bound: float


# ESTIMATOR LAYER
# =============================================================================

class DivergenceEstimate(BaseModel):
    """
    HP-divergence estimate derived from a Friedman-Rafsky statistic

    a_hat = R (m+n) / (2 m n) estimates the HP-integral, d_hat_raw = 1 - a_hat
    estimates the divergence and d_hat is d_hat_raw clamped to [0, 1].
    """

    r_statistic: int
    m: int
    n: int
    a_hat: float
    d_hat_raw: float
    d_hat: float = Field(..., ge=0.0, le=1.0)

    @property
    def p_hat(self) -> float:
        return self.m / (self.m + self.n)

    @property
    def q_hat(self) -> float:
        return self.n / (self.m + self.n)


class DensityKind(str, Enum):
    """The three density families of the simulation studies"""
    GAUSSIAN = "gaussian"          # identity covariance, given mean
    GAMMA_COPULA = "gamma_copula"  # Gamma(alpha, beta) marginals, Gaussian copula with correlation rho
    STUDENT_T = "student_t"        # independent standard t marginals


class DensityModel(BaseModel):
    """
    A synthetic density that can be evaluated and sampled

    EXAMPLE USAGE:
    f0 = DensityModel.gaussian([0.0, 0.0])
    f1 = DensityModel.gaussian([1.0, 0.0])
    g = DensityModel.gamma_copula(dim=2, alpha=1.0, beta=1.0, rho=0.5)
    """

    model_config = ConfigDict(frozen=True)

    kind: DensityKind
    dim: int = Field(..., ge=1)
    mean: Optional[Tuple[float, ...]] = Field(None, description="Gaussian mean vector")
    alpha: float = Field(1.0, gt=0, description="Gamma shape")
    beta: float = Field(1.0, gt=0, description="Gamma rate")
    rho: float = Field(0.5, description="copula correlation")
    df: float = Field(5.0, gt=0, description="Student-t degrees of freedom")

    @model_validator(mode="after")
    def check_kind_fields(self) -> "DensityModel":
        if self.kind == DensityKind.GAUSSIAN:
            if self.mean is not None and len(self.mean) != self.dim:
                raise ValueError(f"mean has {len(self.mean)} entries for dimension {self.dim}")
        if self.kind == DensityKind.GAMMA_COPULA and self.dim > 1:
            if not (-1.0 / (self.dim - 1) < self.rho < 1.0):
                raise ValueError(f"copula correlation {self.rho} is not positive definite in dimension {self.dim}")
        return self

    @property
    def mean_vector(self) -> np.ndarray:
        if self.mean is None:
            return np.zeros(self.dim)
        return np.asarray(self.mean, dtype=np.float64)

    @classmethod
    def gaussian(cls, mean) -> "DensityModel":
        mean = tuple(float(v) for v in mean)
        return cls(kind=DensityKind.GAUSSIAN, dim=len(mean), mean=mean)

    @classmethod
    def gamma_copula(cls, dim: int = 2, alpha: float = 1.0, beta: float = 1.0, rho: float = 0.5) -> "DensityModel":
        return cls(kind=DensityKind.GAMMA_COPULA, dim=dim, alpha=alpha, beta=beta, rho=rho)

    @classmethod
    def student_t(cls, dim: int = 2, df: float = 5.0) -> "DensityModel":
        return cls(kind=DensityKind.STUDENT_T, dim=dim, df=df)

    def label(self) -> str:
        """Short human-readable name used in report rows"""
        if self.kind == DensityKind.GAUSSIAN:
            return "gaussian(" + ",".join(f"{v:g}" for v in self.mean_vector) + ")"
        if self.kind == DensityKind.GAMMA_COPULA:
            return f"gamma_copula(a={self.alpha:g},b={self.beta:g},rho={self.rho:g})"
        return f"student_t(df={self.df:g})"


class OracleConfig(BaseModel):
    """Settings of a Monte Carlo integration oracle"""

    samples: int = Field(1000000, ge=1000)
    seed: int = 0
    se_tolerance: float = Field(0.01, gt=0)


class OracleResult(BaseModel):
    """Value of a Monte Carlo integral with its standard error"""

    value: float
    standard_error: float
    samples: int
    flagged: bool = Field(False, description="standard error above the configured tolerance")
    hp_integral: Optional[float] = Field(None, description="A_p = 1 - D_p, for divergence oracles")


class BootstrapInterval(BaseModel):
    """Percentile bootstrap interval for the Friedman-Rafsky statistic"""

    low: float
    high: float
    point: float
    level: float
    trials: int
    bootstrap_mean: float
    d_hat_low: float
    d_hat_high: float
    retries: int = 0


# THEORY LAYER
# =============================================================================

class BoundParams(BaseModel):
    """
    Inputs shared by the rate and concentration bounds

    h is the partition parameter of the concentration argument, c_delta the
    constant of the boundary-edge scale c_delta * h^(d-1) * N^(1/d), and c_d
    the maximum MST vertex degree in dimension d.
    """

    m: int = Field(..., ge=1)
    n: int = Field(..., ge=1)
    d: int = Field(..., ge=2)
    eta: float = Field(1.0, gt=0, le=1)
    h: int = Field(7, ge=2)
    c_delta: float = Field(1.0, gt=0)
    c_d: float = Field(6.0, gt=0)
    holder_k: float = Field(1.0, gt=0)
    t: Optional[float] = Field(None, gt=0)
    delta: Optional[float] = Field(None, gt=0, lt=1)

    @property
    def total(self) -> int:
        return self.m + self.n


class EpsilonStarResult(BaseModel):
    """Minimizer of the mean concentration bound over epsilon"""

    epsilon_star: float
    lower_bound: float
    objective_value: float
    at_boundary: bool
    t: float
    convexity_threshold: float
    above_convexity_threshold: bool


class VarianceLikeResult(BaseModel):
    """Deviation t reached with probability at least 1 - delta"""

    t: float
    epsilon_star: float
    c_prime: float
    delta: float
    vacuous: bool = False
    iterations: int
    converged: bool


# SIMULATION LAYER
# =============================================================================

class ExperimentConfig(BaseModel):
    """A seeded Monte Carlo sweep over per-class sample sizes"""

    model_config = ConfigDict(frozen=True)

    name: str = "experiment"
    f0: DensityModel
    f1: DensityModel
    p: float = Field(0.5, gt=0, lt=1)
    n_grid: Tuple[int, ...]
    trials: int = Field(100, ge=1)
    seed: int = 0
    eta: float = Field(1.0, gt=0, le=1)
    oracle_samples: int = Field(1000000, ge=1000)

    @field_validator("n_grid")
    @classmethod
    def check_grid(cls, v):
        if not v:
            raise ValueError("n_grid must not be empty")
        if any(size < 1 for size in v):
            raise ValueError("every sample size must be at least 1")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("n_grid must be strictly increasing")
        return v

    @model_validator(mode="after")
    def check_dimensions(self) -> "ExperimentConfig":
        if self.f0.dim != self.f1.dim:
            raise ValueError("f0 and f1 must have the same dimension")
        return self

    @property
    def dim(self) -> int:
        return self.f0.dim


class ExperimentRow(BaseModel):
    """Results for one per-class sample size N (m = n = N)"""

    n: int
    empirical_mse: float
    empirical_bias: float
    empirical_variance: float
    mse_se: float
    mean_estimate: float
    mean_estimate_se: float
    theory_mse: float
    oracle_truth: float
    oracle_se: float


class ExperimentReport(BaseModel):
    """All rows of an experiment plus the metadata needed to reproduce it"""

    config: ExperimentConfig
    rows: List[ExperimentRow] = Field(default_factory=list)
    metadata: Dict[str, Any] = Field(default_factory=dict)
    partial: bool = False


# DATA LAYER
# =============================================================================

class Normalization(str, Enum):
    NONE = "none"
    UNIT_CUBE = "unit-cube"
    Z_SCORE = "z-score"


class DatasetSpec(BaseModel):
    """
    How to turn a labeled CSV file into a two-class sample

    label_column and feature_columns accept header names or 0-based column
    indices. feature_columns=None means "every column except the label".
    class_pair names the label values mapped to X and Y, in that order.
    """

    path: str
    label_column: Union[str, int]
    feature_columns: Optional[List[Union[str, int]]] = None
    class_pair: Tuple[str, str]
    max_rows_per_class: Optional[int] = Field(None, ge=1)
    normalize: Normalization = Normalization.NONE
    delimiter: Optional[str] = None
    has_header: bool = True
    dedupe: bool = False
    jitter: float = Field(0.0, ge=0)
    seed: int = 0

    @field_validator("class_pair")
    @classmethod
    def check_pair(cls, v):
        if v[0] == v[1]:
            raise ValueError("class_pair must name two different labels")
        return v


def validation_message(exc: ValidationError) -> str:
    """Readable message for the first problem in a pydantic ValidationError"""
    errors = exc.errors()
    if not errors:
        return str(exc)
    message = errors[0].get("msg", str(exc))
    return message.replace("Value error, ", "")
