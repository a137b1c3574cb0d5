"""k-means, the end-to-end multipartite spectral clustering pipeline, and ARI."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from mpspectral.embedding import (
    AmbientEmbedding,
    IntrinsicEmbedding,
    adjacency_embedding,
    laplacian_embedding,
    multipartite_reduce,
    spherical_projection,
)
from mpspectral.errors import (
    EmptyGroupAfterFilterError,
    KTooLargeError,
    LengthMismatchError,
    MultipartiteError,
)
from mpspectral.graph import MultipartiteGraph, average_degree, degrees, laplacian
from mpspectral.selection import select_rank
from mpspectral.spectral import scree_values

MATRIX_SOURCES = ("adjacency", "laplacian", "regularized_laplacian")


class KMeansResult(NamedTuple):
    labels: np.ndarray
    centers: np.ndarray
    inertia: float


def _sq_dists(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    d = (X * X).sum(1)[:, None] - 2.0 * X @ C.T + (C * C).sum(1)[None, :]
    return np.maximum(d, 0.0)


def _kmeanspp(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    m = X.shape[0]
    centers = [X[rng.integers(m)]]
    closest = _sq_dists(X, centers[0][None, :])[:, 0]
    for _ in range(1, k):
        total = closest.sum()
        if total <= 0:
            # every point coincides with a chosen center: pick unused points uniformly
            idx = rng.integers(m)
        else:
            idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            idx = min(idx, m - 1)
        centers.append(X[idx])
        closest = np.minimum(closest, _sq_dists(X, X[idx][None, :])[:, 0])
    return np.array(centers)


def _lloyd(X: np.ndarray, C: np.ndarray, max_iter: int) -> KMeansResult:
    k = C.shape[0]
    labels = np.full(X.shape[0], -1)
    for _ in range(max_iter):
        d = _sq_dists(X, C)
        new = np.argmin(d, axis=1)
        counts = np.bincount(new, minlength=k)
        served = d[np.arange(X.shape[0]), new]
        for j in np.flatnonzero(counts == 0):
            # reseed an empty cluster at the point worst served by its center,
            # never taking the last member of another cluster
            cand = np.where(counts[new] > 1, served, -np.inf)
            far = int(np.argmax(cand))
            counts[new[far]] -= 1
            counts[j] = 1
            new[far] = j
            served[far] = -np.inf
        if np.array_equal(new, labels):
            break
        labels = new
        sums = np.zeros_like(C)
        np.add.at(sums, labels, X)
        C = sums / np.bincount(labels, minlength=k)[:, None]
    inertia = float(_sq_dists(X, C)[np.arange(X.shape[0]), labels].sum())
    return KMeansResult(labels, C, inertia)


def kmeans(points, k: int, seed: int = 0, restarts: int = 10, max_iter: int = 300) -> KMeansResult:
    """Best of ``restarts`` Lloyd runs from k-means++ starts (squared Euclidean).

    Cluster ids are renumbered by first appearance so equal partitions get
    equal label vectors.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    m = X.shape[0]
    if not 1 <= k <= m:
        raise KTooLargeError(f"k={k} clusters for {m} points")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        res = _lloyd(X, _kmeanspp(X, k, rng), max_iter)
        if best is None or res.inertia < best.inertia:
            best = res
    present, first = np.unique(best.labels, return_index=True)
    order = present[np.argsort(first)]
    remap = np.full(k, -1, dtype=np.int64)
    remap[order] = np.arange(order.size)
    return KMeansResult(remap[best.labels], best.centers[order], best.inertia)


@dataclass(frozen=True)
class PipelineConfig:
    """Settings for :func:`run_pipeline`.

    The defaults are the configuration used on sparse real networks:
    regularized Laplacian with ``tau`` equal to the average degree, spherical
    projection, and nodes of degree below 5 left out of clustering.

    ``D`` and ``dims`` fix the ambient and per-group ranks; whichever is left
    as ``None`` is selected from its scree. ``rank_mode="fixed"`` insists on
    both being given.
    """

    matrix_source: str = "regularized_laplacian"
    tau: float | str = "average_degree"
    spherical: bool = True
    rank_mode: str = "auto"
    D: int | None = None
    dims: tuple | None = None
    n_clusters: tuple | None = None
    degree_min: int = 5
    n_scree: int = 100
    elbow: int = 1
    restarts: int = 10
    max_iter: int = 300
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.matrix_source not in MATRIX_SOURCES:
            raise ValueError(f"matrix_source must be one of {MATRIX_SOURCES}")
        if self.rank_mode not in ("auto", "fixed"):
            raise ValueError("rank_mode must be 'auto' or 'fixed'")
        if self.rank_mode == "fixed" and (self.D is None or self.dims is None):
            raise ValueError("fixed rank mode needs both D and dims")
        if self.degree_min < 0:
            raise ValueError("degree_min must be non-negative")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if isinstance(self.tau, str) and self.tau != "average_degree":
            raise ValueError("tau must be a number or 'average_degree'")
        if self.dims is not None:
            object.__setattr__(self, "dims", tuple(int(x) for x in np.atleast_1d(self.dims)))
        if self.n_clusters is not None:
            object.__setattr__(
                self, "n_clusters", tuple(int(x) for x in np.atleast_1d(self.n_clusters))
            )

    def resolve_tau(self, g: MultipartiteGraph) -> float:
        if self.matrix_source != "regularized_laplacian":
            return 0.0
        return average_degree(g) if self.tau == "average_degree" else float(self.tau)


def _per_group(values: tuple, K: int, name: str) -> tuple:
    if len(values) == 1:
        return values * K
    if len(values) != K:
        raise ValueError(f"{name} has {len(values)} entries for {K} groups")
    return values


@dataclass(frozen=True, eq=False)
class SpectralStage:
    """Everything up to (and including) the per-group reduction."""

    ambient: AmbientEmbedding
    intrinsic: IntrinsicEmbedding
    D: int
    dims: tuple
    signature: tuple
    cap_violations: tuple
    scree_ambient: np.ndarray
    scree_groups: list
    tau: float

    @property
    def cap(self) -> int:
        return min(self.signature)


def spectral_stage(g: MultipartiteGraph, cfg: PipelineConfig | None = None) -> SpectralStage:
    """Rank selection, ambient embedding and per-group reduction.

    The ambient scree (``n_scree`` largest ``|eigenvalues|`` of the chosen
    matrix) is only computed when ``D`` has to be selected.
    """
    cfg = cfg or PipelineConfig()
    tau = cfg.resolve_tau(g)
    if cfg.D is None:
        M = g.adjacency if cfg.matrix_source == "adjacency" else laplacian(g, tau).values
        scree = scree_values(M, cfg.n_scree, cfg.seed)
        D = select_rank(scree, cfg.elbow)
    else:
        scree = np.array([])
        D = int(cfg.D)
    if cfg.matrix_source == "adjacency":
        ambient = adjacency_embedding(g, D, cfg.seed)
    else:
        ambient = laplacian_embedding(g, D, tau, cfg.seed)
    p, q = ambient.signature
    group_scree = [np.linalg.svd(ambient.group(k), compute_uv=False) for k in range(g.K)]
    if cfg.dims is not None:
        dims = _per_group(cfg.dims, g.K, "dims")
    else:
        dims = tuple(select_rank(s, cfg.elbow) for s in group_scree)
    violations = tuple(k for k, d in enumerate(dims) if d > min(p, q))
    intrinsic = multipartite_reduce(ambient, dims)
    return SpectralStage(ambient, intrinsic, D, dims, (p, q), violations, scree, group_scree, tau)


@dataclass(frozen=True, eq=False)
class ClusteringResult:
    """Pipeline output.

    ``labels`` are global community ids starting at 1, namespaced by group
    (group ``k`` owns a contiguous id range); filtered nodes get ``0``.
    ``local_labels`` are the per-group k-means ids (``-1`` when filtered).
    """

    labels: np.ndarray
    local_labels: np.ndarray
    n_clusters: tuple
    inertia: tuple
    filtered: np.ndarray
    stage: SpectralStage = field(repr=False)

    @property
    def D(self) -> int:
        return self.stage.D

    @property
    def dims(self) -> tuple:
        return self.stage.dims

    @property
    def signature(self) -> tuple:
        return self.stage.signature

    @property
    def cap_violations(self) -> tuple:
        return self.stage.cap_violations


def run_pipeline(g: MultipartiteGraph, cfg: PipelineConfig | None = None) -> ClusteringResult:
    """Multipartite spectral clustering.

    1. ambient rank ``D`` from the scree of ``M`` (or fixed);
    2. ``X = U |S|^{1/2}`` of ``M``;
    3. per group, rank ``d_k`` from the singular values of ``X^(k)`` (or fixed);
    4. project onto the top ``d_k`` right singular vectors;
    5. optional row normalisation;
    6. drop nodes of degree ``< degree_min`` and run k-means with ``d_k``
       clusters (or the override) in each group.
    """
    cfg = cfg or PipelineConfig()
    if g.K < 2:
        raise MultipartiteError("clustering needs at least two groups")
    stage = spectral_stage(g, cfg)
    intrinsic = stage.intrinsic
    n_clusters = _per_group(cfg.n_clusters, g.K, "n_clusters") if cfg.n_clusters else stage.dims
    keep_mask = degrees(g) >= cfg.degree_min

    def cluster_group(k):
        idx = intrinsic.index[k]
        Y = intrinsic.Y[k]
        if cfg.spherical:
            Y, _ = spherical_projection(Y)
        sel = keep_mask[idx]
        if not sel.any():
            raise EmptyGroupAfterFilterError(
                f"group {k} has no node with degree >= {cfg.degree_min}"
            )
        res = kmeans(Y[sel], n_clusters[k], cfg.seed + k, cfg.restarts, cfg.max_iter)
        return idx[sel], res

    groups = range(g.K)
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(cluster_group, groups))
    else:
        results = [cluster_group(k) for k in groups]

    labels = np.zeros(g.n, dtype=np.int64)
    local = np.full(g.n, -1, dtype=np.int64)
    offset = 1
    inertia = []
    for k, (idx, res) in enumerate(results):
        local[idx] = res.labels
        labels[idx] = res.labels + offset
        offset += n_clusters[k]
        inertia.append(res.inertia)
    return ClusteringResult(
        labels=labels,
        local_labels=local,
        n_clusters=tuple(n_clusters),
        inertia=tuple(inertia),
        filtered=np.flatnonzero(~keep_mask),
        stage=stage,
    )


def _comb2(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    return float((x * (x - 1) / 2).sum())


def adjusted_rand_index(a, b) -> float:
    """Adjusted Rand index; two single-cluster (or two all-singleton) labelings score 1."""
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.size != b.size:
        raise LengthMismatchError(f"label vectors of length {a.size} and {b.size}")
    n = a.size
    if n < 2:
        return 1.0
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)
    index = _comb2(table)
    sa = _comb2(table.sum(1))
    sb = _comb2(table.sum(0))
    expected = sa * sb / _comb2(np.array([n]))
    top = 0.5 * (sa + sb)
    if top == expected:
        return 1.0
    return (index - expected) / (top - expected)


def within_group_ari(truth, labels, z, keep=None) -> np.ndarray:
    """ARI of ``labels`` against ``truth`` inside each group (optionally on ``keep`` only)."""
    truth = np.asarray(truth)
    labels = np.asarray(labels)
    z = np.asarray(z)
    if truth.size != labels.size or z.size != labels.size:
        raise LengthMismatchError("truth, labels and groups must have equal length")
    mask = np.ones(z.size, bool) if keep is None else np.asarray(keep, bool)
    K = int(z.max()) + 1
    return np.array(
        [adjusted_rand_index(truth[(z == k) & mask], labels[(z == k) & mask]) for k in range(K)]
    )
