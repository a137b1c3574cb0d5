"""Spectral embeddings of multipartite graphs and the per-group reduction step."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from mpspectral.errors import DimensionError, EmptyGraphError, EmptySubgraphError
from mpspectral.graph import MultipartiteGraph, biadjacency, bilaplacian, laplacian
from mpspectral.spectral import (
    SvdTriple,
    dilation_embedding,
    fix_signs,
    signature,
    truncated_eig_sym,
    truncated_svd,
)


@dataclass(frozen=True, eq=False)
class AmbientEmbedding:
    """Rows ``X[i]`` are the node representations in the ambient dimension ``D``."""

    X: np.ndarray
    z: np.ndarray
    eigenvalues: np.ndarray
    source: str = "adjacency"
    tau: float | None = None

    @property
    def D(self) -> int:
        return self.X.shape[1]

    @property
    def K(self) -> int:
        return int(self.z.max()) + 1

    @property
    def signature(self) -> tuple[int, int]:
        p, q, _ = signature(self.eigenvalues)
        return p, q

    def group_index(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.z == k)

    def group(self, k: int) -> np.ndarray:
        return self.X[self.group_index(k)]


@dataclass(frozen=True, eq=False)
class IntrinsicEmbedding:
    """Per-group point clouds ``Y[k] = X^(k) V[k]`` in their own dimension ``d_k``.

    ``singular_values[k]`` holds every singular value of ``X^(k)``, which is
    the scree used for intrinsic dimension selection.
    """

    Y: list
    V: list
    index: list
    singular_values: list

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(v.shape[1] for v in self.V)

    @property
    def K(self) -> int:
        return len(self.Y)


@dataclass(frozen=True, eq=False)
class BipartiteEmbedding:
    Y1: np.ndarray
    Y2: np.ndarray
    svd: SvdTriple
    index1: np.ndarray
    index2: np.ndarray


def _require_edges(g: MultipartiteGraph):
    if g.n_edges == 0:
        raise EmptyGraphError("graph has no edges, so no non-zero eigenvalues")


def _bipartite_ambient(M, g, D, seed, source, tau, method) -> AmbientEmbedding:
    d = D // 2
    idx1, idx2 = g.group_index(0), g.group_index(1)
    t = truncated_svd(M[idx1][:, idx2], d, seed, method=method)
    stacked = dilation_embedding(t)
    X = np.empty((g.n, D))
    X[idx1] = stacked[: idx1.size]
    X[idx2] = stacked[idx1.size :]
    values = np.concatenate([t.S, -t.S])
    return AmbientEmbedding(X, g.z, values, source, tau)


def _use_dilation(g: MultipartiteGraph, D: int, dilate: bool) -> bool:
    if not dilate or g.K != 2 or D % 2:
        return False
    return D // 2 <= g.group_sizes().min()


def _eig_ambient(M, g, D, seed, source, tau, method) -> AmbientEmbedding:
    pair = truncated_eig_sym(M, D, seed, method=method)
    X = pair.U * np.sqrt(np.abs(pair.S))
    return AmbientEmbedding(X, g.z, pair.S, source, tau)


def adjacency_embedding(
    g: MultipartiteGraph, D: int, seed: int = 0, *, dilate: bool = True, method: str = "auto"
) -> AmbientEmbedding:
    """``X = U |S|^{1/2}`` from the rank-``D`` truncated eigendecomposition of ``A``.

    For a bipartite graph with even ``D`` the decomposition is assembled from
    the SVD of the biadjacency matrix (the dilation identity), so the
    bipartite and multipartite routes agree exactly rather than up to a
    rotation. Pass ``dilate=False`` to always run the symmetric solver.
    """
    _require_edges(g)
    if not 1 <= D <= g.n:
        raise DimensionError(f"D={D} outside 1..{g.n}")
    if _use_dilation(g, D, dilate):
        return _bipartite_ambient(g.adjacency, g, D, seed, "adjacency", None, method)
    return _eig_ambient(g.adjacency, g, D, seed, "adjacency", None, method)


def laplacian_embedding(
    g: MultipartiteGraph,
    D: int,
    tau: float = 0.0,
    seed: int = 0,
    *,
    dilate: bool = True,
    method: str = "auto",
) -> AmbientEmbedding:
    """Same as :func:`adjacency_embedding` on ``(D + tau I)^{-1/2} A (D + tau I)^{-1/2}``."""
    _require_edges(g)
    if not 1 <= D <= g.n:
        raise DimensionError(f"D={D} outside 1..{g.n}")
    L = laplacian(g, tau)
    if _use_dilation(g, D, dilate):
        return _bipartite_ambient(L.values, g, D, seed, "laplacian", tau, method)
    return _eig_ambient(L.values, g, D, seed, "laplacian", tau, method)


def biadjacency_embedding(
    g: MultipartiteGraph,
    pair: tuple[int, int] = (0, 1),
    d: int = 1,
    seed: int = 0,
    *,
    use_laplacian: bool = False,
    tau: float = 0.0,
    method: str = "auto",
) -> BipartiteEmbedding:
    """Left/right embeddings ``U S^{1/2}`` and ``V S^{1/2}`` of one pair of groups.

    With ``use_laplacian`` the SVD is taken of the bi-Laplacian, whose degrees
    count only edges inside the pair.
    """
    k, l = pair
    block = biadjacency(g, k, l)
    if block.nnz == 0:
        raise EmptySubgraphError(f"no edges between groups {k} and {l}")
    if use_laplacian:
        block = bilaplacian(g, k, l, tau)
    t = truncated_svd(block, d, seed, method=method)
    root = np.sqrt(t.S)
    return BipartiteEmbedding(t.U * root, t.V * root, t, g.group_index(k), g.group_index(l))


def _right_vectors(Xk: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray]:
    _, s, Vt = np.linalg.svd(Xk, full_matrices=False)
    V = Vt.T
    if d > V.shape[1]:
        # fewer rows than d: complete with an orthonormal basis of the null space
        V = np.hstack([V, sla.null_space(Vt)])
    return V[:, :d], s


def multipartite_reduce(e: AmbientEmbedding, dims) -> IntrinsicEmbedding:
    """Project each group's rows onto its top-``d_k`` right singular subspace.

    Parameters
    ----------
    e : AmbientEmbedding
    dims : int or sequence of int
        Intrinsic dimension per group (a single int applies to all groups).
    """
    K = e.K
    dims = [int(dims)] * K if np.isscalar(dims) else [int(x) for x in dims]
    if len(dims) != K:
        raise DimensionError(f"{len(dims)} dimensions for {K} groups")
    Ys, Vs, idxs, svals = [], [], [], []
    for k, d in enumerate(dims):
        if not 1 <= d <= e.D:
            raise DimensionError(f"d_{k}={d} outside 1..{e.D}")
        idx = e.group_index(k)
        if idx.size == 0:
            raise DimensionError(f"group {k} is empty")
        Xk = e.X[idx]
        V, s = _right_vectors(Xk, d)
        V, _ = fix_signs(V)
        Ys.append(Xk @ V)
        Vs.append(V)
        idxs.append(idx)
        svals.append(s)
    return IntrinsicEmbedding(Ys, Vs, idxs, svals)


def spherical_projection(Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scale rows to unit norm; zero rows stay zero and their indices are returned."""
    Y = np.asarray(Y, dtype=float)
    norms = np.linalg.norm(Y, axis=1)
    zero = np.flatnonzero(norms == 0)
    out = Y / np.where(norms == 0, 1.0, norms)[:, None]
    return out, zero
