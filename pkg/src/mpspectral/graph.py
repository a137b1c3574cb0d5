"""Multipartite graph container, degrees, Laplacians and biadjacency blocks.

Nodes and groups are 0-based inside the package; the file readers in
:mod:`mpspectral.io` translate from the 1-based on-disk convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from mpspectral.errors import (
    IsolatedNodeError,
    MultipartiteError,
    MultipartiteViolationError,
    SameGroupError,
)


def _as_labels(z) -> np.ndarray:
    z = np.asarray(z)
    if z.ndim != 1:
        raise MultipartiteError("group labels must be a 1-d array")
    if z.size and not np.issubdtype(z.dtype, np.integer):
        if not np.all(np.equal(np.mod(z, 1), 0)):
            raise MultipartiteError("group labels must be integers")
    return z.astype(np.int64)


def _symmetric_csr(n: int, rows, cols) -> sp.csr_matrix:
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    if rows.size and (rows.min() < 0 or cols.min() < 0 or rows.max() >= n or cols.max() >= n):
        raise MultipartiteError("edge endpoint out of range")
    if np.any(rows == cols):
        raise MultipartiteError("self-loops are not allowed")
    lo = np.minimum(rows, cols)
    hi = np.maximum(rows, cols)
    # duplicates collapse to a single 0/1 entry
    key = np.unique(lo * n + hi)
    lo, hi = key // n, key % n
    data = np.ones(2 * lo.size)
    a = sp.coo_matrix(
        (data, (np.concatenate([lo, hi]), np.concatenate([hi, lo]))), shape=(n, n)
    ).tocsr()
    a.sort_indices()
    return a


def validate_multipartite(adjacency, z) -> list[tuple[int, int]]:
    """Return every edge ``(i, j)``, ``i < j``, whose endpoints share a group.

    An empty list means the graph is multipartite with respect to ``z``.
    """
    a = sp.triu(sp.csr_matrix(adjacency), k=1).tocoo()
    z = _as_labels(z)
    bad = z[a.row] == z[a.col]
    pairs = sorted(zip(a.row[bad].tolist(), a.col[bad].tolist()))
    return pairs


@dataclass(frozen=True, eq=False)
class MultipartiteGraph:
    """Undirected simple graph whose nodes carry group labels ``0..K-1``.

    Both triangles of the adjacency are stored (CSR, float64) so that
    eigensolvers get a plain symmetric matvec. Instances are immutable.
    """

    adjacency: sp.csr_matrix
    z: np.ndarray
    K: int = field(default=-1)

    def __post_init__(self):
        a = sp.csr_matrix(self.adjacency, dtype=np.float64)
        a.sort_indices()
        z = _as_labels(self.z)
        n = a.shape[0]
        if a.shape != (n, n):
            raise MultipartiteError("adjacency must be square")
        if z.size != n:
            raise MultipartiteError(f"{z.size} labels for {n} nodes")
        if a.nnz:
            if np.any(a.diagonal() != 0):
                raise MultipartiteError("self-loops are not allowed")
            if np.any(a.data != 1.0):
                raise MultipartiteError("adjacency entries must be 0/1")
            if (a != a.T).nnz:
                raise MultipartiteError("adjacency must be symmetric")
        if self.K >= 0:
            K = self.K
        else:
            K = int(z.max()) + 1 if n else 0
        if n and z.min() < 0:
            raise MultipartiteError("group labels must be non-negative")
        if n and z.max() >= K:
            raise MultipartiteError(f"label {z.max()} outside 0..{K - 1}")
        present = np.bincount(z, minlength=K) if n else np.zeros(K, dtype=int)
        if np.any(present == 0):
            missing = np.flatnonzero(present == 0).tolist()
            raise MultipartiteError(f"groups {missing} have no nodes")
        bad = validate_multipartite(a, z)
        if bad:
            raise MultipartiteViolationError(
                f"{len(bad)} edges join nodes of the same group, e.g. {bad[0]}"
            )
        object.__setattr__(self, "adjacency", a)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "K", K)
        a.data.setflags(write=False)
        z.setflags(write=False)

    @classmethod
    def from_edges(cls, n: int, edges, z, K: int | None = None) -> "MultipartiteGraph":
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        a = _symmetric_csr(n, edges[:, 0], edges[:, 1])
        return cls(a, z, -1 if K is None else K)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def n_edges(self) -> int:
        return self.adjacency.nnz // 2

    def group_index(self, k: int) -> np.ndarray:
        """Ascending node indices of group ``k``."""
        return np.flatnonzero(self.z == k)

    def group_sizes(self) -> np.ndarray:
        return np.bincount(self.z, minlength=self.K)

    def edges(self) -> np.ndarray:
        """Upper-triangle edge list, shape ``(m, 2)``, sorted."""
        u = sp.triu(self.adjacency, k=1).tocoo()
        order = np.lexsort((u.col, u.row))
        return np.column_stack([u.row[order], u.col[order]]).astype(np.int64)

    def subgraph(self, groups) -> "MultipartiteGraph":
        """Induced subgraph on the given groups, relabelled ``0..len(groups)-1``."""
        groups = list(groups)
        keep = np.flatnonzero(np.isin(self.z, groups))
        relabel = {g: i for i, g in enumerate(groups)}
        z = np.array([relabel[g] for g in self.z[keep]], dtype=np.int64)
        return MultipartiteGraph(self.adjacency[keep][:, keep], z, len(groups))


@dataclass(frozen=True, eq=False)
class LaplacianMatrix:
    values: sp.csr_matrix
    tau: float
    degrees: np.ndarray


def degrees(g: MultipartiteGraph) -> np.ndarray:
    return np.asarray(g.adjacency.sum(axis=1)).ravel().astype(np.int64)


def average_degree(g: MultipartiteGraph) -> float:
    return 2.0 * g.n_edges / g.n if g.n else 0.0


def _normalize(a: sp.spmatrix, d_rows: np.ndarray, d_cols: np.ndarray) -> sp.csr_matrix:
    with np.errstate(divide="ignore"):
        r = np.where(d_rows > 0, 1.0 / np.sqrt(d_rows), 0.0)
        c = np.where(d_cols > 0, 1.0 / np.sqrt(d_cols), 0.0)
    out = sp.csr_matrix(sp.diags(r) @ sp.csr_matrix(a) @ sp.diags(c))
    out.sort_indices()
    return out


def laplacian(g: MultipartiteGraph, tau: float = 0.0) -> LaplacianMatrix:
    """Normalized Laplacian ``(D + tau I)^{-1/2} A (D + tau I)^{-1/2}``."""
    if tau < 0:
        raise MultipartiteError("tau must be non-negative")
    d = degrees(g)
    if tau == 0 and np.any(d == 0):
        iso = np.flatnonzero(d == 0)
        raise IsolatedNodeError(f"{iso.size} isolated nodes (first: {iso[0]}) with tau=0")
    inflated = d + float(tau)
    return LaplacianMatrix(_normalize(g.adjacency, inflated, inflated), float(tau), d)


def biadjacency(g: MultipartiteGraph, k: int, l: int) -> sp.csr_matrix:
    """Rows: group ``k`` nodes in ascending order; columns: group ``l`` nodes."""
    if k == l:
        raise SameGroupError(f"biadjacency needs two distinct groups, got {k} twice")
    rows, cols = g.group_index(k), g.group_index(l)
    block = g.adjacency[rows][:, cols]
    return sp.csr_matrix(block)


def bilaplacian(g: MultipartiteGraph, k: int, l: int, tau: float = 0.0) -> sp.csr_matrix:
    """``D_k^{-1/2} A_kl D_l^{-1/2}`` with degrees counted inside the pair."""
    b = biadjacency(g, k, l)
    d1 = np.asarray(b.sum(axis=1)).ravel()
    d2 = np.asarray(b.sum(axis=0)).ravel()
    if tau == 0 and (np.any(d1 == 0) or np.any(d2 == 0)):
        raise IsolatedNodeError(
            f"{int(np.sum(d1 == 0) + np.sum(d2 == 0))} nodes have no edge inside groups ({k}, {l})"
        )
    return _normalize(b, d1 + tau, d2 + tau)
