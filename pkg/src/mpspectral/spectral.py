"""Truncated eigendecompositions and SVDs with a fixed sign convention.

Small problems (``n <= DENSE_CUTOFF``) go to LAPACK. Larger ones use a block
Lanczos iteration with full reorthogonalization and thick restarts; wanted
eigenvalues are the ones of largest magnitude, which sit at both ends of the
spectrum, so plain (unshifted) Krylov iteration converges to them.

Conventions shared by every routine here:

* eigenpairs are ordered by decreasing ``|value|``; equal magnitudes put the
  positive value first;
* each returned vector has its largest-magnitude entry positive, ties going to
  the lowest index (for SVDs this is applied to the left vectors and the right
  vectors follow).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from mpspectral.errors import ConvergenceError, DimensionError

DENSE_CUTOFF = 512
SCREE_DENSE_CUTOFF = 4096
REL_TOL = 1e-9
_TIE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SpectralPair:
    """Truncated eigendecomposition ``U diag(S) U^T``."""

    U: np.ndarray
    S: np.ndarray

    @property
    def D(self) -> int:
        return self.S.size

    @property
    def p(self) -> int:
        return signature(self.S)[0]

    @property
    def q(self) -> int:
        return signature(self.S)[1]


@dataclass(frozen=True, eq=False)
class SvdTriple:
    U: np.ndarray
    S: np.ndarray
    V: np.ndarray

    @property
    def d(self) -> int:
        return self.S.size


def signature(S, rel_tol: float = REL_TOL) -> tuple[int, int, int]:
    """Count entries above ``rel_tol * max|S|`` and below its negative.

    Returns ``(p, q, p + q)``.
    """
    S = np.asarray(S, dtype=float).ravel()
    if S.size == 0:
        return 0, 0, 0
    cut = rel_tol * np.max(np.abs(S))
    p = int(np.sum(S > cut))
    q = int(np.sum(S < -cut))
    return p, q, p + q


def fix_signs(U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Flip columns so the largest-magnitude entry is positive.

    Entries within a relative ``1e-8`` of the column maximum count as tied and
    the lowest index wins, which keeps exactly symmetric vectors such as
    ``(1, -1)/sqrt(2)`` stable under rounding noise.
    """
    if U.size == 0:
        return U, np.ones(U.shape[1] if U.ndim == 2 else 0)
    mag = np.abs(U)
    top = mag.max(axis=0)
    first = np.argmax(mag >= top * (1.0 - _TIE_TOL), axis=0)
    signs = np.sign(U[first, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs, signs


def magnitude_order(values: np.ndarray) -> np.ndarray:
    """Indices sorting by decreasing magnitude, positive first on ties."""
    values = np.asarray(values, dtype=float)
    order = list(np.lexsort((-np.sign(values), -np.abs(values))))
    if not order:
        return np.array(order, dtype=int)
    tol = 1e-12 * np.abs(values).max()
    # magnitudes that agree to rounding are ties
    changed = True
    while changed:
        changed = False
        for i in range(len(order) - 1):
            a, b = values[order[i]], values[order[i + 1]]
            if a < 0 < b and abs(abs(a) - abs(b)) <= tol:
                order[i], order[i + 1] = order[i + 1], order[i]
                changed = True
    return np.asarray(order, dtype=int)


def _matmat(M):
    if sp.issparse(M):
        M = sp.csr_matrix(M)
        return lambda X: np.asarray(M @ X)
    if hasattr(M, "matmat"):
        return M.matmat
    M = np.asarray(M, dtype=float)
    return lambda X: M @ X


def _to_dense(M) -> np.ndarray:
    if sp.issparse(M):
        return M.toarray().astype(float)
    if hasattr(M, "matmat"):
        return M.matmat(np.eye(M.shape[1]))
    return np.asarray(M, dtype=float)


def _orthonormalize(W: np.ndarray, V: np.ndarray, drop_tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis for the part of ``span(W)`` orthogonal to ``V``.

    Two Gram-Schmidt passes, then a pivoted QR that discards directions whose
    surviving norm is below ``drop_tol`` of the input scale.
    """
    if W.shape[1] == 0:
        return W
    scale = np.linalg.norm(W, axis=0).max()
    if scale == 0:
        return W[:, :0]
    for _ in range(2):
        if V.shape[1]:
            W = W - V @ (V.T @ W)
    Q, R, _ = sla.qr(W, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    keep = int(np.sum(diag > drop_tol * scale))
    Q = Q[:, :keep]
    if V.shape[1] and keep:
        Q = Q - V @ (V.T @ Q)
        Q, _ = np.linalg.qr(Q)
    return Q


def _lanczos(matmat, n: int, k: int, rng: np.random.Generator, tol: float, maxiter: int):
    """Block Lanczos, full reorthogonalization, thick restart.

    Returns the ``k`` Ritz pairs of largest magnitude, ordered.
    """
    b = min(n, max(2, min(k, 8)))
    m_max = min(n, max(2 * k + 2 * b, k + 30))
    keep_n = min(k + max(b, k // 2), m_max - b) if m_max < n else m_max
    V = np.empty((n, 0))
    AV = np.empty((n, 0))
    W = rng.standard_normal((n, b))
    blocks = 0
    while True:
        W = _orthonormalize(W, V)
        if W.shape[1] == 0 and V.shape[1] < n:
            W = _orthonormalize(rng.standard_normal((n, b)), V)
        if W.shape[1]:
            W = W[:, : max(0, m_max - V.shape[1])]
            AW = matmat(W)
            blocks += 1
            V = np.hstack([V, W])
            AV = np.hstack([AV, AW])
        if V.shape[1] < m_max and W.shape[1]:
            W = AW
            continue

        H = V.T @ AV
        H = 0.5 * (H + H.T)
        theta, C = np.linalg.eigh(H)
        order = magnitude_order(theta)
        theta, C = theta[order], C[:, order]
        kk = min(k, theta.size)
        Y = V @ C[:, :kk]
        R = AV @ C[:, :kk] - Y * theta[:kk]
        res = np.linalg.norm(R, axis=0)
        scale = max(abs(theta[0]), np.finfo(float).tiny)
        if V.shape[1] >= n or np.all(res <= tol * scale):
            return theta[:k], Y
        if blocks >= maxiter:
            raise ConvergenceError(
                f"Lanczos did not converge in {maxiter} block iterations "
                f"(max relative residual {res.max() / scale:.2e})"
            )
        keep = min(keep_n, theta.size)
        Ck = C[:, :keep]
        V = V @ Ck
        AV = AV @ Ck
        R = AV - V * theta[:keep]
        W = _orthonormalize(R, V)[:, :b]


def truncated_eig_sym(
    M,
    D: int,
    seed: int = 0,
    *,
    method: str = "auto",
    tol: float = 1e-10,
    maxiter: int = 5000,
) -> SpectralPair:
    """The ``D`` eigenpairs of a symmetric matrix with largest ``|eigenvalue|``.

    Parameters
    ----------
    M : ndarray, sparse matrix or LinearOperator
        Symmetric ``n x n`` matrix.
    D : int
        Number of eigenpairs, ``1 <= D <= n``.
    seed : int
        Seeds the Krylov start block; output is a deterministic function of
        ``(M, D, seed)``.
    method : {"auto", "dense", "lanczos"}
        ``"auto"`` picks LAPACK when ``n <= 512``.
    tol : float
        Target residual ``||M u - s u|| <= tol * max|s|`` for the Krylov route.
    maxiter : int
        Block matvec budget before :class:`ConvergenceError`.
    """
    n = M.shape[0]
    if M.shape != (n, n):
        raise DimensionError("matrix must be square")
    if not 1 <= D <= n:
        raise DimensionError(f"D={D} outside 1..{n}")
    if method == "auto":
        method = "dense" if n <= DENSE_CUTOFF else "lanczos"
    if method == "dense":
        w, U = sla.eigh(_to_dense(M))
        order = magnitude_order(w)[:D]
        S, U = w[order], U[:, order]
    elif method == "lanczos":
        rng = np.random.default_rng(seed)
        S, U = _lanczos(_matmat(M), n, D, rng, tol, maxiter)
    else:
        raise ValueError(f"unknown method {method!r}")
    U, _ = fix_signs(np.ascontiguousarray(U))
    return SpectralPair(U, np.asarray(S, dtype=float))


def truncated_svd(
    M,
    d: int,
    seed: int = 0,
    *,
    method: str = "auto",
    tol: float = 1e-10,
    maxiter: int = 5000,
) -> SvdTriple:
    """Top-``d`` singular triplets of a rectangular matrix.

    The Krylov route runs :func:`truncated_eig_sym`'s solver on the Gram
    operator of the shorter side and recovers the other side by one multiply.
    """
    n1, n2 = M.shape
    if not 1 <= d <= min(n1, n2):
        raise DimensionError(f"d={d} outside 1..{min(n1, n2)}")
    if method == "auto":
        method = "dense" if min(n1, n2) <= DENSE_CUTOFF else "lanczos"
    if method == "dense":
        U, s, Vt = sla.svd(_to_dense(M), full_matrices=False, lapack_driver="gesdd")
        U, s, V = U[:, :d], s[:d], Vt[:d].T
    elif method == "lanczos":
        rng = np.random.default_rng(seed)
        if sp.issparse(M):
            M = sp.csr_matrix(M, dtype=float)
            Mt = sp.csr_matrix(M.T)
        else:
            M = np.asarray(M, dtype=float)
            Mt = M.T
        if n2 <= n1:
            theta, V = _lanczos(lambda X: Mt @ (M @ X), n2, d, rng, tol, maxiter)
            s = np.sqrt(np.clip(theta, 0.0, None))
            U = np.asarray(M @ V) / np.where(s > 0, s, 1.0)
        else:
            theta, U = _lanczos(lambda X: M @ (Mt @ X), n1, d, rng, tol, maxiter)
            s = np.sqrt(np.clip(theta, 0.0, None))
            V = np.asarray(Mt @ U) / np.where(s > 0, s, 1.0)
        order = np.argsort(-s, kind="stable")
        U, s, V = U[:, order], s[order], V[:, order]
    else:
        raise ValueError(f"unknown method {method!r}")
    U, signs = fix_signs(np.ascontiguousarray(U))
    return SvdTriple(U, np.asarray(s, dtype=float), np.ascontiguousarray(V * signs))


def scree_values(M, k: int, seed: int = 0, *, method: str = "auto") -> np.ndarray:
    """Top-``k`` eigenvalue magnitudes of a symmetric matrix, descending.

    Only values are needed here, so LAPACK is used up to ``n = 4096`` and the
    Krylov route runs with a loose ``1e-6`` residual target beyond that.
    """
    n = M.shape[0]
    k = min(k, n)
    if method == "auto":
        method = "dense" if n <= SCREE_DENSE_CUTOFF else "lanczos"
    if method == "dense":
        w = sla.eigvalsh(_to_dense(M))
        mags = np.sort(np.abs(w))[::-1]
        return mags[:k]
    rng = np.random.default_rng(seed)
    theta, _ = _lanczos(_matmat(M), n, k, rng, 1e-6, 5000)
    return np.sort(np.abs(theta))[::-1]


def dilation(M) -> sp.csr_matrix:
    """Symmetric dilation ``[[0, M], [M^T, 0]]``."""
    M = sp.csr_matrix(M)
    return sp.csr_matrix(sp.bmat([[None, M], [M.T, None]], format="csr"))


def dilation_embedding(t: SvdTriple) -> np.ndarray:
    """Ambient embedding of a bipartite graph built from its SVD.

    Rows ``[U S^1/2, U S^1/2]`` then ``[V S^1/2, -V S^1/2]``, all over
    ``sqrt(2)``; the first ``d`` columns carry the positive eigenvalues of the
    dilation, the last ``d`` the negative ones.
    """
    root = np.sqrt(t.S)
    top = t.U * root
    bottom = t.V * root
    return np.block([[top, top], [bottom, -bottom]]) / np.sqrt(2.0)
