"""Numerical checks of the embedding theory: alignment, uniform error, rates,
isotropy and the limiting covariances of bipartite spectral embeddings."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mpspectral.errors import (
    DegenerateMomentError,
    RankDeficientError,
    SpecError,
    UnsupportedDistributionError,
    ZeroDegreeTargetError,
)
from mpspectral.models import LatentDistribution, PointMassMixture, UniformBox, UniformSegment

_EXACT_LAWS = (PointMassMixture, UniformBox, UniformSegment)


@dataclass(frozen=True, eq=False)
class AlignmentMap:
    """``G`` minimising ``sum_i ||G Yhat_i - Y_i||^2``."""

    G: np.ndarray
    residual: float
    cond: float
    group: int | None = None

    def apply(self, Y_hat: np.ndarray) -> np.ndarray:
        return np.asarray(Y_hat) @ self.G.T


def align_linear(Y_hat, Y, group: int | None = None) -> AlignmentMap:
    """Least-squares linear map from estimated to true positions.

    Raises
    ------
    RankDeficientError
        ``Y_hat`` does not have full column rank.
    """
    Y_hat = np.asarray(Y_hat, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if Y_hat.ndim == 1:
        Y_hat = Y_hat[:, None]
    if Y.ndim == 1:
        Y = Y[:, None]
    if Y_hat.shape[0] != Y.shape[0]:
        raise ValueError("Y_hat and Y need the same number of rows")
    s = np.linalg.svd(Y_hat, compute_uv=False)
    if s.size < Y_hat.shape[1] or s[-1] <= 1e-12 * max(s[0], np.finfo(float).tiny):
        raise RankDeficientError("Y_hat must have full column rank")
    Gt, *_ = np.linalg.lstsq(Y_hat, Y, rcond=None)
    resid = float(np.linalg.norm(Y_hat @ Gt - Y))
    return AlignmentMap(Gt.T, resid, float(s[0] / s[-1]), group)


def uniform_error(Y_hat, Y, G) -> float:
    """``max_i ||G Yhat_i - Y_i||``."""
    G = G.G if isinstance(G, AlignmentMap) else np.asarray(G, dtype=float)
    diff = np.asarray(Y_hat, dtype=float) @ G.T - np.asarray(Y, dtype=float)
    return float(np.linalg.norm(diff, axis=1).max()) if diff.size else 0.0


def expected_degrees(Yfull, Lambda) -> np.ndarray:
    """``sum_j Y_i^T Lambda^(z_i, z_j) Y_j`` for block-placed latents (row sums of ``P``)."""
    Yfull = np.asarray(Yfull, dtype=float)
    return Yfull @ (np.asarray(Lambda, dtype=float) @ Yfull.sum(axis=0))


def laplacian_target(Yfull, Lambda) -> np.ndarray:
    """Rows ``Y_i / sqrt(expected degree of i)``, block-placed like ``Yfull``.

    Raises
    ------
    ZeroDegreeTargetError
        Some node has non-positive expected degree.
    """
    den = expected_degrees(Yfull, Lambda)
    if np.any(den <= 0):
        bad = np.flatnonzero(den <= 0)
        raise ZeroDegreeTargetError(f"{bad.size} nodes with zero expected degree (first {bad[0]})")
    return np.asarray(Yfull, dtype=float) / np.sqrt(den)[:, None]


@dataclass(frozen=True, eq=False)
class CltSpec:
    """Inputs of the limiting covariance for a node of group 1 at latent ``y``.

    ``F2`` is the latent law of the other group, ``gamma2`` its proportion,
    ``mu1`` the mean of the first group's law (Laplacian case only) and
    ``rho`` is ``1`` for the dense regime or ``0`` for the sparse limit.
    """

    F2: LatentDistribution
    gamma2: float
    y: np.ndarray
    rho: float = 1.0
    mu1: np.ndarray | None = None

    def __post_init__(self):
        if not isinstance(self.F2, _EXACT_LAWS):
            raise UnsupportedDistributionError(
                f"{type(self.F2).__name__} has no exact moment formulas"
            )
        if self.rho not in (0.0, 1.0):
            raise SpecError("rho must be 1 (dense) or 0 (sparse limit)")
        if not 0 < self.gamma2 <= 1:
            raise SpecError("gamma2 must lie in (0, 1]")
        y = np.atleast_1d(np.asarray(self.y, dtype=float))
        if y.shape != (self.F2.dim,):
            raise SpecError("y must have the latent dimension")
        object.__setattr__(self, "y", y)
        if self.mu1 is not None:
            object.__setattr__(self, "mu1", np.atleast_1d(np.asarray(self.mu1, dtype=float)))

    @classmethod
    def from_laws(cls, F1, F2, gamma2, y, rho=1.0) -> "CltSpec":
        return cls(F2, gamma2, y, rho, F1.mean())

    @property
    def Delta2(self) -> np.ndarray:
        return self.F2.second_moment()

    @property
    def mu2(self) -> np.ndarray:
        return self.F2.mean()

    @property
    def breve_Delta2(self) -> np.ndarray:
        mu1 = self._mu1()
        return self.F2.expect(lambda x: x[:, :, None] * x[:, None, :] / (x @ mu1)[:, None, None])

    def _mu1(self) -> np.ndarray:
        if self.mu1 is None:
            raise SpecError("the Laplacian covariance needs mu1")
        pts, _ = self.F2.quadrature()
        if np.any(pts @ self.mu1 <= 0):
            raise DegenerateMomentError("mu1^T zeta vanishes on the support of F2")
        return self.mu1


def clt_covariance_adjacency(spec: CltSpec) -> np.ndarray:
    """``gamma2^-1 Delta2^-1 Gamma(y) Delta2^-1`` with
    ``Gamma(y) = E{y'z (1 - rho y'z) z z'}``."""
    y, rho = spec.y, spec.rho

    def integrand(x):
        t = x @ y
        w = t * (1.0 - rho * t)
        return w[:, None, None] * x[:, :, None] * x[:, None, :]

    Gamma = spec.F2.expect(integrand)
    Dinv = np.linalg.inv(spec.Delta2)
    S = Dinv @ Gamma @ Dinv / spec.gamma2
    return 0.5 * (S + S.T)


def clt_covariance_laplacian(spec: CltSpec) -> np.ndarray:
    """``gamma2^-2 B^-1 Gamma(y) B^-1`` with ``B = E(z z' / mu1'z)`` and
    ``Gamma(y) = E{ y'z (1 - rho y'z) / (y'mu2) v v' }``,
    ``v = z / mu1'z - B y / (2 mu2'y)``.

    Only point-mass mixtures are supported: the integrand is rational, so the
    polynomial quadrature used for the uniform laws would not be exact.
    """
    if not isinstance(spec.F2, PointMassMixture):
        raise UnsupportedDistributionError("Laplacian covariance needs a point-mass mixture F2")
    y, rho = spec.y, spec.rho
    mu1 = spec._mu1()
    mu2y = float(spec.mu2 @ y)
    if mu2y <= 0:
        raise DegenerateMomentError("mu2^T y must be positive")
    B = spec.breve_Delta2
    shift = B @ y / (2.0 * mu2y)

    def integrand(x):
        t = x @ y
        w = t * (1.0 - rho * t) / mu2y
        v = x / (x @ mu1)[:, None] - shift
        return w[:, None, None] * v[:, :, None] * v[:, None, :]

    Gamma = spec.F2.expect(integrand)
    Binv = np.linalg.inv(B)
    S = Binv @ Gamma @ Binv / spec.gamma2**2
    return 0.5 * (S + S.T)


def isotropy_defect(X, z, p: int, q: int, chunk: int = 2048) -> np.ndarray:
    """Per group, ``max |X_i^T I_{p,q} X_j|`` over pairs of that group (``i = j`` included)."""
    X = np.asarray(X, dtype=float)
    z = np.asarray(z)
    if p + q != X.shape[1]:
        raise ValueError(f"p + q = {p + q} but X has {X.shape[1]} columns")
    sign = np.r_[np.ones(p), -np.ones(q)]
    K = int(z.max()) + 1
    out = np.zeros(K)
    for k in range(K):
        Xk = X[z == k]
        for s in range(0, Xk.shape[0], chunk):
            block = (Xk[s : s + chunk] * sign) @ Xk.T
            out[k] = max(out[k], float(np.abs(block).max()))
    return out


def rate_slope(n_grid, errors) -> float:
    """Least-squares slope of ``log(error)`` on ``log(n)``."""
    n_grid = np.asarray(n_grid, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if n_grid.size < 3 or n_grid.size != errors.size:
        raise ValueError("need at least three (n, error) pairs")
    slope, _ = np.polyfit(np.log(n_grid), np.log(errors), 1)
    return float(slope)


def relative_frobenius(estimate, truth) -> float:
    truth = np.asarray(truth, dtype=float)
    return float(np.linalg.norm(np.asarray(estimate) - truth) / np.linalg.norm(truth))
