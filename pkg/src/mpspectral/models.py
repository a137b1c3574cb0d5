"""Random multipartite graph models.

All samplers draw edges through one row-blocked Bernoulli routine so that two
models producing the same probability matrix under the same seed give the
same graph. Latent variables and edges use separate child streams of the seed
(``SeedSequence(seed).spawn(2)``), which keeps that pairing intact when a
model has to draw latents first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from mpspectral.errors import (
    AsymmetryError,
    DegenerateError,
    ProbabilityRangeError,
    SpecError,
    WeightRangeError,
)
from mpspectral.graph import MultipartiteGraph, _symmetric_csr
from mpspectral.spectral import fix_signs, signature

ROW_BLOCK = 256
_PROB_SLACK = 1e-12


def streams(seed) -> tuple[np.random.Generator, np.random.Generator]:
    """``(latent_rng, edge_rng)`` derived from one seed."""
    latent, edge = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(latent), np.random.default_rng(edge)


def sample_edges(prob_rows: Callable[[int, int], np.ndarray], n: int, rng) -> np.ndarray:
    """Upper-triangle Bernoulli draws, returned as an ``(m, 2)`` edge array.

    ``prob_rows(i0, i1)`` must return rows ``i0:i1`` of the probability matrix
    restricted to columns ``i0:n``.
    """
    out = []
    for i0 in range(0, n, ROW_BLOCK):
        i1 = min(n, i0 + ROW_BLOCK)
        P = prob_rows(i0, i1)
        if P.size and (P.min() < -_PROB_SLACK or P.max() > 1 + _PROB_SLACK):
            raise ProbabilityRangeError(
                f"edge probabilities in [{P.min():.4g}, {P.max():.4g}] leave [0, 1]"
            )
        U = rng.random((i1 - i0, n - i0))
        upper = np.arange(n - i0)[None, :] > np.arange(i1 - i0)[:, None]
        r, c = np.nonzero((U < P) & upper)
        out.append(np.column_stack([r + i0, c + i0]))
    return np.concatenate(out) if out else np.empty((0, 2), dtype=np.int64)


# --------------------------------------------------------------------------
# explicit probability matrices


@dataclass(frozen=True, eq=False)
class ProbabilityMatrix:
    values: np.ndarray
    z: np.ndarray | None = None

    def __post_init__(self):
        P = np.asarray(self.values, dtype=float)
        n = P.shape[0]
        if P.shape != (n, n):
            raise SpecError("probability matrix must be square")
        if not np.allclose(P, P.T, rtol=0, atol=1e-12):
            raise AsymmetryError("probability matrix must be symmetric")
        if n and (P.min() < 0 or P.max() > 1):
            raise ProbabilityRangeError("entries must lie in [0, 1]")
        if np.any(np.diag(P) != 0):
            raise SpecError("diagonal must be zero")
        if self.z is not None:
            z = np.asarray(self.z, dtype=np.int64)
            if np.any(P[z[:, None] == z[None, :]] != 0):
                raise SpecError("p_ij must vanish whenever z_i == z_j")
            object.__setattr__(self, "z", z)
        object.__setattr__(self, "values", P)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def sample_inhomogeneous(P: ProbabilityMatrix, seed=0, K: int | None = None) -> MultipartiteGraph:
    """Independent ``Bernoulli(p_ij)`` edges for ``i < j``.

    Without group labels on ``P`` every node becomes its own group, which is a
    valid labelling of any simple graph.
    """
    _, rng = streams(seed)
    n = P.n
    edges = sample_edges(lambda i0, i1: P.values[i0:i1, i0:], n, rng)
    z = P.z if P.z is not None else np.arange(n, dtype=np.int64)
    return MultipartiteGraph(_symmetric_csr(n, edges[:, 0], edges[:, 1]), z, -1 if K is None else K)


def _check_weights(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0) or np.any(w > 1):
        raise WeightRangeError("weights must lie in (0, 1]")
    return w


def chung_lu_matrix(w, z) -> ProbabilityMatrix:
    """``p_ij = w_i w_j`` across groups and ``0`` inside a group."""
    w = _check_weights(w)
    z = np.asarray(z, dtype=np.int64)
    P = np.outer(w, w)
    P[z[:, None] == z[None, :]] = 0.0
    return ProbabilityMatrix(P, z)


# --------------------------------------------------------------------------
# stochastic block models


def balanced_assignment(n: int, S: int) -> np.ndarray:
    """Contiguous, sizes differ by at most one (extra nodes to the first communities)."""
    sizes = np.full(S, n // S)
    sizes[: n % S] += 1
    return np.repeat(np.arange(S), sizes)


@dataclass(frozen=True, eq=False)
class SbmSpec:
    """Multipartite (degree-corrected) stochastic block model.

    ``B`` is ``S x S``, ``zeta[s]`` is the group of community ``s`` and
    ``tau[i]`` the community of node ``i``. ``w`` (optional) holds node weights
    in ``(0, 1]``; omitting it gives the plain block model.
    """

    B: np.ndarray
    zeta: np.ndarray
    tau: np.ndarray
    w: np.ndarray | None = None

    def __post_init__(self):
        B = np.asarray(self.B, dtype=float)
        zeta = np.asarray(self.zeta, dtype=np.int64)
        tau = np.asarray(self.tau, dtype=np.int64)
        S = B.shape[0]
        if B.shape != (S, S) or zeta.shape != (S,):
            raise SpecError("B must be S x S with one group per community")
        if not np.allclose(B, B.T, rtol=0, atol=1e-15):
            raise AsymmetryError("B must be symmetric")
        if B.min() < 0 or B.max() > 1:
            raise ProbabilityRangeError("B entries must lie in [0, 1]")
        if np.any(B[zeta[:, None] == zeta[None, :]] != 0):
            raise SpecError("b_kl must vanish when communities share a group")
        if tau.size and (tau.min() < 0 or tau.max() >= S):
            raise SpecError("community labels outside 0..S-1")
        w = None if self.w is None else _check_weights(self.w)
        if w is not None and w.shape != tau.shape:
            raise SpecError("one weight per node required")
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "zeta", zeta)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.tau.size

    @property
    def S(self) -> int:
        return self.B.shape[0]

    @property
    def K(self) -> int:
        return int(self.zeta.max()) + 1

    @property
    def z(self) -> np.ndarray:
        return self.zeta[self.tau]

    def weights(self) -> np.ndarray:
        return np.ones(self.n) if self.w is None else self.w

    def with_weights(self, w) -> "SbmSpec":
        return SbmSpec(self.B, self.zeta, self.tau, w)

    def prob_rows(self, i0: int, i1: int) -> np.ndarray:
        w = self.weights()
        blk = self.B[self.tau[i0:i1]][:, self.tau[i0:]]
        return w[i0:i1, None] * blk * w[None, i0:]


def sbm_matrix(spec: SbmSpec) -> ProbabilityMatrix:
    """Dense ``p_ij = w_i w_j b_{tau_i tau_j}`` (zero diagonal)."""
    P = spec.prob_rows(0, spec.n)
    np.fill_diagonal(P, 0.0)
    return ProbabilityMatrix(P, spec.z)


def sample_sbm(spec: SbmSpec, seed=0) -> MultipartiteGraph:
    """Same draws as ``sample_inhomogeneous(sbm_matrix(spec), seed)`` without the dense matrix."""
    _, rng = streams(seed)
    edges = sample_edges(spec.prob_rows, spec.n, rng)
    return MultipartiteGraph(_symmetric_csr(spec.n, edges[:, 0], edges[:, 1]), spec.z, spec.K)


OBSCURED_DEFAULTS = dict(a=0.3, b=0.6, c=0.2, d=0.5, e=0.25, f=0.55)


def obscured_b_matrix(a, b, c, d, e, f) -> np.ndarray:
    return np.array(
        [
            [0, 0, a, a, c, d],
            [0, 0, b, b, c, d],
            [a, b, 0, 0, e, e],
            [a, b, 0, 0, f, f],
            [c, c, e, f, 0, 0],
            [d, d, e, f, 0, 0],
        ],
        dtype=float,
    )


def obscured_sbm_preset(
    a=0.3, b=0.6, c=0.2, d=0.5, e=0.25, f=0.55, n: int = 600, w=None
) -> SbmSpec:
    """Tripartite block model with two communities per group in which every
    pairwise subgraph hides one group's community split.

    Communities are assigned in balanced contiguous blocks; groups are
    ``(0, 0, 1, 1, 2, 2)``.
    """
    vals = np.array([a, b, c, d, e, f], dtype=float)
    if vals.min() < 0 or vals.max() > 1:
        raise ProbabilityRangeError("parameters must lie in [0, 1]")
    for name, (x, y) in {"a=b": (a, b), "c=d": (c, d), "e=f": (e, f)}.items():
        if x == y:
            raise DegenerateError(f"{name} makes B rank deficient")
    B = obscured_b_matrix(a, b, c, d, e, f)
    if np.linalg.matrix_rank(B) < 6:
        raise DegenerateError("B is rank deficient for these parameters")
    return SbmSpec(B, np.array([0, 0, 1, 1, 2, 2]), balanced_assignment(n, 6), w)


# --------------------------------------------------------------------------
# latent distributions with exactly computable moments

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(4)


class LatentDistribution:
    """Base for the closed set of supported latent laws.

    ``expect(fn)`` integrates ``fn`` (vectorised over rows) against the law:
    exactly for point-mass mixtures, and exactly for polynomials of degree at
    most 7 per coordinate for the uniform laws (4-point Gauss-Legendre).
    """

    exact_for_any = False
    dim: int

    def quadrature(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def draw(self, rng, size) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def extreme_points(self) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def expect(self, fn):
        pts, wts = self.quadrature()
        vals = np.asarray(fn(pts), dtype=float)
        return np.tensordot(wts, vals, axes=(0, 0))

    def mean(self) -> np.ndarray:
        return self.expect(lambda x: x)

    def second_moment(self) -> np.ndarray:
        return self.expect(lambda x: x[:, :, None] * x[:, None, :])


@dataclass(frozen=True, eq=False)
class PointMassMixture(LatentDistribution):
    atoms: np.ndarray
    probs: np.ndarray
    exact_for_any = True

    def __post_init__(self):
        atoms = np.atleast_2d(np.asarray(self.atoms, dtype=float))
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (atoms.shape[0],) or np.any(probs < 0) or not np.isclose(probs.sum(), 1):
            raise SpecError("atom probabilities must be a probability vector")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "probs", probs / probs.sum())

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    def quadrature(self):
        keep = self.probs > 0
        return self.atoms[keep], self.probs[keep]

    def draw(self, rng, size):
        comp = rng.choice(self.probs.size, size=size, p=self.probs)
        return self.atoms[comp], comp

    def extreme_points(self):
        return self.atoms[self.probs > 0]

    def to_dict(self):
        return {"type": "atoms", "atoms": self.atoms.tolist(), "probs": self.probs.tolist()}


@dataclass(frozen=True, eq=False)
class UniformBox(LatentDistribution):
    low: np.ndarray
    high: np.ndarray

    def __post_init__(self):
        low = np.atleast_1d(np.asarray(self.low, dtype=float))
        high = np.atleast_1d(np.asarray(self.high, dtype=float))
        if low.shape != high.shape or np.any(high <= low):
            raise SpecError("box needs low < high in every coordinate")
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)

    @property
    def dim(self) -> int:
        return self.low.size

    def quadrature(self):
        t = 0.5 * (_GL_NODES + 1.0)
        w = 0.5 * _GL_WEIGHTS
        grids = np.meshgrid(*([t] * self.dim), indexing="ij")
        pts = np.column_stack([g.ravel() for g in grids])
        wts = np.prod(np.meshgrid(*([w] * self.dim), indexing="ij"), axis=0).ravel()
        return self.low + pts * (self.high - self.low), wts

    def draw(self, rng, size):
        u = rng.random((size, self.dim))
        return self.low + u * (self.high - self.low), np.full(size, -1)

    def extreme_points(self):
        corners = np.array(np.meshgrid(*[[0, 1]] * self.dim, indexing="ij")).reshape(self.dim, -1).T
        return self.low + corners * (self.high - self.low)

    def to_dict(self):
        return {"type": "box", "low": self.low.tolist(), "high": self.high.tolist()}


@dataclass(frozen=True, eq=False)
class UniformSegment(LatentDistribution):
    start: np.ndarray
    end: np.ndarray

    def __post_init__(self):
        start = np.atleast_1d(np.asarray(self.start, dtype=float))
        end = np.atleast_1d(np.asarray(self.end, dtype=float))
        if start.shape != end.shape or np.allclose(start, end):
            raise SpecError("segment needs two distinct endpoints of equal dimension")
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "end", end)

    @property
    def dim(self) -> int:
        return self.start.size

    def quadrature(self):
        t = 0.5 * (_GL_NODES + 1.0)
        return self.start + t[:, None] * (self.end - self.start), 0.5 * _GL_WEIGHTS

    def draw(self, rng, size):
        t = rng.random(size)
        return self.start + t[:, None] * (self.end - self.start), np.full(size, -1)

    def extreme_points(self):
        return np.vstack([self.start, self.end])

    def to_dict(self):
        return {"type": "segment", "start": self.start.tolist(), "end": self.end.tolist()}


def latent_from_dict(doc: dict) -> LatentDistribution:
    kind = doc.get("type")
    if kind == "atoms":
        return PointMassMixture(doc["atoms"], doc["probs"])
    if kind == "box":
        return UniformBox(doc["low"], doc["high"])
    if kind == "segment":
        return UniformSegment(doc["start"], doc["end"])
    raise SpecError(f"unknown latent distribution type {kind!r}")


# --------------------------------------------------------------------------
# multipartite random dot product graph


def _offsets(dims) -> np.ndarray:
    return np.concatenate([[0], np.cumsum(dims)]).astype(int)


@dataclass(frozen=True, eq=False)
class MrdpgSpec:
    """Multipartite random dot product graph.

    ``Lambda`` is the full ``d* x d*`` matrix whose ``(k, l)`` block couples
    groups ``k`` and ``l``; diagonal blocks must vanish.
    """

    dims: tuple
    Lambda: np.ndarray
    gamma: np.ndarray
    latents: tuple
    rho: float = 1.0

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        K = len(dims)
        L = np.asarray(self.Lambda, dtype=float)
        gamma = np.asarray(self.gamma, dtype=float)
        latents = tuple(self.latents)
        ds = sum(dims)
        if L.shape != (ds, ds):
            raise SpecError(f"Lambda must be {ds} x {ds}")
        if not np.allclose(L, L.T, rtol=0, atol=1e-12):
            raise AsymmetryError("Lambda^(l,k) must equal Lambda^(k,l)^T")
        off = _offsets(dims)
        for k in range(K):
            if np.any(L[off[k] : off[k + 1], off[k] : off[k + 1]] != 0):
                raise SpecError(f"diagonal block ({k}, {k}) must be zero")
            if np.linalg.matrix_rank(L[off[k] : off[k + 1]]) != dims[k]:
                raise SpecError(f"Lambda^({k}) must have rank d_{k}={dims[k]}")
        if gamma.shape != (K,) or np.any(gamma < 0) or not np.isclose(gamma.sum(), 1):
            raise SpecError("gamma must be a probability vector over groups")
        if len(latents) != K or any(F.dim != d for F, d in zip(latents, dims)):
            raise SpecError("one latent distribution of dimension d_k per group")
        if not 0 < self.rho <= 1:
            raise SpecError("rho must lie in (0, 1]")
        for k in range(K):
            Dk = latents[k].second_moment()
            if np.linalg.matrix_rank(Dk, tol=1e-10 * max(1.0, np.abs(Dk).max())) != dims[k]:
                raise SpecError(f"second-moment matrix of group {k} is singular")
            for l in range(K):
                if k == l:
                    continue
                blk = L[off[k] : off[k + 1], off[l] : off[l + 1]]
                vals = latents[k].extreme_points() @ blk @ latents[l].extreme_points().T
                if vals.min() < -_PROB_SLACK or vals.max() > 1 + _PROB_SLACK:
                    raise ProbabilityRangeError(
                        f"x^T Lambda^({k},{l}) y reaches [{vals.min():.3g}, {vals.max():.3g}]"
                    )
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "Lambda", L)
        object.__setattr__(self, "gamma", gamma / gamma.sum())
        object.__setattr__(self, "latents", latents)

    @classmethod
    def from_blocks(cls, dims, blocks: dict, gamma, latents, rho: float = 1.0) -> "MrdpgSpec":
        """Build ``Lambda`` from ``{(k, l): block}``; the transpose fills ``(l, k)``."""
        off = _offsets(dims)
        L = np.zeros((off[-1], off[-1]))
        for (k, l), blk in blocks.items():
            blk = np.asarray(blk, dtype=float).reshape(dims[k], dims[l])
            L[off[k] : off[k + 1], off[l] : off[l + 1]] = blk
            L[off[l] : off[l + 1], off[k] : off[k + 1]] = blk.T
        return cls(dims, L, gamma, latents, rho)

    @property
    def K(self) -> int:
        return len(self.dims)

    @property
    def offsets(self) -> np.ndarray:
        return _offsets(self.dims)

    def block(self, k: int, l: int) -> np.ndarray:
        off = self.offsets
        return self.Lambda[off[k] : off[k + 1], off[l] : off[l + 1]]

    def to_dict(self) -> dict:
        return {
            "model": "mrdpg",
            "dims": list(self.dims),
            "Lambda": self.Lambda.tolist(),
            "gamma": self.gamma.tolist(),
            "latents": [F.to_dict() for F in self.latents],
            "rho": self.rho,
        }


@dataclass(frozen=True, eq=False)
class MrdpgSample:
    """A sampled graph with its ground truth.

    ``Y[k]`` holds the latent positions (already scaled by ``rho^1/2``) of the
    group-``k`` nodes in ascending node order; ``Yfull`` places every node's
    position in its group's coordinate block of ``R^{d*}``.
    """

    graph: MultipartiteGraph
    z: np.ndarray
    Y: list
    Yfull: np.ndarray
    component: np.ndarray
    spec: MrdpgSpec

    def probability_matrix(self) -> ProbabilityMatrix:
        P = self.Yfull @ self.spec.Lambda @ self.Yfull.T
        np.fill_diagonal(P, 0.0)
        return ProbabilityMatrix(P, self.z)


def sample_mrdpg(spec: MrdpgSpec, n: int, seed=0, fixed=None) -> MrdpgSample:
    """Draw ``z_i ~ Categorical(gamma)``, then ``xi_i | z_i ~ F^(z_i)``, then edges.

    Parameters
    ----------
    fixed : sequence of (group, xi), optional
        Overrides the draws for nodes ``0..m-1`` (conditioning on chosen
        latent positions). The random draws still happen so the remaining
        nodes see the same stream as an unconditioned sample.
    """
    if n < spec.K:
        raise SpecError(f"n={n} smaller than the number of groups {spec.K}")
    lat_rng, edge_rng = streams(seed)
    z = lat_rng.choice(spec.K, size=n, p=spec.gamma).astype(np.int64)
    off = spec.offsets
    Yfull = np.zeros((n, off[-1]))
    component = np.full(n, -1, dtype=np.int64)
    for k in range(spec.K):
        idx = np.flatnonzero(z == k)
        xi, comp = spec.latents[k].draw(lat_rng, idx.size)
        Yfull[idx, off[k] : off[k + 1]] = xi
        component[idx] = comp
    for i, (k, xi) in enumerate(fixed or ()):
        z[i] = k
        Yfull[i] = 0.0
        Yfull[i, off[k] : off[k + 1]] = np.asarray(xi, dtype=float)
        component[i] = -1
    Yfull *= np.sqrt(spec.rho)
    present = np.bincount(z, minlength=spec.K) > 0
    if not present[: np.flatnonzero(present)[-1] + 1].all():
        raise SpecError("a group between non-empty groups drew no nodes; graph labels would have a gap")
    L = spec.Lambda
    left = Yfull @ L

    def rows(i0, i1):
        return left[i0:i1] @ Yfull[i0:].T

    edges = sample_edges(rows, n, edge_rng)
    g = MultipartiteGraph(_symmetric_csr(n, edges[:, 0], edges[:, 1]), z)
    Y = [Yfull[z == k, off[k] : off[k + 1]] for k in range(spec.K)]
    return MrdpgSample(g, z, Y, Yfull, component, spec)


def sbm_as_mrdpg(B, zeta, community_probs) -> MrdpgSpec:
    """Block model written as a multipartite RDPG with basis-vector atoms.

    Group ``k`` gets one coordinate per community it owns, ``Lambda`` is ``B``
    with communities sorted by group, and ``F^(k)`` puts mass
    ``community_probs[s] / sum`` on basis vector ``e_s``.
    """
    B = np.asarray(B, dtype=float)
    zeta = np.asarray(zeta, dtype=np.int64)
    probs = np.asarray(community_probs, dtype=float)
    order = np.argsort(zeta, kind="stable")
    K = int(zeta.max()) + 1
    dims = [int(np.sum(zeta == k)) for k in range(K)]
    gamma = np.array([probs[zeta == k].sum() for k in range(K)])
    latents = [
        PointMassMixture(np.eye(dims[k]), probs[zeta == k] / probs[zeta == k].sum())
        for k in range(K)
    ]
    return MrdpgSpec(dims, B[np.ix_(order, order)], gamma / gamma.sum(), latents)


# --------------------------------------------------------------------------
# ambient factorisation


@dataclass(frozen=True, eq=False)
class AmbientFactor:
    """``Pi`` (``D x d*``) with ``Pi^T I_{p,q} Pi = Lambda``."""

    Pi: np.ndarray
    p: int
    q: int
    dims: tuple

    @property
    def D(self) -> int:
        return self.p + self.q

    @property
    def ipq(self) -> np.ndarray:
        return np.diag(np.r_[np.ones(self.p), -np.ones(self.q)])

    def block(self, k: int) -> np.ndarray:
        off = _offsets(self.dims)
        return self.Pi[:, off[k] : off[k + 1]]

    def reconstruct(self) -> np.ndarray:
        return self.Pi.T @ self.ipq @ self.Pi

    def embed(self, Yfull: np.ndarray) -> np.ndarray:
        """Population ambient positions ``X_i = Pi^(z_i) Y_i`` from block-placed latents."""
        return Yfull @ self.Pi.T


def ambient_factor(Lambda, dims=None, rel_tol: float = 1e-9) -> AmbientFactor:
    """Factor a symmetric ``Lambda`` as ``Pi^T I_{p,q} Pi``.

    Uses ``Pi^T = U |S|^{1/2}`` from the eigendecomposition, positive
    eigenvalues first (descending), then negative ones (by decreasing
    magnitude); eigenvalues under ``rel_tol * max|S|`` are dropped.
    """
    L = np.asarray(Lambda, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise SpecError("Lambda must be square")
    if not np.allclose(L, L.T, rtol=0, atol=1e-12):
        raise AsymmetryError("Lambda must be symmetric")
    dims = (L.shape[0],) if dims is None else tuple(int(d) for d in dims)
    w, U = np.linalg.eigh(L)
    p, q, rank = signature(w, rel_tol)
    if rank == 0:
        raise DegenerateError("Lambda has rank zero")
    cut = rel_tol * np.abs(w).max()
    pos = np.flatnonzero(w > cut)[::-1]
    neg = np.flatnonzero(w < -cut)
    order = np.r_[pos, neg]
    U, _ = fix_signs(U[:, order])
    Pi = (U * np.sqrt(np.abs(w[order]))).T
    return AmbientFactor(Pi, p, q, dims)


# --------------------------------------------------------------------------
# JSON model specifications


@dataclass(frozen=True, eq=False)
class Generated:
    """A sampled graph plus whatever ground truth the model defines.

    ``communities`` (block models) are 0-based community ids; ``latents``
    rows are per-node latent vectors padded with NaN to the widest group.
    ``probability_rows`` returns rows ``i0:i1`` of ``P`` over all columns.
    """

    graph: MultipartiteGraph
    communities: np.ndarray | None
    latents: np.ndarray | None
    probability_rows: Callable[[int, int], np.ndarray] = field(repr=False)

    def probability_matrix(self) -> np.ndarray:
        P = self.probability_rows(0, self.graph.n)
        np.fill_diagonal(P, 0.0)
        return P


def _weights_from(doc, n: int, rng) -> np.ndarray | None:
    if doc is None:
        return None
    if isinstance(doc, dict):
        return rng.uniform(float(doc["low"]), float(doc["high"]), n)
    w = np.asarray(doc, dtype=float)
    if w.shape != (n,):
        raise SpecError(f"{w.size} weights for n={n}")
    return w


def _sbm_generated(spec: SbmSpec, seed) -> Generated:
    g = sample_sbm(spec, seed)
    lat = None if spec.w is None else spec.w[:, None]
    rows = lambda i0, i1: spec.weights()[i0:i1, None] * spec.B[spec.tau[i0:i1]][:, spec.tau] * spec.weights()[None, :]
    return Generated(g, spec.tau, lat, rows)


def generate(doc: dict, n: int, seed=0) -> Generated:
    """Sample from a JSON-style model description.

    Supported ``model`` values (group and community ids are 1-based here, as in
    the on-disk formats):

    * ``chung_lu``: ``K`` groups of balanced size, ``weights`` either a list or
      ``{"low", "high"}`` for i.i.d. uniform weights;
    * ``sbm`` / ``dcsbm``: ``B``, ``zeta`` (group of each community),
      ``assignment`` (``"balanced"`` or ``{"probs": [...]}``), optional
      ``weights``;
    * ``obscured_sbm``: optional ``params`` overriding ``a``..``f``, optional
      ``weights``;
    * ``mrdpg``: ``dims``, ``Lambda`` (full matrix) or ``blocks``
      (``{"k,l": matrix}``), ``gamma``, ``latents`` and optional ``rho``.
    """
    if not isinstance(doc, dict) or "model" not in doc:
        raise SpecError("model spec must be an object with a 'model' field")
    kind = doc["model"]
    lat_rng, _ = streams(seed)
    if kind == "chung_lu":
        K = int(doc.get("K", 3))
        z = balanced_assignment(n, K)
        w = _weights_from(doc.get("weights", {"low": 0.1, "high": 1.0}), n, lat_rng)
        _check_weights(w)
        spec = SbmSpec(np.ones((K, K)) - np.eye(K), np.arange(K), z, w)
        gen = _sbm_generated(spec, seed)
        return Generated(gen.graph, None, w[:, None], gen.probability_rows)
    if kind in ("sbm", "dcsbm"):
        B = np.asarray(doc["B"], dtype=float)
        zeta = np.asarray(doc["zeta"], dtype=np.int64) - 1
        assign = doc.get("assignment", "balanced")
        if assign == "balanced":
            tau = balanced_assignment(n, B.shape[0])
        elif isinstance(assign, dict) and "probs" in assign:
            probs = np.asarray(assign["probs"], dtype=float)
            tau = np.sort(lat_rng.choice(B.shape[0], size=n, p=probs / probs.sum()))
        else:
            raise SpecError("assignment must be 'balanced' or {'probs': [...]}")
        w = _weights_from(doc.get("weights"), n, lat_rng)
        return _sbm_generated(SbmSpec(B, zeta, tau, w), seed)
    if kind == "obscured_sbm":
        params = {**OBSCURED_DEFAULTS, **doc.get("params", {})}
        w = _weights_from(doc.get("weights"), n, lat_rng)
        return _sbm_generated(obscured_sbm_preset(n=n, w=w, **params), seed)
    if kind == "mrdpg":
        dims = [int(d) for d in doc["dims"]]
        latents = [latent_from_dict(x) for x in doc["latents"]]
        rho = float(doc.get("rho", 1.0))
        if "Lambda" in doc:
            spec = MrdpgSpec(dims, doc["Lambda"], doc["gamma"], latents, rho)
        else:
            blocks = {}
            for key, blk in doc["blocks"].items():
                k, l = (int(t) - 1 for t in key.split(","))
                blocks[(k, l)] = blk
            spec = MrdpgSpec.from_blocks(dims, blocks, doc["gamma"], latents, rho)
        s = sample_mrdpg(spec, n, seed)
        off = spec.offsets
        lat = np.full((n, max(dims)), np.nan)
        for k in range(spec.K):
            idx = np.flatnonzero(s.z == k)
            lat[idx, : dims[k]] = s.Yfull[idx, off[k] : off[k + 1]]
        left = s.Yfull @ spec.Lambda
        rows = lambda i0, i1: left[i0:i1] @ s.Yfull.T
        return Generated(s.graph, None, lat, rows)
    raise SpecError(f"unknown model {kind!r}")
