"""Scree-based rank selection (profile-likelihood elbow) and the subspace cap check."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from mpspectral.errors import TooFewValuesError

MAX_SCREE = 1000
ZERO_TOL = 1e-9
TIE_TOL = 1e-12
PERFECT_FIT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ScreeProfile:
    values: np.ndarray
    chosen: int
    loglik: np.ndarray
    elbows: tuple[int, ...] = ()


def _clean(values, max_len: int = MAX_SCREE) -> np.ndarray:
    v = np.asarray(values, dtype=float).ravel()[:max_len]
    if v.size == 0:
        return v
    if np.any(v < 0):
        raise ValueError("scree values must be non-negative")
    if np.any(np.diff(v) > 1e-12 * v.max()):
        raise ValueError("scree values must be sorted in decreasing order")
    return v[v > ZERO_TOL * v.max()]


def profile_loglik(values: np.ndarray, max_rank: int | None = None) -> np.ndarray:
    """Gaussian profile log-likelihood for each split ``q = 1..max_rank``.

    The two segments ``values[:q]`` and ``values[q:]`` get their own means and
    a pooled variance ``(SS_1 + SS_2) / (len - 2)``. Sums of squares are taken
    about each segment mean (two passes) so that constant segments give zero
    up to rounding; a pooled standard deviation under ``1e-12 * max`` is a
    perfect fit and scores ``+inf``.
    """
    v = np.asarray(values, dtype=float)
    p = v.size
    Q = p - 1 if max_rank is None else int(max_rank)
    ll = np.empty(Q)
    floor = (PERFECT_FIT_TOL * v.max()) ** 2
    for q in range(1, Q + 1):
        a, b = v[:q], v[q:]
        ss = np.sum((a - a.mean()) ** 2) + np.sum((b - b.mean()) ** 2)
        var = ss / (p - 2)
        if var <= floor:
            ll[q - 1] = np.inf
        else:
            ll[q - 1] = -0.5 * p * np.log(2 * np.pi * var) - 0.5 * (p - 2)
    return ll


def argmax_first(ll: np.ndarray) -> int:
    """Index of the maximum; values within a relative 1e-12 of it count as tied
    and the smallest index wins."""
    best = np.max(ll)
    if np.isinf(best):
        return int(np.argmax(np.isinf(ll) & (ll > 0)))
    tol = TIE_TOL * max(1.0, abs(best))
    return int(np.argmax(ll >= best - tol))


def zhu_ghodsi(values, max_rank: int | None = None, elbow: int = 1) -> ScreeProfile:
    """Pick the rank at the first (or ``elbow``-th) elbow of a scree.

    Parameters
    ----------
    values : array_like
        Decreasing non-negative values (singular values or ``|eigenvalues|``).
        Only the first 1000 are used and values below ``1e-9 * max`` are
        dropped before fitting.
    max_rank : int, optional
        Largest split considered; must be smaller than the number of values.
    elbow : int
        ``2`` re-applies the rule to the tail after the first elbow.

    Raises
    ------
    TooFewValuesError
        Fewer than three usable values.
    """
    v = _clean(values)
    if v.size < 3:
        raise TooFewValuesError(f"need at least 3 positive values, got {v.size}")
    if max_rank is not None and not 1 <= max_rank < v.size:
        raise ValueError(f"max_rank={max_rank} must be in 1..{v.size - 1}")
    ll = profile_loglik(v, max_rank)
    chosen = argmax_first(ll) + 1
    elbows = [chosen]
    for _ in range(elbow - 1):
        tail = v[elbows[-1] :]
        if tail.size < 3:
            break
        elbows.append(elbows[-1] + argmax_first(profile_loglik(tail)) + 1)
    return ScreeProfile(v, elbows[-1], ll, tuple(elbows))


def select_rank(values, elbow: int = 1) -> int:
    """:func:`zhu_ghodsi` with a fallback for very short screes.

    Under three usable values the count of values above the zero tolerance
    is returned (at least 1).
    """
    try:
        return zhu_ghodsi(values, elbow=elbow).chosen
    except TooFewValuesError:
        return max(1, _clean(values).size)


@dataclass(frozen=True, eq=False)
class DimSelection:
    D: int
    dims: tuple[int, ...]
    cap: int
    cap_violations: tuple[int, ...] = field(default=())


def select_dims(scree_ambient, scree_groups, signature_pq, elbow: int = 1) -> DimSelection:
    """Ambient and per-group ranks plus the groups exceeding ``min(p, q)``.

    Violations are reported, never clipped.
    """
    D = select_rank(scree_ambient, elbow)
    dims = tuple(select_rank(s, elbow) for s in scree_groups)
    cap = int(min(signature_pq))
    bad = tuple(k for k, d in enumerate(dims) if d > cap)
    return DimSelection(D, dims, cap, bad)
