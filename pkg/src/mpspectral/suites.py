"""Named validation experiments.

Each suite returns a JSON-serialisable report with a boolean ``passed``. The
default sizes are the ones used by the acceptance tests; the CLI exposes them
as overrides so quick runs are possible.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

from mpspectral.clustering import PipelineConfig, adjusted_rand_index, kmeans, run_pipeline
from mpspectral.embedding import (
    adjacency_embedding,
    biadjacency_embedding,
    laplacian_embedding,
    multipartite_reduce,
)
from mpspectral.graph import MultipartiteGraph, _symmetric_csr
from mpspectral.models import (
    MrdpgSpec,
    PointMassMixture,
    UniformBox,
    UniformSegment,
    ambient_factor,
    balanced_assignment,
    chung_lu_matrix,
    obscured_sbm_preset,
    sample_edges,
    sample_mrdpg,
    sample_sbm,
    streams,
)
from mpspectral.spectral import truncated_eig_sym
from mpspectral.validation import (
    CltSpec,
    align_linear,
    clt_covariance_adjacency,
    clt_covariance_laplacian,
    isotropy_defect,
    laplacian_target,
    rate_slope,
    relative_frobenius,
    uniform_error,
)

SLOPE_BAND = (-0.65, -0.35)


def _map(fn: Callable, items, threads: int):
    items = list(items)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def rep_seed(seed: int, rep: int) -> list[int]:
    """Independent per-replicate seed entropy."""
    return [int(seed), int(rep)]


# --------------------------------------------------------------------------
# default model specifications


def rate_spec() -> MrdpgSpec:
    """Tripartite RDPG with two latent dimensions per group and identity couplings."""
    eye = np.eye(2)
    latents = [
        PointMassMixture([[0.7, 0.1], [0.1, 0.7], [0.4, 0.4]], [0.35, 0.35, 0.3]),
        UniformBox([0.05, 0.05], [0.65, 0.65]),
        UniformSegment([0.05, 0.7], [0.7, 0.05]),
    ]
    blocks = {(0, 1): eye, (0, 2): eye, (1, 2): eye}
    return MrdpgSpec.from_blocks((2, 2, 2), blocks, [1 / 3, 1 / 3, 1 / 3], latents)


def clt_spec() -> tuple[MrdpgSpec, np.ndarray]:
    """Bipartite RDPG with identity coupling and a three-atom second-group law,
    plus the latent positions of the conditioned first-group nodes."""
    F1 = UniformBox([0.2, 0.2], [0.7, 0.7])
    F2 = PointMassMixture([[0.7, 0.2], [0.2, 0.7], [0.45, 0.45]], [0.3, 0.3, 0.4])
    spec = MrdpgSpec.from_blocks((2, 2), {(0, 1): np.eye(2)}, [0.5, 0.5], [F1, F2])
    ys = np.array([[0.7, 0.2], [0.3, 0.6], [0.5, 0.5]])
    return spec, ys


# --------------------------------------------------------------------------
# suites


def suite_isotropy(n: int = 900, seed: int = 0, low: float = 0.1, high: float = 1.0, **_) -> dict:
    """Tripartite Chung-Lu positions built from the ambient factor lie on
    totally isotropic subspaces, group by group."""
    z = balanced_assignment(n, 3)
    lat_rng, _ = streams(seed)
    w = lat_rng.uniform(low, high, n)
    fac = ambient_factor(np.ones((3, 3)) - np.eye(3), dims=(1, 1, 1))
    Yfull = np.zeros((n, 3))
    Yfull[np.arange(n), z] = w
    X = fac.embed(Yfull)
    defect = isotropy_defect(X, z, fac.p, fac.q)
    P = chung_lu_matrix(w, z).values
    recon = float(np.abs(X @ fac.ipq @ X.T - P).max())
    return {
        "suite": "isotropy",
        "n": n,
        "signature": [fac.p, fac.q],
        "defect": defect.tolist(),
        "reconstruction_error": recon,
        "passed": bool(defect.max() < 1e-10 and (fac.p, fac.q) == (1, 2) and recon < 1e-10),
    }


def _random_bipartite(n1: int, n2: int, p: float, seed) -> MultipartiteGraph:
    _, rng = streams(seed)
    n = n1 + n2
    z = np.r_[np.zeros(n1, dtype=np.int64), np.ones(n2, dtype=np.int64)]
    cross = (z[:, None] != z[None, :]) * p
    edges = sample_edges(lambda i0, i1: cross[i0:i1, i0:], n, rng)
    return MultipartiteGraph(_symmetric_csr(n, edges[:, 0], edges[:, 1]), z, 2)


def dilation_check(g: MultipartiteGraph, d: int, seed: int = 0) -> dict:
    """Errors of the bipartite/multipartite identities on one graph."""
    bi = biadjacency_embedding(g, (0, 1), d, seed)
    amb = adjacency_embedding(g, 2 * d, seed)
    X1, X2 = amb.group(0), amb.group(1)
    eye = np.eye(d)
    left_err = np.linalg.norm(bi.Y1 - X1 @ np.vstack([eye, eye]) / np.sqrt(2))
    right_err = np.linalg.norm(bi.Y2 - X2 @ np.vstack([eye, -eye]) / np.sqrt(2))
    red = multipartite_reduce(amb, (d, d))
    reduce_err = max(np.abs(red.Y[0] - bi.Y1).max(), np.abs(red.Y[1] - bi.Y2).max())
    # independent check: the symmetric solver sees the +/- singular values
    eig = truncated_eig_sym(g.adjacency, 2 * d, seed, method="dense")
    spectrum_err = np.abs(np.sort(eig.S) - np.sort(np.r_[bi.svd.S, -bi.svd.S])).max()
    return {
        "identity_error": float(max(left_err, right_err)),
        "reduce_error": float(reduce_err),
        "spectrum_error": float(spectrum_err),
    }


def suite_dilation(
    graphs: int = 50, n1: int = 40, n2: int = 60, d: int = 2, p: float = 0.3, seed: int = 0, **_
) -> dict:
    """Biadjacency embedding versus dilation and multipartite reduction."""
    rows = [dilation_check(_random_bipartite(n1, n2, p, rep_seed(seed, r)), d, seed) for r in range(graphs)]
    worst = {k: max(r[k] for r in rows) for k in rows[0]}
    return {
        "suite": "dilation",
        "graphs": graphs,
        "worst": worst,
        "passed": bool(worst["identity_error"] < 1e-10 and worst["reduce_error"] < 1e-10 and worst["spectrum_error"] < 1e-8),
    }


def rate_errors(
    spec: MrdpgSpec,
    n_grid,
    reps: int,
    seed: int = 0,
    kinds=("adjacency", "laplacian"),
    threads: int = 1,
) -> dict:
    """Aligned uniform errors per ``(n, replicate)``.

    Adjacency errors are against the true positions; Laplacian errors are
    against the degree-normalised targets and multiplied by ``sqrt(n)`` so
    both share the ``n^{-1/2}`` reference rate.
    """
    fac = ambient_factor(spec.Lambda, spec.dims)
    off = spec.offsets
    n_grid = [int(n) for n in n_grid]

    def one(job):
        n, r = job
        s = sample_mrdpg(spec, n, rep_seed(seed, n * 1000 + r))
        out = {}
        for kind in kinds:
            if kind == "adjacency":
                amb = adjacency_embedding(s.graph, fac.D, seed)
                target = s.Yfull
                scale = 1.0
            else:
                amb = laplacian_embedding(s.graph, fac.D, 0.0, seed)
                target = laplacian_target(s.Yfull, spec.Lambda)
                scale = np.sqrt(n)
            red = multipartite_reduce(amb, spec.dims)
            err = 0.0
            for k in range(spec.K):
                Yk = target[red.index[k], off[k] : off[k + 1]]
                G = align_linear(red.Y[k], Yk, k)
                err = max(err, uniform_error(red.Y[k], Yk, G))
            out[kind] = err * scale
        return out

    jobs = [(n, r) for n in n_grid for r in range(reps)]
    results = _map(one, jobs, threads)
    errors = {k: np.array([res[k] for res in results]).reshape(len(n_grid), reps) for k in kinds}
    return {"n_grid": n_grid, "errors": errors}


def _rate_suite(kind: str, n_grid, reps, seed, threads) -> dict:
    out = rate_errors(rate_spec(), n_grid, reps, seed, (kind,), threads)
    mean = out["errors"][kind].mean(axis=1)
    slope = rate_slope(out["n_grid"], mean)
    return {
        "suite": f"rate-{kind}",
        "n_grid": out["n_grid"],
        "reps": reps,
        "mean_error": mean.tolist(),
        "slope": slope,
        "band": list(SLOPE_BAND),
        "passed": bool(SLOPE_BAND[0] <= slope <= SLOPE_BAND[1]),
    }


def suite_rate_adjacency(n_grid=(500, 1000, 2000, 4000, 8000), reps: int = 20, seed: int = 0, threads: int = 1, **_) -> dict:
    return _rate_suite("adjacency", n_grid, reps, seed, threads)


def suite_rate_laplacian(n_grid=(500, 1000, 2000, 4000, 8000), reps: int = 20, seed: int = 0, threads: int = 1, **_) -> dict:
    return _rate_suite("laplacian", n_grid, reps, seed, threads)


def clt_errors(
    spec: MrdpgSpec,
    ys: np.ndarray,
    n: int,
    reps: int,
    seed: int = 0,
    kinds=("adjacency", "laplacian"),
    threads: int = 1,
) -> dict:
    """Scaled aligned errors of the conditioned nodes, shape ``(reps, m, d)`` per kind."""
    fixed = [(0, y) for y in ys]
    d = spec.dims[0]

    def one(r):
        s = sample_mrdpg(spec, n, rep_seed(seed, r), fixed=fixed)
        out = {}
        for kind in kinds:
            lap = kind == "laplacian"
            bi = biadjacency_embedding(s.graph, (0, 1), d, seed, use_laplacian=lap)
            rows = bi.index1
            if lap:
                target = laplacian_target(s.Yfull, spec.Lambda)[rows, :d]
                scale = n * np.sqrt(spec.rho)
            else:
                target = s.Yfull[rows, :d]
                scale = np.sqrt(n)
            G = align_linear(bi.Y1, target)
            # conditioned nodes are 0..m-1, the first rows of group 0
            m = len(ys)
            out[kind] = scale * (G.apply(bi.Y1[:m]) - target[:m])
        return out

    results = _map(one, range(reps), threads)
    return {k: np.stack([res[k] for res in results]) for k in kinds}


def _clt_suite(kind: str, n, reps, seed, threads) -> dict:
    spec, ys = clt_spec()
    errs = clt_errors(spec, ys, n, reps, seed, (kind,), threads)[kind]
    rows = []
    for i, y in enumerate(ys):
        cs = CltSpec.from_laws(spec.latents[0], spec.latents[1], spec.gamma[1], y, 1.0)
        theory = clt_covariance_adjacency(cs) if kind == "adjacency" else clt_covariance_laplacian(cs)
        emp = np.cov(errs[:, i, :], rowvar=False)
        rows.append(
            {
                "y": y.tolist(),
                "theory": theory.tolist(),
                "empirical": emp.tolist(),
                "relative_error": relative_frobenius(emp, theory),
            }
        )
    worst = max(r["relative_error"] for r in rows)
    return {"suite": f"clt-{kind}", "n": n, "reps": reps, "nodes": rows, "worst": worst, "passed": bool(worst < 0.25)}


def suite_clt_adjacency(n: int = 4000, reps: int = 500, seed: int = 0, threads: int = 1, **_) -> dict:
    return _clt_suite("adjacency", n, reps, seed, threads)


def suite_clt_laplacian(n: int = 4000, reps: int = 500, seed: int = 0, threads: int = 1, **_) -> dict:
    return _clt_suite("laplacian", n, reps, seed, threads)


def obscured_run(n: int, seed, cfg_seed: int = 0) -> dict:
    """Group-2 recovery from the (1,2) biadjacency alone versus the full pipeline."""
    spec = obscured_sbm_preset(n=n)
    g = sample_sbm(spec, seed)
    truth = spec.tau
    bi = biadjacency_embedding(g, (0, 1), 2, cfg_seed)
    pair_labels = kmeans(bi.Y2, 2, cfg_seed).labels
    pair_ari = adjusted_rand_index(truth[bi.index2], pair_labels)
    cfg = PipelineConfig(
        matrix_source="adjacency", spherical=False, rank_mode="fixed", D=6, dims=(2, 2, 2),
        degree_min=0, seed=cfg_seed,
    )
    res = run_pipeline(g, cfg)
    idx = g.group_index(1)
    full_ari = adjusted_rand_index(truth[idx], res.labels[idx])
    return {"pair_ari": float(pair_ari), "full_ari": float(full_ari)}


def suite_obscured(n: int = 3000, runs: int = 50, seed: int = 0, threads: int = 1, **_) -> dict:
    rows = _map(lambda r: obscured_run(n, rep_seed(seed, r)), range(runs), threads)
    good = sum(r["pair_ari"] <= 0.1 and r["full_ari"] == 1.0 for r in rows)
    return {
        "suite": "obscured",
        "n": n,
        "runs": runs,
        "successes": good,
        "pair_ari": [r["pair_ari"] for r in rows],
        "full_ari": [r["full_ari"] for r in rows],
        "passed": bool(good >= int(np.ceil(0.9 * runs))),
    }


SUITES = {
    "isotropy": suite_isotropy,
    "dilation": suite_dilation,
    "rate-adjacency": suite_rate_adjacency,
    "rate-laplacian": suite_rate_laplacian,
    "clt-adjacency": suite_clt_adjacency,
    "clt-laplacian": suite_clt_laplacian,
    "obscured": suite_obscured,
}


def run_suite(name: str, **params) -> dict:
    if name not in SUITES:
        raise KeyError(name)
    t0 = time.perf_counter()
    report = SUITES[name](**params)
    report["seconds"] = time.perf_counter() - t0
    return report
