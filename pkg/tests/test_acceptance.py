"""End-to-end acceptance criteria, each run at its stated size and tolerance.

Every test prints one ``ACCEPTANCE <k> PASS|FAIL`` line (also repeated in the
terminal summary) before asserting.
"""

import time

import numpy as np
import pytest
from scipy.linalg import subspace_angles

from conftest import ACCEPTANCE_LINES
from oracles import brute_force_elbow, random_screes
from mpspectral.clustering import PipelineConfig, run_pipeline, spectral_stage, within_group_ari
from mpspectral.models import (
    SbmSpec,
    balanced_assignment,
    obscured_sbm_preset,
    sample_mrdpg,
    sample_sbm,
)
from mpspectral.selection import zhu_ghodsi
from mpspectral.spectral import truncated_eig_sym, truncated_svd
from mpspectral.suites import (
    rate_spec,
    rep_seed,
    suite_clt_adjacency,
    suite_clt_laplacian,
    suite_dilation,
    suite_isotropy,
    suite_obscured,
    suite_rate_adjacency,
    suite_rate_laplacian,
)

# six communities, two per group, cross-group affinity 0.6 within a "colour"
SIX_BLOCK_B = np.kron(np.ones((3, 3)) - np.eye(3), [[0.6, 0.1], [0.1, 0.6]])
SIX_BLOCK_ZETA = np.repeat(np.arange(3), 2)


def verdict(capsys, k: int, ok: bool, detail: str):
    line = f"ACCEPTANCE {k} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def test_1_dilation_equivalence(capsys):
    t0 = time.perf_counter()
    rep = suite_dilation(graphs=50, n1=40, n2=60, d=2)
    secs = time.perf_counter() - t0
    w = rep["worst"]
    ok = w["identity_error"] < 1e-10 and w["reduce_error"] < 1e-10 and secs < 10
    verdict(
        capsys, 1, ok,
        f"identity {w['identity_error']:.2e}, reduce {w['reduce_error']:.2e} over 50 graphs, {secs:.1f}s (<10s)",
    )


def test_2_total_isotropy(capsys):
    t0 = time.perf_counter()
    rep = suite_isotropy(n=900)
    secs = time.perf_counter() - t0
    defect = max(rep["defect"])
    ok = rep["signature"] == [1, 2] and defect < 1e-10 and secs < 5
    verdict(capsys, 2, ok, f"signature {rep['signature']}, max defect {defect:.2e}, {secs:.1f}s (<5s)")


def test_3_subspace_cap(capsys):
    t0 = time.perf_counter()
    held, runs = 0, 0
    for r in range(50):
        g = sample_sbm(SbmSpec(SIX_BLOCK_B, SIX_BLOCK_ZETA, balanced_assignment(2000, 6)), rep_seed(3, r))
        stage = spectral_stage(g, PipelineConfig())
        held += not stage.cap_violations
        runs += 1
    for r in range(50):
        s = sample_mrdpg(rate_spec(), 2000, rep_seed(3, 100 + r))
        stage = spectral_stage(s.graph, PipelineConfig())
        held += not stage.cap_violations
        runs += 1
    secs = time.perf_counter() - t0
    ok = held >= 95 and secs < 300
    verdict(capsys, 3, ok, f"cap held in {held}/{runs} runs (>=95), {secs:.0f}s (<300s)")


def test_4_consistency_rate(capsys):
    t0 = time.perf_counter()
    adj = suite_rate_adjacency(reps=20)
    lap = suite_rate_laplacian(reps=20)
    secs = time.perf_counter() - t0
    lo, hi = adj["band"]
    ok = lo <= adj["slope"] <= hi and lo <= lap["slope"] <= hi and secs < 900
    verdict(
        capsys, 4, ok,
        f"slopes adjacency {adj['slope']:.3f}, laplacian {lap['slope']:.3f} in [{lo}, {hi}], {secs:.0f}s (<900s)",
    )


def _recovery(weights: bool, spherical: bool, matrix: str, runs: int = 50) -> int:
    good = 0
    for r in range(runs):
        seed = rep_seed(5 + weights, r)
        w = np.random.default_rng(seed).uniform(0.4, 1.0, 3000) if weights else None
        spec = obscured_sbm_preset(n=3000, w=w)
        g = sample_sbm(spec, seed)
        cfg = PipelineConfig(
            matrix_source=matrix, spherical=spherical, D=6, dims=(2, 2, 2), degree_min=0
        )
        res = run_pipeline(g, cfg)
        good += bool(np.all(within_group_ari(spec.tau, res.labels, g.z) == 1.0))
    return good


def test_5_perfect_recovery(capsys):
    t0 = time.perf_counter()
    plain = _recovery(False, False, "adjacency")
    corrected = _recovery(True, True, "regularized_laplacian")
    secs = time.perf_counter() - t0
    ok = plain >= 48 and corrected >= 45 and secs < 600
    verdict(
        capsys, 5, ok,
        f"SBM ARI=1 in {plain}/50 (>=48), DCSBM+spherical ARI=1 in {corrected}/50 (>=45), {secs:.0f}s (<600s)",
    )


def test_6_obscured_communities(capsys):
    t0 = time.perf_counter()
    rep = suite_obscured(n=3000, runs=50)
    secs = time.perf_counter() - t0
    ok = rep["successes"] >= 45 and secs < 600
    verdict(
        capsys, 6, ok,
        f"pair ARI<=0.1 and full ARI=1 in {rep['successes']}/50 (>=45), "
        f"max pair ARI {max(rep['pair_ari']):.3f}, {secs:.0f}s (<600s)",
    )


def test_7_clt_covariance(capsys):
    t0 = time.perf_counter()
    adj = suite_clt_adjacency(n=4000, reps=500)
    lap = suite_clt_laplacian(n=4000, reps=500)
    secs = time.perf_counter() - t0
    ok = adj["worst"] < 0.25 and lap["worst"] < 0.25 and secs < 1800
    errs = lambda rep: ", ".join(f"{r['relative_error']:.3f}" for r in rep["nodes"])
    verdict(
        capsys, 7, ok,
        f"relative Frobenius adjacency [{errs(adj)}], laplacian [{errs(lap)}] (<0.25), {secs:.0f}s (<1800s)",
    )


def test_8_rank_selection(capsys):
    t0 = time.perf_counter()
    hits = 0
    for r in range(100):
        g = sample_sbm(SbmSpec(SIX_BLOCK_B, SIX_BLOCK_ZETA, balanced_assignment(2000, 6)), rep_seed(8, r))
        hits += spectral_stage(g, PipelineConfig()).D == 6
    screes = random_screes(np.random.default_rng(8), 1000)
    agree = sum(zhu_ghodsi(v).chosen == brute_force_elbow(v) for v in screes)
    secs = time.perf_counter() - t0
    ok = hits >= 80 and agree == 1000 and secs < 300
    verdict(capsys, 8, ok, f"D=6 recovered in {hits}/100 (>=80), oracle agreement {agree}/1000, {secs:.0f}s (<300s)")


@pytest.mark.parametrize("method", ["lanczos", "auto"])
def test_9_solver_correctness(capsys, method):
    rng = np.random.default_rng(9)
    t0 = time.perf_counter()
    worst_val, worst_angle = 0.0, 0.0
    for _ in range(100):
        n = int(rng.integers(2, 65))
        A = rng.normal(size=(n, n))
        M = (A + A.T) / 2
        D = int(rng.integers(1, min(n, 10) + 1))
        pair = truncated_eig_sym(M, D, seed=1, method=method)
        w, U = np.linalg.eigh(M)
        top = np.argsort(-np.abs(w), kind="stable")[:D]
        worst_val = max(worst_val, np.abs(pair.S - w[top]).max())
        worst_angle = max(worst_angle, subspace_angles(pair.U, U[:, top]).max())

        n1, n2 = int(rng.integers(1, 65)), int(rng.integers(1, 65))
        R = rng.normal(size=(n1, n2))
        d = int(rng.integers(1, min(n1, n2, 10) + 1))
        t = truncated_svd(R, d, seed=1, method=method)
        Uo, so, Vto = np.linalg.svd(R)
        worst_val = max(worst_val, np.abs(t.S - so[:d]).max())
        worst_angle = max(
            worst_angle,
            subspace_angles(t.U, Uo[:, :d]).max(),
            subspace_angles(t.V, Vto[:d].T).max(),
        )
    secs = time.perf_counter() - t0
    ok = worst_val < 1e-8 and worst_angle < 1e-6 and secs < 30
    verdict(
        capsys, 9, ok,
        f"[{method}] 100 symmetric + 100 rectangular: max value error {worst_val:.2e} (<1e-8), "
        f"max angle {worst_angle:.2e} (<1e-6), {secs:.1f}s (<30s)",
    )
