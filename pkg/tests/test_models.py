import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mpspectral.errors import (
    DegenerateError,
    ProbabilityRangeError,
    SpecError,
    WeightRangeError,
)
from mpspectral.graph import validate_multipartite
from mpspectral.models import (
    MrdpgSpec,
    PointMassMixture,
    ProbabilityMatrix,
    SbmSpec,
    UniformBox,
    UniformSegment,
    ambient_factor,
    balanced_assignment,
    chung_lu_matrix,
    generate,
    latent_from_dict,
    obscured_b_matrix,
    obscured_sbm_preset,
    sample_inhomogeneous,
    sample_mrdpg,
    sample_sbm,
    sbm_as_mrdpg,
    sbm_matrix,
)


def block_mask(z):
    z = np.asarray(z)
    return z[:, None] != z[None, :]


# ---------------------------------------------------------------- inhomogeneous


def test_zero_matrix_gives_empty_graph():
    g = sample_inhomogeneous(ProbabilityMatrix(np.zeros((5, 5)), [0, 0, 1, 1, 2]), seed=1)
    assert g.n_edges == 0


def test_all_ones_cross_group_is_complete_multipartite():
    z = np.array([0, 0, 1, 1, 1, 2])
    P = block_mask(z).astype(float)
    g = sample_inhomogeneous(ProbabilityMatrix(P, z), seed=7)
    np.testing.assert_array_equal(g.adjacency.toarray(), P)


def test_edge_frequency_matches_probability():
    # 10,000 seeds on a 4-node tripartite P with p = 0.3 across groups
    z = np.array([0, 1, 1, 2])
    P = ProbabilityMatrix(0.3 * block_mask(z), z)
    total = np.zeros((4, 4))
    for seed in range(10_000):
        total += sample_inhomogeneous(P, seed).adjacency.toarray()
    freq = total / 10_000
    mask = block_mask(z)
    assert np.all(np.abs(freq[mask] - 0.3) < 0.02)
    assert np.all(freq[~mask] == 0)


def test_probability_matrix_validation():
    with pytest.raises(ProbabilityRangeError):
        ProbabilityMatrix(np.array([[0, 1.5], [1.5, 0]]))
    with pytest.raises(SpecError):
        ProbabilityMatrix(np.array([[0, 0.5], [0.4, 0]]))
    with pytest.raises(SpecError):
        ProbabilityMatrix(np.array([[0, 0.5], [0.5, 0]]), z=[0, 0])


def test_sampling_is_deterministic():
    z = balanced_assignment(60, 3)
    P = chung_lu_matrix(np.linspace(0.2, 1, 60), z)
    a = sample_inhomogeneous(P, 5).adjacency
    b = sample_inhomogeneous(P, 5).adjacency
    assert (a != b).nnz == 0
    assert (a != sample_inhomogeneous(P, 6).adjacency).nnz > 0


# ---------------------------------------------------------------- Chung-Lu


def test_chung_lu_values():
    P = chung_lu_matrix([0.5, 0.5, 1.0], [0, 1, 2]).values
    assert P[0, 1] == 0.25 and P[0, 2] == 0.5 and P[1, 2] == 0.5
    np.testing.assert_array_equal(P, P.T)


def test_chung_lu_unit_weights_complete():
    z = [0, 1, 1, 2]
    np.testing.assert_array_equal(chung_lu_matrix(np.ones(4), z).values, block_mask(z))


def test_chung_lu_single_group_zero():
    assert not chung_lu_matrix([0.3, 0.9, 1.0], [0, 0, 0]).values.any()


@pytest.mark.parametrize("w", [[0.0, 0.5], [0.5, 1.2], [-0.1, 0.5]])
def test_chung_lu_weight_range(w):
    with pytest.raises(WeightRangeError):
        chung_lu_matrix(w, [0, 1])


# ---------------------------------------------------------------- block models


def test_sbm_unit_weights_equal_b():
    B = np.array([[0, 0.4, 0.7], [0.4, 0, 0.2], [0.7, 0.2, 0]])
    tau = np.array([0, 0, 1, 2, 2])
    P = sbm_matrix(SbmSpec(B, [0, 1, 2], tau)).values
    expected = B[np.ix_(tau, tau)]
    np.fill_diagonal(expected, 0)
    np.testing.assert_array_equal(P, expected)


def test_sbm_zero_b():
    assert not sbm_matrix(SbmSpec(np.zeros((2, 2)), [0, 1], [0, 1, 1])).values.any()


def test_dcsbm_scales_one_row():
    B = np.array([[0, 0.8], [0.8, 0]])
    w = np.array([0.5, 1, 1, 1])
    P = sbm_matrix(SbmSpec(B, [0, 1], [0, 0, 1, 1], w)).values
    np.testing.assert_allclose(P[0], [0, 0, 0.4, 0.4])
    np.testing.assert_allclose(P[1], [0, 0, 0.8, 0.8])


def test_sbm_rejects_within_group_mass():
    with pytest.raises(SpecError):
        SbmSpec(np.full((2, 2), 0.5) - 0.5 * np.eye(2), [0, 0], [0, 1])


def test_sample_sbm_equals_dense_sampler():
    spec = obscured_sbm_preset(n=700, w=np.linspace(0.3, 1, 700))
    a = sample_sbm(spec, 11).adjacency
    b = sample_inhomogeneous(sbm_matrix(spec), 11).adjacency
    assert (a != b).nnz == 0


def test_obscured_pattern():
    a, b, c, d, e, f = 0.3, 0.6, 0.2, 0.5, 0.25, 0.55
    B = obscured_sbm_preset(a, b, c, d, e, f).B
    assert B[0, 2] == B[0, 3] == a
    assert B[1, 2] == B[1, 3] == b
    assert B[0, 4] == c and B[0, 5] == d
    for k in range(3):
        assert not B[2 * k : 2 * k + 2, 2 * k : 2 * k + 2].any()
    np.testing.assert_array_equal(B, B.T)
    assert np.linalg.matrix_rank(B) == 6


def test_obscured_degenerate():
    with pytest.raises(DegenerateError):
        obscured_sbm_preset(a=0.4, b=0.4)


def test_obscured_assignment_balanced():
    spec = obscured_sbm_preset(n=601)
    assert np.bincount(spec.tau).tolist() == [101, 100, 100, 100, 100, 100]
    assert spec.z.tolist() == sorted(spec.z.tolist())


@given(st.integers(0, 2**31), st.integers(2, 4), st.integers(3, 30))
def test_generators_are_multipartite(seed, K, n):
    rng = np.random.default_rng(seed)
    z = np.sort(rng.integers(0, K, n))
    z = np.searchsorted(np.unique(z), z)
    g = sample_inhomogeneous(chung_lu_matrix(rng.uniform(0.1, 1, n), z), seed)
    assert validate_multipartite(g.adjacency, g.z) == []


# ---------------------------------------------------------------- ambient factor


def test_ambient_factor_bipartite_hand_case():
    Lam = np.array([[0.0, 1.0], [1.0, 0.0]])
    f = ambient_factor(Lam, dims=(1, 1))
    assert (f.p, f.q, f.D) == (1, 1, 2)
    np.testing.assert_allclose(np.abs(f.Pi), np.full((2, 2), 1 / np.sqrt(2)), atol=1e-15)
    np.testing.assert_allclose(f.reconstruct(), Lam, atol=1e-15)


def test_ambient_factor_tripartite_chung_lu_signature():
    f = ambient_factor(np.ones((3, 3)) - np.eye(3), dims=(1, 1, 1))
    assert (f.p, f.q) == (1, 2)


def test_ambient_factor_rank_zero():
    with pytest.raises(DegenerateError):
        ambient_factor(np.zeros((3, 3)))


def test_ambient_factor_round_trip_random():
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(100):
        dims = rng.integers(1, 4, size=rng.integers(2, 5))
        off = np.r_[0, np.cumsum(dims)]
        L = rng.normal(size=(off[-1], off[-1]))
        L = L + L.T
        for k in range(dims.size):
            L[off[k] : off[k + 1], off[k] : off[k + 1]] = 0
        f = ambient_factor(L, dims)
        worst = max(worst, np.abs(f.reconstruct() - L).max())
    assert worst < 1e-10


# ---------------------------------------------------------------- latent laws


@pytest.mark.parametrize(
    "law",
    [
        PointMassMixture([[0.2, 0.5], [0.7, 0.1]], [0.25, 0.75]),
        UniformBox([0.1, 0.2], [0.6, 0.9]),
        UniformSegment([0.1, 0.7], [0.6, 0.2]),
    ],
)
def test_latent_moments_match_monte_carlo(law):
    pts, _ = law.draw(np.random.default_rng(3), 400_000)
    np.testing.assert_allclose(law.mean(), pts.mean(axis=0), atol=3e-3)
    np.testing.assert_allclose(law.second_moment(), pts.T @ pts / len(pts), atol=3e-3)
    assert latent_from_dict(law.to_dict()).to_dict() == law.to_dict()


def test_uniform_box_exact_moments():
    law = UniformBox([0.0], [1.0])
    assert law.mean()[0] == pytest.approx(0.5, abs=1e-15)
    assert law.second_moment()[0, 0] == pytest.approx(1 / 3, abs=1e-15)
    assert law.expect(lambda x: x[:, 0] ** 7) == pytest.approx(1 / 8, abs=1e-14)


def test_unknown_latent_type():
    with pytest.raises(SpecError):
        latent_from_dict({"type": "gaussian"})


# ---------------------------------------------------------------- MRDPG


def simple_mrdpg(rho=1.0, gamma=(0.5, 0.5)):
    return MrdpgSpec(
        (1, 1),
        [[0, 1], [1, 0]],
        gamma,
        [UniformBox([0.2], [0.8]), PointMassMixture([[0.5], [0.9]], [0.5, 0.5])],
        rho,
    )


def test_mrdpg_probabilities_are_dot_products():
    s = sample_mrdpg(simple_mrdpg(), 50, seed=2)
    P = s.probability_matrix().values
    i, j = np.flatnonzero(s.z == 0)[0], np.flatnonzero(s.z == 1)[0]
    assert P[i, j] == pytest.approx(s.Yfull[i, 0] * s.Yfull[j, 1], rel=1e-15)
    assert validate_multipartite(s.graph.adjacency, s.z) == []


def test_mrdpg_rho_scaling():
    a = sample_mrdpg(simple_mrdpg(1.0), 40, seed=4)
    b = sample_mrdpg(simple_mrdpg(0.25), 40, seed=4)
    np.testing.assert_allclose(b.Yfull, 0.5 * a.Yfull)


def test_mrdpg_rho_zero_rejected():
    with pytest.raises(SpecError):
        simple_mrdpg(0.0)


def test_mrdpg_single_group_empty():
    s = sample_mrdpg(simple_mrdpg(gamma=(1.0, 0.0)), 30, seed=0)
    assert np.all(s.z == 0) and s.graph.n_edges == 0


@pytest.mark.parametrize(
    "kwargs, err",
    [
        (dict(Lambda=[[1, 1], [1, 0]]), SpecError),  # diagonal block
        (dict(Lambda=[[0, 2], [2, 0]]), ProbabilityRangeError),
        (dict(gamma=[0.5, 0.6]), SpecError),
        (dict(Lambda=[[0, 1], [0.5, 0]]), SpecError),
    ],
)
def test_mrdpg_validation(kwargs, err):
    base = dict(
        dims=(1, 1),
        Lambda=[[0, 1], [1, 0]],
        gamma=(0.5, 0.5),
        latents=[UniformBox([0.2], [0.8]), UniformBox([0.2], [0.8])],
    )
    with pytest.raises(err):
        MrdpgSpec(**{**base, **kwargs})


def test_mrdpg_fixed_nodes():
    s = sample_mrdpg(simple_mrdpg(), 30, seed=1, fixed=[(0, [0.3]), (1, [0.9])])
    assert s.z[0] == 0 and s.z[1] == 1
    assert s.Yfull[0].tolist() == [0.3, 0.0] and s.Yfull[1].tolist() == [0.0, 0.9]


def test_sbm_through_point_masses_matches_b():
    B = np.array([[0, 0, 0.6, 0.1], [0, 0, 0.2, 0.5], [0.6, 0.2, 0, 0], [0.1, 0.5, 0, 0]])
    spec = sbm_as_mrdpg(B, [0, 0, 1, 1], [0.25, 0.25, 0.25, 0.25])
    s = sample_mrdpg(spec, 2000, seed=9)
    comm = s.z * 2 + s.component
    A = s.graph.adjacency.toarray()
    for u in range(4):
        for v in range(4):
            if u // 2 == v // 2:
                continue
            blk = A[np.ix_(comm == u, comm == v)]
            # binomial standard error with ~250k pairs is below 1e-3
            assert abs(blk.mean() - B[u, v]) < 5e-3


# ---------------------------------------------------------------- JSON specs


def test_generate_chung_lu_figure_setup():
    gen = generate({"model": "chung_lu", "K": 3, "weights": {"low": 0.1, "high": 1.0}}, 900, 0)
    assert gen.graph.group_sizes().tolist() == [300, 300, 300]
    w = gen.latents[:, 0]
    assert 0.1 <= w.min() and w.max() <= 1.0
    P = gen.probability_matrix()
    np.testing.assert_allclose(P, np.outer(w, w) * block_mask(gen.graph.z))


def test_generate_obscured_communities():
    gen = generate({"model": "obscured_sbm"}, 600, 3)
    assert gen.communities.max() == 5 and gen.graph.K == 3


def test_generate_mrdpg_blocks():
    doc = {
        "model": "mrdpg",
        "dims": [1, 1],
        "blocks": {"1,2": [[1.0]]},
        "gamma": [0.5, 0.5],
        "latents": [{"type": "box", "low": [0.2], "high": [0.8]}, {"type": "atoms", "atoms": [[0.5]], "probs": [1]}],
    }
    gen = generate(doc, 100, 1)
    assert gen.graph.K == 2 and gen.latents.shape == (100, 1)


def test_generate_unknown_model():
    with pytest.raises(SpecError):
        generate({"model": "erdos"}, 10, 0)
