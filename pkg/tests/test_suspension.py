import math

import numpy as np
import pytest

from unstretch import (
    CoverPoint,
    ToralMatrix,
    ValidationError,
    compute_splitting,
    embed,
    lattice_element,
    log_distance_bound,
    qi_comparison,
)

from conftest import D3_COMPLEX, D3_REAL, D4_BLOCK

LOG_LAM = math.log((3 + math.sqrt(5)) / 2)


def test_splitting_cat(cat_matrix):
    split = compute_splitting(cat_matrix)
    assert abs(split.sigma - (LOG_LAM - 1e-6)) < 1e-9
    assert split.stable_basis.shape == (2, 1)
    assert split.unstable_basis.shape == (2, 1)
    res = split.residuals(cat_matrix)
    assert res["projection_sum"] < 1e-9
    assert res["stable_invariance"] < 1e-9


def test_splitting_block_matrix_matches_cat(cat_matrix):
    split2 = compute_splitting(cat_matrix)
    split4 = compute_splitting(ToralMatrix(D4_BLOCK))
    assert abs(split4.sigma - split2.sigma) < 1e-12
    assert split4.stable_basis.shape == (4, 2)


def test_splitting_complex_pair():
    m = ToralMatrix(D3_COMPLEX)
    split = compute_splitting(m)
    # one real expanding direction, a complex contracting pair
    assert split.unstable_basis.shape == (3, 1)
    assert split.stable_basis.shape == (3, 2)
    mods = sorted(mod for mod, _ in m.eigen)
    # the complex pair is the slow rate: sigma = |log 0.8689| - margin
    assert abs(split.sigma - (-math.log(mods[0]) - 1e-6)) < 1e-9
    res = split.residuals(m)
    assert res["projection_sum"] < 1e-8


def test_splitting_rejects_non_hyperbolic():
    with pytest.raises(ValidationError):
        compute_splitting(ToralMatrix([[0, 1], [-1, 0]]))


def test_contraction_certificate(cat_matrix):
    # Random unit vectors in the stable space contract at rate sigma. The
    # horizon is capped at t = 15: a float64 stable vector carries ~1e-16 of
    # unstable contamination, which the dynamics amplifies past the 1% slack
    # near t = 19 for these matrices, whatever the implementation.
    rng = np.random.default_rng(41)
    for m in (cat_matrix, ToralMatrix(D4_BLOCK), ToralMatrix(D3_REAL)):
        split = compute_splitting(m)
        a = m.as_array()
        dim_s = split.stable_basis.shape[1]
        for _ in range(100):
            coeffs = rng.normal(size=dim_s)
            u = split.stable_basis @ coeffs
            u = u / np.linalg.norm(u)
            w = u
            for t in range(1, 16):
                w = a @ w
                assert np.linalg.norm(w) <= math.exp(-split.sigma * t) * 1.01


def test_expansion_certificate_on_basis(cat_matrix):
    split = compute_splitting(cat_matrix)
    a_inv = np.linalg.inv(cat_matrix.as_array())
    for col in range(split.unstable_basis.shape[1]):
        u = split.unstable_basis[:, col]
        u = u / np.linalg.norm(u)
        assert np.linalg.norm(a_inv @ u) <= math.exp(-split.sigma) * (1 + 1e-9)


def test_bound_at_origin(cat_matrix):
    split = compute_splitting(cat_matrix)
    assert log_distance_bound(split, CoverPoint((0.0, 0.0), 0.0)) == 2.0


def test_bound_on_stable_leaf(cat_matrix):
    split = compute_splitting(cat_matrix)
    u = split.stable_basis[:, 0]
    u = u / np.linalg.norm(u)
    x = tuple(math.exp(split.sigma) * c for c in u)
    val = log_distance_bound(split, CoverPoint(x, 0.0))
    assert abs(val - 4.0) < 1e-6  # (2/sigma) * sigma + 2


def test_bound_doubling_rule(cat_matrix):
    split = compute_splitting(cat_matrix)
    u = split.unstable_basis[:, 0]
    u = u / np.linalg.norm(u)
    p1 = CoverPoint(tuple(3.0 * c for c in u), 0.0)
    p2 = CoverPoint(tuple(6.0 * c for c in u), 0.0)
    delta = log_distance_bound(split, p2) - log_distance_bound(split, p1)
    assert abs(delta - (2.0 / split.sigma) * math.log(2.0)) < 1e-9


def test_bound_monotone_in_flow_coordinate(cat_matrix):
    split = compute_splitting(cat_matrix)
    vals = [log_distance_bound(split, CoverPoint((5.0, 1.0), s)) for s in (0, 1, 2.5)]
    assert vals == sorted(vals)
    assert abs(vals[2] - vals[0] - 2.5) < 1e-12


def test_embed(ctx):
    g = lattice_element([3, -1])
    assert embed(g) == CoverPoint((3.0, -1.0), 0.0)
    assert embed(ctx.z) == CoverPoint((0.0, 0.0), 1.0)


def test_qi_comparison_small(cat_matrix, oracle6):
    split = compute_splitting(cat_matrix)
    rep = qi_comparison(oracle6, split)
    assert rep.n_entries == len(oracle6)
    assert rep.coverage_ok
    assert 0 < rep.q_hat < 5
    assert rep.max_ratio <= rep.q_hat
    # the bound must dominate length / q_hat - 1 on every entry
    assert (rep.lengths <= rep.q_hat * rep.bounds + rep.q_hat).all()


def test_qi_comparison_radius_guard(cat_matrix, ctx, gens):
    from unstretch import word_ball

    split = compute_splitting(cat_matrix)
    with pytest.raises(ValidationError):
        qi_comparison(word_ball(ctx, gens, 4), split)
