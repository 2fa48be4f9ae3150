import numpy as np
import pytest

from imcsi.errors import ContractError, DegenerateInputError
from imcsi.metrics import (
    column_similarities,
    cosine_similarity,
    loss_multi,
    loss_single,
    stacked_cosine_similarity,
)


def rand_vec(rng, n=8):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def test_identity_is_one():
    rng = np.random.default_rng(0)
    v = rand_vec(rng)
    assert abs(cosine_similarity(v, v) - 1.0) < 1e-12


def test_global_phase_invariance():
    rng = np.random.default_rng(1)
    v = rand_vec(rng)
    for phi in np.linspace(0, 2 * np.pi, 9):
        assert abs(cosine_similarity(v, v * np.exp(1j * phi)) - 1.0) < 1e-12


def test_known_value():
    v = np.array([1.0, 0.0])
    v_hat = np.array([1.0, 1.0]) / np.sqrt(2)
    assert abs(cosine_similarity(v, v_hat) - 1 / np.sqrt(2)) < 1e-12


def test_symmetry_and_scale_invariance():
    rng = np.random.default_rng(2)
    for _ in range(20):
        a, b = rand_vec(rng), rand_vec(rng)
        assert abs(cosine_similarity(a, b) - cosine_similarity(b, a)) < 1e-12
        c = complex(rng.standard_normal(), rng.standard_normal())
        if abs(c) > 1e-3:
            assert abs(cosine_similarity(a, b) - cosine_similarity(c * a, b)) < 1e-12


def test_range_bounded_by_cauchy_schwarz():
    rng = np.random.default_rng(3)
    for _ in range(100):
        r = cosine_similarity(rand_vec(rng), rand_vec(rng))
        assert 0.0 <= r <= 1.0 + 1e-12


def test_zero_vector_rejected():
    with pytest.raises(DegenerateInputError):
        cosine_similarity(np.zeros(4), np.ones(4))


def test_length_mismatch_rejected():
    with pytest.raises(ContractError):
        cosine_similarity(np.ones(3), np.ones(4))


def test_stacked_identical_is_one():
    rng = np.random.default_rng(4)
    m = rng.standard_normal((8, 3)) + 1j * rng.standard_normal((8, 3))
    rep = stacked_cosine_similarity(m, m)
    assert abs(rep.rho - 1.0) < 1e-12
    assert len(rep.per_subband) == 3


def test_stacked_half_orthogonal():
    m = np.zeros((4, 2), dtype=complex)
    m[0, 0] = 1.0
    m[1, 1] = 1.0
    m_hat = m.copy()
    m_hat[:, 1] = 0.0
    m_hat[2, 1] = 1.0  # orthogonal to column 1
    rep = stacked_cosine_similarity(m, m_hat)
    assert abs(rep.rho - 0.5) < 1e-12


def test_stacked_matches_per_column_loop():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((8, 5)) + 1j * rng.standard_normal((8, 5))
    b = rng.standard_normal((8, 5)) + 1j * rng.standard_normal((8, 5))
    want = [cosine_similarity(a[:, s], b[:, s]) for s in range(5)]
    np.testing.assert_allclose(column_similarities(a, b), want, atol=1e-12)
    assert abs(stacked_cosine_similarity(a, b).rho - np.mean(want)) < 1e-12


def test_stacked_shape_mismatch():
    with pytest.raises(ContractError):
        column_similarities(np.ones((4, 2)), np.ones((4, 3)))


def test_loss_single_perfect_and_orthogonal():
    rng = np.random.default_rng(6)
    vs = [rand_vec(rng) for _ in range(4)]
    assert abs(loss_single([(v, v) for v in vs]) + 1.0) < 1e-12
    pairs = [(np.array([1.0, 0.0]), np.array([0.0, 1.0]))] * 3
    assert abs(loss_single(pairs)) < 1e-12


def test_loss_equals_negated_similarity():
    rng = np.random.default_rng(7)
    pairs = [(rand_vec(rng), rand_vec(rng)) for _ in range(8)]
    want = -np.mean([cosine_similarity(v, vh) for v, vh in pairs])
    assert abs(loss_single(pairs) - want) < 1e-12

    stacks = [
        (
            rng.standard_normal((8, 3)) + 1j * rng.standard_normal((8, 3)),
            rng.standard_normal((8, 3)) + 1j * rng.standard_normal((8, 3)),
        )
        for _ in range(5)
    ]
    want_m = -np.mean([stacked_cosine_similarity(a, b).rho for a, b in stacks])
    assert abs(loss_multi(stacks) - want_m) < 1e-12


def test_empty_batch_rejected():
    with pytest.raises(ContractError):
        loss_single([])
    with pytest.raises(ContractError):
        loss_multi([])
