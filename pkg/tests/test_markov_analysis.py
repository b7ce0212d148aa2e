import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from src.errors import DeflationError, LazariRefusedError, MatrixError
from src.markov_analysis import (
    PROJ_TOL,
    cesaro_averaging,
    cesaro_lazari,
    cesaro_structural,
    char_poly,
    check_stochastic,
    decompose_chain,
    deflate_unit_root,
    horizon_sum,
    projection_residual,
)
from tests.conftest import random_stochastic_matrix

F3G1 = np.array(
    [
        [1 / 3, 2 / 3, 0, 0],
        [1 / 2, 1 / 2, 0, 0],
        [0, 0, 1, 0],
        [1 / 2, 0, 1 / 2, 0],
    ]
)
F3G1_LIMIT = np.array(
    [
        [3 / 7, 4 / 7, 0, 0],
        [3 / 7, 4 / 7, 0, 0],
        [0, 0, 1, 0],
        [3 / 14, 2 / 7, 1 / 2, 0],
    ]
)


def inf_norm(a):
    return np.abs(a).sum(axis=1).max()


# -------------------------
# check_stochastic
# -------------------------
@pytest.mark.parametrize(
    "q, message",
    [
        ([[0.5, 0.5]], "square"),
        ([[1.2, -0.2], [0, 1]], "negative"),
        ([[0.5, 0.4], [0, 1]], "row 1 sums"),
        ([[np.nan, 1], [0, 1]], "non-finite"),
    ],
)
def test_check_stochastic_rejects(q, message):
    with pytest.raises(MatrixError, match=message):
        check_stochastic(q)


# -------------------------
# Characteristic polynomial and deflation
# -------------------------
def test_char_poly_swap():
    np.testing.assert_allclose(char_poly([[0, 1], [1, 0]]), [-1, 0, 1], atol=1e-15)


def test_char_poly_two_state_chain():
    np.testing.assert_allclose(char_poly([[0.5, 0.5], [2 / 3, 1 / 3]]), [-1 / 6, -5 / 6, 1], atol=1e-15)


def test_char_poly_matches_determinant():
    rng = np.random.default_rng(11)
    for n in range(2, 9):
        q = random_stochastic_matrix(rng, n)
        p = char_poly(q)
        for z in (0.37, -1.7, 2.3):
            direct = np.linalg.det(q - z * np.eye(n))
            assert np.polynomial.polynomial.polyval(z, p) == pytest.approx(direct, rel=1e-6, abs=1e-12)


def test_char_poly_refuses_large_dimension():
    with pytest.raises(LazariRefusedError, match="structural"):
        char_poly(np.full((13, 13), 1 / 13))


def test_deflate_simple_unit_root():
    m1, t_poly = deflate_unit_root([-1 / 6, -5 / 6, 1])
    assert m1 == 1
    np.testing.assert_allclose(t_poly, [1 / 6, 1], atol=1e-12)


def test_deflate_double_unit_root():
    m1, t_poly = deflate_unit_root([1, -2, 1])
    assert m1 == 2
    np.testing.assert_allclose(t_poly, [1], atol=1e-12)


def test_deflate_rejects_polynomial_without_unit_root():
    with pytest.raises(DeflationError, match="not stochastic-like"):
        deflate_unit_root([1, 1])


# -------------------------
# Cesàro limits on the worked chain
# -------------------------
@pytest.mark.parametrize("limit", [cesaro_lazari, cesaro_structural, cesaro_averaging])
def test_worked_chain_limit(limit):
    result = limit(F3G1)
    tol = 1e-6 if limit is cesaro_averaging else 1e-10
    np.testing.assert_allclose(result.q_star, F3G1_LIMIT, atol=tol)
    assert result.converged


def test_lazari_reports_multiplicity():
    assert cesaro_lazari(F3G1).m1 == 2


def test_decompose_worked_chain():
    chain = decompose_chain(F3G1)
    assert chain.recurrent_classes == [(0, 1), (2,)]
    assert chain.transient == (3,)
    np.testing.assert_allclose(chain.stationary[0], [3 / 7, 4 / 7])
    np.testing.assert_allclose(chain.stationary[1], [1.0])
    np.testing.assert_allclose(chain.absorption, [[0.5, 0.5]])


def test_identity_is_its_own_limit():
    for limit in (cesaro_lazari, cesaro_structural, cesaro_averaging):
        np.testing.assert_allclose(limit(np.eye(3)).q_star, np.eye(3), atol=1e-12)


def test_periodic_chain_limit():
    q = np.array([[0.0, 1.0], [1.0, 0.0]])
    for limit in (cesaro_lazari, cesaro_structural, cesaro_averaging):
        np.testing.assert_allclose(limit(q).q_star, np.full((2, 2), 0.5), atol=1e-10)


def test_averaging_reports_non_convergence():
    q = np.array([[0.999, 0.001], [0.001, 0.999]])
    result = cesaro_averaging(q, n_max=4)
    assert not result.converged
    assert result.notes


@pytest.mark.parametrize("extrapolate", [True, False])
@pytest.mark.parametrize(
    "q, n_max, reached",
    [
        (np.array([[0.999, 0.001], [0.001, 0.999]]), 1000, 512),
        (np.roll(np.eye(3), 1, axis=1), 10**6, 2**19),
    ],
)
def test_averaging_stops_within_n_max(q, n_max, reached, extrapolate):
    result = cesaro_averaging(q, n_max=n_max, extrapolate=extrapolate)
    assert not result.converged
    assert result.iterations == reached
    assert result.iterations <= n_max
    np.testing.assert_allclose(result.q_star.sum(axis=1), 1.0, atol=1e-9)


def test_plain_averaging_is_slower_than_extrapolated():
    q = np.array([[0.9, 0.1], [0.2, 0.8]])
    plain = cesaro_averaging(q, tol=1e-6, extrapolate=False)
    fast = cesaro_averaging(q, tol=1e-6)
    assert fast.iterations < plain.iterations
    np.testing.assert_allclose(fast.q_star, cesaro_structural(q).q_star, atol=1e-6)


def test_horizon_sum_matches_powers():
    q = F3G1
    for n in range(1, 8):
        expected = sum(np.linalg.matrix_power(q, m) for m in range(n))
        np.testing.assert_allclose(horizon_sum(q, n), expected, atol=1e-12)


# -------------------------
# Seeded corpus
# -------------------------
@pytest.mark.slow
def test_methods_agree_on_random_corpus():
    rng = np.random.default_rng(2024)
    for case in range(100):
        n = int(rng.integers(2, 9))
        q = random_stochastic_matrix(rng, n)
        structural = cesaro_structural(q)
        lazari = cesaro_lazari(q)
        averaging = cesaro_averaging(q)

        assert inf_norm(lazari.q_star - structural.q_star) < 1e-8, (case, q)
        assert inf_norm(averaging.q_star - structural.q_star) < 1e-6, (case, q)
        for result in (structural, lazari, averaging):
            assert projection_residual(q, result.q_star) < PROJ_TOL, (case, result.method, q)


@pytest.mark.slow
def test_unit_root_multiplicity_counts_recurrent_classes():
    rng = np.random.default_rng(7)
    for _ in range(100):
        q = random_stochastic_matrix(rng, int(rng.integers(2, 9)))
        m1, _ = deflate_unit_root(char_poly(q))
        assert m1 == len(decompose_chain(q).recurrent_classes), q


@seed(3)
@settings(max_examples=50, deadline=None)
@given(
    weights=arrays(
        np.int64,
        (5, 5),
        elements=st.integers(min_value=0, max_value=9),
    )
)
def test_structural_limit_is_stochastic_projection(weights):
    weights[np.arange(5), np.arange(5)] += 1
    q = weights / weights.sum(axis=1, keepdims=True)

    q_star = cesaro_structural(q).q_star

    np.testing.assert_allclose(q_star.sum(axis=1), 1.0, atol=1e-10)
    assert (q_star >= 0).all()
    assert projection_residual(q, q_star) < PROJ_TOL
