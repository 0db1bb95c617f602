import numpy as np
import pytest

from cohtm.auxloss import (
    AuxConfig,
    aux_grad_closed_form,
    aux_loss,
    coherence_weight,
    compute_weights,
    diversity_mask,
    diversity_weight,
    lambda_schedule,
    top_mask,
)
from cohtm.numerics import Tape, backward, finite_diff_check, parameter


def _tape_grad(beta, weights):
    p = parameter(beta)
    with Tape() as t:
        loss = aux_loss(p, weights)
    grads = backward(t, loss)
    return float(loss.value), grads[p]


def test_top_mask_basics():
    beta = np.array([[3.0, 1.0, 2.0]])
    assert top_mask(beta, 2).tolist() == [[True, False, True]]
    assert top_mask(beta, 3).all()


def test_top_mask_tie_break_by_word_id():
    beta = np.array([[1.0, 1.0, 0.0]])
    assert top_mask(beta, 1).tolist() == [[True, False, False]]


def test_top_mask_rows_sum_to_n():
    rng = np.random.default_rng(0)
    beta = rng.normal(size=(6, 30))
    for n in (1, 5, 30):
        assert np.all(top_mask(beta, n).sum(axis=1) == n)


def test_coherence_weight_constant_rows_get_maximal_penalty():
    beta = np.zeros((2, 4))
    n = np.ones((4, 4))
    w_c = coherence_weight(beta, top_mask(beta, 4), n)
    assert np.array_equal(w_c, np.ones((2, 4)))


def test_coherence_weight_uniform_two_word_topic():
    beta = np.array([[0.0, 0.0]])
    n = np.array([[1.0, 0.5], [0.5, 1.0]])
    w_c = coherence_weight(beta, top_mask(beta, 2), n)
    # averages are [0.75, 0.75]: constant row -> penalty 1 everywhere
    assert np.array_equal(w_c, np.ones((1, 2)))


def test_coherence_weight_incoherent_word_gets_penalty():
    beta = np.array([[0.0, 0.0, -10.0]])
    n = np.array([[1.0, 0.8, -1.0],
                  [0.8, 1.0, 0.0],
                  [-1.0, 0.0, 1.0]])
    w_c = coherence_weight(beta, top_mask(beta, 2), n)
    # weighted averages [0.9, 0.9, -0.5] -> minmax [1, 1, 0] -> penalty [0, 0, 1]
    assert np.allclose(w_c, [[0.0, 0.0, 1.0]])


def test_coherence_weight_always_in_unit_interval():
    rng = np.random.default_rng(1)
    for _ in range(100):
        k = int(rng.integers(1, 6))
        v = int(rng.integers(2, 15))
        beta = rng.normal(size=(k, v)) * 3
        n = np.clip(rng.normal(size=(v, v)), -1, 1)
        n = (n + n.T) / 2
        w_c = coherence_weight(beta, top_mask(beta, min(3, v)), n)
        assert w_c.min() >= 0.0 and w_c.max() <= 1.0


def test_diversity_mask_cases():
    m_c = np.array([[1, 1, 0, 0], [1, 1, 0, 0]], dtype=bool)
    assert diversity_mask(m_c).tolist() == [[True, True, False, False]] * 2

    disjoint = np.array([[1, 1, 0, 0], [0, 0, 1, 1]], dtype=bool)
    m_d = diversity_mask(disjoint)
    assert m_d.tolist() == [[False, False, True, True], [True, True, False, False]]

    single = np.array([[1, 0, 1]], dtype=bool)
    assert not diversity_mask(single).any()


def test_diversity_weight_half_and_one():
    rng = np.random.default_rng(2)
    w_c = rng.random((3, 8))
    m_d = rng.random((3, 8)) < 0.5
    assert np.array_equal(diversity_weight(w_c, m_d, 0.5), 0.5 * w_c)
    w_top = diversity_weight(w_c, m_d, 1.0)
    assert np.all(w_top[~m_d] == 0.0)
    assert np.allclose(w_top[m_d], w_c[m_d])


def test_diversity_weight_hand_case():
    w_c = np.array([[1.0, 0.4]])
    m_d = np.array([[True, False]])
    assert np.allclose(diversity_weight(w_c, m_d, 0.7), [[0.7, 0.4 * 0.3]])


def test_diversity_weight_rejects_bad_lambda():
    with pytest.raises(ValueError):
        diversity_weight(np.ones((1, 2)), np.ones((1, 2), dtype=bool), 0.3)


def test_aux_loss_values():
    loss, grad = _tape_grad(np.zeros((1, 2)), np.zeros((1, 2)))
    assert loss == 0.0
    assert np.array_equal(grad, np.zeros((1, 2)))

    loss, _ = _tape_grad(np.zeros((1, 2)), np.ones((1, 2)))
    assert np.isclose(loss, 0.25)


def test_aux_gradient_hand_case():
    # K=1, V=2, beta=0: dL/dbeta_0 = 0.125 (w1 - w2)
    w = np.array([[0.4, 0.9]])
    expected = 0.125 * (w[0, 0] - w[0, 1])
    _, grad = _tape_grad(np.zeros((1, 2)), w)
    assert np.isclose(grad[0, 0], expected, atol=1e-12)
    closed = aux_grad_closed_form(np.zeros((1, 2)), w)
    assert np.isclose(closed[0, 0], expected, atol=1e-12)


def test_closed_form_matches_tape_and_finite_differences():
    rng = np.random.default_rng(3)
    for _ in range(100):
        k = int(rng.integers(1, 6))
        v = int(rng.integers(2, 21))
        beta = rng.normal(size=(k, v)) * 2
        w = rng.random((k, v))
        _, tape_grad = _tape_grad(beta, w)
        closed = aux_grad_closed_form(beta, w)
        assert np.max(np.abs(tape_grad - closed)) < 1e-10

    beta = rng.normal(size=(3, 8))
    w = rng.random((3, 8))

    def f(flat):
        return _tape_grad(flat.reshape(3, 8), w)[0], _tape_grad(flat.reshape(3, 8), w)[1].ravel()

    ok, err = finite_diff_check(f, beta.ravel(), h=1e-5, tol=1e-6)
    assert ok, err


def test_uniform_weights_match_tape():
    rng = np.random.default_rng(4)
    beta = rng.normal(size=(2, 6))
    w = np.full((2, 6), 0.37)
    _, tape_grad = _tape_grad(beta, w)
    assert np.max(np.abs(tape_grad - aux_grad_closed_form(beta, w))) < 1e-10


def test_saturated_logit_has_vanishing_gradient():
    beta = np.zeros((1, 5))
    beta[0, 2] = 30.0
    w = np.random.default_rng(5).random((1, 5))
    grad = aux_grad_closed_form(beta, w)
    assert np.max(np.abs(grad)) < 1e-11


def test_weights_are_detached_from_gradient_path():
    # gradients flow only through softmax(beta): for either fixed N the tape
    # gradient equals the closed form computed with that N's weights
    rng = np.random.default_rng(6)
    beta = rng.normal(size=(2, 5))
    cfg = AuxConfig(n=3, lambda_d=0.7)
    for seed in (0, 1):
        n = np.clip(np.random.default_rng(seed).normal(size=(5, 5)), -1, 1)
        n = (n + n.T) / 2
        _, _, w = compute_weights(beta, n, cfg)
        _, tape_grad = _tape_grad(beta, w)
        assert np.max(np.abs(tape_grad - aux_grad_closed_form(beta, w))) < 1e-10


def test_penalty_ordering_at_symmetric_point():
    # two words with equal beta: the one with the lower penalty weight gets a
    # gradient pushing its probability down less
    beta = np.zeros((1, 2))
    w = np.array([[0.2, 0.9]])  # word 0 coherent, word 1 incoherent
    grad = aux_grad_closed_form(beta, w)
    assert grad[0, 0] < grad[0, 1]


def test_lambda_schedule():
    cfg = AuxConfig(lambda_a_max=100.0, warmup_epochs=50)
    assert lambda_schedule(0, cfg) == 0.0
    assert lambda_schedule(25, cfg) == 50.0
    assert lambda_schedule(50, cfg) == 100.0
    assert lambda_schedule(99, cfg) == 100.0
    with pytest.raises(ValueError):
        lambda_schedule(-1, cfg)


def test_aux_config_validation():
    with pytest.raises(ValueError):
        AuxConfig(lambda_d=0.4)
    with pytest.raises(ValueError):
        AuxConfig(mode="bogus")
    with pytest.raises(ValueError):
        AuxConfig(lambda_a_max=-1)


def test_compute_weights_modes():
    rng = np.random.default_rng(7)
    beta = rng.normal(size=(3, 10))
    n = np.clip(rng.normal(size=(10, 10)), -1, 1)
    n = (n + n.T) / 2
    m_c, m_d, w = compute_weights(beta, n, AuxConfig(n=4, mode="wc"))
    assert m_d is None
    assert np.all(m_c.sum(axis=1) == 4)
    m_c2, m_d2, w2 = compute_weights(beta, n, AuxConfig(n=4, lambda_d=0.5, mode="wd"))
    assert np.array_equal(2.0 * w2, w)
