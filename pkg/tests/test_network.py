import json

import numpy as np
import pytest

from momentalign.distances import CmdConfig
from momentalign.network import (
    ForwardTrace,
    Gradients,
    NetworkParams,
    cmd_gradients,
    cross_entropy_loss,
    finite_difference_check,
    forward,
    init_params,
    loss_gradients,
    sigmoid,
    softmax_rows,
)
from momentalign.numerics import SeededRng, SparseRowMatrix


def tiny_params(seed=0, m=3, h=4, c=2):
    return init_params(m, h, c, SeededRng(seed))


def test_params_shapes_and_properties():
    p = tiny_params(m=3, h=4, c=2)
    assert p.W.shape == (4, 3) and p.b.shape == (4,)
    assert p.V.shape == (2, 4) and p.c.shape == (2,)
    assert p.input_dim == 3 and p.hidden == 4 and p.classes == 2


def test_params_validation():
    with pytest.raises(ValueError):
        NetworkParams(np.zeros((4, 3)), np.zeros(5), np.zeros((2, 4)), np.zeros(2))
    with pytest.raises(ValueError):
        NetworkParams(np.zeros((4, 3)), np.zeros(4), np.zeros((2, 5)), np.zeros(2))


def test_params_copy_is_deep():
    p = tiny_params()
    q = p.copy()
    q.W[0, 0] += 1.0
    assert p.W[0, 0] != q.W[0, 0]


def test_params_json_round_trip():
    p = tiny_params(seed=9)
    q = NetworkParams.from_json(p.to_json())
    for a, b in [(p.W, q.W), (p.b, q.b), (p.V, q.V), (p.c, q.c)]:
        assert np.array_equal(a, b)
    assert q.seed == p.seed


def test_params_from_json_rejects_bad_shapes():
    doc = json.loads(tiny_params().to_json())
    doc["b"] = doc["b"][:-1]
    with pytest.raises(ValueError):
        NetworkParams.from_json(json.dumps(doc))


def test_init_params_deterministic_and_bounded():
    a = init_params(6, 5, 3, SeededRng(4))
    b = init_params(6, 5, 3, SeededRng(4))
    assert np.array_equal(a.W, b.W) and np.array_equal(a.V, b.V)
    assert np.all(np.abs(a.W) <= np.sqrt(6.0 / 11))
    assert np.all(a.b == 0.0) and np.all(a.c == 0.0)


def test_sigmoid_stable_and_correct():
    z = np.array([-800.0, -1.0, 0.0, 1.0, 800.0])
    s = sigmoid(z)
    assert np.all(np.isfinite(s))
    assert s[2] == 0.5
    assert s[0] == pytest.approx(0.0, abs=1e-300)
    assert s[4] == pytest.approx(1.0)
    assert np.allclose(s[1] + s[3], 1.0)  # symmetry


def test_softmax_rows():
    z = np.array([[1000.0, 1000.0], [0.0, np.log(3.0)]])
    s = softmax_rows(z)
    assert np.allclose(s.sum(axis=1), 1.0)
    assert np.allclose(s[0], [0.5, 0.5])
    assert np.allclose(s[1], [0.25, 0.75])


def test_forward_matches_manual():
    p = tiny_params(m=2, h=3, c=2)
    X = SeededRng(1).normal_matrix(5, 2)
    trace = forward(p, X)
    assert isinstance(trace, ForwardTrace)
    hidden = sigmoid(X @ p.W.T + p.b)
    assert np.allclose(trace.hidden, hidden)
    assert np.allclose(trace.outputs, softmax_rows(hidden @ p.V.T + p.c))


def test_forward_sparse_matches_dense():
    p = tiny_params(m=3, h=4, c=2)
    S = SparseRowMatrix.from_rows([[(0, 1.0)], [(1, 2.0), (2, -0.5)], []], cols=3)
    ts = forward(p, S)
    td = forward(p, S.toarray())
    assert np.allclose(ts.hidden, td.hidden)
    assert np.allclose(ts.outputs, td.outputs)


def test_cross_entropy_known_value():
    # single example, output forced to (0.5, 0.5): loss = log 2
    trace = ForwardTrace(hidden=np.zeros((1, 1)), outputs=np.array([[0.5, 0.5]]))
    Y = np.array([[1.0, 0.0]])
    assert cross_entropy_loss(trace, Y) == pytest.approx(np.log(2.0), rel=1e-12)


def test_cross_entropy_clamps_zero_probability():
    trace = ForwardTrace(hidden=np.zeros((1, 1)), outputs=np.array([[0.0, 1.0]]))
    Y = np.array([[1.0, 0.0]])
    val = cross_entropy_loss(trace, Y)
    assert np.isfinite(val) and val > 20.0


def test_gradients_add_scaled_and_finite():
    p = tiny_params()
    g = Gradients.zeros_like(p)
    X = SeededRng(2).normal_matrix(4, 3)
    Y = np.eye(2)[SeededRng(3).permutation(4) % 2]
    lg = loss_gradients(p, X, Y)
    g.add_scaled(lg, 2.0)
    assert np.allclose(g.dW, 2.0 * lg.dW)
    assert g.all_finite()
    g.dW[0, 0] = np.nan
    assert not g.all_finite()


def test_loss_gradients_match_finite_differences():
    p = tiny_params(seed=5, m=3, h=4, c=3)
    X = SeededRng(6).normal_matrix(8, 3)
    Y = np.eye(3)[[0, 1, 2, 0, 1, 2, 0, 1]]
    err = finite_difference_check(p, which="loss", X=X, Y=Y)
    assert err < 1e-6


def test_cmd_gradients_match_finite_differences():
    p = tiny_params(seed=7, m=2, h=3, c=2)
    Xs = SeededRng(8).normal_matrix(6, 2)
    Xt = SeededRng(9).normal_matrix(7, 2) + 0.4
    err = finite_difference_check(
        p, which="cmd", Xs=Xs, Xt=Xt, cfg=CmdConfig(k=3)
    )
    assert err < 1e-6


def test_cmd_gradients_zero_on_identical_activations():
    # same inputs on both sides: distance stays 0 and the norm
    # singularity is handled with a zero subgradient, not a nan
    p = tiny_params(seed=10, m=2, h=3, c=2)
    X = SeededRng(11).normal_matrix(5, 2)
    g = cmd_gradients(p, X, X, CmdConfig())
    assert np.all(g.dW == 0.0) and np.all(g.db == 0.0)


def test_finite_difference_check_validation():
    p = tiny_params()
    with pytest.raises(ValueError):
        finite_difference_check(p, which="loss", X=np.ones((2, 3)),
                                Y=np.eye(2), step=0.0)
    with pytest.raises(ValueError):
        finite_difference_check(p, which="asdf")
