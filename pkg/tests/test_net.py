"""Feedforward net: forward, analytic gradients vs finite differences, serialization."""

import numpy as np
import pytest

from gems import net


def fd_param_grad(shape, params, x, upstream, h=1e-5):
    grad = np.zeros_like(params)
    for i in range(params.size):
        hi = params.copy()
        hi[i] += h
        lo = params.copy()
        lo[i] -= h
        grad[i] = (upstream @ net.forward(shape, hi, x) - upstream @ net.forward(shape, lo, x)) / (2 * h)
    return grad


def rel_err(a, b):
    return np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-3)


def test_zero_params_zero_output(rng):
    shape = net.NetShape(4, (8,), 3)
    out = net.forward(shape, np.zeros(shape.n_params), rng.normal(size=4))
    assert np.array_equal(out, np.zeros(3))


def test_identity_linear_layer():
    shape = net.NetShape(3, (), 3)
    params = np.zeros(shape.n_params)
    params[:9] = np.eye(3).ravel()
    x = np.array([0.3, -1.2, 2.5])
    assert np.allclose(net.forward(shape, params, x), x)


def test_forward_matches_reference_evaluation(rng):
    shape = net.NetShape(5, (7, 6), 4)
    params = net.init_params(shape, rng)
    x = rng.normal(size=5)
    # independent layer-by-layer reference with explicit slicing
    pos = 0
    a = x
    dims = shape.layer_dims()
    for i, (n_in, n_out) in enumerate(dims):
        w = params[pos : pos + n_in * n_out].reshape(n_out, n_in)
        pos += n_in * n_out
        b = params[pos : pos + n_out]
        pos += n_out
        z = w @ a + b
        a = np.tanh(z) if i < len(dims) - 1 else z
    assert np.allclose(net.forward(shape, params, x), a, atol=1e-15)


def test_nonfinite_input_rejected():
    shape = net.NetShape(2, (), 1)
    with pytest.raises(ValueError):
        net.forward(shape, np.zeros(shape.n_params), np.array([np.nan, 0.0]))


def test_vjp_zero_upstream(rng):
    shape = net.NetShape(3, (5,), 2)
    params = net.init_params(shape, rng)
    gp, gx = net.vjp(shape, params, rng.normal(size=3), np.zeros(2))
    assert not gp.any() and not gx.any()


def test_scalar_linear_gradient():
    shape = net.NetShape(1, (), 1)
    params = np.array([2.0, 0.5])  # w, b
    x = np.array([3.0])
    gp, gx = net.vjp(shape, params, x, np.ones(1))
    assert np.allclose(gp, [3.0, 1.0])  # dy/dw = x, dy/db = 1
    assert np.allclose(gx, [2.0])


def test_gradient_check_50_random_cases():
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(50):
        hidden = tuple(rng.integers(2, 8, size=rng.integers(1, 3)))
        shape = net.NetShape(int(rng.integers(1, 6)), hidden, int(rng.integers(1, 5)))
        params = net.init_params(shape, rng)
        x = rng.normal(size=shape.n_in)
        upstream = rng.normal(size=shape.n_out)
        gp, _ = net.vjp(shape, params, x, upstream)
        fd = fd_param_grad(shape, params, x, upstream)
        worst = max(worst, rel_err(gp, fd).max())
    assert worst <= 1e-4


def test_vjp_homogeneous_in_upstream(rng):
    shape = net.NetShape(4, (6,), 3)
    params = net.init_params(shape, rng)
    x = rng.normal(size=4)
    up = rng.normal(size=3)
    gp1, gx1 = net.vjp(shape, params, x, up)
    gp2, gx2 = net.vjp(shape, params, x, 2.0 * up)
    assert np.allclose(gp2, 2.0 * gp1, atol=1e-14)
    assert np.allclose(gx2, 2.0 * gx1, atol=1e-14)


def test_jacobian_linear_net_matches_matrix_product(rng):
    # bias-free stack of linear maps: J = W1 @ W0, penalty = ||W1 W0||_F^2
    shape = net.NetShape(3, (), 2)
    params = np.zeros(shape.n_params)
    w = rng.normal(size=(2, 3))
    params[:6] = w.ravel()
    assert abs(net.jacobian_frobenius_sq(shape, params, rng.normal(size=3)) - (w**2).sum()) < 1e-12


def test_jacobian_zero_net():
    shape = net.NetShape(3, (4,), 2)
    assert net.jacobian_frobenius_sq(shape, np.zeros(shape.n_params), np.zeros(3)) == 0.0


def test_jacobian_matches_fd(rng):
    shape = net.NetShape(3, (5,), 2)
    params = net.init_params(shape, rng)
    x = rng.normal(size=3)
    h = 1e-6
    jac = np.zeros((2, 3))
    for j in range(3):
        hi = x.copy()
        hi[j] += h
        lo = x.copy()
        lo[j] -= h
        jac[:, j] = (net.forward(shape, params, hi) - net.forward(shape, params, lo)) / (2 * h)
    fd_val = (jac**2).sum()
    val = net.jacobian_frobenius_sq(shape, params, x)
    assert abs(val - fd_val) / max(fd_val, 1e-9) < 1e-3


def test_serialization_round_trip_bit_exact(rng):
    shape = net.NetShape(6, (9,), 4)
    params = net.init_params(shape, rng)
    shape2, params2 = net.from_bytes(net.to_bytes(shape, params))
    assert shape2 == shape
    assert np.array_equal(params, params2)


def test_init_deterministic():
    shape = net.NetShape(4, (8,), 2)
    a = net.init_params(shape, np.random.default_rng(7))
    b = net.init_params(shape, np.random.default_rng(7))
    assert np.array_equal(a, b)
    bound = 1.0 / 2.0
    assert np.abs(a).max() <= bound
