# === FILE: tests/test_autodiff.py ===
import numpy as np
import pytest

from cagsr.core.autodiff import ops
from cagsr.core.autodiff.optim import AdamState, adam_step
from cagsr.core.autodiff.tensor import Tape, Tensor, no_grad
from cagsr.exceptions import ContractError, InputError, ShapeError
from tests.conftest import numeric_grad


def _project(t: Tensor) -> Tensor:
    """Scalar reduction with fixed, uneven weights so every output entry matters."""
    w = np.cos(np.arange(t.size, dtype=np.float64) * 0.7 + 0.3).reshape(t.shape)
    return ops.sum(ops.mul(t, w))


def _check(build, shapes, seed=0, rtol=1e-5):
    rng = np.random.default_rng(seed)
    inputs = [Tensor(rng.standard_normal(s), requires_grad=True, dtype=np.float64) for s in shapes]
    with Tape() as tape:
        loss = _project(build(*inputs))
    tape.backward(loss)
    for t in inputs:
        expected = numeric_grad(lambda: _project(build(*inputs)).item(), t)
        np.testing.assert_allclose(t.grad, expected, rtol=rtol, atol=1e-7)


CASES = {
    "add_broadcast": (lambda a, b: ops.add(a, b), [(3, 4), (4,)]),
    "sub": (lambda a, b: ops.sub(a, b), [(3, 4), (3, 4)]),
    "mul_broadcast": (lambda a, b: ops.mul(a, b), [(3, 4), (3, 1)]),
    "neg": (lambda a: ops.neg(a), [(5,)]),
    "exp": (lambda a: ops.exp(a), [(2, 3)]),
    "relu": (lambda a: ops.relu(a), [(4, 4)]),
    "clip": (lambda a: ops.clip(a, -0.5, 0.5), [(6,)]),
    "minimum": (lambda a, b: ops.minimum(a, b), [(3, 3), (3, 3)]),
    "matmul": (lambda a, b: ops.matmul(a, b), [(3, 4), (4, 2)]),
    "matmul_batched": (lambda a, b: ops.matmul(a, b), [(2, 3, 4), (4, 5)]),
    "reshape": (lambda a: ops.reshape(a, (6, 2)), [(3, 4)]),
    "transpose": (lambda a: ops.transpose(a, (1, 0, 2)), [(2, 3, 4)]),
    "concat": (lambda a, b: ops.concat([a, b], axis=0), [(2, 3), (1, 3)]),
    "slice_rows": (lambda a: ops.slice_rows(a, 1, 4), [(5, 3)]),
    "sum_axis": (lambda a: ops.sum(a, axis=1), [(3, 4)]),
    "mean_keepdims": (lambda a: ops.mean(a, axis=0, keepdims=True), [(3, 4)]),
    "softmax": (lambda a: ops.softmax(a), [(3, 5)]),
    "log_softmax": (lambda a: ops.log_softmax(a), [(3, 5)]),
    "layer_norm": (lambda x, g, b: ops.layer_norm(x, g, b), [(3, 5), (5,), (5,)]),
    "embedding": (lambda w: ops.embedding(w, [1, 4, 1]), [(6, 3)]),
    "take_along": (lambda a: ops.take_along(a, [0, 4, 2]), [(3, 5)]),
    "cross_entropy": (lambda a: ops.cross_entropy(a, [1, 2, 0, 5], ignore_index=0), [(4, 6)]),
}


@pytest.mark.parametrize("seed", range(50))
@pytest.mark.parametrize("name", sorted(CASES))
def test_gradients_match_finite_differences(name, seed):
    build, shapes = CASES[name]
    _check(build, shapes, seed=seed)


def test_softmax_rows_sum_to_one(rng):
    out = ops.softmax(Tensor(rng.standard_normal((7, 11)) * 10, dtype=np.float64))
    np.testing.assert_allclose(out.data.sum(axis=-1), 1.0, atol=1e-12)


def test_second_backward_on_same_tape_is_rejected():
    x = Tensor([1.0, 2.0], requires_grad=True)
    with Tape() as tape:
        loss = ops.sum(ops.mul(x, x))
    tape.backward(loss)
    with pytest.raises(ContractError):
        tape.backward(loss)


def test_backward_needs_scalar_loss():
    x = Tensor([1.0, 2.0], requires_grad=True)
    with Tape() as tape:
        y = ops.mul(x, 2.0)
    with pytest.raises(ContractError):
        tape.backward(y)


def test_ops_outside_a_tape_record_nothing():
    x = Tensor([1.0, 2.0], requires_grad=True)
    y = ops.exp(x)
    assert not y.requires_grad
    with Tape() as tape:
        with no_grad():
            ops.exp(x)
    assert tape.nodes == []


def test_leaf_grads_accumulate_across_tapes():
    x = Tensor([3.0], requires_grad=True)
    for _ in range(2):
        with Tape() as tape:
            loss = ops.sum(ops.mul(x, 2.0))
        tape.backward(loss)
    np.testing.assert_allclose(x.grad, [4.0])


def test_matmul_shape_error_names_both_shapes():
    with pytest.raises(ShapeError) as info:
        ops.matmul(Tensor(np.zeros((2, 3))), Tensor(np.zeros((4, 5))))
    assert "(2, 3)" in str(info.value) and "(4, 5)" in str(info.value)


def test_embedding_rejects_out_of_range_ids():
    with pytest.raises(InputError):
        ops.embedding(Tensor(np.zeros((4, 2))), [0, 4])


def test_cross_entropy_with_every_target_ignored():
    with pytest.raises(ContractError):
        ops.cross_entropy(Tensor(np.zeros((2, 3))), [0, 0], ignore_index=0)


def test_adam_first_step_moves_by_lr_against_the_gradient_sign():
    p = Tensor(np.array([1.0, -1.0]), requires_grad=True, dtype=np.float64)
    p.grad = np.array([0.5, -2.0])
    state = AdamState(lr=0.1)
    adam_step({"p": p}, state)
    np.testing.assert_allclose(p.data, [0.9, -0.9], atol=1e-6)
    np.testing.assert_array_equal(p.grad, [0.0, 0.0])
    assert state.step == 1


def test_adam_rejects_parameters_without_grad():
    with pytest.raises(ContractError):
        adam_step({"frozen": Tensor([1.0])}, AdamState())


def test_adam_zero_gradient_leaves_parameters_unchanged():
    p = Tensor(np.array([1.5, -2.0, 0.25]), requires_grad=True, dtype=np.float64)
    p.grad = np.zeros(3)
    adam_step({"p": p}, AdamState(lr=0.1))
    np.testing.assert_array_equal(p.data, [1.5, -2.0, 0.25])


def test_adam_converges_on_a_quadratic():
    w = Tensor(np.array([0.0]), requires_grad=True, dtype=np.float64)
    state = AdamState(lr=0.1)
    for _ in range(200):
        with Tape() as tape:
            diff = ops.sub(w, 3.0)
            loss = ops.sum(ops.mul(diff, diff))
        tape.backward(loss)
        adam_step({"w": w}, state)
    assert abs(w.data[0] - 3.0) < 0.05
    assert state.step == 200
