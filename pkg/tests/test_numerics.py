"""Tests for the array engine: primitives, backward, finite differences, Adam, RNG."""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from numerics import (
    Adam,
    AdamState,
    Array,
    Conv2d,
    Module,
    SpectralNormConv3d,
    SplitMix64,
    Tape,
    adam_step,
    backward,
    conv2d,
    conv3d,
    finite_diff_grad,
    get_default_dtype,
    ops,
    precision,
    relative_error,
)
from utils.errors import ConfigurationError, ContractError, DimensionError, NumericalError


def _naive_conv2d(x, w, padding):
    n, cin, h, wd = x.shape
    cout, _, kh, kw = w.shape
    xp = np.pad(x, [(0, 0), (0, 0), (padding, padding), (padding, padding)])
    ho, wo = h + 2 * padding - kh + 1, wd + 2 * padding - kw + 1
    out = np.zeros((n, cout, ho, wo))
    for b in range(n):
        for o in range(cout):
            for i in range(ho):
                for j in range(wo):
                    for c in range(cin):
                        for u in range(kh):
                            for v in range(kw):
                                out[b, o, i, j] += xp[b, c, i + u, j + v] * w[o, c, u, v]
    return out


class TestMatmul:
    """Batched matrix product."""

    def test_identity(self, float64):
        b = np.arange(6.0).reshape(2, 3)
        assert_array_equal(ops.matmul(Array(np.eye(2)), Array(b)).data, b)

    def test_hand_arithmetic(self, float64):
        out = ops.matmul(Array([[1.0, 2.0], [3.0, 4.0]]), Array([[1.0], [1.0]]))
        assert_array_equal(out.data, [[3.0], [7.0]])

    def test_matches_triple_loop(self, float64, rng):
        a, b = rng.normal((5, 4)), rng.normal((4, 3))
        expected = np.zeros((5, 3))
        for i in range(5):
            for j in range(3):
                for k in range(4):
                    expected[i, j] += a[i, k] * b[k, j]
        assert_allclose(ops.matmul(Array(a), Array(b)).data, expected, atol=1e-6)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            ops.matmul(Array(np.ones((2, 3))), Array(np.ones((2, 3))))


class TestConv2d:
    """Grouped 2-D convolution."""

    def test_identity_kernel(self, float64, rng):
        x = rng.normal((1, 1, 5, 5))
        out = conv2d(Array(x), Array(np.ones((1, 1, 1, 1))))
        assert_array_equal(out.data, x)

    def test_per_group_identity(self, float64, rng):
        x = rng.normal((1, 2, 4, 4))
        out = conv2d(Array(x), Array(np.ones((2, 1, 1, 1))), groups=2)
        assert_array_equal(out.data, x)

    def test_matches_nested_loops(self, float64, rng):
        x, w = rng.normal((1, 4, 6, 6)), rng.normal((3, 4, 3, 3))
        out = conv2d(Array(x), Array(w), padding=1)
        assert out.shape == (1, 3, 6, 6)
        assert_allclose(out.data, _naive_conv2d(x, w, 1), atol=1e-5)

    def test_indivisible_groups(self):
        with pytest.raises(ConfigurationError):
            conv2d(Array(np.ones((1, 3, 4, 4))), Array(np.ones((2, 1, 1, 1))), groups=2)

    def test_stride_output_shape(self, rng):
        out = conv2d(Array(rng.normal((2, 3, 8, 8))), Array(rng.normal((5, 3, 3, 3))), stride=2, padding=1)
        assert out.shape == (2, 5, 4, 4)

    def test_grouped_strided_matches_per_group_loops(self, float64, rng):
        x, w = rng.normal((2, 4, 7, 7)), rng.normal((6, 2, 3, 3))
        out = conv2d(Array(x), Array(w), stride=2, padding=1, groups=2)
        expected = np.concatenate([
            _naive_conv2d(x[:, :2], w[:3], 1),
            _naive_conv2d(x[:, 2:], w[3:], 1),
        ], axis=1)[:, :, ::2, ::2]
        assert out.shape == (2, 6, 4, 4)
        assert_allclose(out.data, expected, atol=1e-10)

    @pytest.mark.parametrize("stride,groups", [(1, 1), (2, 1), (1, 3), (2, 3)])
    def test_gradients_match_finite_differences(self, float64, rng, stride, groups):
        x = Array(rng.normal((2, 3, 5, 5)), requires_grad=True)
        w = Array(rng.normal((6, 3 // groups, 3, 3)), requires_grad=True)
        b = Array(rng.normal(6), requires_grad=True)
        weights = Array(rng.normal(conv2d(x, w, b, stride=stride, padding=1, groups=groups).shape))
        with Tape() as tape:
            loss = ops.sum_(conv2d(x, w, b, stride=stride, padding=1, groups=groups) * weights)
        grads = backward(loss, tape)
        for leaf, f in [
            (x, lambda a: ops.sum_(conv2d(a, Array(w.data), Array(b.data), stride, 1, groups) * weights)),
            (w, lambda a: ops.sum_(conv2d(Array(x.data), a, Array(b.data), stride, 1, groups) * weights)),
            (b, lambda a: ops.sum_(conv2d(Array(x.data), Array(w.data), a, stride, 1, groups) * weights)),
        ]:
            numeric = finite_diff_grad(f, Array(leaf.data), eps=1e-6).data
            assert relative_error(grads[leaf], numeric) <= 1e-6

    def test_conv3d_grouped_matches_frame_sum(self, float64, rng):
        x, w = rng.normal((1, 2, 3, 4, 4)), rng.normal((2, 1, 3, 1, 1))
        out = conv3d(Array(x), Array(w), padding=(1, 0, 0), groups=2).data
        xp = np.pad(x, [(0, 0), (0, 0), (1, 1), (0, 0), (0, 0)])
        for c in range(2):
            expected = sum(w[c, 0, k, 0, 0] * xp[0, c, k:k + 3] for k in range(3))
            assert_allclose(out[0, c], expected, atol=1e-12)


class TestSoftmax:
    """Exp-normalize with the -inf sentinel."""

    def test_symmetric(self, float64):
        assert_allclose(ops.softmax(Array([0.0, 0.0])).data, [0.5, 0.5])

    @pytest.mark.parametrize("x", [-3.0, 0.0, 7.5])
    def test_masked_entry_gets_zero(self, float64, x):
        assert_array_equal(ops.softmax(Array([x, -np.inf])).data, [1.0, 0.0])

    def test_log_two(self, float64):
        assert_allclose(ops.softmax(Array([np.log(2.0), 0.0])).data, [2 / 3, 1 / 3], atol=1e-9)

    def test_all_masked_row_is_zero(self, float64):
        out = ops.softmax(Array([[-np.inf, -np.inf], [1.0, 1.0]]))
        assert_array_equal(out.data, [[0.0, 0.0], [0.5, 0.5]])

    def test_nan_rejected(self):
        with pytest.raises(NumericalError):
            ops.softmax(Array([np.nan, 0.0]))


class TestBackward:
    """Reverse-mode sweep."""

    def test_sum_gives_ones(self, float64, rng):
        x = Array(rng.normal((3, 4)), requires_grad=True)
        with Tape() as tape:
            loss = ops.sum_(x)
        assert_array_equal(backward(loss, tape)[x], np.ones((3, 4)))

    def test_square_gives_twice_x(self, float64, rng):
        x = Array(rng.normal(5), requires_grad=True)
        with Tape() as tape:
            loss = ops.sum_(x * x)
        assert_allclose(backward(loss, tape)[x], 2 * x.data)

    def test_reused_input_accumulates(self, float64):
        x = Array([1.0, -2.0], requires_grad=True)
        with Tape() as tape:
            loss = ops.sum_(x * 3.0 + x)
        assert_allclose(backward(loss, tape)[x], [4.0, 4.0])

    def test_non_scalar_loss(self, float64):
        x = Array(np.ones(3), requires_grad=True)
        with Tape() as tape:
            y = x * 2.0
        with pytest.raises(ContractError):
            backward(y, tape)

    def test_loss_from_another_tape(self, float64):
        x = Array([1.0, 2.0], requires_grad=True)
        with Tape():
            loss = ops.sum_(x * x)
        with Tape() as other:
            ops.sum_(x)
        with pytest.raises(ContractError):
            backward(loss, other)

    def test_untracked_loss(self, float64):
        loss = ops.sum_(Array([1.0, 2.0]))
        with Tape() as tape:
            pass
        with pytest.raises(ContractError):
            backward(loss, tape)

    def test_composite_matches_finite_differences(self, float64, rng):
        w = rng.normal((3, 2, 3, 3))
        weights = rng.normal((1, 3, 4, 4))

        def f(x):
            h = ops.leaky_relu(conv2d(x, Array(w), padding=1))
            return ops.sum_(ops.sigmoid(h) * Array(weights))

        x = Array(rng.normal((1, 2, 4, 4)), requires_grad=True)
        with Tape() as tape:
            loss = f(x)
        analytic = backward(loss, tape)[x]
        numeric = finite_diff_grad(f, x, eps=1e-6).data
        assert relative_error(analytic, numeric) <= 1e-5

    def test_nonfinite_primitive_output_raises(self):
        with pytest.raises(NumericalError):
            ops.log(Array([0.0, 1.0]))


class TestFiniteDiff:
    """Central-difference oracle."""

    def test_sum(self, float64, rng):
        x = Array(rng.normal((2, 3)))
        assert_allclose(finite_diff_grad(ops.sum_, x).data, np.ones((2, 3)), atol=1e-8)

    def test_square(self, float64):
        x = Array([1.0, 2.0])
        grad = finite_diff_grad(lambda a: ops.sum_(a * a), x)
        assert_allclose(grad.data, [2.0, 4.0], atol=1e-6)

    def test_leaves_input_untouched(self, float64):
        x = Array([1.0, 2.0])
        finite_diff_grad(lambda a: ops.sum_(a * a), x)
        assert_array_equal(x.data, [1.0, 2.0])

    def test_selected_indices_only(self, float64):
        x = Array([[1.0, 2.0], [3.0, 4.0]])
        grad = finite_diff_grad(lambda a: ops.sum_(a * a), x, indices=[1, 2])
        assert_allclose(grad.data, [[0.0, 4.0], [6.0, 0.0]], atol=1e-6)

    def test_eps_must_be_positive(self):
        with pytest.raises(ValueError):
            finite_diff_grad(ops.sum_, Array([1.0]), eps=0.0)


class TestAdam:
    """Bias-corrected Adam."""

    def test_zero_gradient_leaves_params(self, float64):
        p = Array(np.array([0.3, -0.7]), requires_grad=True)
        adam_step({"p": p}, {"p": np.zeros(2)}, AdamState.for_params({"p": p}))
        assert_array_equal(p.data, [0.3, -0.7])

    def test_first_step_is_lr_times_sign(self, float64):
        p = Array(np.array([2.0]), requires_grad=True)
        adam_step({"p": p}, {"p": np.array([1.0])}, AdamState(), lr=0.01, beta1=0.0)
        assert_allclose(p.data, [2.0 - 0.01], atol=1e-8)

    def test_quadratic_descends_monotonically(self, float64):
        p = Array(np.array([1.0]), requires_grad=True)
        opt = Adam({"x": p}, lr=0.01)
        trace = []
        for _ in range(100):
            opt.step({"x": 2.0 * p.data})
            trace.append(abs(float(p.data[0])))
        assert all(b < a for a, b in zip(trace, trace[1:]))

    def test_shape_mismatch(self, float64):
        p = Array(np.zeros(3), requires_grad=True)
        with pytest.raises(ContractError):
            adam_step({"p": p}, {"p": np.zeros(2)}, AdamState())

    def test_missing_gradient_is_skipped(self, float64):
        p = Array(np.ones(2), requires_grad=True)
        q = Array(np.ones(2), requires_grad=True)
        adam_step({"p": p, "q": q}, {"p": np.ones(2)}, AdamState(), lr=0.1)
        assert_array_equal(q.data, [1.0, 1.0])
        assert np.all(p.data < 1.0)


class TestPrecision:
    """Precision switch."""

    def test_scoped_switch(self):
        outer = get_default_dtype()
        with precision("float64"):
            assert get_default_dtype() is np.float64
            assert Array([1.0]).dtype == np.float64
        assert get_default_dtype() is outer


class TestSplitMix64:
    """Deterministic random streams."""

    def test_same_seed_same_stream(self):
        assert_array_equal(SplitMix64(7).next_u64(16), SplitMix64(7).next_u64(16))

    def test_derive_separates_keys(self):
        a = SplitMix64.derive(7, 1).uniform(8)
        b = SplitMix64.derive(7, 2).uniform(8)
        assert not np.array_equal(a, b)

    def test_uniform_range(self):
        u = SplitMix64(3).uniform(1000, low=-2.0, high=5.0)
        assert u.min() >= -2.0 and u.max() < 5.0

    def test_sample_without_replacement(self):
        idx = SplitMix64(11).sample_without_replacement(10, 4)
        assert len(set(idx.tolist())) == 4
        assert list(idx) == sorted(idx)

    def test_empty_integer_range(self):
        with pytest.raises(ValueError):
            SplitMix64(0).integers(3, 3)


class TestModule:
    """Parameter walking and state round trip."""

    def test_state_dict_round_trip(self, float64):
        class Net(Module):
            def __init__(self, seed):
                super().__init__()
                self.convs = [Conv2d(2, 2, 3, SplitMix64(seed), padding=1)]
                self.sn = SpectralNormConv3d(2, 2, 3, SplitMix64(seed + 1))

        a, b = Net(1), Net(2)
        b.load_state_dict(a.state_dict())
        for name, value in a.state_dict().items():
            assert_array_equal(b.state_dict()[name], value)
        assert "convs.0.weight" in a.named_parameters()
        assert "sn.u" in a.named_buffers()

    def test_missing_entry_rejected(self, float64):
        conv = Conv2d(1, 1, 1, SplitMix64(0))
        with pytest.raises(ContractError):
            conv.load_state_dict({"weight": conv.weight.data})
