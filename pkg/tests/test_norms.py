"""Normalization variants against longhand statistics oracles.

Train-mode inputs are wrapped in autodiff Vars because that is the only
way the training path ever calls these layers; eval mode takes plain
arrays.
"""

import numpy as np
import pytest

import oracles
from cvkan import NormLayer
from cvkan import autodiff as ad
from cvkan.errors import BatchStatsError, ConfigError
from cvkan.norms import AFFINE_FIELDS, identity_affine, norm_param_count

RNG = np.random.default_rng(99)


def identity(variant, features=1):
    return {f: identity_affine(f, features) for f in AFFINE_FIELDS[variant]}


def run_train(layer, xr, xi, affine=None):
    affine = affine if affine is not None else identity(layer.variant, xr.shape[1])
    yr, yi = layer.forward(ad.Var(xr), ad.Var(xi), affine, train=True)
    return yr.value, yi.value


def test_param_counts_per_feature():
    assert norm_param_count("bn_c") == 5
    assert norm_param_count("bn_v") == 3
    assert norm_param_count("bn_r2") == 4
    assert norm_param_count("bn_real") == 2
    assert norm_param_count("none") == 0
    with pytest.raises(ConfigError):
        norm_param_count("layernorm")


def test_bn_v_simple_batch():
    # column {2, -2}: zero mean, E|x|^2 = 4 -> outputs {1, -1} up to eps
    layer = NormLayer("bn_v", 1)
    yr, yi = run_train(layer, np.array([[2.0], [-2.0]]), np.zeros((2, 1)))
    np.testing.assert_allclose(yr[:, 0], [1.0, -1.0], atol=1e-5)
    np.testing.assert_allclose(yi[:, 0], [0.0, 0.0], atol=1e-12)


def test_bn_c_axis_aligned_batch():
    # batch {1, -1, 2i, -2i}: diagonal covariance diag(1/2, 2), zero mean.
    # Whitening scales the channels by sqrt(2) and 1/sqrt(2).
    layer = NormLayer("bn_c", 1, eps=1e-12)
    xr = np.array([[1.0], [-1.0], [0.0], [0.0]])
    xi = np.array([[0.0], [0.0], [2.0], [-2.0]])
    yr, yi = run_train(layer, xr, xi)
    np.testing.assert_allclose(yr[:, 0], [np.sqrt(2), -np.sqrt(2), 0, 0], atol=1e-5)
    np.testing.assert_allclose(yi[:, 0], [0, 0, np.sqrt(2), -np.sqrt(2)], atol=1e-5)


def test_bn_c_matches_eigendecomposition_oracle():
    n, f = 64, 3
    xr = RNG.normal(1.5, 2.0, size=(n, f))
    xi = 0.6 * xr + RNG.normal(-0.5, 0.7, size=(n, f))  # correlated channels
    eps = 1e-5
    layer = NormLayer("bn_c", f, eps=eps)
    yr, yi = run_train(layer, xr, xi)
    for j in range(f):
        cov = oracles.cov2x2(xr[:, j], xi[:, j]) + eps * np.eye(2)
        w = oracles.inv_sqrt_psd_2x2(cov)
        centered = np.stack([xr[:, j] - xr[:, j].mean(), xi[:, j] - xi[:, j].mean()])
        want = w @ centered
        np.testing.assert_allclose(yr[:, j], want[0], atol=1e-10)
        np.testing.assert_allclose(yi[:, j], want[1], atol=1e-10)


def test_bn_c_whitens_to_identity_covariance():
    n = 500
    xr = RNG.normal(3.0, 1.4, size=(n, 2))
    xi = -0.8 * xr + RNG.normal(0.0, 0.4, size=(n, 2))
    layer = NormLayer("bn_c", 2, eps=1e-12)
    yr, yi = run_train(layer, xr, xi)
    for j in range(2):
        assert abs(yr[:, j].mean()) < 1e-6
        assert abs(yi[:, j].mean()) < 1e-6
        cov = oracles.cov2x2(yr[:, j], yi[:, j])
        np.testing.assert_allclose(cov, np.eye(2), atol=1e-6)


def test_bn_r2_equals_two_real_batchnorms():
    n, f = 32, 2
    xr = RNG.normal(2.0, 3.0, size=(n, f))
    xi = RNG.normal(-1.0, 0.5, size=(n, f))
    joint = NormLayer("bn_r2", f)
    yr, yi = run_train(joint, xr, xi)
    re_only = NormLayer("bn_real", f)
    im_only = NormLayer("bn_real", f)
    aff = identity("bn_real", f)
    want_r = re_only.forward_real(ad.Var(xr), aff, train=True).value
    want_i = im_only.forward_real(ad.Var(xi), aff, train=True).value
    np.testing.assert_allclose(yr, want_r, atol=1e-12)
    np.testing.assert_allclose(yi, want_i, atol=1e-12)


def test_bn_real_standardizes():
    x = RNG.normal(5.0, 2.5, size=(100, 3))
    layer = NormLayer("bn_real", 3, eps=1e-12)
    y = layer.forward_real(ad.Var(x), identity("bn_real", 3), train=True).value
    np.testing.assert_allclose(y.mean(axis=0), 0.0, atol=1e-9)
    np.testing.assert_allclose(y.std(axis=0), 1.0, atol=1e-6)  # population std


def test_affine_is_applied_after_normalization():
    layer = NormLayer("bn_v", 1)
    affine = {
        "gamma": np.array([3.0]),
        "beta_re": np.array([10.0]),
        "beta_im": np.array([-5.0]),
    }
    yr, yi = run_train(layer, np.array([[2.0], [-2.0]]), np.zeros((2, 1)), affine)
    np.testing.assert_allclose(yr[:, 0], [13.0, 7.0], atol=1e-4)
    np.testing.assert_allclose(yi[:, 0], [-5.0, -5.0], atol=1e-12)


def test_train_mode_queues_stats_and_commit_applies_ema():
    layer = NormLayer("bn_v", 1, momentum=0.1)
    sink = []
    layer.forward(
        ad.Var(np.array([[2.0], [-2.0]])),
        ad.Var(np.zeros((2, 1))),
        identity("bn_v"),
        train=True,
        sink=sink,
    )
    assert len(sink) == 1
    owner, stats = sink[0]
    assert owner is layer
    assert stats["var"][0] == pytest.approx(4.0)
    # nothing applied until commit
    assert layer.running["var"][0] == 1.0
    layer.commit(stats)
    assert layer.running["var"][0] == pytest.approx(0.9 * 1.0 + 0.1 * 4.0)
    assert layer.running["mean_re"][0] == pytest.approx(0.0)


def test_eval_mode_uses_running_stats():
    layer = NormLayer("bn_real", 1, eps=1e-12)
    layer.running["mean"] = np.array([10.0])
    layer.running["var"] = np.array([4.0])
    y = layer.forward_real(np.array([[12.0]]), identity("bn_real"), train=False)
    assert ad._val(y)[0, 0] == pytest.approx(1.0)
    # eval mode accepts a single sample
    y = layer.forward_real(np.array([[10.0]]), identity("bn_real"), train=False)
    assert ad._val(y)[0, 0] == pytest.approx(0.0)


def test_train_mode_rejects_single_sample():
    layer = NormLayer("bn_v", 1)
    with pytest.raises(BatchStatsError):
        layer.forward(ad.Var(np.zeros((1, 1))), ad.Var(np.zeros((1, 1))),
                      identity("bn_v"), train=True)
    real = NormLayer("bn_real", 1)
    with pytest.raises(BatchStatsError):
        real.forward_real(ad.Var(np.zeros((1, 1))), identity("bn_real"), train=True)


def test_variant_method_guards():
    with pytest.raises(ConfigError):
        NormLayer("bn_v", 1).forward_real(np.zeros((2, 1)), identity("bn_v"), train=False)
    with pytest.raises(ConfigError):
        NormLayer("bn_real", 1).forward(np.zeros((2, 1)), np.zeros((2, 1)),
                                        identity("bn_real"), train=False)


def test_constructor_validation():
    with pytest.raises(ConfigError):
        NormLayer("whiten", 1)
    with pytest.raises(ConfigError):
        NormLayer("bn_v", 1, momentum=1.5)
    with pytest.raises(ConfigError):
        NormLayer("bn_v", 1, eps=0.0)


def test_state_dict_roundtrip():
    layer = NormLayer("bn_c", 2)
    layer.running["cov_ri"] = np.array([0.25, -0.5])
    clone = NormLayer("bn_c", 2)
    clone.load_state_dict(layer.state_dict())
    for key in layer.running:
        np.testing.assert_array_equal(clone.running[key], layer.running[key])
    bad = layer.state_dict()
    bad["cov_ri"] = [0.1]
    with pytest.raises(ConfigError):
        NormLayer("bn_c", 2).load_state_dict(bad)


def test_norm_gradients_match_fd():
    """Gradients through train-mode bn_c w.r.t. inputs and affine params."""
    n, f = 6, 2
    xr0 = RNG.normal(size=(n, f))
    xi0 = RNG.normal(size=(n, f))
    layer = NormLayer("bn_c", f)
    weights = RNG.normal(size=(n, f))

    def build(p):
        xr = ad.reshape(ad.segment(p, 0, n * f), (n, f))
        xi = ad.reshape(ad.segment(p, n * f, 2 * n * f), (n, f))
        affine = {}
        off = 2 * n * f
        for name in AFFINE_FIELDS["bn_c"]:
            affine[name] = ad.segment(p, off, off + f)
            off += f
        yr, yi = layer.forward(xr, xi, affine, train=True)
        return ad.sum_(yr * weights) + ad.sum_(yi * weights)

    params = np.concatenate([
        xr0.ravel(), xi0.ravel(),
        np.concatenate([identity_affine(nm, f) for nm in AFFINE_FIELDS["bn_c"]]),
    ])
    _, grad = ad.value_and_grad(build, params)
    fd = oracles.fd_gradient(
        lambda p: float(build(ad.Var(np.asarray(p, dtype=np.float64))).value), params
    )
    np.testing.assert_allclose(grad, fd, rtol=2e-5, atol=1e-7)
