"""Model assembly: parameter layout, counts, and forward-pass consistency.

The parameter-count oracle below is a from-scratch closed formula (per-edge
plus per-feature bookkeeping) kept deliberately separate from the layout
builder; the frozen expected values were tabulated by hand from the same
arithmetic before the layout code existed.
"""

import numpy as np
import pytest

from cvkan import (
    ComplexBatch,
    CsiluParams,
    CvkanModel,
    EdgeFunction,
    FastKanModel,
    GridSpec,
    ModelConfig,
    make_model,
    param_count,
)
from cvkan.errors import ConfigError
from cvkan.layers import layer_forward
from cvkan.model import build_layout, init_params

G8 = GridSpec(points=8)
G64 = GridSpec(points=64)


def oracle_cvkan(widths, g, output_domain="complex", norm="bn_c"):
    per_feature = {"bn_c": 5, "bn_v": 3, "bn_r2": 4, "none": 0}[norm]
    total = 0
    depth = len(widths) - 1
    for l in range(depth):
        p, q = widths[l], widths[l + 1]
        complex_out = l < depth - 1 or output_domain == "complex"
        per_edge = 2 * g * g + 4 if complex_out else g * g + 3
        total += p * q * per_edge
        if l < depth - 1:
            total += per_feature * q
    return total


def oracle_fastkan(widths, g, norm="bn_real"):
    per_feature = {"bn_real": 2, "none": 0}[norm]
    total = 0
    depth = len(widths) - 1
    for l in range(depth):
        p, q = widths[l], widths[l + 1]
        total += p * q * (g + 1) + q
        if l < depth - 1:
            total += per_feature * q
    return total


CVKAN_CASES = [
    # (widths, grid, output_domain, norm, expected)
    ((1, 1), G8, "complex", "none", 132),
    ((1, 2, 1), G8, "complex", "bn_c", 538),
    ((2, 2, 1), G8, "complex", "bn_c", 802),
    ((2, 4, 2, 1), G8, "complex", "bn_c", 2406),
    ((2, 1, 1), G8, "complex", "bn_c", 401),
    ((3, 1), G8, "complex", "bn_c", 396),
    ((3, 1, 1), G8, "complex", "bn_c", 533),
    ((3, 3, 1), G8, "complex", "bn_c", 1599),
    ((3, 10, 1), G8, "complex", "bn_c", 5330),
    ((3, 10, 3, 1), G8, "complex", "bn_c", 8381),
    ((3, 10, 5, 3, 1), G8, "complex", "bn_c", 13026),
    ((6, 1), G8, "complex", "bn_c", 792),
    ((6, 1, 1), G8, "complex", "bn_c", 929),
    ((6, 3, 1), G8, "complex", "bn_c", 2787),
    ((6, 10, 1), G8, "complex", "bn_c", 9290),
    ((6, 10, 3, 1), G8, "complex", "bn_c", 12341),
    ((6, 10, 5, 3, 1), G8, "complex", "bn_c", 16986),
    ((15, 1, 14), G8, "real", "bn_v", 2921),
    ((15, 1, 14), G8, "real", "none", 2918),
    ((15, 1, 14), G8, "real", "bn_r2", 2922),
    ((15, 1, 14), G8, "real", "bn_c", 2923),
]

FASTKAN_CASES = [
    ((2, 2), G64, 262),
    ((4, 4, 2), G64, 1574),
    ((4, 2, 2), G64, 788),
    ((6, 1, 2), G64, 525),
    ((6, 5, 2), G64, 2617),
    ((6, 10, 2), G64, 5232),
    ((6, 10, 5, 3, 2), G64, 8571),
    ((7, 1, 2), G64, 590),
    ((7, 5, 2), G64, 2942),
    ((7, 10, 2), G64, 5882),
    ((7, 10, 5, 3, 2), G64, 9221),
    ((17, 1, 14), G8, 296),
    ((17, 1, 14), G64, 2032),
    ((17, 2, 14), G8, 578),
    ((17, 2, 14), G64, 4050),
]


@pytest.mark.parametrize("widths,grid,domain,norm,expected", CVKAN_CASES)
def test_cvkan_param_counts(widths, grid, domain, norm, expected):
    cfg = ModelConfig(widths, grid=grid, output_domain=domain, norm_variant=norm)
    assert param_count(cfg) == expected
    assert oracle_cvkan(widths, grid.points, domain, norm) == expected


@pytest.mark.parametrize("widths,grid,expected", FASTKAN_CASES)
def test_fastkan_param_counts(widths, grid, expected):
    cfg = ModelConfig(
        widths, grid=grid, model_type="fastkan", norm_variant="bn_real", output_domain="real"
    )
    assert param_count(cfg) == expected
    assert oracle_fastkan(widths, grid.points) == expected


def test_param_count_independent_of_csilu_variant():
    for variant in ("complex", "real"):
        cfg = ModelConfig((15, 1, 14), grid=G8, output_domain="real",
                          norm_variant="bn_v", csilu_variant=variant)
        assert param_count(cfg) == 2921


def test_layout_oracle_agrees_on_random_shapes():
    rng = np.random.default_rng(0)
    for _ in range(25):
        depth = rng.integers(1, 4)
        widths = tuple(int(w) for w in rng.integers(1, 6, size=depth + 1))
        g = int(rng.integers(2, 9))
        domain = rng.choice(["complex", "real"])
        norm = rng.choice(["bn_c", "bn_v", "bn_r2", "none"])
        cfg = ModelConfig(widths, grid=GridSpec(points=g),
                          output_domain=domain, norm_variant=norm)
        assert param_count(cfg) == oracle_cvkan(widths, g, domain, norm)


def test_layout_segments_tile_the_vector():
    cfg = ModelConfig((2, 3, 1), grid=GridSpec(points=4))
    layout = build_layout(cfg)
    cursor = 0
    for name in layout.names():
        start, stop, shape = layout.span(name)
        assert start == cursor
        assert stop - start == int(np.prod(shape))
        cursor = stop
    assert cursor == layout.size


def test_init_is_deterministic_per_seed():
    cfg = ModelConfig((2, 3, 1), grid=GridSpec(points=4))
    a = init_params(cfg, 11)
    b = init_params(cfg, 11)
    c = init_params(cfg, 12)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_init_residuals_start_at_identity():
    cfg = ModelConfig((1, 1), grid=GridSpec(points=3))
    layout = build_layout(cfg)
    params = init_params(cfg, 0)
    assert layout.read(params, "layer0.res_a")[0, 0] == 1.0
    assert layout.read(params, "layer0.res_b")[0, 0] == 0.0  # w_c starts at 1 + 0i
    assert layout.read(params, "layer0.beta_re")[0, 0] == 0.0


def _single_edge_model(weights, wc, beta, variant="complex", domain="complex"):
    """Build a 1x1 CvkanModel whose lone edge carries the given parameters."""
    g = weights.shape[0]
    cfg = ModelConfig((1, 1), grid=GridSpec(points=g), output_domain=domain,
                      csilu_variant=variant, norm_variant="none")
    layout = build_layout(cfg)
    params = np.zeros(layout.size)
    layout.write(params, "layer0.w_re", weights.real.reshape(-1, 1))
    if "layer0.w_im" in layout:
        layout.write(params, "layer0.w_im", weights.imag.reshape(-1, 1))
    # res_a/res_b mean (Re w_c, Im w_c) for the complex variant, (w1, w2) for real
    layout.write(params, "layer0.res_a", [[wc.real]])
    layout.write(params, "layer0.res_b", [[wc.imag]])
    layout.write(params, "layer0.beta_re", [[beta.real]])
    if "layer0.beta_im" in layout:
        layout.write(params, "layer0.beta_im", [[beta.imag]])
    return CvkanModel(cfg, params)


def test_batched_forward_matches_single_edge_reference():
    rng = np.random.default_rng(3)
    w = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    wc = 0.8 + 0.6j
    beta = -0.2 + 0.1j
    model = _single_edge_model(w, wc, beta)
    edge = EdgeFunction(GridSpec(points=5), w, CsiluParams(w_c=wc, beta=beta))
    xs = rng.uniform(-2, 2, size=(20, 1)) + 1j * rng.uniform(-2, 2, size=(20, 1))
    got = model.predict(ComplexBatch(xs))
    want = edge(xs[:, 0])
    np.testing.assert_allclose(got[:, 0].real, want.real, atol=1e-12)
    np.testing.assert_allclose(got[:, 0].imag, want.imag, atol=1e-12)


def test_batched_real_output_matches_single_edge_reference():
    rng = np.random.default_rng(4)
    w = rng.normal(size=(4, 4)).astype(complex)
    wc = 1.2 - 0.4j
    model = _single_edge_model(w, wc, 0.3 + 0j, domain="real")
    edge = EdgeFunction(GridSpec(points=4), w, CsiluParams(w_c=wc, beta=0.3),
                        output_domain="real")
    xs = rng.uniform(-2, 2, size=(15, 1)) + 1j * rng.uniform(-2, 2, size=(15, 1))
    got = model.predict(ComplexBatch(xs))
    want = edge(xs[:, 0])
    np.testing.assert_allclose(got[:, 0], want, atol=1e-12)


def test_multi_layer_forward_matches_layer_by_layer_reference():
    """2x2x1 model with norm 'none' equals composing layer_forward calls."""
    rng = np.random.default_rng(5)
    g = 3
    cfg = ModelConfig((2, 2, 1), grid=GridSpec(points=g), norm_variant="none")
    model = make_model(cfg, seed=9)
    layout = model.layout

    def edges_for(l, p, q):
        w_re = layout.read(model.params, f"layer{l}.w_re").reshape(p, g * g, q)
        w_im = layout.read(model.params, f"layer{l}.w_im").reshape(p, g * g, q)
        a = layout.read(model.params, f"layer{l}.res_a")
        b = layout.read(model.params, f"layer{l}.res_b")
        br = layout.read(model.params, f"layer{l}.beta_re")
        bi = layout.read(model.params, f"layer{l}.beta_im")
        bank = []
        for j in range(q):
            row = []
            for i in range(p):
                wc = a[i, j] + 1j * b[i, j]
                beta = br[i, j] + 1j * bi[i, j]
                row.append(EdgeFunction(
                    cfg.grid,
                    (w_re[i, :, j] + 1j * w_im[i, :, j]).reshape(g, g),
                    CsiluParams(w_c=wc, beta=beta),
                ))
            bank.append(row)
        return bank

    x = rng.uniform(-1.5, 1.5, size=(8, 2)) + 1j * rng.uniform(-1.5, 1.5, size=(8, 2))
    hidden = layer_forward(x, edges_for(0, 2, 2))
    want = layer_forward(hidden, edges_for(1, 2, 1))
    got = model.predict(ComplexBatch(x))
    np.testing.assert_allclose(got.real, want.real, atol=1e-11)
    np.testing.assert_allclose(got.imag, want.imag, atol=1e-11)


def test_forward_detail_consistent_with_predict():
    cfg = ModelConfig((2, 3, 1), grid=GridSpec(points=4))
    model = make_model(cfg, seed=2)
    rng = np.random.default_rng(6)
    feats = ComplexBatch(rng.normal(size=(10, 2)) + 1j * rng.normal(size=(10, 2)))
    edge_out, vertex_vals = model.forward_detail(feats)
    assert len(edge_out) == 2
    assert edge_out[0].shape == (10, 2, 3)
    assert edge_out[1].shape == (10, 3, 1)
    # edges summed over the source index reproduce the vertex values
    np.testing.assert_allclose(edge_out[0].sum(axis=1), vertex_vals[1], atol=1e-12)
    # final vertex equals predict()
    np.testing.assert_allclose(vertex_vals[-1], model.predict(feats), atol=1e-12)


def test_fastkan_forward_reference():
    from cvkan.layers import real_edge_forward

    cfg = ModelConfig((2, 1), grid=GridSpec(points=4), model_type="fastkan",
                      norm_variant="none", output_domain="real")
    model = make_model(cfg, seed=1)
    rng = np.random.default_rng(8)
    x = rng.normal(size=(6, 2))
    got = model.predict(x)
    w = model.layout.read(model.params, "layer0.w").reshape(2, 4, 1)
    sw = model.layout.read(model.params, "layer0.silu_w")
    bias = model.layout.read(model.params, "layer0.bias")
    want = np.zeros((6, 1))
    for i in range(2):
        want[:, 0] += real_edge_forward(x[:, i], w[i, :, 0], cfg.grid, sw[i, 0])
    want += bias
    np.testing.assert_allclose(got, want, atol=1e-12)


def test_model_config_validation():
    with pytest.raises(ConfigError):
        ModelConfig((3,))
    with pytest.raises(ConfigError):
        ModelConfig((2, 0, 1))
    with pytest.raises(ConfigError):
        ModelConfig((2, 1), norm_variant="bn_real")  # fastkan-only norm
    with pytest.raises(ConfigError):
        ModelConfig((2, 1), model_type="fastkan", norm_variant="bn_c")
    with pytest.raises(ConfigError):
        ModelConfig((2, 1), model_type="fastkan", norm_variant="bn_real",
                    output_domain="complex")
    with pytest.raises(ConfigError):
        ModelConfig((2, 1), model_type="mlp")


def test_model_classes_guard_their_type():
    cv_cfg = ModelConfig((1, 1))
    fk_cfg = ModelConfig((1, 1), model_type="fastkan", norm_variant="none",
                         output_domain="real")
    with pytest.raises(ConfigError):
        FastKanModel(cv_cfg, np.zeros(param_count(cv_cfg)))
    with pytest.raises(ConfigError):
        CvkanModel(fk_cfg, np.zeros(param_count(fk_cfg)))
