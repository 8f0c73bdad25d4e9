import numpy as np
import pytest
from numpy.lib.stride_tricks import sliding_window_view

from fidelity.deterministic import (
    DfConfig,
    DfMap,
    combine_scale_scores,
    df_level,
    df_total,
    information_weights,
    level_weight_candidates,
    pool,
    scale_scores,
    search_level_weights,
    structure_map,
)
from imaging.filters import BINOMIAL_KERNEL, gaussian_window, windowed_moments
from imaging.plane import ImagePlane
from imaging.pyramid import PyramidPair
from utils.errors import ConfigError, DimensionTooSmall


def structure_oracle(x, y, cfg):
    """Per-position weighted moments with explicit loops"""
    half = cfg.window // 2
    g = np.exp(-np.arange(-half, half + 1) ** 2 / (2 * cfg.sigma ** 2))
    w = np.outer(g, g) / np.sum(np.outer(g, g))
    rows, cols = x.shape[0] - 2 * half, x.shape[1] - 2 * half
    values, weights = np.zeros((rows, cols)), np.zeros((rows, cols))
    for i in range(rows):
        for j in range(cols):
            px, py = x[i:i + cfg.window, j:j + cfg.window], y[i:i + cfg.window, j:j + cfg.window]
            mx, my = np.sum(w * px), np.sum(w * py)
            vx, vy = np.sum(w * (px - mx) ** 2), np.sum(w * (py - my) ** 2)
            cxy = np.sum(w * (px - mx) * (py - my))
            values[i, j] = (cxy + cfg.c1) / (np.sqrt(vx) * np.sqrt(vy) + cfg.c1)
            weights[i, j] = (np.log2(1 + vx / cfg.cw) + np.log2(1 + vy / cfg.cw))
    return values, weights


@pytest.mark.parametrize("seed", range(5))
def test_structure_map_and_pooling_match_oracle(seed):
    rng = np.random.default_rng(seed)
    x = rng.random((17, 19))
    y = np.clip(x + 0.1 * rng.standard_normal(x.shape), 0, 1)
    cfg = DfConfig()
    dfmap = structure_map(ImagePlane(x), ImagePlane(y), cfg)
    values, weights = structure_oracle(x, y, cfg)
    assert np.allclose(dfmap.values, values, atol=1e-9)
    assert np.allclose(dfmap.weights, weights, atol=1e-9)
    assert pool(dfmap) == pytest.approx(np.sum(weights * values) / np.sum(weights), abs=1e-9)


def test_flat_patches_carry_no_information():
    flat = ImagePlane(np.full((20, 20), 0.4))
    assert np.all(information_weights(flat, flat, DfConfig()) == 0.0)


def test_pool_falls_back_to_plain_mean():
    dfmap = DfMap(values=np.array([[0.2, 0.4], [0.6, 0.8]]), weights=np.zeros((2, 2)))
    assert pool(dfmap) == pytest.approx(0.5)


def test_flat_pair_compares_as_identical():
    flat = ImagePlane(np.full((20, 20), 0.4))
    assert pool(structure_map(flat, flat, DfConfig())) == pytest.approx(1.0)


def test_identity_gives_unit_score(textured):
    img = textured(96, 1)
    result = df_total(PyramidPair.build(img, img), DfConfig())
    assert result.score == pytest.approx(1.0, abs=1e-9)
    assert all(s == pytest.approx(1.0, abs=1e-9) for s in result.level_scores)
    assert result.clamped_scales == 0


def test_combine_renormalizes_truncated_exponents():
    value, clamped = combine_scale_scores([0.5], (0.0448, 0.2856, 0.3001), 1e-4)
    assert value == pytest.approx(0.5)
    assert clamped == 0


def test_combine_clamps_non_positive_scores():
    value, clamped = combine_scale_scores([-0.2, 1.0], (1.0, 1.0), 1e-4)
    assert clamped == 1
    assert value == pytest.approx(np.sqrt(1e-4))


def test_scale_scores_stop_when_window_no_longer_fits(textured):
    img = textured(32, 2)
    # 32 -> 16 -> 8: only two scales fit an 11 px window
    assert len(scale_scores(img, img, DfConfig())) == 2


def test_level_smaller_than_window_is_rejected(rng):
    small = ImagePlane(rng.random((8, 8)))
    with pytest.raises(DimensionTooSmall):
        scale_scores(small, small, DfConfig())


def test_config_validation():
    with pytest.raises(ConfigError):
        DfConfig(window=10)
    with pytest.raises(ConfigError):
        DfConfig(level_weights=(0.0, 0.0, 0.0))
    with pytest.raises(ConfigError):
        DfConfig(alphas=(1.0, -1.0))


def test_level_weights_are_normalized_at_use(textured, blurred):
    ref = textured(96, 4)
    pair = PyramidPair.build(ref, blurred(ref, 1.0))
    scaled = df_total(pair, DfConfig(level_weights=(2.0, 2.0, 2.0)))
    uniform = df_total(pair, DfConfig())
    assert scaled.score == pytest.approx(uniform.score, abs=1e-12)


def test_level_weight_candidates_start_uniform():
    candidates = level_weight_candidates(3, step=0.25)
    assert candidates[0] == pytest.approx((1 / 3, 1 / 3, 1 / 3))
    # simplex points with quarter steps in 3 dimensions
    assert len(candidates) == 1 + 15
    assert all(sum(c) == pytest.approx(1.0) for c in candidates)


def test_search_level_weights_finds_informative_level(rng):
    mos = np.linspace(0, 100, 40)
    levels = np.column_stack([mos / 100.0, rng.random(40), rng.random(40)])
    weights, rho = search_level_weights(levels, mos)
    assert weights == (1.0, 0.0, 0.0)
    assert rho == pytest.approx(1.0)


def moments_oracle(x, y, cfg):
    """Weighted moments of every full window, without separable filtering"""
    w = np.outer(gaussian_window(cfg.window, cfg.sigma), gaussian_window(cfg.window, cfg.sigma))
    px = sliding_window_view(x, w.shape)
    py = sliding_window_view(y, w.shape)
    mx = np.einsum("ijkl,kl->ij", px, w)
    my = np.einsum("ijkl,kl->ij", py, w)
    dx, dy = px - mx[..., None, None], py - my[..., None, None]
    vx = np.einsum("ijkl,kl->ij", dx * dx, w)
    vy = np.einsum("ijkl,kl->ij", dy * dy, w)
    cxy = np.einsum("ijkl,kl->ij", dx * dy, w)
    return vx, vy, cxy


def vectorized_structure_oracle(x, y, cfg):
    vx, vy, cxy = moments_oracle(x, y, cfg)
    values = (cxy + cfg.c1) / (np.sqrt(vx) * np.sqrt(vy) + cfg.c1)
    weights = (np.log2(1 + vx / cfg.cw) + np.log2(1 + vy / cfg.cw))
    return values, weights


def reduce_oracle(arr):
    k2 = np.outer(BINOMIAL_KERNEL, BINOMIAL_KERNEL)
    padded = np.pad(arr, 2, mode="reflect")
    return np.einsum("ijkl,kl->ij", sliding_window_view(padded, (5, 5)), k2)[::2, ::2]


def df_level_oracle(x, y, cfg):
    scores = []
    for j in range(len(cfg.alphas)):
        if j:
            x, y = reduce_oracle(x), reduce_oracle(y)
        if min(x.shape) < cfg.window:
            break
        values, weights = vectorized_structure_oracle(x, y, cfg)
        scores.append(np.sum(weights * values) / np.sum(weights))
    exps = np.array(cfg.alphas[:len(scores)]) / np.sum(cfg.alphas[:len(scores)])
    return np.prod(np.maximum(scores, cfg.clamp_floor) ** exps)


def test_structure_map_over_random_instances():
    rng = np.random.default_rng(77)
    cfg = DfConfig()
    for k in range(100):
        rows, cols = rng.integers(11, 30, size=2)
        x = rng.random((rows, cols))
        y = np.clip(x + rng.uniform(0.0, 0.5) * rng.standard_normal(x.shape), 0, 1)
        if k % 4 == 0:
            y = rng.random((rows, cols))
        dfmap = structure_map(ImagePlane(x), ImagePlane(y), cfg)
        values, weights = vectorized_structure_oracle(x, y, cfg)
        assert np.allclose(dfmap.values, values, atol=1e-9), k
        assert np.allclose(dfmap.weights, weights, atol=1e-9), k


def test_pooling_over_random_instances():
    rng = np.random.default_rng(78)
    for k in range(100):
        shape = tuple(rng.integers(1, 12, size=2))
        values = rng.uniform(-1.0, 1.0, shape)
        weights = rng.random(shape) * (k % 10 != 0)
        flat_v, flat_w = values.ravel().tolist(), weights.ravel().tolist()
        total = sum(flat_w)
        if total > 0:
            expected = sum(v * w for v, w in zip(flat_v, flat_w)) / total
        else:
            expected = sum(flat_v) / len(flat_v)
        assert pool(DfMap(values=values, weights=weights)) == pytest.approx(expected, abs=1e-12), k


def test_edges_carry_more_information_than_flat_regions():
    step = np.full((32, 32), 0.2)
    step[:, 16:] = 0.8
    plane = ImagePlane(step)
    weights = information_weights(plane, plane, DfConfig())
    # windows starting at columns 6..15 straddle the edge
    edge = weights[:, 6:16]
    flat = np.concatenate([weights[:, :6], weights[:, 16:]], axis=1)
    assert edge.min() > flat.max()


def test_negated_contrast_anticorrelates(rng):
    x = rng.random((24, 24))
    cfg = DfConfig()
    dfmap = structure_map(ImagePlane(x), ImagePlane(1.0 - x), cfg)
    _, _, var_x, _, _ = windowed_moments(x, x, gaussian_window(cfg.window, cfg.sigma))
    assert np.allclose(dfmap.values, (cfg.c1 - var_x) / (var_x + cfg.c1), atol=1e-9)
    assert dfmap.values.max() < -0.8


def test_df_level_matches_direct_computation(textured, blurred):
    ref = textured(128, 9)
    test = blurred(ref, 1.2)
    cfg = DfConfig()
    assert df_level(ref, test, cfg) == pytest.approx(df_level_oracle(ref.data, test.data, cfg), abs=1e-9)


def test_luminance_shift_leaves_df_unchanged(textured, blurred):
    ref = ImagePlane(0.1 + 0.8 * textured(128, 11).data)
    test = blurred(ref, 1.5)
    shift = 0.05
    base = df_total(PyramidPair.build(ref, test), DfConfig()).score
    shifted = df_total(
        PyramidPair.build(ImagePlane(ref.data + shift), ImagePlane(test.data + shift)), DfConfig()
    ).score
    assert abs(base - shifted) < 1e-6
