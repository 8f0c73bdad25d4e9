import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from imaging.filters import BINOMIAL_KERNEL, gaussian_window, windowed_moments
from imaging.plane import ImagePlane
from imaging.pyramid import PyramidPair, decompose, expand, reconstruct, reduce
from utils.errors import ConfigError, DimensionMismatch, DimensionTooSmall


def dense_reduce_oracle(arr):
    """Full 5x5 kernel, mirror padding, then decimate"""
    k2 = np.outer(BINOMIAL_KERNEL, BINOMIAL_KERNEL)
    padded = np.pad(arr, 2, mode="reflect")
    out = np.zeros_like(arr)
    for i in range(arr.shape[0]):
        for j in range(arr.shape[1]):
            out[i, j] = np.sum(padded[i:i + 5, j:j + 5] * k2)
    return out[::2, ::2]


def dense_expand_oracle(coarse, rows, cols):
    """Zero insertion, then the full 5x5 kernel scaled by 4 with mirror padding"""
    up = np.zeros((rows, cols))
    up[::2, ::2] = coarse
    k2 = np.outer(2 * BINOMIAL_KERNEL, 2 * BINOMIAL_KERNEL)
    padded = np.pad(up, 2, mode="reflect")
    out = np.zeros_like(up)
    for i in range(rows):
        for j in range(cols):
            out[i, j] = np.sum(padded[i:i + 5, j:j + 5] * k2)
    return out


def test_reduce_matches_dense_oracle(rng):
    arr = rng.random((13, 10))
    assert np.allclose(reduce(ImagePlane(arr)).data, dense_reduce_oracle(arr), atol=1e-12)


def test_reduce_halves_with_ceiling():
    assert reduce(ImagePlane(np.zeros((7, 5)))).shape == (4, 3)
    assert reduce(ImagePlane(np.zeros((8, 6)))).shape == (4, 3)


def test_reduce_keeps_flat_images_flat():
    out = reduce(ImagePlane(np.full((9, 9), 0.3)))
    assert np.allclose(out.data, 0.3, atol=1e-15)


def test_reduce_rejects_single_row():
    with pytest.raises(DimensionTooSmall):
        reduce(ImagePlane(np.zeros((1, 8))))


@pytest.mark.parametrize("target", [(10, 8), (9, 7), (10, 7)])
def test_expand_preserves_constants(target):
    w, h = target
    coarse = ImagePlane(np.full(((h + 1) // 2, (w + 1) // 2), 0.6))
    assert np.allclose(expand(coarse, w, h).data, 0.6, atol=1e-14)


def test_expand_matches_dense_oracle(rng):
    coarse = rng.random((4, 4))
    out = expand(ImagePlane(coarse), 8, 8).data
    assert np.allclose(out, dense_expand_oracle(coarse, 8, 8), atol=1e-12)


def test_expand_single_pixel():
    out = expand(ImagePlane(np.array([[0.7]])), 2, 2).data
    assert np.allclose(out, dense_expand_oracle(np.array([[0.7]]), 2, 2), atol=1e-12)
    assert np.allclose(out, 0.7, atol=1e-12)


def test_first_laplacian_of_an_impulse():
    img = np.zeros((16, 16))
    img[7, 8] = 1.0
    _, laplacian = decompose(ImagePlane(img), depth=2)
    expected = img - dense_expand_oracle(dense_reduce_oracle(img), 16, 16)
    assert np.allclose(laplacian[0].data, expected, atol=1e-12)
    assert laplacian[0].data[7, 8] > 0


def test_expand_rejects_incompatible_target():
    with pytest.raises(DimensionMismatch):
        expand(ImagePlane(np.zeros((4, 4))), 11, 8)


def test_decompose_level_counts(rng):
    gaussian, laplacian = decompose(ImagePlane(rng.random((64, 48))), depth=4)
    assert len(gaussian) == 4
    assert len(laplacian) == 3
    assert [g.shape for g in gaussian] == [(64, 48), (32, 24), (16, 12), (8, 6)]
    assert [band.shape for band in laplacian] == [(64, 48), (32, 24), (16, 12)]


def test_decompose_rejects_shallow_depth(rng):
    with pytest.raises(ConfigError):
        decompose(ImagePlane(rng.random((16, 16))), depth=1)


@settings(max_examples=30, deadline=None)
@given(
    rows=st.integers(min_value=9, max_value=70),
    cols=st.integers(min_value=9, max_value=70),
    seed=st.integers(min_value=0, max_value=2**16),
)
def test_laplacian_pyramid_reconstructs_input(rows, cols, seed):
    img = ImagePlane(np.random.default_rng(seed).random((rows, cols)))
    gaussian, laplacian = decompose(img, depth=3)
    for level, band in enumerate(laplacian):
        finer, coarser = gaussian[level], gaussian[level + 1]
        rebuilt = band.data + expand(coarser, finer.width, finer.height).data
        assert np.max(np.abs(rebuilt - finer.data)) <= 1e-12
    assert np.max(np.abs(reconstruct(gaussian[-1], laplacian).data - img.data)) <= 1e-12


def test_pyramid_pair_requires_matching_shapes(rng):
    with pytest.raises(DimensionMismatch):
        PyramidPair.build(ImagePlane(rng.random((32, 32))), ImagePlane(rng.random((32, 30))))


def test_image_plane_is_read_only(rng):
    plane = ImagePlane(rng.random((4, 4)))
    with pytest.raises(ValueError):
        plane.data[0, 0] = 1.0


def test_from_array_clamps():
    plane = ImagePlane.from_array([[-0.5, 0.5], [1.5, 1.0]])
    assert plane.data.min() == 0.0 and plane.data.max() == 1.0


def test_windowed_moments_match_direct_sums(rng):
    x, y = rng.random((15, 14)), rng.random((15, 14))
    window = gaussian_window(5, 1.0)
    mu_x, mu_y, var_x, var_y, cov = windowed_moments(x, y, window)
    assert mu_x.shape == (11, 10)

    w2 = np.outer(window, window)
    i, j = 3, 7
    px, py = x[i:i + 5, j:j + 5], y[i:i + 5, j:j + 5]
    mx, my = np.sum(w2 * px), np.sum(w2 * py)
    assert mu_x[i, j] == pytest.approx(mx, abs=1e-12)
    assert var_x[i, j] == pytest.approx(np.sum(w2 * (px - mx) ** 2), abs=1e-12)
    assert var_y[i, j] == pytest.approx(np.sum(w2 * (py - my) ** 2), abs=1e-12)
    assert cov[i, j] == pytest.approx(np.sum(w2 * (px - mx) * (py - my)), abs=1e-12)
