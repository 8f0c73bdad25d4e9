import numpy as np
import pytest
from scipy import ndimage

from datasets.synthetic import textured_image, write_dataset
from imaging.plane import ImagePlane


@pytest.fixture
def textured():
    """textured(size, seed) -> ImagePlane"""
    return lambda size=128, seed=0: textured_image(size, seed)


@pytest.fixture
def blurred():
    return lambda img, sigma: ImagePlane(ndimage.gaussian_filter(img.data, sigma=sigma, mode="mirror"))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def no_table_env(monkeypatch):
    monkeypatch.delenv("SRIF_TABLE", raising=False)


@pytest.fixture(scope="session")
def synthetic_manifest(tmp_path_factory):
    """8 references x 7 degradations at 64 px, half train / half test"""
    out = tmp_path_factory.mktemp("synthetic")
    return write_dataset(out, n_images=8, size=64, seed=3)
