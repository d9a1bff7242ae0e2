import numpy as np
import pytest

from sigucss.features import FeatureStore
from sigucss.imaging import dilate, oversample_spline, rasterize, skeletonize
from sigucss.ingest import OnlineSignature
from sigucss.synthetic import make_corpus, write_corpus

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """4 writers x (12 genuine, 6 forgery) written to disk with a manifest."""
    root = tmp_path_factory.mktemp("small_corpus")
    catalog, manifest = write_corpus(root, make_corpus(4, 12, 6, seed=3))
    return catalog, manifest


@pytest.fixture(scope="session")
def small_store(small_corpus):
    store = FeatureStore()
    store.prefetch(small_corpus[0].samples())
    return store


def random_strokes(rng, n_strokes=None, box=40.0):
    strokes = []
    for _ in range(n_strokes or rng.integers(1, 4)):
        k = rng.integers(2, 6)
        strokes.append(rng.uniform(0, box, size=(k, 2)))
    return strokes


def random_skeleton_input(rng, radius=None):
    """Dilated raster of a few random spline strokes (possibly disconnected)."""
    coords = []
    for pts in random_strokes(rng):
        dense = oversample_spline(OnlineSignature(pts), 0.5)
        coords.append(rasterize(dense, margin=0).coords())
    from sigucss.imaging import BinaryImage
    img = BinaryImage.from_coords(np.vstack(coords), margin=4)
    return dilate(img, int(rng.integers(1, 3)) if radius is None else radius)


def random_skeleton(rng):
    return skeletonize(random_skeleton_input(rng))
