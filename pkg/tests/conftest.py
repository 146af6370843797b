import numpy as np
import pytest

from fastmice.synth import BlobConfig, make_blobs


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_blobs():
    return make_blobs(BlobConfig(n=400, k=4, n_views=3, seed=7))


def same_partition(a, b) -> bool:
    """True when two labelings induce the same partition."""
    a = np.asarray(a)
    b = np.asarray(b)
    pairs = set(zip(a.tolist(), b.tolist()))
    return len(pairs) == len(set(a.tolist())) == len(set(b.tolist()))
