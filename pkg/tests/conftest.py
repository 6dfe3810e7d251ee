import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def rand_annulus(rng, q, n=None, pad=0.05):
    """Random points with q(1+pad) < ... < 1-ish inside the annulus."""
    size = n or 1
    rad = q + (1 - q) * rng.uniform(pad, 1 - pad, size)
    pts = rad * np.exp(2j * np.pi * rng.uniform(size=size))
    return pts if n else complex(pts[0])


def rand_disk(rng, n=None, pad=0.08):
    size = n or 1
    rad = rng.uniform(pad, 1 - pad, size)
    pts = rad * np.exp(2j * np.pi * rng.uniform(size=size))
    return pts if n else complex(pts[0])
