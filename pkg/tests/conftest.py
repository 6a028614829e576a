from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from ballwidths import BallFamily, BallSpec, normalize_family

# exponents the suites draw from; exact reciprocals keep boundary cases exact
P_CHOICES = ("inf", 8, 6, 5, 4, 3, 2.5, 2, 1.75, 1.5, 1.25, 1)


def z_of(p) -> float:
    return 0.0 if p == "inf" else 1.0 / p


def random_family(rng: np.random.Generator, N: int, k_max: int = 4, normalized: bool = True,
                  zs=None) -> BallFamily:
    """Family with random exponents (from ``zs`` or uniform) and log-uniform radii."""
    if zs is None:
        k = int(rng.integers(1, k_max + 1))
        zs = rng.choice([z_of(p) for p in P_CHOICES], size=k, replace=False)
    nus = np.exp(rng.uniform(-2.0, 2.0, size=len(zs)))
    fam = BallFamily.from_balls(N, (BallSpec(z, nu) for z, nu in zip(zs, nus)))
    return normalize_family(fam) if normalized else fam


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@st.composite
def families(draw, N=None, min_size=1, max_size=4, normalized=True):
    """Hypothesis strategy for ball families (normalized by default)."""
    dim = draw(st.sampled_from([4, 8, 16, 32, 64])) if N is None else N
    ps = draw(st.lists(st.sampled_from(P_CHOICES), min_size=min_size, max_size=max_size, unique=True))
    nus = draw(st.lists(st.floats(0.05, 20.0), min_size=len(ps), max_size=len(ps)))
    fam = BallFamily.from_pairs(dim, zip(ps, nus))
    return normalize_family(fam) if normalized else fam
