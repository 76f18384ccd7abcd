import math

import numpy as np
import pytest

from distamp import kernels
from distamp._accel import NUMBA_ENABLED
from oracles import kraus_reference, naive_walk

needs_numba = pytest.mark.skipif(not NUMBA_ENABLED, reason="numba path disabled")


def test_rotation_tables():
    base = kernels.rotation_tables(0.1, 6)
    n = np.arange(6)
    # kind 0 is loss, kind 1 is gain; bit 1 is a flip
    assert np.allclose(base[0, 1], np.sin(0.1 * np.sqrt(n)))
    assert np.allclose(base[1, 0, :5], np.cos(0.1 * np.sqrt(n[:5] + 1)))
    assert base[1, 0, 5] == 1 and base[1, 1, 5] == 0


def test_kraus_numpy_matches_dense_operators():
    rng = np.random.default_rng(3)
    g = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    got = kernels.kraus_pairs(rho, 0.08, 7, accelerated=False)
    assert np.abs(got - kraus_reference(rho, 0.08, 7)).max() < 1e-14


@needs_numba
def test_kraus_paths_identical():
    rng = np.random.default_rng(4)
    g = rng.normal(size=(30, 30)) + 1j * rng.normal(size=(30, 30))
    rho = g @ g.conj().T
    a = kernels.kraus_pairs(rho, 0.05, 20, accelerated=True)
    b = kernels.kraus_pairs(rho, 0.05, 20, accelerated=False)
    assert np.abs(a - b).max() <= 1e-15 * np.abs(rho).max()


@needs_numba
@pytest.mark.parametrize("n_steps", [1, 3, 7, 10])
def test_gram_paths_agree(n_steps):
    ga, ca = kernels.branch_gram(0.09, n_steps, 20, accelerated=True)
    gb, cb = kernels.branch_gram(0.09, n_steps, 20, accelerated=False)
    assert np.abs(np.asarray(ga) - np.asarray(gb)).max() < 1e-13
    assert np.abs(np.asarray(ca) - np.asarray(cb)).max() < 1e-13


def test_gram_conserves_norm():
    gram, counts = kernels.branch_gram(0.1, 5, 12, accelerated=False)
    # every input number state keeps unit norm summed over branches
    total = np.asarray(counts).sum(axis=(0, 1))
    assert np.allclose(total, 1.0, atol=1e-13)


@needs_numba
def test_walk_paths_identical():
    out = []
    for acc in (True, False):
        rng = np.random.Generator(np.random.PCG64(9))
        out.append(kernels.walk_trials(50, 1e-4, 3000, 500, rng, 1, accelerated=acc))
    assert np.array_equal(out[0][0], out[1][0])
    assert np.array_equal(out[0][1], out[1][1])


@pytest.mark.parametrize("offset", [0, 1])
def test_walk_gap_skipping_matches_bernoulli(offset):
    theta2, steps, trials = 2e-5, 2000, 20000
    nl, na = kernels.walk_trials(1000, theta2, steps, trials,
                                 np.random.Generator(np.random.PCG64(1)), offset)
    rl, ra = naive_walk(1000, theta2, steps, trials, np.random.default_rng(2), offset)
    for mine, ref in ((nl, rl), (na, ra), (na - nl, ra - rl)):
        se_mean = math.sqrt(2 * ref.var() / trials)
        se_var = ref.var() * math.sqrt(4.0 / trials)
        assert abs(mine.mean() - ref.mean()) < 5 * se_mean
        assert abs(mine.var() - ref.var()) < 5 * se_var
