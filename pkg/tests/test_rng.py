import math

import numpy as np
import pytest

from ptngarch.rng import Rng, derive_seed


def test_same_seed_same_stream():
    a = Rng(12345)
    b = Rng(12345)
    assert [a.u64() for _ in range(20)] == [b.u64() for _ in range(20)]


def test_different_seeds_differ():
    a = [Rng(1).u64() for _ in range(8)]
    b = [Rng(2).u64() for _ in range(8)]
    assert a != b


def test_uniform_range_and_mean():
    rng = Rng(7)
    draws = np.array([rng.uniform() for _ in range(20000)])
    assert draws.min() >= 0.0 and draws.max() < 1.0
    assert abs(draws.mean() - 0.5) < 0.01


def test_derive_seed_depends_on_parts_and_order():
    base = 99
    assert derive_seed(base, 1, 2) != derive_seed(base, 2, 1)
    assert derive_seed(base, 1) != derive_seed(base, 2)
    assert derive_seed(base, 1, 2) == derive_seed(base, 1, 2)
    assert derive_seed(base, 0) != derive_seed(base)


def test_randbelow_covers_range():
    rng = Rng(3)
    draws = [rng.randbelow(7) for _ in range(5000)]
    assert set(draws) == set(range(7))
    with pytest.raises(ValueError):
        rng.randbelow(0)


def test_poisson_zero_intensity_always_zero():
    rng = Rng(11)
    assert all(rng.poisson(0.0) == 0 for _ in range(100))


def test_poisson_rejects_bad_intensity():
    rng = Rng(11)
    with pytest.raises(ValueError):
        rng.poisson(-1.0)
    with pytest.raises(ValueError):
        rng.poisson(float("nan"))
    with pytest.raises(ValueError):
        rng.poisson(float("inf"))


def test_poisson_moments_lambda4():
    # mean = variance = 4; bands are ~4 sigma for 1e6 draws
    draws = Rng(2024).poissons(4.0, 1_000_000)
    mean = draws.mean()
    var = draws.var()
    assert 3.992 <= mean <= 4.008
    assert 3.97 <= var <= 4.03


def test_poisson_zero_fraction_lambda_half():
    draws = Rng(55).poissons(0.5, 1_000_000)
    frac0 = np.mean(draws == 0)
    assert abs(frac0 - math.exp(-0.5)) < 0.002


def test_poisson_moments_large_lambda_rejection_branch():
    # lam = 12 exercises the transformed-rejection sampler
    draws = Rng(77).poissons(12.0, 1_000_000)
    assert abs(draws.mean() - 12.0) < 0.015
    assert abs(draws.var() - 12.0) < 0.08


def test_poisson_pmf_shape_matches_theory():
    # frequency of each count near its pmf for a mid-size intensity
    lam = 3.0
    draws = Rng(101).poissons(lam, 400_000)
    for k in range(9):
        pmf = math.exp(-lam) * lam ** k / math.factorial(k)
        freq = np.mean(draws == k)
        assert abs(freq - pmf) < 4.5 * math.sqrt(pmf * (1 - pmf) / len(draws)) + 1e-12


def test_spawn_gives_decorrelated_stream():
    rng = Rng(5)
    child = rng.spawn(0)
    other = rng.spawn(1)
    assert child.seed != other.seed
    assert [child.u64() for _ in range(4)] != [other.u64() for _ in range(4)]
