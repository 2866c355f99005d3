import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from sharpmark.stats import PSNR_CAP, DegenerateInputError, krocc, plcc, psnr, rmse, srocc


def _vectors(rng, n, ties):
    if ties:
        return rng.integers(0, 3, n).astype(float), rng.integers(0, 3, n).astype(float)
    return rng.random(n), rng.random(n)


def test_rank_statistics_match_definitions(rng):
    checked = 0
    while checked < 300:
        n = int(rng.integers(3, 9))
        x, y = _vectors(rng, n, ties=checked % 2 == 1)
        if np.ptp(x) == 0 or np.ptp(y) == 0:
            with pytest.raises(DegenerateInputError):
                srocc(x, y)
            with pytest.raises(DegenerateInputError):
                krocc(x, y)
            continue
        assert srocc(x, y) == oracles.spearman(x.tolist(), y.tolist())
        assert krocc(x, y) == oracles.kendall_tau_b(x.tolist(), y.tolist())
        checked += 1


def test_textbook_values():
    x = [1, 2, 3, 4, 5]
    assert srocc(x, x) == 1.0 and krocc(x, x) == 1.0
    assert srocc(x, x[::-1]) == -1.0 and krocc(x, x[::-1]) == -1.0
    # one adjacent swap: d^2 sum = 2 -> 1 - 6*2/(5*24) = 0.9; tau = (9 - 1)/10
    y = [1, 2, 3, 5, 4]
    assert srocc(x, y) == pytest.approx(0.9, abs=1e-15)
    assert krocc(x, y) == pytest.approx(0.8, abs=1e-15)
    # tau-b with ties: concordant 5, discordant 0, ties 1 in x
    assert krocc([1, 1, 2, 3], [1, 2, 3, 4]) == pytest.approx(5 / math.sqrt(5 * 6), abs=1e-15)


def test_plcc_and_rmse_match_scalar_formulas(rng):
    for _ in range(200):
        n = int(rng.integers(3, 20))
        x, y = rng.standard_normal(n), rng.standard_normal(n)
        assert plcc(x, y) == pytest.approx(oracles.pearson(x, y), abs=1e-12)
        assert rmse(x, y) == pytest.approx(oracles.root_mean_square_error(x, y), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-100, 100), min_size=3, max_size=12, unique=True), st.data())
def test_rank_statistics_invariant_under_monotone_maps(x, data):
    y = data.draw(st.lists(st.floats(-100, 100), min_size=len(x), max_size=len(x), unique=True))
    x, y = np.array(x), np.array(y)
    fx = np.exp(x / 50) * 3 + 1
    if len(np.unique(fx)) < len(x):
        return
    assert srocc(fx, y) == srocc(x, y)
    assert krocc(fx, y) == krocc(x, y)
    assert srocc(-x, y) == pytest.approx(-srocc(x, y), abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=3, max_size=12),
       st.floats(0.1, 10), st.floats(-10, 10))
def test_plcc_affine_invariance(x, a, b):
    x = np.array(x)
    y = np.sin(x) + 0.1 * x
    if np.std(x) < 1e-3 or np.std(y) < 1e-3:
        return
    assert plcc(a * x + b, y) == pytest.approx(plcc(x, y), abs=1e-9)
    assert plcc(-a * x + b, y) == pytest.approx(-plcc(x, y), abs=1e-9)


def test_bounds(rng):
    for _ in range(50):
        x, y = rng.random(10), rng.random(10)
        for stat in (srocc, krocc, plcc):
            assert -1.0 <= stat(x, y) <= 1.0
    x = rng.random(50)
    assert plcc(x, 3 * x + 1) <= 1.0


def test_degenerate_inputs():
    const = [1.0, 1.0, 1.0, 1.0]
    for stat in (srocc, krocc, plcc):
        with pytest.raises(DegenerateInputError):
            stat(const, [1, 2, 3, 4])
        with pytest.raises(ValueError):
            stat([1, 2], [1, 2])
        with pytest.raises(ValueError):
            stat([1, 2, 3], [1, 2])
        with pytest.raises(ValueError):
            stat([1, 2, math.nan], [1, 2, 3])
    assert rmse([1.0], [1.0]) == 0.0


def test_psnr(rng):
    ref = [rng.random((8, 8)) for _ in range(3)]
    assert psnr(ref, ref) == PSNR_CAP == 99.0
    assert psnr([np.zeros((4, 4))], [np.full((4, 4), 0.1)]) == pytest.approx(20.0, abs=1e-12)
    test = [np.clip(p + 0.05 * rng.standard_normal(p.shape), 0, 1) for p in ref]
    assert psnr(ref, test) == pytest.approx(oracles.peak_snr(ref, test), abs=1e-10)
    tiny = [p + 1e-7 for p in ref]
    assert psnr(ref, tiny) == PSNR_CAP
    with pytest.raises(ValueError):
        psnr(ref, ref[:2])
    with pytest.raises(ValueError):
        psnr([], [])
