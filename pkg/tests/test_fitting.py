import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frustint.fitting import DegenerateFitError, fit_sinusoid_xy


def test_synthetic_round_trip():
    x = np.linspace(0, 1200, 49)
    r = fit_sinusoid_xy(x, 2 + 1.5 * np.cos(2 * np.pi * x / 403.5))
    assert r.visibility == pytest.approx(0.75, abs=1e-6)
    assert r.period == pytest.approx(403.5, abs=1e-6)
    assert r.baseline == pytest.approx(2.0, abs=1e-9)
    assert r.phase_offset == pytest.approx(0.0, abs=1e-6)


def test_constant_curve():
    r = fit_sinusoid_xy(np.arange(8.0), np.full(8, 3.0))
    assert r.visibility == 0.0 and r.baseline == 3.0
    assert r.to_dict()["period"] is None


def test_degenerate_baseline():
    x = np.linspace(0, 10, 20)
    with pytest.raises(DegenerateFitError):
        fit_sinusoid_xy(x, -5 + np.cos(x))
    with pytest.raises(DegenerateFitError):
        fit_sinusoid_xy(x, np.zeros(20))


def test_input_checks():
    with pytest.raises(ValueError):
        fit_sinusoid_xy([0, 1, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        fit_sinusoid_xy([0, 2, 1, 3], [1, 2, 3, 4])


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(50, 500), st.floats(-3, 3), st.floats(0.5, 100))
def test_recovers_visibility_and_period(V, period, phase, C):
    x = np.linspace(0, 2.5 * period, 40)
    y = C * (1 + V * np.cos(2 * np.pi * x / period + phase))
    r = fit_sinusoid_xy(x, y)
    assert r.visibility == pytest.approx(V, rel=1e-6)
    assert r.period == pytest.approx(period, rel=1e-6)
    assert math.cos(r.phase_offset - phase) == pytest.approx(1.0, abs=1e-9)


def test_sigma_matches_monte_carlo_spread():
    """Propagated sigma_V agrees with the empirical scatter of refits."""
    x = np.linspace(0, 4 * np.pi, 32, endpoint=False)
    lam = 100 * (1 + 0.5 * np.cos(x))
    rng = np.random.default_rng(1)
    fits = [fit_sinusoid_xy(x, rng.poisson(lam).astype(float)) for _ in range(400)]
    spread = np.std([f.visibility for f in fits])
    sigma = np.mean([f.visibility_sigma for f in fits])
    assert sigma == pytest.approx(spread, rel=0.15)
