# tests/test_rate_fit.py
"""a0 + a1·n^{−c} 擬合"""

import numpy as np
import pytest

from core.rate_fit import fit_rate
from data.result_data import LossCurve, LossRow
from utils.errors import ArgumentError


def _planted(ns, a0=2.0, a1=5.0, c=0.5) -> LossCurve:
    return LossCurve([LossRow(int(n), 1, a0 + a1 * float(n)**(-c), 0.0) for n in ns])


def test_free_exponent_recovers_planted_rate():
    fit = fit_rate(_planted(range(100, 1001, 100)))
    assert fit.model == "free"
    assert fit.c == pytest.approx(0.5, abs=1e-6)
    assert fit.a0 == pytest.approx(2.0, abs=1e-6)
    assert fit.a1 == pytest.approx(5.0, abs=1e-6)


def test_fixed_exponent_is_exact_least_squares():
    fit = fit_rate(_planted(range(100, 1001, 100)), c=0.5)
    assert fit.model == "fixed"
    assert fit.a0 == pytest.approx(2.0, abs=1e-9)
    assert fit.a1 == pytest.approx(5.0, abs=1e-9)
    assert fit.sse == pytest.approx(0.0, abs=1e-18)
    assert fit.predict(400) == pytest.approx(2.25)


@pytest.mark.parametrize("c", [0.2, 0.33, 0.8, 1.5])
def test_planted_exponents_are_recovered(c):
    fit = fit_rate(_planted([10, 20, 40, 80, 160, 320], a0=0.1, a1=3.0, c=c))
    assert fit.c == pytest.approx(c, abs=1e-4)


def test_free_fit_needs_four_rows():
    with pytest.raises(ArgumentError):
        fit_rate(_planted([10, 20, 30]))


def test_fixed_fit_needs_three_rows():
    with pytest.raises(ArgumentError):
        fit_rate(_planted([10, 20]), c=1.0)
    with pytest.raises(ArgumentError):
        fit_rate(_planted([10, 20, 30]), c=0.0)


def test_fit_dict():
    fit = fit_rate(_planted(np.arange(50, 550, 50)), c=0.5)
    assert set(fit.to_dict()) == {"a0", "a1", "c", "sse", "model"}
