import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vnslab.diagnostics.fits import FitError, fit_decay, observed_orders
from vnslab.diagnostics.report import NormRow, read_norm_csv, write_norm_csv


@given(st.floats(-4, 4), st.floats(0.1, 10))
@settings(max_examples=30, deadline=None)
def test_exact_power_laws_are_recovered(slope, scale):
    x = np.geomspace(1, 50, 12)
    fit = fit_decay(x, scale * x**slope)
    assert fit.slope == pytest.approx(slope, abs=1e-9)
    assert fit.half_width < 1e-9


def test_window_and_errors():
    x = np.arange(1.0, 21.0)
    y = np.where(x < 10, x**-1.0, x**-3.0)
    assert fit_decay(x, y, window=(10, 20)).slope == pytest.approx(-3.0)
    with pytest.raises(FitError):
        fit_decay(x[:4], y[:4])
    with pytest.raises(FitError):
        fit_decay(x, -y)


def test_noisy_fit_has_a_confidence_interval(rng):
    x = np.geomspace(1, 100, 20)
    y = x**-2 * np.exp(rng.normal(0, 0.1, x.size))
    fit = fit_decay(x, y)
    assert abs(fit.slope + 2) < 3 * fit.half_width + 0.05 and fit.half_width > 0


def test_observed_orders():
    assert observed_orders([1.0, 0.25, 0.0625]) == pytest.approx([2.0, 2.0])
    with pytest.raises(FitError):
        observed_orders([1.0])


def test_norm_csv_round_trip(tmp_path):
    rows = [NormRow("E0_f", 2.0, 0.125, 0.5, 1e-3), NormRow("chi_f", 3.0, 1.0)]
    path = str(tmp_path / "n.csv")
    write_norm_csv(rows, path)
    back = read_norm_csv(path)
    assert [(r.quantity, r.rho, r.value) for r in back] == [(r.quantity, r.rho, r.value) for r in rows]
    assert back[0].covered_fraction == 0.5
