import io
import math
from dataclasses import replace

import numpy as np
import pytest

from swapentropy.experiments import (AperiodicSignal, RunConfig, entropy_timeseries,
                                     estimate_period, linear_fit, period_from_signal,
                                     recurrence_period, sweep_config, sweep_detuning, verify)
from swapentropy.qed import CouplingParams
from swapentropy.swap import BellCoefficients

H = 2**-0.5
T_PI = math.pi / math.sqrt(3)


def test_single_point_series_is_pure():
    # grid {0}: t_end below one step
    series = entropy_timeseries(RunConfig(t_start=0.0, t_end=0.005, t_step=0.01))
    assert len(series) == 1
    assert series.entropy[0] == 0


def test_series_hand_value():
    cfg = RunConfig(coeffs=BellCoefficients(H, H, 0, 1), t_start=T_PI, t_end=T_PI + 1, t_step=2)
    series = entropy_timeseries(cfg)
    assert series.entropy[0] == pytest.approx(0.99108, abs=1e-5)


def test_series_invariants_detuned():
    cfg = RunConfig(params=CouplingParams(1, 1, 3), t_end=20.0, t_step=0.01)
    series = entropy_timeseries(cfg)
    assert len(series) == 2001
    assert np.max(np.abs(series.lam.sum(axis=1) - 1)) < 1e-9
    assert np.all(series.lam[:, 5] >= series.lam[:, 4])
    assert np.all(series.entropy >= 0) and np.all(series.entropy <= math.log2(6) + 1e-9)


def test_csv_is_deterministic():
    cfg = RunConfig(params=CouplingParams(1, 1, 3), t_end=1.0, t_step=0.1)
    a, b = io.StringIO(), io.StringIO()
    entropy_timeseries(cfg).write_csv(a)
    entropy_timeseries(cfg).write_csv(b)
    assert a.getvalue() == b.getvalue()
    lines = a.getvalue().splitlines()
    assert lines[0] == "t_us,entropy_bits,lambda1,lambda2,lambda3,lambda4,lambda5,lambda6"
    assert len(lines) == 12
    assert all(len(line.split(",")) == 8 for line in lines)
    assert float(lines[-1].split(",")[0]) == pytest.approx(1.0)


@pytest.mark.parametrize("kwargs", [
    dict(t_start=5.0, t_end=5.0),
    dict(t_step=0.0),
    dict(t_start=-1.0),
    dict(t_end=1e6, t_step=1e-3),
])
def test_run_config_validation(kwargs):
    with pytest.raises(ValueError):
        RunConfig(**kwargs)


def test_period_of_sinusoid():
    t = np.arange(0, 50, 0.01)
    est = period_from_signal(t, np.sin(2 * np.pi * t / 10))
    assert est.period == pytest.approx(10, abs=0.02)
    assert est.method == "autocorrelation-peak"
    assert est.confidence > 0.5


def test_period_of_two_tone_returns_longest():
    t = np.arange(0, 100, 0.01)
    x = np.sin(2 * np.pi * t / 30) + 1.5 * np.sin(2 * np.pi * 3 * t / 30 + 0.4)
    assert period_from_signal(t, x).period == pytest.approx(30, rel=0.01)


def test_incommensurate_signal_is_aperiodic():
    t = np.arange(0, 400, 0.02)
    x = np.cos(np.sqrt(3) * t) + np.cos(np.sqrt(7) * t) + np.cos(np.sqrt(11) * t)
    with pytest.raises(AperiodicSignal):
        period_from_signal(t, x)


def test_constant_and_noise_are_aperiodic():
    t = np.arange(0, 10, 0.01)
    with pytest.raises(AperiodicSignal):
        period_from_signal(t, np.ones_like(t))
    rng = np.random.default_rng(1)
    with pytest.raises(AperiodicSignal):
        period_from_signal(t, rng.normal(size=len(t)))


def test_period_requires_uniform_grid():
    t = np.sort(np.random.default_rng(0).uniform(0, 10, 200))
    with pytest.raises(ValueError, match="uniform"):
        period_from_signal(t, np.sin(t))


def test_recurrence_period_tracks_two_pi_delta():
    for d in (50, 100, 150, 200):
        assert recurrence_period(CouplingParams(1, 1, d)) == pytest.approx(2 * math.pi * d, rel=0.01)


def test_sweep_config_sampling():
    base = RunConfig()
    small = sweep_config(base, 3)
    large = sweep_config(base, 100)
    assert small.t_step == 0.01 and large.t_step == 0.05
    assert small.t_end == pytest.approx(recurrence_period(small.params) * 2.6)
    assert large.params.delta == 100
    assert large.t_end == pytest.approx(2.6 * recurrence_period(large.params))


def test_sweep_resonant_row_is_aperiodic():
    table = sweep_detuning(RunConfig(), [0])
    assert table.rows[0].period is None
    out = io.StringIO()
    table.write_csv(out)
    assert ",aperiodic," in out.getvalue()
    assert "# fit: fewer than two periodic rows" in out.getvalue()


def test_sweep_large_detuning_rows():
    table = sweep_detuning(RunConfig(), [50, 100])
    assert [r.period for r in table.rows] == [pytest.approx(316, rel=0.03),
                                              pytest.approx(630, rel=0.03)]
    assert table.rows[0].max_entropy > table.rows[1].max_entropy
    out = io.StringIO()
    table.write_csv(out)
    footer = [line for line in out.getvalue().splitlines() if line.startswith("#")]
    assert any(line.startswith("# r2 = ") for line in footer)


def test_linear_fit():
    fit = linear_fit([1, 2, 3], [2, 4, 6])
    assert fit.slope == pytest.approx(2) and fit.intercept == pytest.approx(0, abs=1e-12)
    assert fit.r2 == pytest.approx(1)
    assert linear_fit([1], [2]) is None


@pytest.mark.parametrize("delta,horizon,expected", [(50, 800.0, 316), (200, 3200.0, 1257)])
def test_estimate_period_on_entropy_series(delta, horizon, expected):
    cfg = RunConfig(params=CouplingParams(1, 1, delta), t_end=horizon, t_step=0.05)
    est = estimate_period(entropy_timeseries(cfg))
    assert est.period == pytest.approx(expected, rel=0.03)


def test_verify_canonical_passes():
    report = verify(RunConfig(), max_samples=500)
    assert report.passed, report.lines()
    names = {c.name for c in report.checks}
    assert {"unitarity", "analytic_vs_numeric", "entropy_atoms_vs_fields",
            "closed_form_vs_rk4", "positivity", "trace_atoms"} <= names


def test_verify_catches_uncorrected_lambda1():
    report = verify(RunConfig(), max_samples=50, uncorrected_lambda1=True)
    assert not report.passed
    failed = {c.name for c in report.checks if not c.passed}
    assert "analytic_vs_numeric" in failed
    # the discrepancy is already present at t = 0
    first = verify(RunConfig(t_end=0.01, t_step=0.01), max_samples=1, uncorrected_lambda1=True)
    assert not {c.name: c for c in first.checks}["analytic_vs_numeric"].passed


def test_verify_large_detuning_long_horizon():
    cfg = RunConfig(params=CouplingParams(1, 1, 200), t_end=3200.0, t_step=0.05)
    report = verify(cfg, max_samples=300, oracle_horizon=20.0, oracle_samples=5)
    assert report.passed, report.lines()
    assert any("rk4 comparison" in n for n in report.notes)


def test_verify_reports_skipped_oracle():
    cfg = RunConfig(t_start=100.0, t_end=101.0, t_step=0.5)
    report = verify(cfg, oracle_horizon=50.0)
    assert report.passed
    assert "closed_form_vs_rk4" not in {c.name for c in report.checks}


def test_unbalanced_coefficients_series():
    cfg = replace(RunConfig(t_end=5.0), coeffs=BellCoefficients(0.6, 0.8j, 0.8, -0.6))
    series = entropy_timeseries(cfg)
    assert series.entropy[0] == 0
    assert series.entropy.max() > 0.5
