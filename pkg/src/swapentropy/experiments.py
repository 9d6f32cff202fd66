"""Entropy time series, period estimation, detuning sweeps and self-checks."""

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np
from scipy.signal import find_peaks
from scipy.stats import linregress

from .entropy import (ALLOWED_ENTRIES, analytic_spectrum, reduce_to_atoms,
                      reduce_to_fields, von_neumann_entropy)
from .oracle import IntegratorConfig, compare_along
from .qed import CouplingParams, propagator_matrix, rabi_frequency
from .swap import BellCoefficients, evolve_swap

MAX_GRID_POINTS = 10**7
_CHUNK = 200_000

PROMINENCE_THRESHOLD = 0.5
TIE_TOLERANCE = 0.05
MULTIPLE_TOLERANCE = 0.1


@dataclass(frozen=True)
class RunConfig:
    params: CouplingParams = field(default_factory=CouplingParams)
    coeffs: BellCoefficients = field(default_factory=BellCoefficients)
    t_start: float = 0.0
    t_end: float = 50.0
    t_step: float = 0.01
    output_path: str | None = None

    def __post_init__(self):
        if not self.t_start >= 0:
            raise ValueError(f"t_start: must be non-negative, got {self.t_start}")
        if not self.t_start < self.t_end:
            raise ValueError(f"t_end: must exceed t_start ({self.t_start}), got {self.t_end}")
        if not self.t_step > 0:
            raise ValueError(f"t_step: must be positive, got {self.t_step}")
        if (self.t_end - self.t_start) / self.t_step > MAX_GRID_POINTS:
            raise ValueError(f"t_step: grid would exceed {MAX_GRID_POINTS} points")

    def times(self) -> np.ndarray:
        count = int(math.floor((self.t_end - self.t_start) / self.t_step + 1e-9)) + 1
        return self.t_start + np.arange(count) * self.t_step


@dataclass(frozen=True)
class EntropySeries:
    t: np.ndarray
    entropy: np.ndarray
    lam: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("series times must be strictly increasing")

    def __len__(self):
        return len(self.t)

    def records(self):
        for t, s, lam in zip(self.t, self.entropy, self.lam):
            yield (float(t), float(s), *map(float, lam))

    def write_csv(self, stream):
        stream.write("t_us,entropy_bits,lambda1,lambda2,lambda3,lambda4,lambda5,lambda6\n")
        for rec in self.records():
            stream.write(",".join(f"{v:.17g}" for v in rec) + "\n")


@dataclass(frozen=True)
class PeriodEstimate:
    period: float
    confidence: float
    method: str = "autocorrelation-peak"


class AperiodicSignal(ValueError):
    """No reliable recurrence within the analysed horizon."""


def entropy_timeseries(config: RunConfig, uncorrected_lambda1: bool = False) -> EntropySeries:
    t = config.times()
    lam = np.empty((len(t), 6))
    for lo in range(0, len(t), _CHUNK):
        spec = analytic_spectrum(config.coeffs, config.params, t[lo:lo + _CHUNK],
                                 uncorrected_lambda1=uncorrected_lambda1)
        lam[lo:lo + _CHUNK] = spec.lam
    return EntropySeries(t, von_neumann_entropy(lam), lam)


def autocorrelation(x, max_lag=None) -> np.ndarray:
    """Correlation coefficient between x[:N-k] and x[k:] for k = 0..max_lag.

    Each window is mean-removed and normalised on its own, so an exactly
    periodic signal scores 1 at its period regardless of where the record
    starts or stops.
    """
    x = np.asarray(x, dtype=float)
    x = x - x.mean()
    n = len(x)
    max_lag = n // 2 if max_lag is None else min(max_lag, n - 2)
    spec = np.fft.rfft(x, 2 * n)
    cross = np.fft.irfft(spec * np.conj(spec), 2 * n)[: max_lag + 1]

    k = np.arange(max_lag + 1)
    m = n - k
    c1 = np.concatenate([[0.0], np.cumsum(x)])
    c2 = np.concatenate([[0.0], np.cumsum(x * x)])
    head_sum, tail_sum = c1[m], c1[n] - c1[k]
    head_sq, tail_sq = c2[m], c2[n] - c2[k]
    cov = cross - head_sum * tail_sum / m
    var = (head_sq - head_sum**2 / m) * (tail_sq - tail_sum**2 / m)
    if var[0] <= 1e-300:
        raise AperiodicSignal("signal is constant")
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(var > 0, cov / np.sqrt(np.maximum(var, 1e-300)), 0.0)
    return r


def period_from_signal(t, x) -> PeriodEstimate:
    """Dominant recurrence lag of a uniformly sampled signal.

    Peaks of the autocorrelation with prominence above half the zero-lag
    value are candidates, searched up to half the record length.  Exact
    multiples of the true period correlate equally well, so among peaks
    within ``TIE_TOLERANCE`` of the best one the shortest lag wins, provided
    the others sit at integer multiples of it.  Near-equal peaks at
    unrelated lags mean incommensurate recurrences and raise
    ``AperiodicSignal``.
    """
    t = np.asarray(t, dtype=float)
    dt = np.diff(t)
    if len(t) < 8 or not np.allclose(dt, dt[0], rtol=1e-6, atol=0):
        raise ValueError("period estimation needs a uniform grid of at least 8 samples")
    dt = dt[0]
    r = autocorrelation(x, len(t) // 2)
    peaks, props = find_peaks(r, prominence=PROMINENCE_THRESHOLD * r[0])
    if len(peaks) == 0:
        raise AperiodicSignal("no autocorrelation peak clears the prominence threshold")
    best = r[peaks].max()
    tied = peaks[r[peaks] >= best - TIE_TOLERANCE]
    base = tied.min()
    ratios = tied / base
    if np.any(np.abs(ratios - np.round(ratios)) > MULTIPLE_TOLERANCE):
        raise AperiodicSignal(
            "near-equal recurrences at unrelated lags " + ", ".join(f"{k * dt:.4g}" for k in tied))
    # parabolic refinement of the peak position
    lo, mid, hi = r[base - 1], r[base], r[base + 1] if base + 1 < len(r) else r[base]
    curvature = lo - 2 * mid + hi
    shift = 0.5 * (lo - hi) / curvature if curvature < 0 else 0.0
    prominence = props["prominences"][np.searchsorted(peaks, base)]
    return PeriodEstimate(float((base + shift) * dt), float(prominence / r[0]))


def estimate_period(series: EntropySeries) -> PeriodEstimate:
    return period_from_signal(series.t, series.entropy)


def slow_frequencies(params: CouplingParams):
    """Slowest beat frequency of manifolds 0 and 2: Lambda_n - |delta|/2."""
    return tuple(rabi_frequency(params, n) - abs(params.delta) / 2 for n in (0, 2))


def recurrence_period(params: CouplingParams, max_denominator: int = 10) -> float:
    """Joint recurrence time of the two active manifolds' slow oscillations.

    Derived diagnostic for choosing horizons, not an exact period: the
    frequency ratio is rounded to the nearest fraction p/q with small q and
    the recurrence taken as q slow cycles of manifold 0.
    """
    w0, w2 = slow_frequencies(params)
    q = Fraction(w2 / w0).limit_denominator(max_denominator).denominator
    return q * 2 * math.pi / w0


@dataclass(frozen=True)
class SweepRow:
    delta_over_g: float
    delta: float
    period: float | None
    confidence: float | None
    max_entropy: float
    predicted_period: float
    t_end: float
    t_step: float


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r2: float
    points: int


@dataclass
class SweepTable:
    rows: list
    fit: LinearFit | None

    def write_csv(self, stream):
        stream.write("delta_over_g,delta,period_us,confidence,max_entropy_bits,"
                     "predicted_period_us,t_end_us,t_step_us\n")
        for row in self.rows:
            period = "aperiodic" if row.period is None else f"{row.period:.17g}"
            conf = "" if row.confidence is None else f"{row.confidence:.17g}"
            stream.write(f"{row.delta_over_g:.17g},{row.delta:.17g},{period},{conf},"
                         f"{row.max_entropy:.17g},{row.predicted_period:.17g},"
                         f"{row.t_end:.17g},{row.t_step:.17g}\n")
        if self.fit is None:
            stream.write("# fit: fewer than two periodic rows\n")
        else:
            f = self.fit
            stream.write(f"# fit period_us = slope * delta + intercept over {f.points} periodic rows\n")
            stream.write(f"# slope = {f.slope:.17g}\n")
            stream.write(f"# intercept = {f.intercept:.17g}\n")
            stream.write(f"# r2 = {f.r2:.17g}\n")


def linear_fit(deltas, periods) -> LinearFit | None:
    if len(deltas) < 2:
        return None
    res = linregress(np.asarray(deltas, float), np.asarray(periods, float))
    return LinearFit(float(res.slope), float(res.intercept), float(res.rvalue**2), len(deltas))


def sweep_config(base: RunConfig, delta_over_g: float, min_horizon: float = 200.0,
                 horizon_factor: float = 2.6) -> RunConfig:
    """Run configuration for one detuning of a sweep.

    Detunings up to 10g keep the base sampling step; larger ones use at
    least 0.05 us.  The horizon covers ``horizon_factor`` predicted
    recurrences and never drops below ``min_horizon`` or the base span.
    """
    params = replace(base.params, delta=delta_over_g * base.params.g1)
    step = base.t_step if abs(delta_over_g) <= 10 else max(base.t_step, 0.05)
    span = max(base.t_end - base.t_start, min_horizon, horizon_factor * recurrence_period(params))
    return replace(base, params=params, t_step=step, t_end=base.t_start + span)


def sweep_detuning(base: RunConfig, deltas_over_g, min_horizon: float = 200.0,
                   horizon_factor: float = 2.6) -> SweepTable:
    rows = []
    for dg in deltas_over_g:
        cfg = sweep_config(base, dg, min_horizon, horizon_factor)
        series = entropy_timeseries(cfg)
        try:
            est = estimate_period(series)
            period, conf = est.period, est.confidence
        except AperiodicSignal:
            period = conf = None
        rows.append(SweepRow(float(dg), cfg.params.delta, period, conf,
                             float(series.entropy.max()), recurrence_period(cfg.params),
                             cfg.t_end, cfg.t_step))
    periodic = [r for r in rows if r.period is not None]
    fit = linear_fit([r.delta for r in periodic], [r.period for r in periodic])
    return SweepTable(rows, fit)


@dataclass(frozen=True)
class Check:
    name: str
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.deviation < self.tolerance)


@dataclass
class VerificationReport:
    checks: list
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self):
        out = [f"{'PASS' if c.passed else 'FAIL'} {c.name:<24} max deviation {c.deviation:.3e}"
               f"  (tolerance {c.tolerance:.0e})" for c in self.checks]
        return out + [f"# {n}" for n in self.notes]


def _sample(times, count):
    idx = np.unique(np.linspace(0, len(times) - 1, min(count, len(times))).astype(int))
    return times[idx]


def verify(config: RunConfig, integrator: IntegratorConfig | None = None,
           oracle_horizon: float = 50.0, oracle_samples: int = 21, max_samples: int = 2000,
           uncorrected_lambda1: bool = False) -> VerificationReport:
    """Run the invariant suite on the configuration's time grid.

    State-level checks use up to ``max_samples`` grid times.  The RK4
    comparison is limited to grid times below ``oracle_horizon`` because its
    cost grows linearly with time.
    """
    params, coeffs = config.params, config.coeffs
    times = _sample(config.times(), max_samples)
    checks = []

    unitarity = 0.0
    for n in (0, 2):
        u = propagator_matrix(params, n, times)
        unitarity = max(unitarity, np.max(np.abs(np.conj(np.swapaxes(u, -1, -2)) @ u - np.eye(3))))
    checks.append(Check("unitarity", unitarity, 1e-9))

    spec = analytic_spectrum(coeffs, params, times, uncorrected_lambda1=uncorrected_lambda1)
    norm = trace_a = trace_f = herm = psd = block = spectra = schmidt = bound = 0.0
    outside = ~ALLOWED_ENTRIES
    for i, t in enumerate(times):
        ket = evolve_swap(coeffs, params, float(t))
        norm = max(norm, abs(ket.norm() - 1))
        rho_a = reduce_to_atoms(ket).m
        rho_f = reduce_to_fields(ket).m
        trace_a = max(trace_a, abs(np.trace(rho_a) - 1))
        trace_f = max(trace_f, abs(np.trace(rho_f) - 1))
        herm = max(herm, np.max(np.abs(rho_a - rho_a.conj().T)), np.max(np.abs(rho_f - rho_f.conj().T)))
        block = max(block, np.max(np.abs(rho_a[outside])))
        wa = np.linalg.eigvalsh(rho_a)[::-1]
        wf = np.linalg.eigvalsh(rho_f)[::-1]
        psd = max(psd, -wa[-1], -wf[-1])
        analytic = np.concatenate([np.sort(spec.lam[i])[::-1], np.zeros(3)])
        spectra = max(spectra, np.max(np.abs(analytic - wa)))
        sa = von_neumann_entropy(np.clip(wa, 0, 1))
        sf = von_neumann_entropy(np.clip(wf, 0, 1))
        schmidt = max(schmidt, abs(sa - sf))
        bound = max(bound, sa - math.log2(6))
    checks += [
        Check("ket_norm", norm, 1e-9),
        Check("trace_atoms", trace_a, 1e-9),
        Check("trace_fields", trace_f, 1e-9),
        Check("hermiticity", herm, 1e-12),
        Check("positivity", max(psd, 0.0), 1e-9),
        Check("block_structure", block, 1e-12),
        Check("eigenvalue_sum", float(np.max(np.abs(spec.lam.sum(-1) - 1))), 1e-9),
        Check("analytic_vs_numeric", spectra, 1e-9),
        Check("entropy_atoms_vs_fields", schmidt, 1e-6),
        Check("entropy_bound", max(bound, 0.0), 1e-9),
    ]

    oracle_times = times[times <= oracle_horizon]
    notes = []
    if len(oracle_times):
        oracle_times = _sample(oracle_times, oracle_samples)
        dev = max(float(np.max(compare_along(params, n, oracle_times, integrator))) for n in (0, 2))
        checks.append(Check("closed_form_vs_rk4", dev, 1e-6))
        notes.append(f"rk4 comparison at {len(oracle_times)} times up to {oracle_times[-1]:.6g} us")
    else:
        notes.append("rk4 comparison skipped: no grid time below the oracle horizon")
    notes.append(f"state checks at {len(times)} of {len(config.times())} grid times")
    return VerificationReport(checks, notes)
