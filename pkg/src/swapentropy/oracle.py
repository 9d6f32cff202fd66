"""Brute-force check of the closed-form propagators.

Integrates i dC/dt = M(t) C on one manifold with the time-dependent
interaction-picture coupling matrix

    M[e,f] = g1 sqrt(n+1) exp(-i delta t),  M[f,g] = g2 sqrt(n+2) exp(+i delta t)

(Hermitian, zero diagonal) using fixed-step classical RK4.  Since the ODE is
linear, one RK4 step is a 3x3 matrix acting on the state; the steps are
assembled vectorised and multiplied in chronological order.  Nothing here
reuses the closed-form expressions.
"""

import math
from dataclasses import dataclass

import numpy as np

from .qed import CouplingParams, propagator_matrix, rabi_frequency

RESOLUTION_GUARD = 0.05
_CHUNK = 1 << 16


@dataclass(frozen=True)
class IntegratorConfig:
    step: float
    order: int = 4

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ValueError(f"integrator step must be positive, got {self.step!r}")
        if self.order != 4:
            raise ValueError("only classical 4th-order Runge-Kutta is supported")

    @classmethod
    def default(cls, params: CouplingParams, n: int):
        lam = rabi_frequency(params, n)
        return cls(1e-3 / max(lam, abs(params.delta) / 2, 1.0))

    def check(self, params: CouplingParams, n: int):
        scale = max(rabi_frequency(params, n), abs(params.delta))
        if self.step * scale >= RESOLUTION_GUARD:
            raise ValueError(
                f"step {self.step:g} us too coarse: step*max(Lambda_n, |delta|) = "
                f"{self.step * scale:.3g} >= {RESOLUTION_GUARD}")


def coupling_matrix(params: CouplingParams, n: int, s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    c1 = params.g1 * np.sqrt(n + 1)
    c2 = params.g2 * np.sqrt(n + 2)
    m = np.zeros(s.shape + (3, 3), dtype=complex)
    m[..., 0, 1] = c1 * np.exp(-1j * params.delta * s)
    m[..., 1, 0] = c1 * np.exp(1j * params.delta * s)
    m[..., 1, 2] = c2 * np.exp(1j * params.delta * s)
    m[..., 2, 1] = c2 * np.exp(-1j * params.delta * s)
    return m


def _rk4_steps(params, n, starts, h):
    """RK4 step matrices for steps beginning at ``starts`` with widths ``h``."""
    h = np.broadcast_to(np.asarray(h, dtype=float), starts.shape)[..., None, None]
    a1 = -1j * coupling_matrix(params, n, starts)
    am = -1j * coupling_matrix(params, n, starts + h[..., 0, 0] / 2)
    a4 = -1j * coupling_matrix(params, n, starts + h[..., 0, 0])
    k1 = a1
    k2 = am + (h / 2) * (am @ k1)
    k3 = am + (h / 2) * (am @ k2)
    k4 = a4 + h * (a4 @ k3)
    return np.eye(3) + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


def _ordered_product(mats):
    """mats[-1] @ ... @ mats[0] by pairwise reduction."""
    while len(mats) > 1:
        tail = mats[-1:] if len(mats) % 2 else mats[:0]
        even = mats[: len(mats) - len(tail)]
        mats = np.concatenate([even[1::2] @ even[0::2], tail])
    return mats[0] if len(mats) else np.eye(3, dtype=complex)


def _segment(params, n, t_a, t_b, h):
    span = t_b - t_a
    nfull = int(math.floor(span / h))
    rest = span - nfull * h
    out = np.eye(3, dtype=complex)
    for lo in range(0, nfull, _CHUNK):
        k = np.arange(lo, min(lo + _CHUNK, nfull))
        out = _ordered_product(_rk4_steps(params, n, t_a + k * h, h)) @ out
    if rest > 1e-12 * h:
        out = _rk4_steps(params, n, np.array([t_a + nfull * h]), rest)[0] @ out
    return out


def integrate_path(params: CouplingParams, n: int, times, config: IntegratorConfig | None = None):
    """RK4 propagators from 0 to each of the ascending ``times``, shape (len, 3, 3).

    Each interval between consecutive times is covered by full steps plus a
    final partial step.
    """
    config = config or IntegratorConfig.default(params, n)
    config.check(params, n)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ValueError("times must be non-negative and ascending")
    out = np.empty((len(times), 3, 3), dtype=complex)
    u = np.eye(3, dtype=complex)
    prev = 0.0
    for i, t in enumerate(times):
        u = _segment(params, n, prev, t, config.step) @ u
        out[i] = u
        prev = t
    return out


def integrate_manifold(params: CouplingParams, n: int, initial, t: float,
                       config: IntegratorConfig | None = None) -> np.ndarray:
    initial = np.asarray(initial, dtype=complex)
    if abs(np.linalg.norm(initial) - 1) > 1e-9:
        raise ValueError("initial triple must be normalised")
    return integrate_path(params, n, [t], config)[0] @ initial


def compare_along(params: CouplingParams, n: int, times, config: IntegratorConfig | None = None):
    """Max entrywise deviation, closed form vs RK4, at each of ``times``."""
    numeric = integrate_path(params, n, times, config)
    closed = propagator_matrix(params, n, np.asarray(times, dtype=float))
    return np.max(np.abs(numeric - closed), axis=(-2, -1))


def compare_propagators(params: CouplingParams, n: int, t: float,
                        config: IntegratorConfig | None = None) -> float:
    return float(compare_along(params, n, [t], config)[0])
