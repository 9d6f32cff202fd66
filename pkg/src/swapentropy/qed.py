"""Closed-form dynamics of a cascade three-level atom in a single cavity mode.

The two-photon interaction couples |e,n> <-> |f,n+1> <-> |g,n+2>, so the
Hilbert space splits into 3-dimensional manifolds labelled by ``n`` plus the
uncoupled state |g,0>.  Every amplitude below is evaluated in the interaction
picture with the detuning phases kept exactly as they appear in the
closed-form solution.

Units: rates in rad/us, times in us.
"""

from dataclasses import dataclass

import numpy as np

LEVELS = ("e", "f", "g")


@dataclass(frozen=True)
class CouplingParams:
    """One-photon coupling rates ``g1`` (e<->f), ``g2`` (f<->g) and detuning."""

    g1: float = 1.0
    g2: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.g1) and self.g1 > 0):
            raise ValueError(f"g1 must be a positive finite rate, got {self.g1!r}")
        if not (np.isfinite(self.g2) and self.g2 > 0):
            raise ValueError(f"g2 must be a positive finite rate, got {self.g2!r}")
        if not np.isfinite(self.delta):
            raise ValueError(f"delta must be finite, got {self.delta!r}")

    @classmethod
    def from_frequencies(cls, g1, g2, cavity, omega_e, omega_f):
        return cls(g1, g2, delta_from_frequencies(cavity, omega_e, omega_f))


def delta_from_frequencies(cavity, omega_e, omega_f):
    """Detuning of the cavity mode from the upper (e-f) transition."""
    return cavity - (omega_e - omega_f)


def _check_manifold(n):
    if int(n) != n or n < 0:
        raise ValueError(f"manifold index must be a non-negative integer, got {n!r}")
    return int(n)


def alpha_n(params: CouplingParams, n: int) -> float:
    n = _check_manifold(n)
    return float(np.sqrt(params.g1**2 * (n + 1) + params.g2**2 * (n + 2)))


def rabi_frequency(params: CouplingParams, n: int) -> float:
    return float(np.sqrt(params.delta**2 / 4 + alpha_n(params, n) ** 2))


def gamma_n(params: CouplingParams, n: int, t):
    """Time-dependent factor shared by the e/g amplitudes of manifold ``n``.

    Vectorised over ``t``; returns a complex scalar for scalar input.
    """
    t = np.asarray(t, dtype=float)
    lam = rabi_frequency(params, n)
    half = params.delta / 2
    out = (lam * np.cos(lam * t) + 1j * half * np.sin(lam * t)
           - lam * np.exp(1j * half * t)) * np.exp(-1j * half * t)
    return out[()] if out.ndim == 0 else out


def propagator_matrix(params: CouplingParams, n: int, t) -> np.ndarray:
    """Stack of 3x3 propagators for manifold ``n`` at times ``t``.

    Output has shape ``t.shape + (3, 3)``.  Column ``j`` holds the amplitudes
    (C_e, C_f, C_g) reached from the j-th basis state of the manifold,
    ordered (e,n), (f,n+1), (g,n+2).
    """
    n = _check_manifold(n)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("propagation time must be non-negative")
    c1 = params.g1 * np.sqrt(n + 1)
    c2 = params.g2 * np.sqrt(n + 2)
    a2 = c1**2 + c2**2
    lam = np.sqrt(params.delta**2 / 4 + a2)
    half = params.delta / 2

    sin = np.sin(lam * t)
    cos = np.cos(lam * t)
    up = np.exp(1j * half * t)
    down = np.exp(-1j * half * t)
    gam = gamma_n(params, n, t)
    # gamma enters with 1/(Lambda alpha^2); f-row/column carry sin(Lambda t)/Lambda
    k = gam / (lam * a2)

    u = np.empty(t.shape + (3, 3), dtype=complex)
    u[..., 0, 0] = c1**2 * k + 1
    u[..., 0, 1] = -1j * c1 / lam * sin * down
    u[..., 0, 2] = c1 * c2 * k
    u[..., 1, 0] = -1j * c1 / lam * sin * up
    u[..., 1, 1] = (cos - 1j * half / lam * sin) * up
    u[..., 1, 2] = -1j * c2 / lam * sin * up
    u[..., 2, 0] = c1 * c2 * k
    u[..., 2, 1] = -1j * c2 / lam * sin * down
    u[..., 2, 2] = c2**2 * k + 1
    return u


@dataclass(frozen=True)
class ManifoldPropagator:
    u: np.ndarray
    t: float
    n: int

    def unitarity_error(self) -> float:
        return float(np.max(np.abs(self.u.conj().T @ self.u - np.eye(3))))


def manifold_propagator(params: CouplingParams, n: int, t: float) -> ManifoldPropagator:
    t = float(t)
    return ManifoldPropagator(propagator_matrix(params, n, t), t, _check_manifold(n))


def evolve_triple(params: CouplingParams, n: int, initial, t: float) -> np.ndarray:
    """Evolve an amplitude triple (C_e, C_f, C_g) of manifold ``n`` for time ``t``."""
    initial = np.asarray(initial, dtype=complex)
    if initial.shape != (3,):
        raise ValueError("initial must be a triple of amplitudes")
    if np.linalg.norm(initial) > 1 + 1e-12:
        raise ValueError("initial triple has norm above 1")
    return propagator_matrix(params, n, t) @ initial


def dark_amplitude(level: str, photons: int, t: float) -> complex:
    """Amplitude of |g,0>, which has no coupling partner and never evolves."""
    if level not in LEVELS:
        raise ValueError(f"unknown atomic level {level!r}")
    if (level, photons) != ("g", 0):
        raise ValueError(f"({level},{photons}) lies in a coupled manifold, not the dark state")
    if t < 0:
        raise ValueError("propagation time must be non-negative")
    return 1.0 + 0.0j
