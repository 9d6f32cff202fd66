"""Entanglement swapping: atom 2 of an entangled atom pair crosses cavity 3
of an entangled cavity pair.

Composite basis kets are (a1, a2, n3, n4): levels of atoms 1 and 2 and photon
numbers of cavities 3 and 4.  Atom 1 and cavity 4 are spectators.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .qed import LEVELS, CouplingParams, dark_amplitude, propagator_matrix

N3_LEVELS = (0, 1, 2, 3, 4)
N4_LEVELS = (0, 2)
LEVEL_INDEX = {lvl: i for i, lvl in enumerate(LEVELS)}


class CompositeBasisState(NamedTuple):
    a1: str
    a2: str
    n3: int
    n4: int

    def validate(self):
        if self.a1 not in LEVELS or self.a2 not in LEVELS:
            raise ValueError(f"atomic levels must be in {LEVELS}, got {self}")
        if self.n3 not in N3_LEVELS:
            raise ValueError(f"cavity-3 photon number must be in {N3_LEVELS}, got {self.n3}")
        if self.n4 not in N4_LEVELS:
            raise ValueError(f"cavity-4 photon number must be in {N4_LEVELS}, got {self.n4}")
        return self

    def sort_key(self):
        return (LEVEL_INDEX[self.a1], LEVEL_INDEX[self.a2], self.n3, self.n4)


def composite_basis():
    """All 90 composite basis states in serialisation order."""
    return [CompositeBasisState(a1, a2, n3, n4)
            for a1 in LEVELS for a2 in LEVELS for n3 in N3_LEVELS for n4 in N4_LEVELS]


# Atom 2 + cavity 3 start in (e,2), (e,0), (g,2) or (g,0) depending on the branch.
BRANCHES = {
    # (atom-1 level, cavity-4 photons): (manifold n, propagator column or None for dark)
    ("g", 0): (2, 0),
    ("g", 2): (0, 0),
    ("e", 0): (0, 2),
    ("e", 2): (None, None),
}

SUPPORT = tuple(sorted(
    [CompositeBasisState("g", a2, 2 + k, 0) for k, a2 in enumerate(LEVELS)]
    + [CompositeBasisState("g", a2, k, 2) for k, a2 in enumerate(LEVELS)]
    + [CompositeBasisState("e", a2, k, 0) for k, a2 in enumerate(LEVELS)]
    + [CompositeBasisState("e", "g", 0, 2)],
    key=CompositeBasisState.sort_key,
))


def _is_unit(a, b):
    return abs(abs(a) ** 2 + abs(b) ** 2 - 1) <= 1e-9


@dataclass(frozen=True)
class BellCoefficients:
    """Amplitudes of a1|g,e> + b1|e,g> (atoms) and a2|2,0> + b2|0,2> (cavities)."""

    alpha1: complex = 2 ** -0.5
    beta1: complex = 2 ** -0.5
    alpha2: complex = 2 ** -0.5
    beta2: complex = 2 ** -0.5

    def __post_init__(self):
        if not _is_unit(self.alpha1, self.beta1):
            raise ValueError("alpha1/beta1: atomic coefficients not normalised")
        if not _is_unit(self.alpha2, self.beta2):
            raise ValueError("alpha2/beta2: field coefficients not normalised")


@dataclass
class CompositeKet:
    amplitudes: dict = field(default_factory=dict)

    def amplitude(self, basis) -> complex:
        return self.amplitudes.get(CompositeBasisState(*basis), 0j)

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(c) ** 2 for c in self.amplitudes.values())))

    def to_vector(self) -> np.ndarray:
        """Dense amplitude array of shape (3, 3, 5, 2) indexed (a1, a2, n3, n4)."""
        psi = np.zeros((3, 3, len(N3_LEVELS), len(N4_LEVELS)), dtype=complex)
        for s, c in self.amplitudes.items():
            psi[LEVEL_INDEX[s.a1], LEVEL_INDEX[s.a2], s.n3, N4_LEVELS.index(s.n4)] = c
        return psi

    def items(self):
        return sorted(self.amplitudes.items(), key=lambda kv: kv[0].sort_key())

    def dump_lines(self):
        """State-dump rows ``a1,a2,n3,n4,re,im`` in basis order."""
        return [f"{s.a1},{s.a2},{s.n3},{s.n4},{c.real:.17g},{c.imag:.17g}"
                for s, c in self.items()]


def _ket(pairs) -> CompositeKet:
    amps = {}
    for state, c in pairs:
        c = complex(c)
        if c != 0:
            amps[state.validate()] = amps.get(state, 0j) + c
    return CompositeKet(amps)


def build_initial_state(coeffs: BellCoefficients) -> CompositeKet:
    a1, b1, a2, b2 = coeffs.alpha1, coeffs.beta1, coeffs.alpha2, coeffs.beta2
    return _ket([
        (CompositeBasisState("g", "e", 2, 0), a1 * a2),
        (CompositeBasisState("g", "e", 0, 2), a1 * b2),
        (CompositeBasisState("e", "g", 2, 0), b1 * a2),
        (CompositeBasisState("e", "g", 0, 2), b1 * b2),
    ])


def _branch_weight(coeffs, a1, n4):
    atom = coeffs.alpha1 if a1 == "g" else coeffs.beta1
    cav = coeffs.alpha2 if n4 == 0 else coeffs.beta2
    return atom * cav


def evolve_swap(coeffs: BellCoefficients, params: CouplingParams, t: float) -> CompositeKet:
    """Four-party state after atom 2 has spent time ``t`` inside cavity 3."""
    if t < 0:
        raise ValueError("interaction time must be non-negative")
    pairs = []
    cache = {}
    for (a1, n4), (n, col) in BRANCHES.items():
        w = _branch_weight(coeffs, a1, n4)
        if n is None:
            pairs.append((CompositeBasisState(a1, "g", 0, n4), w * dark_amplitude("g", 0, t)))
            continue
        if n not in cache:
            cache[n] = propagator_matrix(params, n, t)
        column = cache[n][:, col]
        for k, a2 in enumerate(LEVELS):
            pairs.append((CompositeBasisState(a1, a2, n + k, n4), w * column[k]))
    return _ket(pairs)


def branch_amplitude(coeffs: BellCoefficients, params: CouplingParams, t: float, basis) -> complex:
    """Amplitude of one composite basis state; zero outside the reachable support."""
    return evolve_swap(coeffs, params, t).amplitude(basis)
