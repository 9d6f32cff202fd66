"""Reduced density matrices and von Neumann entropy of the swapped state."""

from dataclasses import dataclass

import numpy as np

from .qed import LEVELS, CouplingParams, propagator_matrix
from .swap import N3_LEVELS, N4_LEVELS, BellCoefficients, CompositeKet

ATOM_PAIRS = tuple((a, b) for a in LEVELS for b in LEVELS)
FIELD_PAIRS = tuple((n3, n4) for n3 in N3_LEVELS for n4 in N4_LEVELS)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-9
NEGATIVE_TOL = 1e-9
ZERO_EIGENVALUE = 1e-15


def _atom_index(a, b):
    return ATOM_PAIRS.index((a, b))


@dataclass(frozen=True)
class AtomPairDensity:
    """9x9 density matrix of atoms 1 and 2, indexed by ``ATOM_PAIRS``."""

    m: np.ndarray

    def entry(self, row, col) -> complex:
        return complex(self.m[_atom_index(*row), _atom_index(*col)])


@dataclass(frozen=True)
class FieldPairDensity:
    """10x10 density matrix of cavities 3 and 4, indexed by ``FIELD_PAIRS``."""

    m: np.ndarray


@dataclass(frozen=True)
class EigenSpectrum:
    """Six analytic eigenvalues (last axis) and the splitting ``eta``.

    Fields may carry leading time axes when built from a time grid.
    """

    lam: np.ndarray
    eta: np.ndarray


def _checked_vector(ket: CompositeKet):
    psi = ket.to_vector()
    if abs(np.vdot(psi, psi).real - 1) > TRACE_TOL:
        raise ValueError("ket is not normalised")
    return psi.reshape(9, 10)


def reduce_to_atoms(ket: CompositeKet) -> AtomPairDensity:
    psi = _checked_vector(ket)
    return AtomPairDensity(psi @ psi.conj().T)


def reduce_to_fields(ket: CompositeKet) -> FieldPairDensity:
    psi = _checked_vector(ket)
    return FieldPairDensity(psi.T @ psi.conj())


def _amplitudes(params, t):
    u0 = propagator_matrix(params, 0, t)
    u2 = propagator_matrix(params, 2, t)
    return {
        # from (e,2) in manifold 2
        "e2_e2": u2[..., 0, 0], "e2_f3": u2[..., 1, 0], "e2_g4": u2[..., 2, 0],
        # from (e,0) in manifold 0
        "e0_e0": u0[..., 0, 0], "e0_f1": u0[..., 1, 0], "e0_g2": u0[..., 2, 0],
        # from (g,2) in manifold 0
        "g2_e0": u0[..., 0, 2], "g2_f1": u0[..., 1, 2], "g2_g2": u0[..., 2, 2],
    }


def analytic_spectrum(coeffs: BellCoefficients, params: CouplingParams, t,
                      uncorrected_lambda1: bool = False) -> EigenSpectrum:
    """Closed-form non-zero eigenvalues of the two-atom density matrix.

    The matrix is diagonal apart from the {|g,e>, |e,g>} block, so four
    eigenvalues are diagonal entries and the remaining two follow from the
    2x2 block.  ``uncorrected_lambda1`` evaluates the |e,e> population with
    the (e,0)-branch amplitude instead of the (g,2)-branch one; that variant
    is wrong (it is non-zero at t=0) and exists only so the consistency
    check can be shown to catch it.
    """
    c = _amplitudes(params, np.asarray(t, dtype=float))
    a1, b1, a2, b2 = (abs(x) ** 2 for x in
                      (coeffs.alpha1, coeffs.beta1, coeffs.alpha2, coeffs.beta2))
    p = lambda z: np.abs(z) ** 2  # noqa: E731

    ee_amp = c["e0_e0"] if uncorrected_lambda1 else c["g2_e0"]
    lam1 = a2 * b1 * p(ee_amp)
    lam2 = a2 * b1 * p(c["g2_f1"])
    lam3 = a1 * (b2 * p(c["e0_f1"]) + a2 * p(c["e2_f3"]))
    lam4 = a1 * (b2 * p(c["e0_g2"]) + a2 * p(c["e2_g4"]))

    ge = a1 * (b2 * p(c["e0_e0"]) + a2 * p(c["e2_e2"]))
    eg = b1 * (a2 * p(c["g2_g2"]) + b2)
    coherence = b2 * c["e0_e0"] + a2 * c["e2_e2"] * np.conj(c["g2_g2"])
    radicand = (ge - eg) ** 2 + 4 * a1 * b1 * (coherence.conj() * coherence).real
    eta = np.sqrt(np.maximum(radicand, 0.0))
    lam5 = (ge + eg - eta) / 2
    lam6 = (ge + eg + eta) / 2
    return EigenSpectrum(np.stack([lam1, lam2, lam3, lam4, lam5, lam6], axis=-1), eta)


def numeric_spectrum(density) -> np.ndarray:
    """Eigenvalues of a reduced density matrix, descending, clamped to [0, 1]."""
    m = density.m if hasattr(density, "m") else np.asarray(density)
    if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
        raise ValueError("density matrix is not Hermitian")
    w = np.linalg.eigvalsh(m)[::-1]
    if w[-1] < -NEGATIVE_TOL or w[0] > 1 + NEGATIVE_TOL:
        raise ValueError(f"eigenvalues outside [0, 1]: min {w[-1]:.3e}, max {w[0]:.3e}")
    return np.clip(w, 0.0, 1.0)


def von_neumann_entropy(spectrum):
    """Entropy in bits, -sum(l log2 l), over the last axis of the eigenvalues."""
    lam = spectrum.lam if isinstance(spectrum, EigenSpectrum) else spectrum
    lam = np.asarray(lam, dtype=float)
    if np.any(np.abs(lam.sum(axis=-1) - 1) > TRACE_TOL):
        raise ValueError("eigenvalues do not sum to 1")
    if np.any(lam < -NEGATIVE_TOL):
        raise ValueError("negative eigenvalue below tolerance")
    safe = np.where(lam > ZERO_EIGENVALUE, lam, 1.0)
    s = -np.sum(np.where(lam > ZERO_EIGENVALUE, lam * np.log2(safe), 0.0), axis=-1)
    # a pure state can round to -eps
    s = np.maximum(s, 0.0)
    return float(s) if s.ndim == 0 else s


def _allowed_entries():
    mask = np.zeros((9, 9), dtype=bool)
    for pair in ("ee", "ef", "eg", "ge", "gf", "gg"):
        i = _atom_index(*pair)
        mask[i, i] = True
    ge, eg = _atom_index("g", "e"), _atom_index("e", "g")
    mask[ge, eg] = mask[eg, ge] = True
    return mask


# Non-zero pattern of the two-atom density matrix: six populations (atom 1
# never reaches f) plus the |g,e><e,g| coherence and its conjugate.
ALLOWED_ENTRIES = _allowed_entries()
