"""Entanglement swapping between cascade three-level atoms and cavity fields
in the two-photon Jaynes-Cummings model: exact states, reduced density
matrices and von Neumann entropy dynamics."""

from .entropy import (AtomPairDensity, EigenSpectrum, FieldPairDensity, analytic_spectrum,
                      numeric_spectrum, reduce_to_atoms, reduce_to_fields, von_neumann_entropy)
from .experiments import (AperiodicSignal, EntropySeries, PeriodEstimate, RunConfig,
                          entropy_timeseries, estimate_period, sweep_detuning, verify)
from .oracle import IntegratorConfig, compare_propagators, integrate_manifold
from .qed import (CouplingParams, ManifoldPropagator, alpha_n, dark_amplitude, evolve_triple,
                  gamma_n, manifold_propagator, rabi_frequency)
from .swap import (BellCoefficients, CompositeBasisState, CompositeKet, branch_amplitude,
                   build_initial_state, evolve_swap)

__version__ = "0.1.0"
