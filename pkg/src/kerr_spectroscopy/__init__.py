"""Spectroscopy of a four-body interaction between coupled Kerr resonators.

Qubit-model Hamiltonians, closed-form eigensystems of the two invariant
blocks, a Lindblad integrator and a probe-detuning sweep with peak
assignment.  Frequencies are angular (rad/us) throughout; times are in us.
"""

__version__ = "0.1.0"

from .analytic import AnalyticEigensystem, Transition, analytic_eigensystem, transition_table
from .hamiltonian import ParameterError, SystemParams, build_bosonic_h, build_probe_drive, build_qubit_h0
from .lindblad import IntegrationError, SolverConfig, evolve
from .spectroscopy import PeakSet, Spectrum, SweepPlan, assign_peaks, detect_peaks, run_sweep

__all__ = [
    "AnalyticEigensystem",
    "IntegrationError",
    "ParameterError",
    "PeakSet",
    "SolverConfig",
    "Spectrum",
    "SweepPlan",
    "SystemParams",
    "Transition",
    "analytic_eigensystem",
    "assign_peaks",
    "build_bosonic_h",
    "build_probe_drive",
    "build_qubit_h0",
    "detect_peaks",
    "evolve",
    "run_sweep",
    "transition_table",
]
