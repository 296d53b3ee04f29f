"""Pseudo-spectral simulation and energy diagnostics for the strongly damped
nonlinear Klein-Gordon equation ``psi_tt - Lap psi_t - Lap psi + psi + |psi|^p psi = 0``
on the 1- and 2-torus.

The per-step inner loops live in a compiled Cython module when available;
``kgdamp.kernels.BACKEND`` reports which implementation is active.
"""
from .diagnostics import (
    DecayFit,
    EnergyRecord,
    continuous_energy,
    discrete_energy,
    discrete_q,
    fit_decay_rate,
    j_functional,
    modified_energy,
    record,
    split_state,
)
from .integrators import BlowUpError, SimParams, SimulationError, StatePair, nonlinearity, run, startup_step, step, step_mild
from .semigroup import apply_semigroup, measure_decay_constant, mode_eigenvalues, mode_matrix
from .spectral_core import (
    Field,
    TorusGrid,
    apply_multiplier,
    forward_transform,
    integrate,
    inverse_transform,
    lp_norm,
    make_grid,
    mean,
    sobolev_norm,
)

__version__ = "0.1.0"
