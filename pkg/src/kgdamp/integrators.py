"""Time marching for ``psi_tt - Lap psi_t - Lap psi + psi + |psi|^p psi = 0`` on the torus.

The primary scheme is the two-level, per-mode linear recurrence

    (psi+ - 2 psi + psi-)/dt^2 + (1 - Lap)(psi+ + 2 psi + psi-)/4 + N(psi)
        - Lap (psi+ - psi)/dt = 0,

with the nonlinearity ``N`` taken explicitly at the current level. Dropping
the last term gives the undamped variant, whose quadratic part conserves a
discrete energy exactly. Each Fourier mode is solved in closed form, so a
step costs one inverse and one forward FFT.
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .semigroup import apply_semigroup
from .spectral_core import Field, laplacian

log = logging.getLogger(__name__)

IMAG_TOLERANCE = 1e-10


class SimulationError(RuntimeError):
    pass


class BlowUpError(SimulationError):
    def __init__(self, step_index, message=None):
        self.step_index = step_index
        super().__init__(message or f"non-finite field values at step {step_index}; reduce dt")


@dataclass(frozen=True)
class SimParams:
    p: float = 2.0
    dt: float = 0.005
    damped: bool = True
    dealias: bool = False
    t_final: float = 50.0
    nonlinear: bool = True

    def __post_init__(self):
        if not self.p >= 0:
            raise ValueError(f"nonlinearity exponent must satisfy p >= 0, got {self.p}")
        if not self.dt > 0:
            raise ValueError(f"time step must be positive, got {self.dt}")
        if not self.t_final >= self.dt * (1 - 1e-12):
            raise ValueError(f"t_final={self.t_final} must be at least dt={self.dt}")

    @property
    def n_steps(self):
        """Total number of time levels after the initial one."""
        return max(1, math.ceil(self.t_final / self.dt - 1e-9))


@dataclass(frozen=True)
class StatePair:
    """Two consecutive time levels ``(psi_{n-1}, psi_n)``."""

    prev: Field
    curr: Field
    step_index: int = 1

    def __post_init__(self):
        self.prev._same_grid(self.curr)
        if self.step_index < 0:
            raise ValueError("step_index must be non-negative")

    @classmethod
    def from_initial_data(cls, psi0, v0, params):
        return startup_step(psi0, v0, params)

    @property
    def grid(self):
        return self.curr.grid

    def time(self, dt):
        return self.step_index * dt

    def velocity(self, dt):
        return (self.curr - self.prev) / dt

    def midpoint(self):
        return (self.curr + self.prev) * 0.5


@lru_cache(maxsize=64)
def _scheme_coefficients(grid, dt, damped):
    lin = 1.0 + grid.k2
    c = 1.0 / dt**2 + 0.25 * lin
    a = c + (grid.k2 / dt if damped else 0.0)
    return _ro(1.0 / a), _ro(c), _ro(lin)


def _ro(arr):
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


def nonlinearity(f, p, dealias=False):
    """Pointwise ``|f|^p f``; with ``dealias`` the product is truncated by the 2/3 rule."""
    out = Field(f.grid, values=kernels.power_nonlinearity(f.values, float(p)))
    if dealias:
        out = Field(f.grid, coeffs=np.where(f.grid.dealias_mask, out.coeffs, 0.0))
    return out


def _nl_coeffs(f, params):
    if not params.nonlinear:
        return np.zeros(f.grid.shape, dtype=np.complex128)
    return nonlinearity(f, params.p, params.dealias).coeffs


def startup_step(psi0, v0, params):
    """Second-order Taylor start ``psi_1 = psi_0 + dt v_0 + dt^2/2 psi_tt(0)``.

    ``psi_tt(0)`` is read off the equation itself.
    """
    psi0._same_grid(v0)
    grid = psi0.grid
    acc = laplacian(psi0).coeffs - psi0.coeffs - _nl_coeffs(psi0, params)
    if params.damped:
        acc = acc + laplacian(v0).coeffs
    dt = params.dt
    curr = psi0.coeffs + dt * v0.coeffs + 0.5 * dt * dt * acc
    return StatePair(Field(grid, coeffs=psi0.coeffs), Field(grid, coeffs=curr), 1)


def step(state, params):
    """Advance ``(psi_{n-1}, psi_n)`` to ``(psi_n, psi_{n+1})``."""
    if state.step_index < 1:
        raise ValueError("step needs a started state (step_index >= 1)")
    inv_a, c, lin = _scheme_coefficients(state.grid, float(params.dt), bool(params.damped))
    with np.errstate(over="ignore", invalid="ignore"):
        # a blowing-up field is caught by the finiteness check below
        nl = _nl_coeffs(state.curr, params)
    new = kernels.advance(state.prev.coeffs, state.curr.coeffs, nl, inv_a, c, lin)
    if not kernels.all_finite(new):
        raise BlowUpError(state.step_index + 1)
    return StatePair(state.curr, Field(state.grid, coeffs=new), state.step_index + 1)


def step_mild(state, params):
    """One exponential-Euler step ``Psi <- exp(-dt A)(Psi - dt F(Psi))`` on ``(psi, v)``."""
    psi, v = state
    nl = _nl_coeffs(psi, params)
    kicked = Field(v.grid, coeffs=v.coeffs - params.dt * nl)
    return apply_semigroup((psi, kicked), params.dt)


def _is_real(f):
    return not np.any(f.values.imag)


def run(psi0, v0, params, observer=None, stride=1):
    """March from ``(psi0, v0)`` to ``t_final``.

    ``observer(step_index, state)`` is called after the startup step, at
    every multiple of ``stride`` and at the final step. For real initial
    data the imaginary part is monitored at those points, relative to
    ``max(1, max|psi|)``.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    real_data = _is_real(psi0) and _is_real(v0)
    n_steps = params.n_steps

    def observe(state):
        if real_data:
            vals = state.curr.values
            drift = float(np.max(np.abs(vals.imag)))
            # relative to the field size once |psi| exceeds 1 (round-off scales with it)
            if drift > IMAG_TOLERANCE * max(1.0, float(np.max(np.abs(vals.real)))):
                raise SimulationError(
                    f"imaginary part {drift:.3e} exceeds {IMAG_TOLERANCE:g} at step {state.step_index}"
                )
        if observer is not None:
            observer(state.step_index, state)

    state = startup_step(psi0, v0, params)
    if not kernels.all_finite(state.curr.coeffs):
        raise BlowUpError(1)
    observe(state)
    for _ in range(n_steps - 1):
        state = step(state, params)
        if state.step_index % stride == 0 or state.step_index == n_steps:
            observe(state)
    log.debug("finished %d steps (backend=%s)", n_steps, kernels.BACKEND)
    return state


def run_mild(psi0, v0, params):
    """March the exponential integrator to ``t_final``; returns ``(psi, v)``."""
    state = (psi0, v0)
    for _ in range(params.n_steps):
        state = step_mild(state, params)
    return state
