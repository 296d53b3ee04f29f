"""Energy functionals, the mean/oscillation split and decay-rate fitting.

Quadratic terms are evaluated through the discrete Parseval identity, which
equals the grid quadrature of the spectrally differentiated field exactly;
the ``|psi|^(p+2)`` potential is integrated on the grid.
"""
import math
from dataclasses import dataclass, fields

import numpy as np

from . import kernels
from .integrators import StatePair
from .spectral_core import TWO_PI, Field, seminorm_sq, sobolev_norm

Q_POSITIONS = ("current", "midpoint")


@dataclass(frozen=True)
class EnergyRecord:
    step: int
    t: float
    e_psi: float
    e_phi: float
    q: float
    j: float
    e_eps: float
    h2: float
    gap: float

    @classmethod
    def columns(cls):
        return tuple(f.name for f in fields(cls))

    def as_tuple(self):
        return tuple(getattr(self, name) for name in self.columns())


@dataclass(frozen=True)
class DecayFit:
    alpha: float
    c: float
    r2: float
    window: tuple
    n_samples: int
    degenerate: bool = False


class InsufficientDataError(ValueError):
    pass


def _potential(f, p):
    g = f.grid
    return g.cell_measure * kernels.abs_power_sum(f.values, float(p) + 2.0) / (p + 2.0)


def _l2_sq(f):
    return f.grid.volume * kernels.weighted_sum_sq(f.coeffs, np.ones(f.grid.shape))


def _h1_sq(f):
    return f.grid.volume * kernels.weighted_sum_sq(f.coeffs, 1.0 + f.grid.k2)


def _staggered_energy(avg, vel, p, quadratic_only=False):
    e = 0.5 * (_l2_sq(vel) + _h1_sq(avg))
    if not quadratic_only:
        e += _potential(avg, p)
    return e


def _levels(state, dt):
    avg = state.midpoint()
    vel = state.velocity(dt)
    return avg, vel


def discrete_energy(state, dt, p, potential=True):
    """``E_n``: energy at the half step, position ``(psi_n + psi_{n-1})/2``, velocity ``(psi_n - psi_{n-1})/dt``.

    ``potential=False`` drops the ``|psi|^(p+2)`` term (energy of the linear equation).
    """
    if state.step_index < 1:
        raise ValueError("discrete energy needs two time levels")
    return _staggered_energy(*_levels(state, dt), p, quadratic_only=not potential)


def discrete_quadratic_energy(state, dt):
    """Quadratic part of ``E_n``; exactly conserved by the undamped linear scheme."""
    return _staggered_energy(*_levels(state, dt), 0.0, quadratic_only=True)


def discrete_q(theta_n, theta_prev, dt, p, dim, position="current", potential=True):
    """Mean-mode energy ``(2 pi)^d (|th|^2/2 + |th'|^2/2 + |th|^(p+2)/(p+2))``.

    ``th'`` is the backward difference. ``position`` picks ``th``: the
    current level ``theta_n`` or the midpoint ``(theta_n + theta_prev)/2``;
    the midpoint makes ``Q_n`` the mean-mode part of ``E_n`` exactly.
    """
    if position == "current":
        th = theta_n
    elif position == "midpoint":
        th = 0.5 * (theta_n + theta_prev)
    else:
        raise ValueError(f"position must be one of {Q_POSITIONS}, got {position!r}")
    a = abs(th)
    vel = abs(theta_n - theta_prev) / dt
    pot = a ** (p + 2) / (p + 2) if potential else 0.0
    return TWO_PI**dim * (0.5 * a * a + 0.5 * vel * vel + pot)


def continuous_energy(psi, v, p, potential=True):
    psi._same_grid(v)
    e = 0.5 * (_l2_sq(v) + _h1_sq(psi))
    return e + _potential(psi, p) if potential else e


def modified_energy(psi, v, p, eps, potential=True):
    """``E + eps * integral Re(conj(psi) v)``."""
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    cross = psi.grid.volume * float(np.sum((np.conj(psi.coeffs) * v.coeffs).real))
    return continuous_energy(psi, v, p, potential) + eps * cross


def j_functional(psi, v, p, potential=True):
    psi._same_grid(v)
    lap_minus_v = Field(psi.grid, coeffs=-psi.grid.k2 * psi.coeffs - v.coeffs)
    j = 0.5 * _l2_sq(lap_minus_v) + 0.5 * _h1_sq(psi)
    return j + _potential(psi, p) if potential else j


def split_state(state):
    """Return ``(phi_state, (theta_n, theta_prev))`` with the mean removed from both levels."""
    dim = state.grid.dim
    zero = (0,) * dim
    th_n = complex(state.curr.coeffs[zero])
    th_prev = complex(state.prev.coeffs[zero])
    phi = StatePair(state.prev - th_prev, state.curr - th_n, state.step_index)
    return phi, (th_n, th_prev)


def record(state, dt, p, eps=0.1, q_position="midpoint", potential=True):
    """All diagnostics for one time level, velocity proxy ``(psi_n - psi_{n-1})/dt``.

    ``J`` and ``E_eps`` are evaluated at the midpoint position. Pass
    ``potential=False`` for runs of the linear equation.
    """
    avg, vel = _levels(state, dt)
    e_psi = _staggered_energy(avg, vel, p, quadratic_only=not potential)
    phi, (th_n, th_prev) = split_state(state)
    e_phi = discrete_energy(phi, dt, p, potential)
    q = discrete_q(th_n, th_prev, dt, p, state.grid.dim, q_position, potential)
    return EnergyRecord(
        step=state.step_index,
        t=state.step_index * dt,
        e_psi=e_psi,
        e_phi=e_phi,
        q=q,
        j=j_functional(avg, vel, p, potential),
        e_eps=modified_energy(avg, vel, p, eps, potential),
        h2=sobolev_norm(state.curr, 2),
        gap=abs(e_psi - q),
    )


def poincare_ratio(f):
    """``||f|| / ||grad f||`` for zero-mean ``f`` (at most 1 on the torus)."""
    return math.sqrt(_l2_sq(f) / seminorm_sq(f, 1))


def fit_decay_rate(series, window=None, floor=None, min_samples=10):
    """Least-squares fit of ``log value = log c - alpha t``.

    Parameters
    ----------
    series : sequence of (t, value)
    window : (t_lo, t_hi), optional
        Defaults to the second half ``[t_last/2, t_last]``.
    floor : float, optional
        Samples at or below it are dropped. Default
        ``max(1e-12 * value_0, 1e-300)`` keeps saturated round-off out.

    Returns
    -------
    DecayFit
        ``alpha > 0`` for decay. ``degenerate`` is set when the retained
        values are all equal (``r2`` is then reported as 1).
    """
    data = np.asarray(list(series), dtype=np.float64)
    if data.ndim != 2 or data.shape[0] == 0:
        raise InsufficientDataError("empty series")
    t, y = data[:, 0], data[:, 1]
    if window is None:
        window = (0.5 * t[-1], t[-1])
    if floor is None:
        floor = max(1e-12 * y[0], 1e-300)
    keep = (t >= window[0]) & (t <= window[1]) & (y > floor) & np.isfinite(y)
    if keep.sum() < min_samples:
        raise InsufficientDataError(
            f"only {int(keep.sum())} usable samples in window {window} above floor {floor:.3e}"
        )
    tt, ly = t[keep], np.log(y[keep])
    slope, intercept = np.polyfit(tt, ly, 1)
    resid = ly - (slope * tt + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    scale = max(1.0, float(np.max(np.abs(ly))))
    degenerate = ss_tot <= (1e-14 * scale) ** 2 * len(ly)
    if degenerate:
        slope, r2 = 0.0, 1.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return DecayFit(
        alpha=float(-slope),
        c=float(math.exp(intercept)),
        r2=float(r2),
        window=(float(tt[0]), float(tt[-1])),
        n_samples=int(keep.sum()),
        degenerate=bool(degenerate),
    )
