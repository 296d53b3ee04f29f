"""Exact linear propagator of the damped Klein-Gordon system, one Fourier mode at a time.

Writing the equation as a first-order system in ``(psi, psi_t)`` with
``L = -Lap``, each mode with ``|k|^2 = k2`` evolves under the generator

    M = [[0, 1], [-(1 + k2), -k2]]

whose eigenvalues solve ``lam^2 + k2 lam + (1 + k2) = 0``. The propagator is
``exp(t M) = exp(-t k2/2) [[C + k2/2 S, S], [-(1+k2) S, C - k2/2 S]]`` with
``C = cosh(t A)``, ``S = sinh(t A)/A`` and ``A = sqrt(k2^2 - 4 k2 - 4)/2``.
"""
from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np

from .spectral_core import Field

_SERIES_CUTOFF = 1e-2
_SERIES_TERMS = 8
_COSH_C = np.array([1.0 / factorial(2 * m) for m in range(_SERIES_TERMS)])
_SINC_C = np.array([1.0 / factorial(2 * m + 1) for m in range(_SERIES_TERMS)])


@dataclass(frozen=True)
class ModeMatrix:
    entries: np.ndarray
    k2: float
    t: float

    def __matmul__(self, vec):
        return self.entries @ np.asarray(vec)

    @property
    def det(self):
        return complex(np.linalg.det(self.entries))


@dataclass(frozen=True)
class ModeEigenpair:
    lambda_plus: complex
    lambda_minus: complex


def _roots(k2):
    """Roots of ``lam^2 + k2 lam + 1 + k2``.

    Complex pair: plain quadratic formula (real part exactly ``-k2/2``).
    Real pair: the small root comes from the product ``1 + k2`` to avoid
    cancellation for large ``k2``.
    """
    k2 = np.asarray(k2, dtype=np.float64)
    disc = k2 * k2 - 4.0 * k2 - 4.0
    half_root = 0.5 * np.sqrt(disc.astype(np.complex128))
    lam_minus = -0.5 * k2 - half_root
    lam_plus = np.where(disc < 0, -0.5 * k2 + half_root, (1.0 + k2) / lam_minus)
    return lam_plus, lam_minus


def mode_eigenvalues(k2):
    lp, lm = _roots(k2)
    return ModeEigenpair(complex(lp), complex(lm))


def propagator_entries(k2, t):
    """Vectorized ``exp(t M)``; ``k2`` and ``t`` broadcast, result gains two trailing axes."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("semigroup time must be non-negative")
    k2 = np.asarray(k2, dtype=np.float64)
    lam_plus, lam_minus = _roots(k2)
    ep = np.exp(t * lam_plus)
    em = np.exp(t * lam_minus)
    # lam_plus - lam_minus = 2A; computed from the stable roots
    two_a = lam_plus - lam_minus
    ta_sq = 0.25 * t * t * (k2 * k2 - 4.0 * k2 - 4.0)
    small = np.abs(0.5 * t * two_a) < _SERIES_CUTOFF

    with np.errstate(divide="ignore", invalid="ignore"):
        sh = np.where(small, 0.0, (ep - em) / np.where(small, 1.0, two_a))
    ch = 0.5 * (ep + em)
    if np.any(small):
        powers = ta_sq[..., None] ** np.arange(_SERIES_TERMS)
        damp = np.exp(-0.5 * t * k2)
        ch = np.where(small, damp * (powers @ _COSH_C), ch)
        sh = np.where(small, damp * t * (powers @ _SINC_C), sh)

    out = np.empty(np.broadcast(k2, t).shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = ch + 0.5 * k2 * sh
    out[..., 0, 1] = sh
    out[..., 1, 0] = -(1.0 + k2) * sh
    out[..., 1, 1] = ch - 0.5 * k2 * sh
    return out


def mode_matrix(k2, t):
    return ModeMatrix(propagator_entries(float(k2), float(t)), float(k2), float(t))


def generator(k2):
    """The per-mode generator ``M`` (so that ``d/dt (c, c_t) = M (c, c_t)``)."""
    return np.array([[0.0, 1.0], [-(1.0 + k2), -float(k2)]])


@lru_cache(maxsize=32)
def _grid_propagator(grid, t):
    m = propagator_entries(grid.k2, t)
    m.setflags(write=False)
    return m


def apply_semigroup(state, t):
    """Propagate the first-order state ``(psi, v)`` exactly by time ``t``."""
    psi, v = state
    psi._same_grid(v)
    m = _grid_propagator(psi.grid, float(t))
    a, b = psi.coeffs, v.coeffs
    new_psi = m[..., 0, 0] * a + m[..., 0, 1] * b
    new_v = m[..., 1, 0] * a + m[..., 1, 1] * b
    return Field(psi.grid, coeffs=new_psi), Field(psi.grid, coeffs=new_v)


def _spectral_norm_2x2(m):
    s = np.sum(np.abs(m) ** 2, axis=(-2, -1))
    det = np.abs(m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0])
    disc = np.sqrt(np.maximum(s * s - 4.0 * det * det, 0.0))
    return np.sqrt(0.5 * (s + disc))


def measure_decay_constant(k2_max, t_samples, chunk=256):
    """Empirical constant ``C`` in ``||exp(-tA) u|| <= C exp(-t/2) ||u||`` on zero-mean states.

    Maximizes the per-mode operator 2-norm times ``exp(t/2)`` over every
    integer ``1 <= k2 <= k2_max`` and every sampled ``t``. In ``H^2 x H^2``
    the weight ``(1 + k2)^2`` is the same on both components of a mode, so
    the weighted and unweighted norms coincide.
    """
    t = np.asarray(list(t_samples), dtype=np.float64)
    if t.size == 0:
        raise ValueError("need at least one time sample")
    if k2_max < 1:
        raise ValueError("k2_max must be >= 1")
    best = 0.0
    for lo in range(1, int(k2_max) + 1, chunk):
        k2 = np.arange(lo, min(lo + chunk, int(k2_max) + 1), dtype=np.float64)
        m = propagator_entries(k2[:, None], t[None, :])
        vals = _spectral_norm_2x2(m) * np.exp(0.5 * t)[None, :]
        best = max(best, float(vals.max()))
    return best
