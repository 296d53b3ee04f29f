"""Numpy implementations of the inner loops, used when the compiled module is absent."""
import numpy as np


def power_nonlinearity(values, p):
    """Pointwise ``|z|**p * z``."""
    z = np.asarray(values, dtype=np.complex128)
    if p == 2.0:
        return z * (z.real * z.real + z.imag * z.imag)
    return z * np.abs(z) ** p


def advance(prev, curr, nl, inv_a, c, lin):
    """Per-mode increment update ``curr + (c*(curr-prev) - lin*curr - nl) / a``."""
    return curr + (c * (curr - prev) - lin * curr - nl) * inv_a


def weighted_sum_sq(coeffs, weights):
    c = np.asarray(coeffs)
    return float(np.sum(weights * (c.real * c.real + c.imag * c.imag)))


def abs_power_sum(values, q):
    z = np.asarray(values)
    m2 = z.real * z.real + z.imag * z.imag
    if q == 2.0:
        return float(np.sum(m2))
    if q == 4.0:
        return float(np.sum(m2 * m2))
    return float(np.sum(np.sqrt(m2) ** q))


def all_finite(values):
    return bool(np.isfinite(values).all())
