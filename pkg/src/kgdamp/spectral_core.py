"""Torus grids, Fourier transforms, multipliers, quadrature and norms.

Transform convention: ``c_k = n**-dim * sum_x f(x) exp(-i k.x)`` so the
zeroth coefficient is the spatial mean. With that normalization the
discrete Parseval identity reads ``integrate(|f|^2) = (2 pi)^dim sum |c_k|^2``.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid on ``[0, 2 pi)^dim``."""

    dim: int
    n: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"unsupported dimension {self.dim}; expected 1 or 2")
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 8 or n & (n - 1):
            raise ValueError(f"unsupported resolution n={n}; need a power of two >= 8")

    @property
    def shape(self):
        return (self.n,) * self.dim

    @property
    def size(self):
        return self.n**self.dim

    @property
    def spacing(self):
        return TWO_PI / self.n

    @property
    def cell_measure(self):
        return self.spacing**self.dim

    @property
    def volume(self):
        return TWO_PI**self.dim

    @cached_property
    def wavenumbers(self):
        """Integer frequencies per axis in DFT order ``0, 1, ..., n/2-1, -n/2, ..., -1``."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n).astype(np.int64)

    @cached_property
    def k(self):
        """Tuple of wavenumber arrays broadcast to the coefficient shape."""
        return tuple(np.meshgrid(*([self.wavenumbers] * self.dim), indexing="ij"))

    @cached_property
    def k2(self):
        """``|k|^2`` on the coefficient lattice, as float64."""
        return sum(ki.astype(np.float64) ** 2 for ki in self.k)

    @cached_property
    def coords(self):
        x = np.arange(self.n) * self.spacing
        return tuple(np.meshgrid(*([x] * self.dim), indexing="ij"))

    @cached_property
    def dealias_mask(self):
        """True where every ``|k_i| <= n/3`` (the 2/3 rule)."""
        mask = np.ones(self.shape, dtype=bool)
        for ki in self.k:
            mask &= np.abs(ki) <= self.n / 3
        return mask

    def index_of(self, kvec):
        """Array index of integer wavevector ``kvec``; raises if unresolved."""
        kvec = tuple(int(v) for v in np.atleast_1d(kvec))
        if len(kvec) != self.dim:
            raise ValueError(f"wavevector {kvec} does not match dimension {self.dim}")
        for v in kvec:
            if abs(v) >= self.n // 2:
                raise ValueError(f"wavevector {kvec} not resolvable on n={self.n} (need |k_i| < n/2)")
        return tuple(v % self.n for v in kvec)


def make_grid(dim, n):
    return TorusGrid(dim, n)


def _frozen(arr):
    arr.setflags(write=False)
    return arr


class Field:
    """Complex field on a ``TorusGrid`` with lazily synchronized views.

    At least one of ``values`` (physical) or ``coeffs`` (spectral) is given;
    the other is computed on first access and cached. Arrays handed out are
    read-only so a Field behaves as an immutable value.
    """

    __slots__ = ("grid", "_values", "_coeffs")

    def __init__(self, grid, values=None, coeffs=None):
        if values is None and coeffs is None:
            raise ValueError("Field needs values or coeffs")
        self.grid = grid
        self._values = None if values is None else _frozen(self._check(values))
        self._coeffs = None if coeffs is None else _frozen(self._check(coeffs))

    def _check(self, arr):
        arr = np.array(arr, dtype=np.complex128)
        if arr.shape != self.grid.shape:
            raise ValueError(f"array shape {arr.shape} does not match grid {self.grid.shape}")
        return arr

    @classmethod
    def zeros(cls, grid):
        return cls(grid, values=np.zeros(grid.shape), coeffs=np.zeros(grid.shape))

    @classmethod
    def from_function(cls, grid, func):
        """Sample ``func(*coords)`` on the grid."""
        return cls(grid, values=np.broadcast_to(func(*grid.coords), grid.shape))

    @classmethod
    def from_modes(cls, grid, modes):
        """Build from ``{wavevector: amplitude}`` (amplitudes are the ``c_k``)."""
        c = np.zeros(grid.shape, dtype=np.complex128)
        for kvec, amp in dict(modes).items():
            c[grid.index_of(kvec)] += amp
        return cls(grid, coeffs=c)

    @property
    def has_values(self):
        return self._values is not None

    @property
    def has_coeffs(self):
        return self._coeffs is not None

    @property
    def values(self):
        if self._values is None:
            self._values = _frozen(np.fft.ifftn(self._coeffs) * self.grid.size)
        return self._values

    @property
    def coeffs(self):
        if self._coeffs is None:
            self._coeffs = _frozen(np.fft.fftn(self._values) / self.grid.size)
        return self._coeffs

    def _same_grid(self, other):
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")

    def _combine(self, other, op):
        if isinstance(other, Field):
            self._same_grid(other)
            if self.has_coeffs and other.has_coeffs:
                return Field(self.grid, coeffs=op(self.coeffs, other.coeffs))
            return Field(self.grid, values=op(self.values, other.values))
        if self.has_coeffs and not self.has_values:
            return Field(self.grid, coeffs=op(self.coeffs, other))
        return Field(self.grid, values=op(self.values, other))

    def __add__(self, other):
        if isinstance(other, Field):
            return self._combine(other, np.add)
        if self.has_coeffs:
            # scalar shift only touches the mean mode
            c = self.coeffs.copy()
            c[(0,) * self.grid.dim] += other
            return Field(self.grid, coeffs=c)
        return Field(self.grid, values=self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Field):
            return self + (-other)
        return self._combine(other, np.subtract)

    def __neg__(self):
        return self * -1.0

    def __mul__(self, scalar):
        if isinstance(scalar, Field):
            self._same_grid(scalar)
            return Field(self.grid, values=self.values * scalar.values)
        return self._combine(scalar, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def max_abs(self):
        return float(np.max(np.abs(self.values)))

    def __repr__(self):
        views = "+".join(v for v, ok in (("values", self.has_values), ("coeffs", self.has_coeffs)) if ok)
        return f"Field(dim={self.grid.dim}, n={self.grid.n}, views={views})"


def forward_transform(f):
    """Field with the spectral view computed from the physical one."""
    return Field(f.grid, values=f.values, coeffs=np.fft.fftn(f.values) / f.grid.size)


def inverse_transform(f):
    return Field(f.grid, values=np.fft.ifftn(f.coeffs) * f.grid.size, coeffs=f.coeffs)


def apply_multiplier(f, m):
    """Multiply coefficients by ``m``.

    ``m`` is either an array broadcastable to the coefficient shape or a
    callable receiving the per-axis wavenumber arrays, e.g.
    ``lambda *k: -sum(ki**2 for ki in k)`` for the Laplacian.
    """
    if callable(m):
        m = m(*f.grid.k)
    return Field(f.grid, coeffs=f.coeffs * m)


def laplacian(f):
    return Field(f.grid, coeffs=-f.grid.k2 * f.coeffs)


def mean(f):
    if f.has_coeffs:
        return complex(f.coeffs[(0,) * f.grid.dim])
    return complex(np.mean(f.values))


def integrate(f):
    return complex(f.grid.cell_measure * np.sum(f.values))


def sobolev_norm(f, s):
    """``((2 pi)^d sum_k (1+|k|^2)^s |c_k|^2)^(1/2)``; ``s = 0`` gives the L2 norm."""
    if s < 0:
        raise ValueError(f"Sobolev index must be non-negative, got {s}")
    g = f.grid
    w = np.ones(g.shape) if s == 0 else (1.0 + g.k2) ** s
    return float(np.sqrt(g.volume * kernels.weighted_sum_sq(f.coeffs, w)))


def seminorm_sq(f, s):
    """``(2 pi)^d sum_k |k|^(2s) |c_k|^2``; ``s = 1`` is ``||grad f||^2``, ``s = 2`` is ``||Lap f||^2``."""
    g = f.grid
    return g.volume * kernels.weighted_sum_sq(f.coeffs, g.k2**s)


def lp_norm(f, q):
    if q < 1:
        raise ValueError(f"Lebesgue exponent must be >= 1, got {q}")
    return float((f.grid.cell_measure * kernels.abs_power_sum(f.values, float(q))) ** (1.0 / q))


def gradient(f):
    """Spectral gradient as a tuple of fields."""
    return tuple(Field(f.grid, coeffs=1j * ki * f.coeffs) for ki in f.grid.k)
