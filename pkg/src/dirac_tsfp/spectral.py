"""Periodic grids, spinor fields and their Fourier representation.

Fields are stored as ``(2, M)`` complex arrays, one row per spinor
component, sampled at ``x_j = a + j h`` for ``j = 0..M-1``. The periodic
endpoint ``x_M = b`` is never stored.

The forward transform carries the ``1/M`` factor::

    c_l = (1/M) sum_j U_j exp(-2 i pi j l / M),    l = -M/2 .. M/2-1

and the inverse evaluates ``sum_l c_l exp(i mu_l (x_j - a))`` with no factor.
Coefficients are kept in natural FFT order internally; every public method
that takes or returns a mode index speaks in ``l``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import GridMismatchError


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on ``(a, b)`` with ``M`` cells."""

    a: float
    b: float
    M: int

    def __post_init__(self):
        if not float(self.b) > float(self.a):
            raise ValueError(f"domain must satisfy a < b, got ({self.a}, {self.b})")
        if int(self.M) != self.M or self.M < 4 or self.M % 2:
            raise ValueError(f"M must be an even integer >= 4, got {self.M}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "M", int(self.M))

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.M

    @cached_property
    def x(self) -> np.ndarray:
        """Stored nodes ``x_0 .. x_{M-1}``."""
        return self.a + np.arange(self.M) * self.h

    @cached_property
    def modes(self) -> np.ndarray:
        """Mode index ``l`` of each FFT-ordered coefficient slot."""
        return np.fft.fftfreq(self.M, 1.0 / self.M).round().astype(np.int64)

    @cached_property
    def mu(self) -> np.ndarray:
        """Frequencies ``mu_l = 2 pi l / (b - a)`` in FFT order."""
        return 2.0 * np.pi * self.modes / self.length

    def slot(self, l: int) -> int:
        """FFT-order storage index of mode ``l``."""
        if not -self.M // 2 <= l < self.M // 2:
            raise IndexError(f"mode {l} outside T_M for M={self.M}")
        return int(l) % self.M

    def mode_range(self) -> np.ndarray:
        """``l = -M/2, ..., M/2 - 1`` in ascending order."""
        return np.arange(-self.M // 2, self.M // 2)


def check_same_grid(*grids: GridSpec) -> None:
    first = grids[0]
    for g in grids[1:]:
        if g != first:
            raise GridMismatchError(f"grid mismatch: {first} vs {g}")


@dataclass(frozen=True)
class SpinorField:
    """Grid samples of a two-component wave function."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != (2, self.grid.M):
            raise ValueError(f"expected values of shape (2, {self.grid.M}), got {vals.shape}")
        object.__setattr__(self, "values", _frozen(vals))

    @classmethod
    def from_functions(cls, grid: GridSpec, phi1, phi2) -> "SpinorField":
        x = grid.x
        v1 = np.broadcast_to(np.asarray(phi1(x), dtype=np.complex128), x.shape)
        v2 = np.broadcast_to(np.asarray(phi2(x), dtype=np.complex128), x.shape)
        return cls(grid, np.stack([v1, v2]))

    @classmethod
    def zeros(cls, grid: GridSpec) -> "SpinorField":
        return cls(grid, np.zeros((2, grid.M), dtype=np.complex128))

    def __add__(self, other: "SpinorField") -> "SpinorField":
        check_same_grid(self.grid, other.grid)
        return SpinorField(self.grid, self.values + other.values)

    def __sub__(self, other: "SpinorField") -> "SpinorField":
        check_same_grid(self.grid, other.grid)
        return SpinorField(self.grid, self.values - other.values)

    def __mul__(self, scalar: complex) -> "SpinorField":
        return SpinorField(self.grid, scalar * self.values)

    __rmul__ = __mul__


@dataclass(frozen=True)
class SpectralField:
    """Fourier coefficients of both spinor components, FFT-ordered."""

    grid: GridSpec
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs)
        if c.shape != (2, self.grid.M):
            raise ValueError(f"expected coeffs of shape (2, {self.grid.M}), got {c.shape}")
        object.__setattr__(self, "coeffs", _frozen(c))

    @classmethod
    def from_modes(cls, grid: GridSpec, modes: dict[int, tuple[complex, complex]]) -> "SpectralField":
        """Build from a sparse ``{l: (c1, c2)}`` map; absent modes are zero."""
        c = np.zeros((2, grid.M), dtype=np.complex128)
        for l, pair in modes.items():
            c[:, grid.slot(l)] = pair
        return cls(grid, c)

    def coeff(self, l: int) -> np.ndarray:
        return self.coeffs[:, self.grid.slot(l)]

    def by_mode(self) -> np.ndarray:
        """Coefficients ordered ``l = -M/2 .. M/2-1`` (shape ``(2, M)``)."""
        return np.fft.fftshift(self.coeffs, axes=1)


def to_spectral(f: SpinorField) -> SpectralField:
    return SpectralField(f.grid, np.fft.fft(f.values, axis=1) / f.grid.M)


def to_physical(g: SpectralField) -> SpinorField:
    return SpinorField(g.grid, np.fft.ifft(g.coeffs, axis=1) * g.grid.M)


def l2_norm(f: SpinorField) -> float:
    """Discrete L2 norm ``sqrt(h * sum_j |Phi_j|^2)``."""
    v = f.values
    return float(np.sqrt(f.grid.h * np.sum(v.real**2 + v.imag**2)))


def sobolev_norm(g: SpectralField, m: int) -> float:
    """Spectral H^m norm ``sqrt(sum_l (1 + mu_l^2)^m |c_l|^2)`` over T_M.

    At ``m = 0`` this is the coefficient l2 norm, so
    ``l2_norm(f) == sqrt(b - a) * sobolev_norm(to_spectral(f), 0)``.
    """
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    weight = (1.0 + g.grid.mu**2) ** m
    power = np.sum(np.abs(g.coeffs) ** 2, axis=0)
    return float(np.sqrt(np.sum(weight * power)))


def project(g: SpectralField, M0: int) -> SpectralField:
    """Zero every coefficient with ``l`` outside ``T_{M0}``."""
    M = g.grid.M
    if int(M0) != M0 or M0 % 2 or not 2 <= M0 <= M:
        raise ValueError(f"M0 must be an even integer in [2, {M}], got {M0}")
    l = g.grid.modes
    keep = (l >= -M0 // 2) & (l < M0 // 2)
    return SpectralField(g.grid, np.where(keep, g.coeffs, 0.0))


def resample(g: SpectralField, grid: GridSpec) -> SpectralField:
    """Move coefficients to another grid on the same domain.

    Modes shared by both index sets are copied exactly; modes the target
    cannot represent are dropped and new ones are zero. For a finer target
    this is trigonometric interpolation, for a coarser one spectral
    truncation.
    """
    if (grid.a, grid.b) != (g.grid.a, g.grid.b):
        raise GridMismatchError(f"cannot resample between domains {g.grid} and {grid}")
    if grid.M == g.grid.M:
        return g
    out = np.zeros((2, grid.M), dtype=np.complex128)
    half = min(grid.M, g.grid.M) // 2
    shared = np.arange(-half, half)
    out[:, shared % grid.M] = g.coeffs[:, shared % g.grid.M]
    return SpectralField(grid, out)


def interpolate(f: SpinorField, grid: GridSpec) -> SpinorField:
    """Evaluate the trigonometric interpolant of ``f`` on another grid."""
    return to_physical(resample(to_spectral(f), grid))
