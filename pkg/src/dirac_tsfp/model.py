"""Operator data of the 1D Dirac equation with small potentials.

The equation is ``d/dt Phi = (T + eps V) Phi`` with the free operator
``T = -sigma_1 d/dx - i sigma_3`` and the potential operator
``V = -i (V(x) I - A_1(x) sigma_1)``. On Fourier mode ``l`` the free
operator acts as ``-i Gamma_l`` with ``Gamma_l = mu_l sigma_1 + sigma_3``;
the potential operator is pointwise. Both sub-flows are therefore exact.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import ConfigurationError
from .spectral import GridSpec, SpectralField, SpinorField, check_same_grid

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=np.complex128)
IDENTITY_2 = np.eye(2, dtype=np.complex128)
for _m in (SIGMA_1, SIGMA_2, SIGMA_3, IDENTITY_2):
    _m.flags.writeable = False

#: orthogonal matrix diagonalising ``V I - A sigma_1`` whenever ``A != 0``
POTENTIAL_EIGVECS = np.array([[1, 1], [-1, 1]], dtype=np.float64) / math.sqrt(2.0)


def _readonly(arr):
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class FreeModeSystem:
    """Per-mode eigensystems ``Gamma_l = Q_l D_l Q_l^T``, FFT-ordered.

    Attributes:
        grid: the grid the modes belong to.
        mu: frequencies ``mu_l``.
        delta: ``sqrt(1 + mu_l^2)``, the positive eigenvalue of ``Gamma_l``.
        Q: real orthogonal ``(M, 2, 2)`` eigenvector matrices; column 0
            belongs to ``+delta_l``, column 1 to ``-delta_l``.
        D: ``(M, 2)`` diagonal of ``D_l``, i.e. ``(delta_l, -delta_l)``.
        gamma: ``(M, 2, 2)`` symbols ``Gamma_l``.
    """

    grid: GridSpec
    mu: np.ndarray = field(repr=False)
    delta: np.ndarray = field(repr=False)
    Q: np.ndarray = field(repr=False)
    D: np.ndarray = field(repr=False)
    gamma: np.ndarray = field(repr=False)

    def propagator(self, dt: float) -> np.ndarray:
        """``Q_l diag(exp(-i dt delta_l), exp(i dt delta_l)) Q_l^T`` per mode.

        This is ``exp(-i dt Gamma_l)``, the symbol of ``exp(dt T)``.
        """
        phase = np.exp(-1j * dt * self.D)
        return np.einsum("mij,mj,mkj->mik", self.Q, phase, self.Q)


def build_free_modes(grid: GridSpec) -> FreeModeSystem:
    mu = grid.mu
    delta = np.sqrt(1.0 + mu**2)
    norm = np.sqrt(2.0 * delta * (1.0 + delta))
    p = (1.0 + delta) / norm
    q = mu / norm
    Q = np.empty((grid.M, 2, 2))
    Q[:, 0, 0] = p
    Q[:, 0, 1] = -q
    Q[:, 1, 0] = q
    Q[:, 1, 1] = p
    D = np.stack([delta, -delta], axis=1)
    gamma = mu[:, None, None] * SIGMA_1.real + SIGMA_3.real
    return FreeModeSystem(
        grid, _readonly(mu), _readonly(delta), _readonly(Q), _readonly(D), _readonly(gamma)
    )


def free_flow(g: SpectralField, modes: FreeModeSystem, dt: float) -> SpectralField:
    """Apply ``exp(dt T)`` exactly, mode by mode."""
    check_same_grid(g.grid, modes.grid)
    U = modes.propagator(dt)
    return SpectralField(g.grid, np.einsum("mij,jm->im", U, g.coeffs))


@dataclass(frozen=True)
class PotentialTable:
    """Electric and magnetic potentials sampled at the stored nodes."""

    grid: GridSpec
    V: np.ndarray = field(repr=False)
    A: np.ndarray = field(repr=False)
    eps: float

    def __post_init__(self):
        V = np.asarray(self.V, dtype=np.float64)
        A = np.asarray(self.A, dtype=np.float64)
        M = self.grid.M
        if V.shape != (M,) or A.shape != (M,):
            raise ConfigurationError(f"potential arrays must have length {M}")
        if not (np.all(np.isfinite(V)) and np.all(np.isfinite(A))):
            raise ConfigurationError("potential samples must be finite")
        if not 0.0 < self.eps <= 1.0:
            raise ConfigurationError(f"epsilon must lie in (0, 1], got {self.eps}")
        object.__setattr__(self, "V", _readonly(V.copy()))
        object.__setattr__(self, "A", _readonly(A.copy()))
        object.__setattr__(self, "eps", float(self.eps))

    def with_eps(self, eps: float) -> "PotentialTable":
        return PotentialTable(self.grid, self.V, self.A, eps)

    def matrix_entries(self, dt: float) -> tuple[np.ndarray, np.ndarray]:
        """Entries ``(p, q)`` of ``exp(-i eps dt G(x_j)) = [[p, q], [q, p]]``."""
        theta = self.eps * dt
        phase = np.exp(-1j * theta * self.V)
        return phase * np.cos(theta * self.A), 1j * phase * np.sin(theta * self.A)

    def apply_operator(self, values: np.ndarray) -> np.ndarray:
        """Pointwise ``-i (V I - A sigma_1)`` applied to ``(2, M)`` samples."""
        u1, u2 = values
        return -1j * np.stack([self.V * u1 - self.A * u2, self.V * u2 - self.A * u1])


def sample_potentials(
    V: Callable[[np.ndarray], np.ndarray],
    A1: Callable[[np.ndarray], np.ndarray],
    grid: GridSpec,
    eps: float,
) -> PotentialTable:
    if not 0.0 < eps <= 1.0:
        raise ConfigurationError(f"epsilon must lie in (0, 1], got {eps}")
    x = grid.x
    Vs = np.broadcast_to(np.asarray(V(x), dtype=np.float64), x.shape)
    As = np.broadcast_to(np.asarray(A1(x), dtype=np.float64), x.shape)
    return PotentialTable(grid, Vs, As, eps)


def potential_flow(f: SpinorField, pot: PotentialTable, dt: float) -> SpinorField:
    """Apply ``exp(eps dt V)`` exactly at every node.

    Uses ``exp(-i t (V - A sigma_1)) = exp(-i t V) (cos(t A) I + i sin(t A) sigma_1)``.
    """
    check_same_grid(f.grid, pot.grid)
    p, q = pot.matrix_entries(dt)
    u1, u2 = f.values
    return SpinorField(f.grid, np.stack([p * u1 + q * u2, q * u1 + p * u2]))


def load_potential_csv(path: str | Path, eps: float, b: float | None = None) -> PotentialTable:
    """Read ``x,V,A`` rows sampled on a uniform periodic grid.

    The rows must be the stored nodes ``x_0 .. x_{M-1}``. The right endpoint
    defaults to ``x_0 + M h``.
    """
    xs, Vs, As = [], [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"x", "V", "A"} - set(reader.fieldnames or ())
        if missing:
            raise ConfigurationError(f"{path}: missing columns {sorted(missing)}")
        for row in reader:
            try:
                xs.append(float(row["x"]))
                Vs.append(float(row["V"]))
                As.append(float(row["A"]))
            except ValueError as exc:
                raise ConfigurationError(f"{path}: bad number in row {row}") from exc
    xs = np.array(xs)
    if len(xs) < 4:
        raise ConfigurationError(f"{path}: need at least 4 rows, got {len(xs)}")
    h = xs[1] - xs[0]
    if h <= 0 or not np.allclose(np.diff(xs), h, rtol=1e-9, atol=1e-12):
        raise ConfigurationError(f"{path}: x column is not uniformly increasing")
    M = len(xs)
    b = xs[0] + M * h if b is None else b
    try:
        grid = GridSpec(xs[0], b, M)
    except ValueError as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc
    if not np.allclose(grid.x, xs, rtol=0, atol=1e-9 * grid.length):
        raise ConfigurationError(f"{path}: nodes do not match a uniform grid on ({grid.a}, {grid.b})")
    return PotentialTable(grid, np.array(Vs), np.array(As), eps)
