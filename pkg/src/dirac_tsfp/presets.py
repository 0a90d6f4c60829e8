"""Named problem set-ups: domain, potentials and initial data."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError
from .model import PotentialTable, load_potential_csv, sample_potentials
from .spectral import GridSpec, SpinorField

Profile = Callable[[np.ndarray], np.ndarray]


def bump_potential(x):
    """``x^2 (x - 1)^2 + 1``."""
    return x**2 * (x - 1.0) ** 2 + 1.0


def bump_initial(x):
    """``x^2 (1 - x)^2 / 2 + 3``."""
    return 0.5 * x**2 * (1.0 - x) ** 2 + 3.0


def smooth_electric(x):
    return 1.0 + 0.5 * np.cos(2.0 * np.pi * x)


def smooth_magnetic(x):
    return 1.0 + 0.5 * np.sin(2.0 * np.pi * x)


def smooth_initial_upper(x):
    # Fourier coefficients decay like (2 - sqrt 3)^|l|
    return 1.0 / (2.0 - np.cos(2.0 * np.pi * x))


def smooth_initial_lower(x):
    s = 2.0 * np.pi * x
    return np.sin(s) / (2.0 - np.cos(s))


def zero(x):
    return np.zeros_like(x)


@dataclass(frozen=True)
class ProblemPreset:
    """Domain, potentials and initial data of one numerical experiment.

    Potentials come either from analytic profiles ``V``/``A1`` or from a
    sampled table (``table``), in which case every grid used with the preset
    must be a subsampling of the table's grid.
    """

    name: str
    a: float
    b: float
    phi1: Profile
    phi2: Profile
    V: Optional[Profile] = None
    A1: Optional[Profile] = None
    table: Optional[PotentialTable] = field(default=None, repr=False)
    eps_list: tuple = (1.0, 0.5, 0.25, 0.125)
    M: int = 128
    tau: float = 1e-2

    def grid(self, M: Optional[int] = None) -> GridSpec:
        return GridSpec(self.a, self.b, self.M if M is None else M)

    def initial(self, grid: GridSpec) -> SpinorField:
        return SpinorField.from_functions(grid, self.phi1, self.phi2)

    def potentials(self, grid: GridSpec, eps: float) -> PotentialTable:
        if self.table is None:
            return sample_potentials(self.V, self.A1, grid, eps)
        src = self.table.grid
        if (grid.a, grid.b) != (src.a, src.b) or src.M % grid.M:
            raise ConfigurationError(
                f"grid M={grid.M} is not a subsampling of the tabulated potential grid M={src.M}"
            )
        stride = src.M // grid.M
        return PotentialTable(grid, self.table.V[::stride], self.table.A[::stride], eps)


BUMP = ProblemPreset("bump", 0.0, 1.0, bump_initial, bump_initial, bump_potential, bump_potential)

SMOOTH = ProblemPreset(
    "smooth", 0.0, 1.0, smooth_initial_upper, smooth_initial_lower, smooth_electric, smooth_magnetic
)

FREE = ProblemPreset("free", 0.0, 1.0, bump_initial, bump_initial, zero, zero)

PRESETS = {p.name: p for p in (BUMP, SMOOTH, FREE)}


def get_preset(name: str) -> ProblemPreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigurationError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}") from None


def preset_from_csv(path, base: ProblemPreset = BUMP) -> ProblemPreset:
    """Tabulated potentials from ``path`` with the initial data of ``base``."""
    table = load_potential_csv(path, eps=1.0)
    return ProblemPreset(
        f"csv:{path}",
        table.grid.a,
        table.grid.b,
        base.phi1,
        base.phi2,
        table=table,
        eps_list=base.eps_list,
        M=table.grid.M,
        tau=base.tau,
    )
