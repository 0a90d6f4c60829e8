"""Time steppers built from the exact free and potential sub-flows.

The splitting schemes (Lie, Strang, fourth-order triple jump) are encoded as
stage lists and executed by :mod:`dirac_tsfp.kernels`. The exponential wave
integrator and the Crank-Nicolson comparator are written directly in numpy;
they are only used for comparison runs.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import SolverError
from .model import FreeModeSystem, PotentialTable
from .spectral import SpinorField, check_same_grid

#: triple-jump weights; GAMMA_OUTER + GAMMA_INNER + GAMMA_OUTER == 1
GAMMA_OUTER = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
GAMMA_INNER = 1.0 - 2.0 * GAMMA_OUTER

FDM_TOL = 1e-12
FDM_MAX_SWEEPS = 100


class SchemeKind(str, enum.Enum):
    LIE = "lie"
    STRANG = "strang"
    FOURTH = "fourth"
    EWI = "ewi"
    FDM = "fdm"

    @property
    def order(self) -> int:
        return _ORDERS[self]

    @property
    def is_splitting(self) -> bool:
        return self in (SchemeKind.LIE, SchemeKind.STRANG, SchemeKind.FOURTH)

    @classmethod
    def parse(cls, name: "str | SchemeKind") -> "SchemeKind":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            choices = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown scheme {name!r}; choose one of {choices}") from None


_ORDERS = {
    SchemeKind.LIE: 1,
    SchemeKind.STRANG: 2,
    SchemeKind.FOURTH: 4,
    SchemeKind.EWI: 2,
    SchemeKind.FDM: 2,
}


def _free_stage(modes: FreeModeSystem, dt: float) -> np.ndarray:
    U = modes.propagator(dt)
    return np.stack([U[:, 0, 0], U[:, 0, 1], U[:, 1, 1]])


def _potential_stage(pot: PotentialTable, dt: float) -> np.ndarray:
    p, q = pot.matrix_entries(dt)
    return np.stack([p, q, p])


def _strang_stages(modes, pot, dt):
    half = _free_stage(modes, dt / 2)
    return [(kernels.FREE, half), (kernels.POTENTIAL, _potential_stage(pot, dt)), (kernels.FREE, half)]


def _build_stages(scheme: SchemeKind, modes, pot, dt):
    if scheme is SchemeKind.LIE:
        return [(kernels.FREE, _free_stage(modes, dt)), (kernels.POTENTIAL, _potential_stage(pot, dt))]
    if scheme is SchemeKind.STRANG:
        return _strang_stages(modes, pot, dt)
    if scheme is SchemeKind.FOURTH:
        return (
            _strang_stages(modes, pot, GAMMA_OUTER * dt)
            + _strang_stages(modes, pot, GAMMA_INNER * dt)
            + _strang_stages(modes, pot, GAMMA_OUTER * dt)
        )
    return []


@dataclass(frozen=True)
class Stepper:
    """One-step map of a scheme for fixed ``(modes, pot, tau)``.

    All phase tables are computed once here. ``backward=True`` runs the same
    scheme with step ``-tau``; it exists for time-reversal checks.
    """

    scheme: SchemeKind
    modes: FreeModeSystem
    pot: PotentialTable
    tau: float
    backward: bool = False
    _kinds: np.ndarray = field(init=False, repr=False)
    _tables: np.ndarray = field(init=False, repr=False)
    _aux: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "scheme", SchemeKind.parse(self.scheme))
        if not self.tau > 0:
            raise ValueError(f"time step must be positive, got {self.tau}")
        check_same_grid(self.modes.grid, self.pot.grid)
        dt = self.dt
        stages = _build_stages(self.scheme, self.modes, self.pot, dt)
        kinds = np.array([k for k, _ in stages], dtype=np.int64)
        tables = (
            np.ascontiguousarray(np.stack([t for _, t in stages]))
            if stages
            else np.zeros((0, 3, self.grid.M), dtype=np.complex128)
        )
        object.__setattr__(self, "_kinds", kinds)
        object.__setattr__(self, "_tables", tables)
        object.__setattr__(self, "_aux", self._comparator_tables(dt))

    @property
    def grid(self):
        return self.modes.grid

    @property
    def dt(self) -> float:
        return -self.tau if self.backward else self.tau

    def reversed(self) -> "Stepper":
        return Stepper(self.scheme, self.modes, self.pot, self.tau, not self.backward)

    def _comparator_tables(self, dt):
        if self.scheme is SchemeKind.EWI:
            return {"full": self.modes.propagator(dt), "half": self.modes.propagator(dt / 2)}
        if self.scheme is SchemeKind.FDM:
            # (I + i theta Gamma)^-1 = (I - i theta Gamma) / (1 + theta^2 delta^2)
            theta = dt / 2
            eye = np.eye(2)
            minus = eye - 1j * theta * self.modes.gamma
            inv = minus / (1.0 + (theta * self.modes.delta) ** 2)[:, None, None]
            return {"explicit": minus, "inverse": inv}
        return {}

    def advance(self, values: np.ndarray, n_steps: int = 1) -> np.ndarray:
        """Advance raw ``(2, M)`` samples by ``n_steps`` steps."""
        if self.scheme.is_splitting:
            return kernels.run_stages(values, self._kinds, self._tables, n_steps)
        one = _ewi_once if self.scheme is SchemeKind.EWI else _fdm_once
        for _ in range(n_steps):
            values = one(values, self)
        return values

    def step(self, f: SpinorField) -> SpinorField:
        check_same_grid(f.grid, self.grid)
        return SpinorField(f.grid, self.advance(f.values, 1))


def build_stepper(scheme, modes: FreeModeSystem, pot: PotentialTable, tau: float) -> Stepper:
    return Stepper(SchemeKind.parse(scheme), modes, pot, tau)


def _fft(v):
    return np.fft.fft(v, axis=1) / v.shape[1]


def _ifft(c):
    return np.fft.ifft(c, axis=1) * c.shape[1]


def _apply_modes(U, c):
    return np.einsum("mij,jm->im", U, c)


def _ewi_once(u: np.ndarray, s: Stepper) -> np.ndarray:
    # exponential midpoint rule on the Duhamel integral, Lawson-Euler predictor
    eps, dt = s.pot.eps, s.dt
    full, half = s._aux["full"], s._aux["half"]
    c = _fft(u)
    force = _fft(s.pot.apply_operator(u))
    mid = _ifft(_apply_modes(half, c + (0.5 * dt * eps) * force))
    mid_force = _fft(s.pot.apply_operator(mid))
    return _ifft(_apply_modes(full, c) + (eps * dt) * _apply_modes(half, mid_force))


def _fdm_once(u: np.ndarray, s: Stepper) -> np.ndarray:
    # Crank-Nicolson for i u_t = (Gamma + eps G) u, solved by fixed-point sweeps
    # (I + i theta Gamma) v = rhs - i theta eps G v in the mixed representation.
    eps, theta = s.pot.eps, s.dt / 2
    pot = s.pot

    def coupling(v):
        # -i theta eps G v, with G = V I - A sigma_1
        return (theta * eps) * pot.apply_operator(v)

    c = _fft(u)
    rhs = _apply_modes(s._aux["explicit"], c) + _fft(coupling(u))
    inv = s._aux["inverse"]
    v = u
    for _ in range(FDM_MAX_SWEEPS):
        new = _ifft(_apply_modes(inv, rhs + _fft(coupling(v))))
        change = np.linalg.norm(new - v)
        scale = np.linalg.norm(new)
        v = new
        if change <= FDM_TOL * max(scale, 1e-300):
            return v
    raise SolverError(
        f"Crank-Nicolson fixed point did not reach {FDM_TOL:g} in {FDM_MAX_SWEEPS} sweeps "
        f"(last relative change {change / max(scale, 1e-300):.3g}); reduce tau*eps"
    )


def _require(s: Stepper, scheme: SchemeKind):
    if s.scheme is not scheme:
        raise ValueError(f"stepper is configured for {s.scheme.value}, not {scheme.value}")


def strang_step(f: SpinorField, s: Stepper) -> SpinorField:
    _require(s, SchemeKind.STRANG)
    return s.step(f)


def lie_step(f: SpinorField, s: Stepper) -> SpinorField:
    _require(s, SchemeKind.LIE)
    return s.step(f)


def fourth_step(f: SpinorField, s: Stepper) -> SpinorField:
    _require(s, SchemeKind.FOURTH)
    return s.step(f)


def ewi_step(f: SpinorField, s: Stepper) -> SpinorField:
    _require(s, SchemeKind.EWI)
    return s.step(f)


def fdm_step(f: SpinorField, s: Stepper) -> SpinorField:
    _require(s, SchemeKind.FDM)
    return s.step(f)


Observer = Callable[[int, SpinorField], None]


def evolve(
    f0: SpinorField,
    s: Stepper,
    n_steps: int,
    observer: Optional[Observer] = None,
    every: int = 1,
) -> SpinorField:
    """Apply ``s`` ``n_steps`` times.

    ``observer(n, field)`` is called after every ``every``-th step and after
    the last one. Between observer calls the steps run inside the kernel.
    """
    if n_steps < 0:
        raise ValueError(f"n_steps must be >= 0, got {n_steps}")
    if every < 1:
        raise ValueError(f"every must be >= 1, got {every}")
    check_same_grid(f0.grid, s.grid)
    values = f0.values
    done = 0
    while done < n_steps:
        chunk = min(every, n_steps - done) if observer is not None else n_steps - done
        values = s.advance(values, chunk)
        done += chunk
        if observer is not None:
            observer(done, SpinorField(f0.grid, values))
    return f0 if n_steps == 0 else SpinorField(f0.grid, values)
