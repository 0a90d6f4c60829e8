"""Time-splitting Fourier pseudospectral solvers for the 1D Dirac equation
with small electromagnetic potentials, plus the error-study harness."""
from .errors import (
    BudgetError,
    ConfigurationError,
    DiracError,
    FitError,
    GridMismatchError,
    SnapshotLookupError,
    SolverError,
)
from .experiments import (
    ErrorRecord,
    OrderFit,
    ReferenceSolution,
    compute_reference,
    epsilon_scaling,
    error_at,
    fit_order,
    long_time_growth,
    spatial_sweep,
    temporal_convergence,
)
from .integrators import (
    SchemeKind,
    Stepper,
    build_stepper,
    evolve,
    ewi_step,
    fdm_step,
    fourth_step,
    lie_step,
    strang_step,
)
from .kernels import BACKEND
from .model import (
    FreeModeSystem,
    PotentialTable,
    build_free_modes,
    free_flow,
    potential_flow,
    sample_potentials,
)
from .presets import PRESETS, ProblemPreset, get_preset
from .spectral import (
    GridSpec,
    SpectralField,
    SpinorField,
    l2_norm,
    project,
    sobolev_norm,
    to_physical,
    to_spectral,
)

__version__ = "0.1.0"
