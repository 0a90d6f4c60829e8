"""Exception hierarchy shared by the solver, experiment and CLI layers."""


class DiracError(Exception):
    """Base class for all errors raised by this package."""


class GridMismatchError(DiracError, ValueError):
    """Two objects that must live on the same grid do not."""


class ConfigurationError(DiracError, ValueError):
    """Invalid user-supplied parameter or configuration document."""


class BudgetError(DiracError, RuntimeError):
    """A requested computation exceeds the step budget.

    Attributes:
        required_steps: number of steps the computation would have needed.
        budget: the cap that was exceeded.
    """

    def __init__(self, required_steps: int, budget: int, what: str = "reference"):
        self.required_steps = int(required_steps)
        self.budget = int(budget)
        super().__init__(
            f"{what} needs {self.required_steps} steps, budget is {self.budget}; "
            f"raise the budget (--budget {self.required_steps}) or shorten the horizon"
        )


class SolverError(DiracError, RuntimeError):
    """An inner iteration failed to converge."""


class FitError(DiracError, ValueError):
    """Degenerate samples passed to an order fit."""


class SnapshotLookupError(DiracError, KeyError):
    """A reference snapshot was requested at a time that was never stored."""
