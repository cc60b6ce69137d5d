"""Exception hierarchy shared by all numerical modules."""


class GbmExfunError(ArithmeticError):
    """Base class for numerical failures raised by this package."""

    kind = "numerical_error"


class BranchError(GbmExfunError):
    """Square-root argument sits on (or too close to) the branch cut."""

    kind = "branch_error"


class PoleError(GbmExfunError):
    """Gamma or Kummer parameter at a nonpositive integer."""

    kind = "pole_error"


class NonConvergence(GbmExfunError):
    """A series did not reach tolerance within its iteration cap."""

    kind = "non_convergence"


class EvaluationError(GbmExfunError):
    """Result produced but its error estimate exceeds the requested tolerance."""

    kind = "evaluation_error"


class NodeFailure(GbmExfunError):
    """Transform evaluation failed at an inversion node, even after perturbation."""

    kind = "node_failure"
