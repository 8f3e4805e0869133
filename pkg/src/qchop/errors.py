"""Exception hierarchy for qchop.

Configuration problems (bad protocol parameters, malformed run configs) are
kept distinct from numerical failures (degenerate decay rate, divergent tail
sums) so the CLI can map them to different exit codes.
"""


class QchopError(Exception):
    """Base class for all qchop errors."""


class ConfigurationError(QchopError):
    """Invalid protocol parameters or run configuration."""


class NumericalError(QchopError):
    """A computation cannot proceed for numerical/physical reasons."""


class DegenerateKernelError(NumericalError):
    """The period-averaged decay rate vanishes; all tail sums diverge."""


class DivergentTailError(NumericalError):
    """Geometric tail ratio has magnitude >= 1; the infinite sum diverges."""


class ApproximationDomainError(NumericalError):
    """An asymptotic expansion was requested outside its domain (e.g. g=0)."""


class OracleBudgetError(QchopError):
    """A brute-force validation run would exceed its configured cost budget."""
