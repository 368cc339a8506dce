"""Exception hierarchy for cskit.

Library code raises these; only the CLI turns them into exit codes.
"""


class CskitError(Exception):
    """Base class for all cskit errors."""


class ContractError(CskitError, ValueError):
    """Dimension, variant or group mismatch between operands."""


class DegenerateError(CskitError, ValueError):
    """A form, metric or parameter set is degenerate."""


class NonInvertibleError(DegenerateError):
    """Element has zero (or numerically zero) norm."""


class NoComplexStructureError(CskitError):
    """The centralizer K(G) does not carry a complex structure."""


class NumericalDriftError(CskitError, ArithmeticError):
    """A group product left the group beyond the membership tolerance."""


class ChartOverflowError(CskitError, ArithmeticError):
    """A chart point lies outside the principal domain of the logarithm."""


class AlgebraDocumentError(CskitError, ValueError):
    """An algebra document is malformed or fails the Jacobi identity."""


class ConfigError(CskitError, ValueError):
    """Invalid configuration value."""
