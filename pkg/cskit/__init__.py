"""cskit - Cartan-Schouten metrics, bundle groups, quaternionic covers and screws."""

from importlib.metadata import version
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from cskit.config import Config
    from cskit.lie_core import LieAlgebra

__version__ = version("cskit")


def algebra(name: str) -> "LieAlgebra":
    """Get a built-in Lie algebra by name.

    Usage:
        import cskit
        so31 = cskit.algebra("so31")
        print(so31.labels)  # ('S1', 'S2', 'S3', 'S4', 'S5', 'S6')

    Args:
        name: One of so3, su2, sl2, so21, so31, h3, se3, se21

    Returns:
        LieAlgebra with structure constants in the fixed basis
    """
    from cskit.algebras import builtin

    return builtin(name)


def settings() -> "Config":
    """Get the effective configuration.

    Merges defaults, the user config file, cskit.toml of the current
    project and the CSKIT_SEED environment variable.
    """
    from cskit.config import load_config

    return load_config()
