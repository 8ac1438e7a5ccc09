"""Shared exception types.

ConfigError maps to CLI exit code 2, NumericalError to exit code 3.
"""


class ConfigError(Exception):
    """Bad configuration, file format, or schema violation."""


class NumericalError(Exception):
    """Non-finite values or failed numerical invariants at runtime."""
