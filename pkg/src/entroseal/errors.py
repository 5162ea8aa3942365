"""Exception hierarchy and wire-format error codes."""

from __future__ import annotations

import enum


class EntrosealError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(EntrosealError):
    """A requested configuration is unsupported (e.g. unknown backend)."""


class PreconditionError(EntrosealError, ValueError):
    """An input violates a documented precondition."""


class LengthError(PreconditionError):
    """Bit-length mismatch between operands or against a declared size."""


class ParameterError(EntrosealError, ValueError):
    """Scheme parameters are out of their admissible range."""


class BudgetError(EntrosealError):
    """An exhaustive computation would exceed the configured work budget.

    The message names the budget that would be required so callers can
    re-run with an explicit override.
    """


class EntropyError(EntrosealError):
    """The configured randomness source failed to produce bits."""


class DominationError(EntrosealError):
    """A state does not lie in the support of the conditioning operator.

    Raised when a pseudo-inverse square root is requested for a side
    operator whose kernel overlaps the state being conditioned.
    """


class WireErrorCode(enum.Enum):
    BAD_MAGIC = "bad_magic"
    BAD_VERSION = "bad_version"
    BAD_MODE = "bad_mode"
    TRUNCATED = "truncated"
    LENGTH_MISMATCH = "length_mismatch"
    NONZERO_PADDING = "nonzero_padding"
    BAD_PARAMS = "bad_params"


class FormatError(EntrosealError):
    """A serialized ciphertext failed validation.

    Attributes
    ----------
    code : WireErrorCode
        Machine-readable reason, stable across releases.
    """

    def __init__(self, code: WireErrorCode, message: str) -> None:
        super().__init__(message)
        self.code = code
