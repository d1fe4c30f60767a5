"""Exception taxonomy.

Two top-level families, mirroring the CLI exit codes: ParameterError (bad
parameter values or call contracts, exit 2) and InputError (bad input files
or unsatisfiable input data, exit 1).
"""

from __future__ import annotations


class DropmeterError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(DropmeterError, ValueError):
    """A parameter value is out of range or violates a call contract."""


class DistortionError(ParameterError):
    """Physical card and image aspect ratios disagree beyond tolerance."""


class InputContractError(ParameterError):
    """Inputs to an operation violate its documented precondition."""


class InputError(DropmeterError):
    """An input file or payload cannot be used."""


class DecodeError(InputError):
    """Image file is missing, truncated, or in an unsupported format."""


class CardSpecError(InputError):
    """A synthetic-card spec file or spec object is invalid."""


class CapacityError(InputError):
    """Disk placement failed: the card cannot hold the requested disks."""


class EmptyMaskError(InputError):
    """The operation is undefined on a mask with no foreground pixels."""
