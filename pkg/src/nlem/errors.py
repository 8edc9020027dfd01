"""Exception types raised across the package."""


class NLEMError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(NLEMError, ValueError):
    """A scalar parameter is outside its allowed domain."""


class InvalidInputError(NLEMError, ValueError):
    """Array input has the wrong shape or non-finite entries."""


class DegenerateWeightsError(NLEMError, ValueError):
    """Weights are all zero (or the weight set is empty)."""


class PGMFormatError(NLEMError, ValueError):
    """Malformed or unsupported PGM data.

    ``offset`` is the byte position in the file where parsing failed.
    """

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset
