"""Exception hierarchy shared across the toolkit.

Every domain error derives from :class:`PronkitError` so callers (and the
CLI) can distinguish validation failures from genuine bugs.
"""


class PronkitError(Exception):
    """Base class for all domain errors raised by pronkit."""


class LengthMismatchError(PronkitError):
    """Two sequences that must agree in length do not."""


class ShapeMismatchError(PronkitError):
    """Array arguments have incompatible shapes."""
