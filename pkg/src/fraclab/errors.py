"""Exception hierarchy. One class per failure category used across modules."""


class FraclabError(Exception):
    """Base class for all library errors."""


class DomainError(FraclabError):
    """Point or spec outside the domain it is used on."""


class GeometryError(FraclabError):
    """Invalid or degenerate geometric construction."""


class ParameterError(FraclabError):
    """Numeric parameter outside its admissible range."""


class InputError(FraclabError):
    """Malformed or insufficient input data."""


class DegenerateInputError(InputError):
    """Structurally valid input too small to operate on."""


class ResolutionError(FraclabError):
    """Grid too coarse for the requested computation."""


class PreconditionError(FraclabError):
    """Documented operation precondition violated."""


class ConfigurationError(FraclabError):
    """Inconsistent study or layout configuration."""


class UnsupportedError(FraclabError):
    """Requested regime outside what the method supports."""
