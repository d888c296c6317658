"""fraclab: a numerical laboratory for fractional Sobolev seminorms,
pointwise composition operators, boundary Hardy inequalities, and
extension operators on bounded 1D/2D domains."""

from . import domains, errors, experiments, extension, hardy, nemytskii, norms
from ._pairsum import max_threads, use_threads

__version__ = "0.1.0"

__all__ = [
    "domains",
    "errors",
    "experiments",
    "extension",
    "hardy",
    "nemytskii",
    "norms",
    "use_threads",
    "max_threads",
    "__version__",
]
