"""Coprimality of Fourier coefficients of pairs of Hecke eigenforms.

Exact q-series for level-1 eigenforms, coefficient tables with a cached HTTP
client, counts for the maximal mod-m Galois image, and prime-counting
statistics over coefficient pairs.
"""

from .errors import (CacheCorruptionError, DataError, EigencoprimeError, FormatError,
                     InsufficientDataError, NetworkError, ValidationError)

__version__ = "0.1.0"

__all__ = [
    "CacheCorruptionError", "DataError", "EigencoprimeError", "FormatError",
    "InsufficientDataError", "NetworkError", "ValidationError", "__version__",
]
