"""Exception hierarchy; the CLI maps each family to an exit code."""


class EigencoprimeError(Exception):
    exit_code = 1


class DataError(EigencoprimeError):
    """Bad, missing or inconsistent coefficient data (exit code 2)."""

    exit_code = 2


class FormatError(DataError):
    pass


class ValidationError(DataError):
    pass


class InsufficientDataError(DataError):
    pass


class CacheCorruptionError(DataError):
    pass


class NetworkError(EigencoprimeError):
    exit_code = 3
