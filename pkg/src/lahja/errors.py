"""Exception hierarchy shared by all pipeline stages."""


class LahjaError(Exception):
    """Base class for every error raised by the pipeline."""


class ParseError(LahjaError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class QuotaError(LahjaError):
    def __init__(self, stratum, needed, available):
        self.stratum = stratum
        self.shortfall = needed - available
        super().__init__(
            f"stratum {stratum!r} needs {needed} docs but only {available} available "
            f"(shortfall {self.shortfall})"
        )


class StratificationError(LahjaError):
    pass


class DomainError(LahjaError, ValueError):
    pass


class DegenerateTableError(DomainError):
    pass


class FitError(LahjaError):
    pass


class StateError(LahjaError):
    pass


class FormatError(LahjaError):
    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
