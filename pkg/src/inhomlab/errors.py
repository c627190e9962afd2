"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class InhomError(Exception):
    """Base class for all library errors."""


class LiteralParseError(InhomError, ValueError):
    """A number, vector or psi literal could not be parsed (CLI exit 2)."""


class PrecisionExhausted(InhomError, ArithmeticError):
    """A comparison stayed undecided up to the precision ceiling (CLI exit 3).

    ``contested`` names the objects whose order could not be certified, for
    record scans this is the pair of times ``(t, t_prev)``.
    """

    def __init__(self, message, contested=None, precision=None):
        super().__init__(message)
        self.contested = contested
        self.precision = precision


class DomainError(InhomError, ValueError):
    """Inputs violate an operation's preconditions (CLI exit 4)."""


class DimensionMismatch(DomainError):
    pass


class CertificateRefuted(DomainError):
    """A witness certificate's majorant failed against a direct evaluation."""

    def __init__(self, message, precision=None):
        super().__init__(message)
        self.precision = precision
