"""Exception hierarchy."""


class EsaError(ValueError):
    """Base class for all library errors."""


class NonPositiveWeight(EsaError):
    pass


class HorizonTooSmall(EsaError):
    pass


class TableExhausted(EsaError, IndexError):
    """A tabulated coefficient was sampled outside its range."""


class NotSphericallyHomogeneous(EsaError):
    pass


class UnknownVertex(EsaError, KeyError):
    pass


class EndIsComplete(EsaError):
    pass


class ZeroForm(EsaError):
    pass


class DomainMismatch(EsaError):
    pass


class NotAKernelElement(EsaError):
    pass


class SolveFailure(EsaError):
    pass


class PreconditionsNotMet(EsaError):
    def __init__(self, hypothesis: str, message: str = ""):
        self.hypothesis = hypothesis
        super().__init__(f"{hypothesis}: {message}" if message else hypothesis)


class IndexOutOfRange(EsaError, IndexError):
    pass


class DecayNotCertified(EsaError):
    pass


class DegenerateWronskian(EsaError):
    pass


class BorderlineEnd(EsaError):
    def __init__(self, ends):
        self.ends = list(ends)
        super().__init__(f"undecidable ends: {self.ends}")


class BadParams(EsaError):
    pass


class NoKernelCandidate(EsaError):
    pass


class FamilyFormatError(EsaError):
    """Malformed family description (JSON schema violations)."""
