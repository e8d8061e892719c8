"""Exception types shared across the package."""


class LatrankError(Exception):
    pass


class ReduciblePolynomialError(LatrankError):
    """Raised when a defining polynomial fails the irreducibility check."""


class SingularBasisError(LatrankError):
    """Raised when a supplied integral basis is singular."""


class PrecisionError(LatrankError):
    """Raised when embedding precision is insufficient for a requested operation."""


class FieldMismatchError(LatrankError):
    """Raised when elements of different fields are combined."""


class NotIntegralError(LatrankError):
    """Raised when an operation requires integral coordinates."""


class ExactNormUnavailableError(LatrankError):
    """Raised for fields where complex conjugation is not a field automorphism,
    so the trace pairing Tr(x*conj(y)) is not rational-valued."""


class MembershipError(LatrankError):
    """Raised when a claimed sublattice is not contained in its ambient lattice."""


class EnumerationCapError(LatrankError):
    """Raised when a short-vector enumeration would exceed the configured cap.

    Carries the volume-based point count estimate that triggered the abort.
    """

    def __init__(self, estimate, cap, radius):
        self.estimate = estimate
        self.cap = cap
        self.radius = radius
        super().__init__(
            f"enumeration aborted: estimated ~{estimate:.3g} lattice points "
            f"within radius {radius:.6g} exceeds cap {cap}"
        )


class ValidationError(LatrankError):
    """Raised on invalid run configurations. Message names the violated constraint."""
