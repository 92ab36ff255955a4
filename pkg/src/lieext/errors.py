"""Exception classes shared across the package."""


class LieExtError(Exception):
    """Base class for all package errors."""


class MalformedInputError(LieExtError):
    """Input arrays have inconsistent shapes or dimensions."""


class InvalidLatticeError(LieExtError):
    """Lattice generators are rank deficient."""


class NotACocycleError(LieExtError):
    """A 2-cochain required to be closed is not, within tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class TangentDecompositionError(LieExtError):
    """A matrix cannot be expressed in the realized algebra basis."""


class MembershipError(LieExtError):
    """A matrix is not in the group within the membership tolerance."""


class NotALoopError(LieExtError):
    """A path required to close (or a pair required to share endpoints) does not."""


class OpenChainError(LieExtError):
    """A 2-chain asserted to be a cycle has uncancelled boundary."""


class BoundaryMismatchError(LieExtError):
    """A bounding surface's boundary does not match the given loop."""


class UserFunctionError(LieExtError):
    """A user-supplied evaluable map raised during evaluation."""


class ExpressionError(LieExtError):
    """Syntax or evaluation error in a parametric expression."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class DocumentError(LieExtError):
    """Problem document is syntactically or structurally invalid."""


class UnresolvedReferenceError(DocumentError):
    """A name referenced in a problem document does not resolve."""
