"""Exception hierarchy shared by every module.

``DomainError`` marks failures that come from the mathematics (a measure that
is not in the requested subalgebra, a matrix whose determinant is not one,
...).  The CLI turns these into exit status 1; anything else is a bug.
"""


class DomainError(ValueError):
    """Base class for mathematically meaningful failures."""

    #: short machine-readable tag used in CLI error payloads
    kind = "domain_error"


class MembershipError(DomainError):
    kind = "membership_violation"


class HalfPlaneError(DomainError):
    kind = "half_plane_violation"


class NeumannError(DomainError):
    """Neumann series not applicable: no dominant atom at the origin.

    This says nothing about invertibility in general, only that the series
    route is unavailable.
    """

    kind = "not_neumann_invertible"


class DeterminantError(DomainError):
    kind = "determinant_not_one"


class DegenerateError(DomainError):
    kind = "numerical_degeneracy"


class FormatError(DomainError):
    kind = "parse_error"


class CertificateError(DomainError):
    """A computable bound needed by a construction does not hold."""

    kind = "certificate_failed"
