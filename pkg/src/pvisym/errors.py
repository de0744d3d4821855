"""Exception hierarchy shared by every module of the package."""


class PviError(Exception):
    """Base class for all errors raised by pvisym."""


class PoleError(PviError, ValueError):
    """Gamma evaluated at (or within 1e-12 of) a non-positive integer."""


class DegenerateParameters(PviError, ValueError):
    """Parameters hit an integer-difference case the generic formulas exclude."""


class NonConvergence(PviError, RuntimeError):
    """A series or iterative procedure exhausted its budget."""


class SingularTime(PviError, ValueError):
    """t is one of the fixed singular points 0 or 1."""


class SingularConfiguration(PviError, ValueError):
    """A jet or frame sits on a singular locus (y in {0, 1, t}, ...)."""


class PoleEncountered(PviError, RuntimeError):
    """The Painleve trajectory blew up; ``t_star`` approximates the pole."""

    def __init__(self, t_star: complex, message: str = ""):
        self.t_star = t_star
        super().__init__(message or f"movable pole near t = {t_star}")


class WrongParameterStratum(PviError, ValueError):
    """Parameters are off the stratum an operation requires."""


class InconsistentSigns(PviError, ValueError):
    """Reserved: no alpha_2 satisfies the affine relation (cannot happen)."""


class IndeterminateAction(PviError, ValueError):
    """A Backlund generator's rational map has a vanishing denominator."""


class NonGenericParameters(PviError, ValueError):
    """A series recursion hit a singular order-k linear system."""

    def __init__(self, order: int, message: str = ""):
        self.order = order
        super().__init__(message or f"resonant linear system at order {order}")


class OutOfTrustRadius(PviError, ValueError):
    """Series evaluated outside its trust radius (or at its center pole)."""


class IndeterminateFrame(PviError, ValueError):
    """Symmetric-frame change of variables undefined at this point."""


class SingularTau(PviError, ValueError):
    """The symmetric-frame Hamiltonian is singular at this tau."""


class SingularPoint(PviError, ValueError):
    """x sits on a singular point of the linear equation."""


class PoleTooClose(PviError, ValueError):
    """A loop passes too close to a singular point."""


class GaugeMismatch(PviError, ValueError):
    """Representation is already in the requested gauge."""


class NotUnimodular(PviError, ValueError):
    """Trace coordinates requested for matrices that are not in SL(2, C)."""
