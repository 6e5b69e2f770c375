"""Exception types raised by the solver stack."""


class CFDimError(Exception):
    """Base class; the CLI maps every subclass to exit code 1."""


class OutOfDomain(CFDimError):
    """A point could not be located in any square of the mesh domain."""


class SymmetryViolation(CFDimError):
    """An image expected in the upper half plane landed below the real axis."""


class CorrectionTooLarge(CFDimError):
    """The lower interpolation correction reached 1; the mesh is too coarse for this s."""


class NoConvergence(CFDimError):
    pass


class OscillationDetected(NoConvergence):
    """Power iteration is cycling, which suggests a dominant complex or negative pair."""


class NoBracket(CFDimError):
    """The spectral radius curve was never driven across 1."""


class CertificateFailure(CFDimError):
    pass
