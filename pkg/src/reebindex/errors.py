"""Exception hierarchy shared by all modules.

Degenerate-input conditions and hard numerical failures are kept apart so
the command line front end can map them to distinct exit codes.
"""


class NumericsError(Exception):
    """Base class for every error raised by this package."""


class DegenerateInput(NumericsError):
    """Input sits on (or too close to) a degenerate stratum."""


# -- linear algebra ---------------------------------------------------------

class NotSymplectic(DegenerateInput):
    pass


class ShapeMismatch(NumericsError):
    pass


# -- crossing-form indices --------------------------------------------------

class DegenerateCrossing(DegenerateInput):
    pass


class CrossingClusterTooDense(NumericsError):
    pass


class DegeneratePath(DegenerateInput):
    pass


class DegeneratePair(DegenerateInput):
    pass


class PreconditionViolated(DegenerateInput):
    pass


# -- integration / spectra --------------------------------------------------

class IntegratorFailure(NumericsError):
    pass


class NonSymplecticDrift(NumericsError):
    pass


class WindowTooCoarse(NumericsError):
    pass


class ZeroEigenfunction(NumericsError):
    pass


class DegenerateSpectrum(DegenerateInput):
    pass


class KernelNonTrivial(DegenerateInput):
    pass


class SymmetryViolated(NumericsError):
    pass


# -- surfaces and orbits ----------------------------------------------------

class NotOnSurface(DegenerateInput):
    pass


class VanishingPairing(DegenerateInput):
    pass


class NoConvergence(NumericsError):
    pass


class FrameDegenerate(NumericsError):
    pass


class MethodDisagreement(NumericsError):
    """The crossing-form and spectral index computations disagree.

    Carries both values; this is the package's primary failure alarm.
    """

    def __init__(self, message, crossing=None, spectral=None):
        super().__init__(message)
        self.crossing = crossing
        self.spectral = spectral


class DegenerateOrbit(DegenerateInput):
    pass


# -- surfaces of section ----------------------------------------------------

class EscapeTimeout(NumericsError):
    pass


class EdgeTooClose(DegenerateInput):
    pass


class QuadratureNoConvergence(NumericsError):
    pass


class DegenerateRatio(UserWarning):
    """Warning: the two ellipsoid radii are too close to separate the orbits."""
