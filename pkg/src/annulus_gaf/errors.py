"""Exception types raised by the numerical routines."""


class AnnulusGafError(Exception):
    """Base class for all library errors."""


class NonConvergent(AnnulusGafError):
    """A product or series cannot converge for the given parameters."""


class ZeroArgument(AnnulusGafError):
    """Argument must lie in the punctured plane."""


class UnsupportedModulus(AnnulusGafError):
    """Modulus q outside the range supported in double precision."""


class PoleAtZero(AnnulusGafError):
    """Evaluation point coincides with a zero of theta (pole of the log derivative)."""


class PoleAtLattice(AnnulusGafError):
    """Angle coordinate falls on the period lattice."""


class PoleAtPowerOfQ(AnnulusGafError):
    """Kernel argument hit a pole at an integer power of q^2."""


class OutOfBranch(AnnulusGafError):
    """Inversion argument outside the real branch [e2, e1]."""


class OutOfAnnulus(AnnulusGafError):
    """Point outside the open annulus q < |z| < 1."""


class OutOfDisk(AnnulusGafError):
    """Point outside the open unit disk."""


class OutOfDomain(AnnulusGafError):
    """Point outside the requested kernel domain."""


class OutOfRange(AnnulusGafError):
    """Scalar argument outside the validity interval of a closed form."""


class DegenerateAnchor(AnnulusGafError):
    """Conditioning anchor makes the Schur recursion numerically singular."""


class DimensionMismatch(AnnulusGafError):
    """Array is not square / cubic of the expected size."""


class TruncationInsufficient(AnnulusGafError):
    """Laurent truncation tail is not negligible at the requested radius."""


class NonConvergedRoot(AnnulusGafError):
    """Newton polishing of a polynomial root stalled."""


class InsufficientStatistics(AnnulusGafError):
    """Too few Monte Carlo events to form the requested estimate."""
