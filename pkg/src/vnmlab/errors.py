"""Exception and warning types shared across the package."""


class VnmError(Exception):
    """Base class for all errors raised by this package."""


class NonHermitianInput(VnmError):
    pass


class DimensionMismatch(VnmError):
    pass


class NotOrthonormal(VnmError):
    pass


class MutuallyOrthogonalPair(VnmError):
    """Two basis vectors are orthogonal, so the overlap table cannot be inverted."""

    def __init__(self, k, mu, overlap):
        self.k = k
        self.mu = mu
        self.overlap = overlap
        super().__init__(
            f"basis vectors k={k} and mu={mu} are orthogonal "
            f"(|overlap| = {abs(overlap):.3e})"
        )


class DegenerateProbe(VnmError):
    pass


class GridTooNarrow(VnmError):
    pass


class NotAProjector(VnmError):
    pass


class OrthogonalPostselection(VnmError):
    pass


class SingularInversion(VnmError):
    pass


class NegativeDensity(VnmError):
    pass


class TooFewSamples(VnmError):
    pass


class BoundaryLeak(UserWarning):
    """Wavepacket density has reached the edge of the grid."""


class ConditioningWarning(UserWarning):
    """Off-diagonal reconstruction is divided by a tiny factor; noise is amplified."""
