"""Exception hierarchy shared across the package."""


class MatconvError(Exception):
    """Base class for all package-specific errors."""


class ConstructionError(MatconvError):
    """Input data violates a structural invariant (non-Hermitian, bad shape, ...)."""


class ArityMismatchError(ConstructionError):
    """Pencil and point disagree on the number of variables or on levels."""


class SolverError(MatconvError):
    """An eigensolver or linear solver failed to converge; carries the residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class AmbiguousRankError(MatconvError):
    """Numerical rank decision lacks the required spectral gap."""

    def __init__(self, message, max_zero=None, min_nonzero=None):
        super().__init__(message)
        self.max_zero = max_zero
        self.min_nonzero = min_nonzero


class RankDeficientError(MatconvError):
    """A factor required to be surjective is rank deficient."""


class GramMismatchError(MatconvError):
    """Gram matrices of the two factors disagree beyond tolerance."""


class EquivalenceInconclusiveError(MatconvError):
    """Trace invariants match but no unitary witness was found within budget."""


class NotContractionError(MatconvError):
    """Conjugating matrix has operator norm above one."""


class NotInteriorError(MatconvError):
    """A point required to lie in the interior is on the boundary or outside."""


class RayUnboundedError(MatconvError):
    """No boundary crossing along the ray within the probing horizon."""


class PartitionOfUnityViolatedError(ConstructionError):
    """The gamma factors of a combination do not sum to the identity."""


class ZeroGammaError(ConstructionError):
    """Gamma factor is zero or violates the trace-one normalization."""


class InconsistentRowsError(MatconvError):
    """Linearly dependent affine rows carry conflicting targets."""


class NotVertexError(MatconvError):
    """The queried point is not a vertex of the polytope."""


class VerificationFailedError(MatconvError):
    """An a-posteriori verification of a computed certificate failed."""
