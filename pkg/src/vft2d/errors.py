"""Exception hierarchy.

Structural problems (bad shapes, malformed input) derive from ``ValueError``
so callers that only care about "bad input" can catch that.  Numerical
certification failures get their own branch because the CLI maps them to a
distinct exit code.
"""


class VFTError(Exception):
    """Base class for every error raised by this package."""


class StructureError(VFTError, ValueError):
    """Input data has the wrong shape or is otherwise malformed."""


class NoUnitError(VFTError, ArithmeticError):
    """The algebra has no unit (the unit equations are inconsistent)."""


class DegeneratePairingError(VFTError, ArithmeticError):
    """The Frobenius pairing is singular."""


class DuplicateEigenvalueError(StructureError):
    pass


class InvalidBlockError(VFTError, ValueError):
    """A Frobenius block failed validation while building a theory."""

    def __init__(self, eigenvalue, report):
        self.eigenvalue = eigenvalue
        self.report = report
        failed = ", ".join(c.name for c in report.failures())
        super().__init__(f"block at lambda={eigenvalue!r} fails: {failed}")


class CompositionError(StructureError):
    """Bordisms (or elementary pieces) cannot be composed."""


class TruncationError(VFTError, ArithmeticError):
    """A spectral tail cannot be certified below the requested tolerance."""


class LorentzianLabelError(VFTError, ValueError):
    """Imaginary labels reached the Euclidean evaluator; use the Lorentzian path."""


class NoLorentzianLimitError(VFTError, ValueError):
    """Closed components have no Lorentzian value."""


class NotNormalizedError(VFTError, ValueError):
    """Long-distance limit requested on a spectrum whose ground level is not 0."""


class NonDominantWeightError(VFTError, ValueError):
    pass


class UnsupportedGroupError(VFTError, ValueError):
    pass


class SingularMetricError(VFTError, ValueError):
    pass


class NotAllowableError(VFTError, ValueError):
    pass


class MixedDensityError(VFTError, ValueError):
    """A component mixes densities of different real-part signs."""
