"""Exception types raised by the library."""


class MomentSphereError(Exception):
    """Base class for all library errors."""


class DomainError(MomentSphereError, ValueError):
    """Argument outside the moment interval or a parameter out of range."""


class SingularityError(MomentSphereError, ValueError):
    """Evaluation requested at a point where the quantity blows up."""


class DivergenceError(MomentSphereError, ArithmeticError):
    """An integral or supremum that should be finite is not."""


class EmbeddabilityError(MomentSphereError, ValueError):
    """Profile slope exceeds the surface-of-revolution bound |slope| <= 2."""


class ClosureError(MomentSphereError, ValueError):
    """Profile data violates the boundary data required of a sphere metric."""


class DegenerateProfileError(MomentSphereError, ValueError):
    """Generating curve encloses zero area or is otherwise degenerate."""


class NormalizationError(MomentSphereError, ValueError):
    """Total surface area differs from the normalized value."""


class ParityError(MomentSphereError, ValueError):
    """Operation requires an even (equator-symmetric) metric."""


class ConvergenceError(MomentSphereError, RuntimeError):
    """An iterative solve failed; details carry iteration diagnostics."""


class TailSafetyError(MomentSphereError, RuntimeError):
    """Merged spectrum may be missing entries from truncating the mode range."""


class ConsistencyError(MomentSphereError, AssertionError):
    """Two independent evaluation routes disagree beyond tolerance."""
