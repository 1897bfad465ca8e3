"""Exception hierarchy shared by all modules."""


class SpinQCorrError(Exception):
    """Base class for every error raised by the package."""


class HermiticityError(SpinQCorrError, ValueError):
    def __init__(self, asymmetry: float):
        super().__init__(f"matrix is not Hermitian: max |M - M^H| = {asymmetry:.3e}")
        self.asymmetry = asymmetry


class DimensionError(SpinQCorrError, ValueError):
    pass


class InvalidStateError(SpinQCorrError, ValueError):
    pass


class DomainError(SpinQCorrError, ValueError):
    pass


class ConvergenceError(SpinQCorrError, ArithmeticError):
    """Adaptive quadrature ran out of budget; keeps the best estimate."""

    def __init__(self, estimate: float, error: float, evaluations: int):
        super().__init__(
            f"quadrature did not converge after {evaluations} evaluations: "
            f"estimate={estimate!r}, error bound={error:.3e}"
        )
        self.estimate = estimate
        self.error = error
        self.evaluations = evaluations


class ContourIntegrityError(SpinQCorrError, ArithmeticError):
    def __init__(self, real: float, imag: float):
        super().__init__(
            f"contour integral has imaginary part {imag:.3e} (real part {real!r}); "
            "integrand is not symmetric on the shifted line"
        )
        self.real = real
        self.imag = imag


class InvalidCorrelatorError(SpinQCorrError, ValueError):
    pass


class MinimizerError(SpinQCorrError, ArithmeticError):
    pass


class BracketError(SpinQCorrError, ValueError):
    pass


class ValidationError(SpinQCorrError, AssertionError):
    def __init__(self, message: str, residuals: dict | None = None):
        super().__init__(message)
        self.residuals = residuals or {}
