"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class SectorialError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(SectorialError, ValueError):
    pass


class NotHermitian(SectorialError, ValueError):
    def __init__(self, deviation: float, role: str = "gram"):
        self.deviation = deviation
        self.role = role
        super().__init__(f"{role} is not Hermitian (max deviation {deviation:.3e})")


class NotPositiveDefinite(SectorialError, ValueError):
    def __init__(self, eigenvalue: float, role: str = "gram"):
        self.eigenvalue = eigenvalue
        self.role = role
        super().__init__(f"{role} is not positive definite (eigenvalue {eigenvalue:.6e})")


class SingularGram(SectorialError, ArithmeticError):
    pass


class NotInvertible(SectorialError, ValueError):
    pass


class NotCoercive(SectorialError, ArithmeticError):
    """The Hermitian part of the form is not positive definite w.r.t. the V metric."""

    def __init__(self, eigenvalue: float, witness=None):
        self.eigenvalue = eigenvalue
        self.witness = witness
        super().__init__(f"form is not coercive (smallest eigenvalue {eigenvalue:.6e})")


class SolveFailed(SectorialError, ArithmeticError):
    def __init__(self, message: str, condition: float):
        self.condition = condition
        super().__init__(f"{message} (condition number {condition:.3e})")


class InvariantViolation(SectorialError, AssertionError):
    """A post-condition that must hold mathematically failed numerically."""


class VertexTooLarge(SectorialError, ValueError):
    def __init__(self, gamma: float, eigenvalue: float):
        self.gamma = gamma
        self.eigenvalue = eigenvalue
        super().__init__(
            f"vertex {gamma} is too large: Re a - gamma*|.|^2 has eigenvalue {eigenvalue:.6e}"
        )


class InfiniteSemiAngle(SectorialError, ArithmeticError):
    pass


class NegativeUnderRoot(SectorialError, ArithmeticError):
    pass


class VertexNotZero(SectorialError, ValueError):
    pass


class OutsideDomain(SectorialError, ValueError):
    def __init__(self, z: complex, radius: float):
        self.z = z
        self.radius = radius
        super().__init__(f"|z| = {abs(z):.6g} exceeds the domain radius {radius:.6g}")


class NotNormalized(SectorialError, ValueError):
    pass


class EvaluationFailure(SectorialError, RuntimeError):
    def __init__(self, node: int, z: complex, cause: Exception):
        self.node = node
        self.z = z
        self.cause = cause
        super().__init__(f"evaluation failed at node {node} (z = {z:.6g}): {cause}")


class LambdaInSpectrum(SectorialError, ArithmeticError):
    pass


class NodeSpectrumHit(SectorialError, ArithmeticError):
    def __init__(self, node: int, z: complex):
        self.node = node
        self.z = z
        super().__init__(f"lambda lies in the spectrum of A_z at node {node} (z = {z:.6g})")


class SingularStep(SectorialError, ArithmeticError):
    pass


class NonPositiveLambda(SectorialError, ValueError):
    pass


class UniformBoundUnverified(SectorialError, ArithmeticError):
    def __init__(self, z: complex, t: complex, value: float, bound: float):
        self.z = z
        self.t = t
        self.value = value
        self.bound = bound
        super().__init__(
            f"||T_z(t)|| = {value:.6e} exceeds M*exp(omega*t) = {bound:.6e} at z = {z:.6g}, t = {t:.6g}"
        )


class SectorTooWide(SectorialError, ValueError):
    pass


class BoundViolated(UniformBoundUnverified):
    pass


class UnknownDemo(SectorialError, KeyError):
    pass


class ConfigError(SectorialError):
    """Base for configuration failures (exit code 2)."""


class ParseError(ConfigError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{loc}")


class SchemaError(ConfigError):
    def __init__(self, message: str, location: str):
        self.location = location
        super().__init__(f"{location}: {message}")


class ValidationError(ConfigError):
    def __init__(self, message: str, role: str, location: str | None = None):
        self.role = role
        self.message = message
        self.location = location or role
        super().__init__(message)

    def __str__(self):
        # location may be refined with a line number after construction
        return f"{self.location}: {self.message}"
