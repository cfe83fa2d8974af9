"""Exception hierarchy.

Input problems derive from :class:`InputError` (CLI exit 3); a claimed result
whose own check fails raises :class:`VerificationFailure` (exit 4).
"""


class OdelinError(Exception):
    pass


class InputError(OdelinError):
    pass


class ParseError(InputError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.message = message
        self.pos = pos


class UndeclaredSymbolError(InputError):
    def __init__(self, name: str, pos: int):
        super().__init__(f"undeclared symbol {name!r} (at position {pos}); declare parameters explicitly")
        self.name = name
        self.pos = pos


class SingularPointError(OdelinError, ArithmeticError):
    def __init__(self, subexpr: str, reason: str = "division by zero"):
        super().__init__(f"{reason} in {subexpr}")
        self.subexpr = subexpr
        self.reason = reason


class NotIntegrable(OdelinError):
    pass


class NotCubic(InputError):
    pass


class DegenerateLeading(InputError):
    pass


class SingularJacobian(OdelinError):
    pass


class FirstIntegralCheckFailed(OdelinError):
    def __init__(self, kind: str, residual):
        super().__init__(f"total derivative of {kind} does not vanish: {residual}")
        self.kind = kind
        self.residual = residual


class AuxInvalid(OdelinError):
    pass


class AnsatzExhausted(OdelinError):
    pass


class NotInClass(OdelinError):
    pass


class Unsolved(OdelinError):
    pass


class NonConstant(OdelinError):
    pass


class GNotASolution(OdelinError):
    def __init__(self, residual):
        super().__init__(f"g does not solve the third-order auxiliary ODE; residual {residual}")
        self.residual = residual


class IntegrationUnavailable(OdelinError):
    pass


class BasisInvalid(OdelinError):
    pass


class AllSamplesSingular(OdelinError):
    pass


class SingularTrajectory(OdelinError):
    pass


class VerificationFailure(OdelinError):
    pass
