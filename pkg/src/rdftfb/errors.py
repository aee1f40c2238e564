"""Exception types shared by every module.

Each error carries a short machine-greppable ``code`` so the command line
front end can print ``error[CODE]: message`` regardless of where the failure
originated.
"""


class RdftfbError(ValueError):
    code = "E_RDFTFB"


class DesignInfeasibleError(RdftfbError):
    code = "E_DESIGN_INFEASIBLE"


class CoefficientParseError(RdftfbError):
    code = "E_PARSE"

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidFactorError(RdftfbError):
    code = "E_INVALID_FACTOR"


class AliasingError(RdftfbError):
    """Decimation factor violates the strict bound ``M * f_o < 1``."""

    code = "E_ALIASING"

    def __init__(self, factor, bandwidth):
        self.factor = factor
        self.bandwidth = bandwidth
        self.product = factor * bandwidth
        super().__init__(
            f"decimation factor M={factor} aliases: M*f_o = {self.product:.6g} >= 1 "
            f"(f_o = {bandwidth:.6g})"
        )


class EdgeNotFoundError(RdftfbError):
    code = "E_EDGE_NOT_FOUND"


class InvalidSubbandCountError(RdftfbError):
    code = "E_INVALID_SUBBANDS"


class NonFiniteSampleError(RdftfbError):
    code = "E_NONFINITE"


class StructuralError(RdftfbError):
    """Graph violates a structural invariant (arity, combinational cycle, ...)."""

    code = "E_STRUCTURE"

    def __init__(self, message, cycle=None):
        self.cycle = cycle
        super().__init__(message)


class InfeasibleBudgetError(RdftfbError):
    code = "E_BUDGET_INFEASIBLE"


class SelectRangeError(RdftfbError):
    code = "E_SELECT_RANGE"
