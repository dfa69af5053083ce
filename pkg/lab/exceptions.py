"""Error hierarchy shared by the computational modules and the CLI.

Input problems and numeric failures are kept apart so the management
commands can map them to distinct exit codes.
"""


class KnotLabError(Exception):
    """Base class for every error raised by the lab."""


class InputError(KnotLabError):
    """Bad data handed in from outside: diagrams, tables, flags."""


class DiagramError(InputError):
    pass


class UnknownKnotError(InputError):
    def __init__(self, name):
        super().__init__(f"Unknown knot '{name}'")
        self.name = name


class TableError(InputError):
    pass


class UsageError(InputError):
    pass


class NumericError(KnotLabError):
    """A computation could not be completed or certified."""


class CrossingBudgetError(NumericError):
    def __init__(self, crossings, limit):
        super().__init__(f"Diagram has {crossings} crossings, limit is {limit}")
        self.crossings = crossings
        self.limit = limit


class PrecisionError(NumericError):
    pass


class RamificationError(NumericError):
    def __init__(self, u, message="Path crosses a ramification point"):
        super().__init__(f"{message} near u={u}")
        self.u = u


class ConvergenceError(NumericError):
    pass


class IllConditionedError(NumericError):
    def __init__(self, condition, threshold):
        super().__init__(
            f"Normal equations ill-conditioned (cond={condition:.3e} > {threshold:.1e}); "
            f"widen the N range or raise the precision"
        )
        self.condition = condition
        self.threshold = threshold


class UnderdeterminedError(NumericError):
    pass


class VerificationError(NumericError):
    def __init__(self, index, message="Held-out verification failed"):
        super().__init__(f"{message} at N={index}")
        self.index = index


class PoleError(NumericError):
    def __init__(self, coefficient):
        super().__init__(f"Coefficient {coefficient} has a pole at s=1")
        self.coefficient = coefficient


class DegenerateError(NumericError):
    pass
