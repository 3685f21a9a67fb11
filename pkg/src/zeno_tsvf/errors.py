"""Exception types raised by the engine.

Every exception carries a short machine-readable ``code`` which the CLI
copies into its single-line JSON error report.
"""


class ZenoError(Exception):
    code = "engine_error"


class InvalidParameterError(ZenoError, ValueError):
    code = "invalid_parameter"


class ContractViolation(ZenoError):
    code = "contract_violation"


class ImpossiblePostSelectionError(ZenoError):
    code = "impossible_post_selection"


class UndefinedABLError(ZenoError, ZeroDivisionError):
    code = "undefined_abl"


class CapacityError(ZenoError):
    code = "capacity_exceeded"


class PrecisionError(ZenoError, ArithmeticError):
    code = "precision"
