"""Exception types raised by the simulation modules."""


class McraqrError(Exception):
    """Base class for model and numeric errors (CLI exit code 1)."""


class SingularSystem(McraqrError):
    pass


class DenominatorUnderflow(McraqrError):
    pass


class StepTooLarge(McraqrError):
    pass


class LinearizationOutOfRange(McraqrError):
    pass


class IfCollision(McraqrError):
    pass


class PlanInfeasible(McraqrError):
    def __init__(self, message, carrier_index=None):
        super().__init__(message)
        self.carrier_index = carrier_index


class SubspaceDegenerate(McraqrError):
    pass


class DegenerateGeometry(McraqrError):
    pass


class SchemaError(ValueError):
    """Invalid scenario document; ``path`` names the offending field."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class UnitError(SchemaError):
    pass
