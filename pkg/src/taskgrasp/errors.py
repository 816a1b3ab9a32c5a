"""Exception hierarchy shared across the package."""


class TaskGraspError(Exception):
    """Base class for all package errors."""


class PreconditionError(TaskGraspError, ValueError):
    pass


class ConfigError(TaskGraspError, ValueError):
    pass


class ShapeError(TaskGraspError, ValueError):
    pass


class NoValidPartsError(TaskGraspError):
    pass


class TemplateError(TaskGraspError, ValueError):
    pass


class ContractViolation(TaskGraspError, ValueError):
    pass


class ParseError(TaskGraspError, ValueError):
    def __init__(self, message: str, raw: str):
        super().__init__(message)
        self.raw = raw


class ProviderError(TaskGraspError):
    def __init__(self, message: str, cause: BaseException | None = None):
        super().__init__(message)
        self.cause = cause


class AttentionError(TaskGraspError):
    pass


class NumericalDivergenceError(TaskGraspError, ArithmeticError):
    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


class GeometryError(TaskGraspError, ValueError):
    pass


class InsufficientDataError(TaskGraspError, ValueError):
    pass


class GenerationError(TaskGraspError):
    pass


class StageError(TaskGraspError):
    """Wraps a failure inside a pipeline stage, tagging which stage broke."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause
