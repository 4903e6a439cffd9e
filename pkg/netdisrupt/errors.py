"""Exception hierarchy shared by the library and the CLI."""


class NetdisruptError(Exception):
    """Base class for all netdisrupt errors."""

    exit_code = 1


class ValidationError(NetdisruptError, ValueError):
    """Input data or arguments violate a documented precondition."""

    exit_code = 2


class ConfigError(ValidationError):
    """An analysis configuration file is missing, malformed, or inconsistent."""


class NumericalError(NetdisruptError, ArithmeticError):
    """A numerical routine (eigensolver, decomposition) failed."""

    exit_code = 3


class ReportStageError(NetdisruptError):
    """Wraps a failure inside the report pipeline with the stage that raised it."""

    def __init__(self, stage: str, cause: NetdisruptError):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
        self.exit_code = cause.exit_code
