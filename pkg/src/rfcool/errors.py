"""Exception hierarchy shared by the library and the CLI.

Every exception carries a short machine-readable ``code`` and the process
exit status the CLI should use when it escapes to the top level.
"""

from __future__ import annotations


class RfcoolError(Exception):
    code = "error"
    exit_code = 3


class InvalidSpecError(RfcoolError, ValueError):
    """A physical parameter set violates its invariants."""

    code = "invalid-spec"
    exit_code = 2


class ConfigError(RfcoolError):
    """One or more problems in a run configuration.

    ``errors`` collects every problem found, not just the first.
    """

    code = "config-error"
    exit_code = 2

    def __init__(self, errors: list[str] | str):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class ConfigParseError(ConfigError):
    code = "parse-error"

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(f"{where}{message}")


class UnknownParameterPathError(ConfigError):
    code = "unknown-parameter-path"


class NumericalError(RfcoolError):
    code = "numerical-failure"
    exit_code = 3


class GapClosureError(NumericalError):
    code = "gap-closure"


class StepTooLargeError(NumericalError):
    code = "step-too-large"


class TooShortTrajectoryError(NumericalError):
    code = "too-short-trajectory"


class NonDecayingSignalError(NumericalError):
    code = "non-decaying-signal"


class UndersampledInputError(NumericalError):
    code = "undersampled-input"


class UnstableSystemError(RfcoolError):
    """Net damping is not positive where a stable system is required."""

    code = "unstable-system"
    exit_code = 4
