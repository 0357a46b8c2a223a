"""Exception hierarchy shared by the simulation, the CLI and the HTTP routes."""

from typing import Any, Optional


class FabsError(Exception):
    """Base class for every error raised by the package."""


class InvalidAngleError(FabsError, ValueError):
    def __init__(self, value: float):
        super().__init__(f"Angle must be finite, got {value!r}")
        self.value = value


class PreconditionError(FabsError, ValueError):
    pass


class ConfigError(FabsError):
    """A scenario value violates a validation rule.

    ``field`` and ``rule`` describe the first problem; ``problems`` lists all of
    them as ``(field, rule)`` pairs.
    """

    def __init__(self, field: str, rule: str, problems: Optional[list[tuple[str, str]]] = None):
        self.problems = problems or [(field, rule)]
        super().__init__("; ".join(f"{name}: {text}" for name, text in self.problems))
        self.field = field
        self.rule = rule


class ConfigParseError(FabsError):
    def __init__(self, message: str, line: Optional[int] = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line = line


class TraceFormatError(FabsError):
    def __init__(self, message: str, line: Optional[int] = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line = line


class InvariantViolationError(FabsError):
    """Raised in enforce mode when a model invariant fails after a tick."""

    def __init__(self, violations: list[Any]):
        first = violations[0]
        super().__init__(
            f"tick {first.tick}: {first.entity_kind} {first.entity_id} violates "
            f"{first.predicate} ({first.detail})"
        )
        self.violations = violations
        self.tick = first.tick
        self.entity_id = first.entity_id
        self.predicate = first.predicate
