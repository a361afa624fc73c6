"""Exception types shared across the package."""


class FocusError(Exception):
    """Base class for all errors raised by focusst."""


class IntervalIndexError(FocusError, IndexError):
    pass


class EmptyIntervalError(FocusError):
    """First-element access on an empty time interval."""


class SelectorError(FocusError):
    """Record selector applied to a value of a different variant."""


class InvalidGranularity(FocusError, ValueError):
    pass


class InvalidArgument(FocusError, ValueError):
    pass


class TypeMismatch(FocusError, TypeError):
    pass


class EmptySubcomponents(FocusError, ValueError):
    pass


class CausalityCycle(FocusError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("causality cycle: " + " -> ".join(self.cycle))


class UnknownReference(FocusError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown reference"


class SpecError(FocusError):
    """Parsing or validation failed; carries the collected diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0] if self.diagnostics else None
        super().__init__(str(first) if first else "invalid specification")


class ConfigurationError(FocusError):
    """A network, property binding or run request that cannot be executed."""


class StepError(FocusError):
    """An unexpected failure while executing one time interval."""

    def __init__(self, step, cause):
        self.step = step
        self.cause = cause
        super().__init__(f"step {step}: {type(cause).__name__}: {cause}")
