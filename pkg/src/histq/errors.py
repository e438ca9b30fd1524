"""Exception types shared across the package."""


class CircuitError(Exception):
    """Base class for everything this package raises on purpose."""


class ParseError(CircuitError):
    """Circuit file rejected; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class ValidationError(CircuitError):
    """A circuit failed structural validation."""


class NonSequential(CircuitError):
    """The circuit cannot be scheduled as a left-to-right sequential circuit."""


class MaxWiresExceeded(CircuitError):
    """Internal wire count exceeds the evaluation guard."""


class UnboundWire(CircuitError):
    """A boundary end that must carry a value has none."""


class InterfaceMismatch(CircuitError):
    """Two circuits do not expose the same external wires."""
