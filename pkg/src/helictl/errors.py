"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class ConfigError(ValueError):
    """A scenario configuration is malformed or violates an invariant."""


class NumericalOverflowError(ArithmeticError):
    """A computed quantity became non-finite.

    ``component`` names the offending quantity, ``stage`` the pipeline stage
    that produced it and ``step`` the simulation step index (when known).
    """

    def __init__(self, message, component=None, stage=None, step=None):
        self.component = component
        self.stage = stage
        self.step = step
        super().__init__(message)

    def __str__(self):
        parts = [self.args[0] if self.args else "numerical overflow"]
        if self.component is not None:
            parts.append(f"component={self.component}")
        if self.stage is not None:
            parts.append(f"stage={self.stage}")
        if self.step is not None:
            parts.append(f"step={self.step}")
        return ", ".join(parts)
