"""Exception types shared across the toolkit.

The CLI maps each class to a distinct process exit code, so keeping them
in one place keeps that mapping honest.
"""


class ConfigurationError(ValueError):
    """A network configuration outside the problem domain (e.g. U < 2)."""


class InfeasibleConfiguration(ValueError):
    """No secure scheme exists: the collusion level hits T >= (U-1)*V."""

    def __init__(self, U: int, V: int, T: int):
        self.U, self.V, self.T = U, V, T
        super().__init__(
            f"no scheme exists for U={U} V={V} T={T}: "
            f"T >= (U-1)*V = {(U - 1) * V}"
        )


class SchemeFormatError(ValueError):
    """A scheme document that does not match the interchange schema."""


class CorrectnessViolation(ValueError):
    """A scheme or transcript that cannot reproduce the input sum."""


class AuditBudgetExceeded(RuntimeError):
    """An exhaustive check would exceed its configured enumeration cap."""
