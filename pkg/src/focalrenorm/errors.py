"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


class BandError(DomainError):
    """An initial velocity lies outside the periodic band of a potential."""


class WindowError(DomainError):
    """A time ``t`` lies outside the admissible window for step ``n``."""


class IntegrationError(RuntimeError):
    """The ODE integrator failed or drifted beyond its energy budget."""
