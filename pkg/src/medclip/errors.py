"""Exception types shared across the library."""


class ParameterError(ValueError):
    """A sampler or operator was called with an out-of-range parameter."""


class DomainError(ValueError):
    """A point lies outside the domain of a prox-function or its conjugate."""


class ScheduleError(ValueError):
    """A resolved schedule is invalid (e.g. median size too small for the
    tail index, or a mirror step left the conjugate's domain, which signals
    that the clipping level or stepsize is mis-tuned)."""


class ConfigError(ValueError):
    """An experiment config is missing required fields or has bad values."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge; carries its inputs."""


class DivergenceError(NumericalError):
    """A solver iterate became non-finite."""

    def __init__(self, message: str, step: int):
        super().__init__(f"{message} (step {step})")
        self.step = step
