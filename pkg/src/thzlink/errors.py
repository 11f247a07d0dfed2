"""Exception types shared across the package."""


class InvalidModelError(ValueError):
    """A fading model or path-gain spec has out-of-range parameters."""


class NoAnalyticPdfError(TypeError):
    """The fading model has no closed-form amplitude density."""


class SingularChannelError(ZeroDivisionError):
    """A subcarrier gain is zero, so the channel cannot be inverted."""


class FramingError(ValueError):
    """Bit and symbol counts do not line up."""


class CodeConstructionError(ValueError):
    pass


class ConfigError(ValueError):
    """Configuration problems. ``errors`` holds every message found."""

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
