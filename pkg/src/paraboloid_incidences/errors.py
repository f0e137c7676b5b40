"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class SizeLimitError(DomainError):
    """The input is larger than the guard of an exhaustive routine allows."""


class DegenerateElimination(DomainError):
    """The defining hyperplanes cannot be solved for the eliminated coordinates."""


class NotElliptic(DomainError):
    """A conic (or a flat section of the paraboloid) is not a bounded ellipse."""


class NoIntegerSolutions(DomainError):
    """gcd(c1, c2, c3) does not divide c4, so the form has no integer zeros."""

    def __init__(self, message, gcd=None):
        super().__init__(message)
        self.gcd = gcd


class ArtifactParseError(ValueError):
    """Malformed artifact file; ``line`` is the 1-based offending line."""

    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}".strip())
        self.path = path
        self.line = line


class ConfigError(ValueError):
    """Invalid pipeline configuration."""
