"""Exception types shared across the package."""


class DercrossError(Exception):
    pass


class ConfigurationError(DercrossError):
    """Incompatible generator sets, bad fixture parameters, invalid settings."""


class ShapeError(DercrossError, ValueError):
    pass


class DomainError(DercrossError, ValueError):
    """Argument outside the region where an operation is defined."""


class PreconditionError(DercrossError, ValueError):
    pass


class MembershipError(DercrossError, ValueError):
    """A matrix does not lie in the group it is claimed to belong to."""


class ConfigParseError(ConfigurationError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
