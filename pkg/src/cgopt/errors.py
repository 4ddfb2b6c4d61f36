"""Exception hierarchy shared by the library and the CLI."""


class CgoptError(Exception):
    """Base class for all errors raised by cgopt."""


class ConfigurationError(CgoptError, ValueError):
    """Inconsistent parameters, bounds or dimensions."""


class DomainError(CgoptError, ValueError):
    """Argument outside the mathematical domain of a formula."""


class IngestionError(CgoptError):
    """A data or scenario file could not be parsed."""

    def __init__(self, message, path=None, line=None):
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(location + message)
        self.path = path
        self.line = line
