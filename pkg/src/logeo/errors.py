"""Exception hierarchy shared by every module."""


class LogeoError(Exception):
    pass


class ParseError(LogeoError):
    def __init__(self, message: str, pos: int | None = None, text: str | None = None):
        self.pos = pos
        self.text = text
        if pos is not None:
            message = f"{message} at position {pos}"
        super().__init__(message)


class SortError(LogeoError):
    """A variable, term or set used outside the sort it belongs to."""


class AlgebraError(LogeoError):
    """Malformed algebra document or violated variety identity."""


class GuardError(LogeoError):
    """A configured size guard would be exceeded."""
