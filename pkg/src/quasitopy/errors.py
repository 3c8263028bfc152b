"""Exception types shared by the whole package."""

from __future__ import annotations


class QscError(ValueError):
    """A semantic failure, tagged with a stable machine-readable ``code``."""

    def __init__(self, code: str, message: str = ""):
        self.code = code
        self.message = message
        super().__init__(f"{code}: {message}" if message else code)


class QscSyntaxError(QscError):
    """Positioned parse failure in a QSC document."""

    def __init__(self, line: int, column: int, token: str, message: str):
        self.line = line
        self.column = column
        self.token = token
        super().__init__(
            "SYNTAX_ERROR", f"line {line}, column {column} near {token!r}: {message}"
        )
