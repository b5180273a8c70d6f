class RHMapError(Exception):
    exit_code = 3


class InputError(RHMapError, ValueError):
    """Bad input: wrong shape, wrong degree, unmet precondition."""

    exit_code = 1


class ParseError(InputError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class NotTwoStage(InputError):
    def __init__(self, generator: str, detail: str = ""):
        msg = f"not a two-stage Sullivan algebra: d({generator}) involves a non-closed generator"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.generator = generator


class InvariantError(RHMapError):
    """A structure fails one of its defining identities."""

    exit_code = 2

    def __init__(self, message: str, offender=None):
        super().__init__(message)
        self.offender = offender
