"""Exception types raised across the package."""


class TdrError(Exception):
    """Base class for all package errors."""


class ParseError(TdrError, ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class CapacityError(TdrError):
    pass


class InvalidParam(TdrError, ValueError):
    pass


class PatternSyntaxError(TdrError, ValueError):
    def __init__(self, offset: int, message: str):
        super().__init__(f"offset {offset}: {message}")
        self.offset = offset


class UnknownLabel(TdrError, KeyError):
    pass


class PatternTooComplex(TdrError):
    pass


class TooManyRequiredLabels(TdrError):
    pass


class FormatError(TdrError):
    pass


class QuotaUnmet(TdrError):
    def __init__(self, kind: str, polarity: bool, found: int, wanted: int):
        pol = "true" if polarity else "false"
        super().__init__(f"{kind}/{pol}: found {found} of {wanted} queries")
        self.kind = kind
        self.polarity = polarity


class MismatchError(TdrError):
    def __init__(self, offenders):
        self.offenders = list(offenders)
        head = ", ".join(str(o) for o in self.offenders[:5])
        super().__init__(f"{len(self.offenders)} answers disagree with ground truth: {head}")
