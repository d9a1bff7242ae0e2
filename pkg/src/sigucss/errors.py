"""Exception hierarchy shared by all pipeline stages."""


class SigUcssError(Exception):
    """Base class for every error raised by this package."""


class InputError(SigUcssError, ValueError):
    """An argument violates a documented precondition."""


class ParseError(InputError):
    """A point file row could not be parsed."""

    def __init__(self, path, lineno, message):
        self.path = path
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")


class FormatError(InputError):
    """A point or image file is well-formed text but semantically invalid."""


class CatalogError(SigUcssError):
    pass


class EnrollmentError(SigUcssError):
    pass


class ScoringError(SigUcssError):
    pass


class ProtocolError(SigUcssError):
    pass


class GenerationError(SigUcssError):
    pass


class TallyError(SigUcssError):
    pass
