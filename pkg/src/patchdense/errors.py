"""Exception hierarchy."""


class PatchDenseError(Exception):
    pass


class OrderError(PatchDenseError):
    """The declared relation is not a partial order."""


class InvalidSubsetError(PatchDenseError, ValueError):
    pass


class NotMonotoneError(PatchDenseError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class LatticeError(PatchDenseError, ValueError):
    pass


class IsomorphismError(PatchDenseError):
    pass


class DepthError(PatchDenseError, IndexError):
    pass


class InvalidPointError(PatchDenseError):
    pass


class SectionError(PatchDenseError):
    def __init__(self, message, level=None, element=None):
        super().__init__(message)
        self.level = level
        self.element = element


class SupportError(PatchDenseError):
    pass


class ReconstructionError(PatchDenseError):
    pass


class ParseError(PatchDenseError):
    def __init__(self, message, path=None, line=None):
        where = f"{path or '<input>'}:{line}: " if line is not None else ""
        super().__init__(where + message)
        self.path = path
        self.line = line
