"""Exception hierarchy shared by every layer of the package."""


class LLGError(Exception):
    """Base class for all errors raised by this package."""


class DivisionByZero(LLGError, ZeroDivisionError):
    pass


class DomainError(LLGError, ValueError):
    """An elementary function was evaluated outside its real domain."""

    def __init__(self, fn, value):
        super().__init__(f"{fn} undefined at {value!r}")
        self.fn = fn
        self.value = value


class SeedError(LLGError, IndexError):
    pass


class ExprSyntaxError(LLGError):
    def __init__(self, position, expected, source=""):
        super().__init__(f"syntax error at position {position}: expected {expected}"
                         + (f" in {source!r}" if source else ""))
        self.position = position
        self.expected = expected


class UnknownIdentifier(LLGError):
    def __init__(self, name):
        super().__init__(f"unknown identifier {name!r}")
        self.name = name


class VariableOutOfRange(LLGError):
    def __init__(self, name, dim):
        super().__init__(f"variable {name!r} out of range for dimension {dim}")
        self.name = name
        self.dim = dim


class ArityError(LLGError):
    pass


class ShapeMismatch(LLGError, ValueError):
    pass


class SingularFraming(LLGError):
    def __init__(self, point):
        super().__init__(f"framing matrix is singular at {tuple(point)}")
        self.point = tuple(point)


class DomainBoundary(LLGError):
    def __init__(self, point, domain=None):
        super().__init__(f"point {tuple(point)} lies outside the domain box")
        self.point = tuple(point)
        self.domain = domain


class DomainEscape(DomainBoundary):
    """The developed image left the domain box during integration."""


class NotFlat(LLGError):
    def __init__(self, certificate=None):
        super().__init__("framing failed flatness certification")
        self.certificate = certificate


class OddDimension(LLGError):
    def __init__(self, dim):
        super().__init__(f"structure requires even dimension, got {dim}")
        self.dim = dim


class UnknownExample(LLGError, KeyError):
    def __init__(self, name):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"unknown example {self.name!r}"


class UnknownTensor(LLGError):
    pass


class FramingFormatError(LLGError, ValueError):
    pass
