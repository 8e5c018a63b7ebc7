"""Exception hierarchy shared by every module."""


class ContactLabError(Exception):
    """Base class for all errors raised by contactlab."""


# expressions

class ParseError(ContactLabError, SyntaxError):
    def __init__(self, position, expected, source=""):
        self.position = position
        self.expected = expected
        self.source = source
        super().__init__(f"syntax error at position {position}: expected {expected}")


class UnknownIdentifier(ContactLabError):
    def __init__(self, name, position=None):
        self.name = name
        self.position = position
        where = "" if position is None else f" at position {position}"
        super().__init__(f"unknown identifier {name!r}{where}")


class DomainError(ContactLabError, ArithmeticError):
    pass


# geometry

class ChartMismatch(ContactLabError):
    pass


class DegreeOverflow(ContactLabError):
    pass


class DimensionMismatch(ContactLabError):
    pass


class DegenerateTangentBasis(ContactLabError):
    pass


# contact

class EvenDimension(ContactLabError):
    pass


class SingularSystem(ContactLabError):
    def __init__(self, message, condition=float("inf")):
        self.condition = condition
        super().__init__(f"{message} (condition number {condition:.3e})")


class NotHorizontal(ContactLabError):
    pass


class NotSemibasic(ContactLabError):
    pass


class NotSymplectic(ContactLabError):
    pass


class NotTransverse(ContactLabError):
    def __init__(self, witness, ratio):
        self.witness = witness
        self.ratio = ratio
        super().__init__(f"Liouville field tangent to hypersurface at {witness} (|dS(Y)| ratio {ratio:.3e})")


class LiouvilleFailed(ContactLabError):
    pass


# hamiltonian / integrability

class NotContactField(ContactLabError):
    pass


class NotReebIntegral(ContactLabError):
    pass


class DegenerateFrequencyDenominator(ContactLabError):
    pass


class BadComponentList(ContactLabError):
    pass


# models

class BadParams(ContactLabError):
    pass


# flows

class LeftDomain(ContactLabError):
    def __init__(self, t, state):
        self.t = t
        self.state = state
        super().__init__(f"trajectory left the chart domain at t={t}")


class StepRejected(ContactLabError):
    pass


class NotLevelSet(ContactLabError):
    pass


# toric

class NotPrimitive(ContactLabError):
    pass


class EmptyInterior(ContactLabError):
    pass


class NotCoprime(ContactLabError):
    pass


class ZeroMomentValue(ContactLabError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"moment map vanishes at {witness}")


class NotGoodCone(ContactLabError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"cone is not good; failing face {witness}")


class RightInverseNotFound(ContactLabError):
    pass


# cli

class SceneError(ContactLabError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = "" if line is None else f"line {line}, column {column or 1}: "
        super().__init__(loc + message)
