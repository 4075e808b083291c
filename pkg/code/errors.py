class ApproxError(Exception):
    pass

class InvalidDimension(ApproxError, ValueError):
    pass

class DimensionMismatch(ApproxError, ValueError):
    pass

class NotHermitian(ApproxError, ValueError):
    pass

class InvalidParameter(ApproxError, ValueError):
    pass

class GridTooLarge(InvalidParameter):
    pass

class EmptySupport(ApproxError, ValueError):
    pass

class SupportIndexError(ApproxError, IndexError):
    pass

class EmptyStateSet(ApproxError, ValueError):
    pass

class DegeneratePair(ApproxError, ArithmeticError):
    pass

class DegenerateTriple(ApproxError, ArithmeticError):
    pass

class FormatError(ApproxError, ValueError):
    pass

class UnknownFixture(ApproxError, KeyError):
    pass

class UnknownVariant(ApproxError, KeyError):
    pass
