"""Exception hierarchy shared by all badkr modules."""


class BadkrError(Exception):
    pass


# -- number field construction / arithmetic -------------------------------

class NotTotallyReal(BadkrError):
    pass


class NotSquarefree(BadkrError):
    pass


class BasisNotClosed(BadkrError):
    pass


class ZeroElement(BadkrError):
    pass


class PrecisionExhausted(BadkrError):
    """A comparison could not be decided at the configured precision cap."""


# -- denominator sets / exclusion boxes ------------------------------------

class DenominatorNotAdmissible(BadkrError):
    pass


# -- game referee -----------------------------------------------------------

class ParameterOutOfRange(BadkrError):
    pass


class IllegalMove(BadkrError):
    pass


class NoFeasibleBall(BadkrError):
    pass


class ParseError(BadkrError):
    pass


# -- Alice's strategy --------------------------------------------------------

class UniquenessViolation(BadkrError):
    """Two distinct ratio points met the same ball cell.  Must never fire."""

    def __init__(self, ratio_a, ratio_b):
        super().__init__(f"distinct ratio points in one cell: {ratio_a} vs {ratio_b}")
        self.ratio_a = ratio_a
        self.ratio_b = ratio_b


class IncompleteEnumeration(BadkrError):
    pass


# -- lattice flows ------------------------------------------------------------

class SingularBasis(BadkrError):
    pass


class ConditionTooHigh(BadkrError):
    pass
