"""Exception hierarchy shared by every analysis stage."""


class QdfaError(Exception):
    """Base class for all errors raised by qdfa."""


class InvalidChannelError(QdfaError, ValueError):
    """Input data does not describe an admissible channel (shape, picture, positivity)."""


class NumericFailure(QdfaError, ArithmeticError):
    """A numerical routine failed or was too ill-conditioned to trust."""


class ConsistencyError(QdfaError):
    """Two routes to the same mathematical object disagreed beyond tolerance.

    ``witness`` carries whatever identifies the offending object (a matrix, a
    basis index pair, a residual) so the failure can be reproduced.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
