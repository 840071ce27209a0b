"""Errors raised by the python_evqkan library.

Every error carries a human readable message and an id string, so callers can
tell failures apart without parsing messages:

    try:
        qsim.apply_ry(state, 5, 0.1)
    except InvalidArgumentError as e:
        if e.id == "QubitOutOfRange":
            ...
"""


class EvqkanError(Exception):
    """Base class of all library errors"""

    def __init__(self, message, Eid):
        super().__init__(message)
        self.message = message
        self.id = Eid


class InvalidArgumentError(EvqkanError):
    """An argument violates the precondition of an operation"""


class DegenerateStateError(EvqkanError):
    """A non-unitary operation produced a state with zero norm"""


class EmptyInputError(EvqkanError):
    """An aggregate was requested over an empty collection"""


class OptimizerError(EvqkanError):
    """Error involving the optimizer configuration or run"""


class HarnessError(EvqkanError):
    """Error involving experiment configuration or result persistence"""
