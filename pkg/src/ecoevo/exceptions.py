class EcoEvoError(Exception):
    """Base class for errors raised by this package."""


class InvalidParameterError(EcoEvoError, ValueError):
    pass


class DomainError(EcoEvoError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class PreconditionError(EcoEvoError, ValueError):
    pass


class StiffnessError(EcoEvoError, RuntimeError):
    """The adaptive step fell below ``min_step``.

    The trajectory integrated up to the failure is attached as ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
