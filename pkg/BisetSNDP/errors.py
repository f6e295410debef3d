"""
Exception hierarchy for BisetSNDP.
"""

from typing import Any, Optional, Tuple


class SNDPError(Exception):
    """Base class for every error raised by the package."""


class InvalidInstanceError(SNDPError):
    pass


class SchemaError(InvalidInstanceError):
    pass


class DuplicateEdgeError(InvalidInstanceError):
    pass


class DanglingDemandError(InvalidInstanceError):
    pass


class UnreliableDemandError(InvalidInstanceError):
    pass


class InfeasibleInstanceError(SNDPError):
    """The graph cannot meet a demand; carries the deficient pair and its cut."""

    def __init__(
        self,
        message: str,
        pair: Optional[Tuple[int, int]] = None,
        required: int = 0,
        achieved: int = 0,
        certificate: Any = None,
    ):
        super().__init__(message)
        self.pair = pair
        self.required = required
        self.achieved = achieved
        self.certificate = certificate


class InternalInvariantError(SNDPError):
    pass


class PreconditionError(SNDPError):
    pass


class ContractError(PreconditionError):
    pass


class DomainError(SNDPError):
    pass


class LaminarityError(SNDPError):
    def __init__(self, message: str, pair: Tuple[Any, Any]):
        super().__init__(message)
        self.pair = pair


class SizeRefusalError(SNDPError):
    pass
