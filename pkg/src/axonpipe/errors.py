"""Kernel error types. Every error carries a stable string code used by the
script runner and the HTTP service."""

from __future__ import annotations

ERRORS_BY_CODE: dict[str, type] = {}


class KernelError(Exception):
    """Base for all scheme-kernel errors."""

    http_status = 409

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        ERRORS_BY_CODE[cls.__name__] = cls

    @property
    def code(self) -> str:
        return type(self).__name__


# scheme-core
class ZeroLengthPipe(KernelError):
    pass

class UnknownId(KernelError):
    http_status = 404


# projection-geometry
class BadStep(KernelError):
    pass


# edit-ops
class DegenerateLine(KernelError):
    pass

class BadInterval(KernelError):
    pass

class DirParallelToPipe(KernelError):
    pass

class EndConnected(KernelError):
    pass

class OffAxis(KernelError):
    pass

class ScopeForbidden(KernelError):
    pass

class NotCoincident(KernelError):
    pass

class AlreadyConnected(KernelError):
    pass

class SamePipe(KernelError):
    pass

class BadParameter(KernelError):
    pass

class PointOccupied(KernelError):
    pass

class NoContinuation(KernelError):
    pass

class JunctionLocked(KernelError):
    pass

class NotClosed(KernelError):
    pass

class OffPipe(KernelError):
    pass

class DoesNotFit(KernelError):
    pass

class NoConnections(KernelError):
    pass

class NotCrossing(KernelError):
    pass


# symbol-lib
class DegenerateAxis(KernelError):
    pass

class NoHostPipe(KernelError):
    pass

class RaysIncompatible(KernelError):
    pass

class CutCollision(KernelError):
    pass

class NoFreeSlot(KernelError):
    pass

class AngleTooLarge(KernelError):
    pass

class UnknownSymbol(KernelError):
    http_status = 404


# annotate-spec
class TooFewOrigins(KernelError):
    pass

class VariantNotAdmissible(KernelError):
    pass

class OnlyOneLeader(KernelError):
    pass

class AlreadyMain(KernelError):
    pass

class DuplicateNumber(KernelError):
    pass

class DesignatorExists(KernelError):
    pass

class WrongPositionCount(KernelError):
    pass

class UnknownCatalogCode(KernelError):
    http_status = 404

class NoDesignator(KernelError):
    pass

class DuplicateCode(KernelError):
    pass


# persistence-cli
class ParseError(KernelError):
    http_status = 400

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line

class IoError(KernelError):
    http_status = 400

class VersionMismatch(KernelError):
    http_status = 400

class UnknownVerb(KernelError):
    http_status = 404

class StaleToken(KernelError):
    pass

class PortInUse(KernelError):
    pass
