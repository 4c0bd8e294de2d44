"""Exception hierarchy shared by all tempora modules."""


class TemporaError(Exception):
    """Base class for every error raised by tempora."""


class OutOfRangeError(TemporaError, IndexError):
    pass


class PreconditionError(TemporaError, ValueError):
    pass


class InvalidTransformationError(TemporaError, ValueError):
    """A time scale transformation is not monotone or not surjective."""

    def __init__(self, message, tick=None):
        super().__init__(message)
        self.tick = tick


class InvalidConcatenationError(InvalidTransformationError):
    pass


class IncompatibleSignalsError(TemporaError, ValueError):
    pass


class IncompatibleSystemsError(TemporaError, ValueError):
    pass


class SystemValidationError(TemporaError, ValueError):
    pass


class UncoveredValueError(TemporaError, ValueError):
    def __init__(self, message, tick=None, value=None):
        super().__init__(message)
        self.tick = tick
        self.value = value


class BranchCapError(TemporaError, RuntimeError):
    pass


class HorizonOverflowError(TemporaError, RuntimeError):
    """A required concatenation needs ticks beyond the finite grid."""

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail


class ClosureLimitError(TemporaError, RuntimeError):
    pass


class GenerationExhaustedError(TemporaError, RuntimeError):
    pass


class DocumentError(TemporaError, ValueError):
    """Malformed system, relation, quantizer or CSV document."""

    def __init__(self, message, path=None, pointer=None, line=None):
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if pointer:
            where.append(pointer)
        full = f"{': '.join(where)}: {message}" if where else message
        super().__init__(full)
        self.path = path
        self.pointer = pointer
        self.line = line
