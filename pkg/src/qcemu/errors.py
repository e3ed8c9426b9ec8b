"""Exception hierarchy shared by all qcemu modules."""


class QcemuError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(QcemuError, ValueError):
    pass


class QubitIndexError(QcemuError, ValueError):
    """A qubit or basis index is out of range, duplicated, or clashes."""


class AllocationError(QcemuError, MemoryError):
    """The requested state or matrix would not fit in memory."""


class NormalizationError(QcemuError, ValueError):
    pass


class ZeroProbabilityError(QcemuError, ValueError):
    pass


class RegisterNotClearError(QcemuError, ValueError):
    """Amplitude found outside the subspace where the target register is zero."""

    def __init__(self, index, amplitude, register="c"):
        self.index = int(index)
        self.amplitude = complex(amplitude)
        super().__init__(
            f"target register {register!r} not clear: basis index {self.index} "
            f"has |amp| = {abs(self.amplitude):.3e}"
        )


class NonInjectiveError(QcemuError, ValueError):
    pass


class CircuitParseError(QcemuError, ValueError):
    def __init__(self, lineno, message):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class DenseLimitError(AllocationError):
    pass


class EigenSolverError(QcemuError, RuntimeError):
    pass


class NotEigenvectorError(QcemuError, ValueError):
    pass


class DegenerateFitError(QcemuError, ValueError):
    pass


class LayoutError(QcemuError, ValueError):
    """Register layout is inconsistent or lacks required work qubits."""
