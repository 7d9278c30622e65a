"""Exception types raised by the robustpulse library."""


class DimMismatch(ValueError):
    """Operands have incompatible matrix dimensions."""


class ShapeMismatch(ValueError):
    """A pulse table does not match the problem's (controls, slices) shape."""


class NotHermitian(ValueError):
    """A matrix required to be Hermitian is not, within tolerance."""


class NotUnitary(ValueError):
    """A matrix required to be unitary is not, within tolerance."""


class BadSliceIndex(ValueError):
    """A time-slice index lies outside 1..N."""


class SchemeMismatch(ValueError):
    """A half-interval selector inconsistent with the propagation scheme."""


class UnknownPreset(ValueError):
    """No preset problem registered under the requested name."""


class Diverged(RuntimeError):
    """Training produced a non-finite average fidelity."""
