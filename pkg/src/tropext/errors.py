"""Exception hierarchy.  Every error carries a machine-readable ``code``
and an optional ``witness`` payload that the CLI serializes verbatim."""


class TropextError(Exception):
    code = "ERROR"

    def __init__(self, message: str = "", *, code: str = None, witness=None):
        super().__init__(message)
        if code is not None:
            self.code = code
        self.witness = witness

    def record(self) -> dict:
        return {"error": self.code, "message": str(self), "witness": self.witness}


class DimensionError(TropextError, ValueError):
    code = "DIMENSION_MISMATCH"


class InterpolationError(TropextError):
    """Raised by ``affine_interpolate`` with code UNDERDETERMINED,
    INCONSISTENT or NON_INTEGRAL."""


class ConstructionError(TropextError):
    """Failures while building Q, the interpolants or P_u."""


class ExtensionError(TropextError):
    """Pullback, classification and face-restriction failures."""


class PushoutError(TropextError):
    pass
