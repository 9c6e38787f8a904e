from typing import List, Optional


class BottEngineError(Exception):
    """Base class for every error raised by the decision engine"""


class LatticeError(BottEngineError):
    """Malformed Gram matrix, degenerate form or mismatched dimensions"""


class EnumerationError(BottEngineError):
    """Class enumeration called outside its contract"""


class _ViolationsError(BottEngineError):
    def __init__(self, message: str, violations: Optional[List[str]] = None):
        self.violations = list(violations or [])
        if self.violations:
            message = f"{message}: {'; '.join(self.violations)}"
        super().__init__(message)


class PolarizationError(_ViolationsError):
    """The ample candidate does not define a valid polarization"""


class FibrationError(_ViolationsError):
    """Supplied elliptic fibration data is inconsistent with the lattice"""


class DelPezzoError(BottEngineError):
    """Del Pezzo operation called outside its supported range"""


class SpecDocumentError(BottEngineError):
    """A surface description document could not be parsed"""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
