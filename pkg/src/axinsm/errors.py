"""Runtime failure types shared by the time steppers."""

from __future__ import annotations


class CFLError(RuntimeError):
    """Advective CFL bound violated; carries a suggested time step."""

    def __init__(self, message: str, suggested_dt: float):
        super().__init__(message)
        self.suggested_dt = suggested_dt


class NumericalError(RuntimeError):
    """Non-finite samples appeared during stepping."""
