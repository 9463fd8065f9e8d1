"""Grid and scalar-field containers for the axisymmetric (r, z) half-strip.

All evolved and derived quantities live on one collocated lattice

    r_i = i * dr,  i = 0..Nr   (axis row i = 0 included, wall at r = R),
    z_k = k * dz,  k = 0..Nz-1 (periodic in z with period Lz),

stored as float64 arrays of shape (Nr + 1, Nz).  Each scalar carries a
parity tag describing its smooth extension through the axis: odd fields
(B_theta, omega_theta, u_r, ...) vanish on the axis row, even fields
(u_z, E_z, Gamma, Omega, ...) generally do not.

Integrals over R^3 of axisymmetric functions reduce to sums against the
cylindrical weight 2*pi*r*dr*dz; all L^p norms here use that weight so
their values match the whole-space norms used by the analysis.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class ParityError(ValueError):
    """Raised when an operation receives a field with the wrong parity tag."""


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"

    def flipped(self) -> "Parity":
        return Parity.ODD if self is Parity.EVEN else Parity.EVEN


@dataclass(frozen=True)
class GridSpec:
    """Uniform lattice on the (r, z) half-strip [0, R] x [0, Lz)."""

    Nr: int
    Nz: int
    R: float
    Lz: float

    def __post_init__(self) -> None:
        if self.Nr < 8 or self.Nz < 8:
            raise ValueError(f"grid too coarse: Nr={self.Nr}, Nz={self.Nz} (need >= 8)")
        if self.Nz & (self.Nz - 1) != 0:
            raise ValueError(f"Nz={self.Nz} must be a power of two")
        if self.R <= 0 or self.Lz <= 0:
            raise ValueError("R and Lz must be positive")

    @property
    def dr(self) -> float:
        return self.R / self.Nr

    @property
    def dz(self) -> float:
        return self.Lz / self.Nz

    @property
    def shape(self) -> tuple[int, int]:
        return (self.Nr + 1, self.Nz)

    @property
    def r(self) -> np.ndarray:
        """Radial sample coordinates, shape (Nr+1,)."""
        return np.arange(self.Nr + 1) * self.dr

    @property
    def z(self) -> np.ndarray:
        """Axial sample coordinates, shape (Nz,)."""
        return np.arange(self.Nz) * self.dz

    @property
    def rc(self) -> np.ndarray:
        """Radial coordinates as a column, broadcastable over fields."""
        return self.r[:, None]

    @property
    def weight(self) -> np.ndarray:
        """Cylindrical quadrature weight 2*pi*r*dr*dz as a column.

        The axis row has zero weight (r = 0); fields are required to be
        supported away from the wall so no end correction is applied there.
        """
        return 2.0 * np.pi * self.rc * self.dr * self.dz

    def same_lattice(self, other: "GridSpec") -> bool:
        return self == other


@dataclass(frozen=True)
class ScalarField2D:
    """One axisymmetric scalar sample lattice with an axis-parity tag.

    Values are frozen on construction: stepping produces new fields, so
    distinct simulations can share them freely across threads.
    """

    values: np.ndarray
    parity: Parity
    _validated: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ValueError("ScalarField2D expects a 2-D array")
        if not self._validated:
            if not np.all(np.isfinite(v)):
                raise ValueError("non-finite samples in ScalarField2D")
            if self.parity is Parity.ODD and v.shape[0] > 0 and np.any(v[0] != 0.0):
                raise ParityError("odd field must vanish on the axis row")
        if v is not self.values or v.flags.writeable:
            v = v.copy()
            v.flags.writeable = False
            object.__setattr__(self, "values", v)

    @classmethod
    def odd(cls, values: np.ndarray) -> "ScalarField2D":
        """Tag as odd, forcing the axis row to exact zeros."""
        v = np.array(values, dtype=np.float64)
        v[0] = 0.0
        return cls(v, Parity.ODD)

    @classmethod
    def even(cls, values: np.ndarray) -> "ScalarField2D":
        return cls(np.array(values, dtype=np.float64), Parity.EVEN)

    @classmethod
    def zeros(cls, grid: GridSpec, parity: Parity) -> "ScalarField2D":
        return cls(np.zeros(grid.shape), parity)

    @property
    def is_odd(self) -> bool:
        return self.parity is Parity.ODD

    def require(self, parity: Parity, what: str = "field") -> np.ndarray:
        if self.parity is not parity:
            raise ParityError(f"parity mismatch: {what} must be {parity.value}")
        return self.values


def weighted_l2(values: np.ndarray, grid: GridSpec) -> float:
    """L^2(R^3) norm of an axisymmetric scalar via the cylindrical weight."""
    return float(np.sqrt(np.sum(grid.weight * values * values)))


def weighted_lp(values: np.ndarray, grid: GridSpec, p: float) -> float:
    return float(np.sum(grid.weight * np.abs(values) ** p) ** (1.0 / p))


def weighted_dot(a: np.ndarray, b: np.ndarray, grid: GridSpec) -> float:
    """Inner product <a, b> with the cylindrical weight."""
    return float(np.sum(grid.weight * a * b))
