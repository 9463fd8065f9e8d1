"""Evolved-state containers for the reduced systems.

The plasma system evolves (omega_theta, E_r, E_z, B_theta); the limiting
MHD system evolves (omega_theta, B_theta).  Swirl-free velocity and
electric field and pure-swirl magnetic field are structural: the reduced
unknowns cannot represent anything else, so the 3-D lift of any state has
u.e_theta = E.e_theta = 0 and B.e_r = B.e_z = 0 identically.
"""

from __future__ import annotations

from dataclasses import dataclass

from .grid import GridSpec, Parity, ScalarField2D


@dataclass(frozen=True)
class NSMState:
    """Navier-Stokes-Maxwell state: vorticity plus electromagnetic field."""

    omega_theta: ScalarField2D
    E_r: ScalarField2D
    E_z: ScalarField2D
    B_theta: ScalarField2D
    t: float
    grid: GridSpec

    def __post_init__(self) -> None:
        self.omega_theta.require(Parity.ODD, "omega_theta")
        self.E_r.require(Parity.ODD, "E_r")
        self.E_z.require(Parity.EVEN, "E_z")
        self.B_theta.require(Parity.ODD, "B_theta")
        for f in (self.omega_theta, self.E_r, self.E_z, self.B_theta):
            if f.values.shape != self.grid.shape:
                raise ValueError("field shape does not match grid")

    @classmethod
    def zeros(cls, grid: GridSpec, t: float = 0.0) -> "NSMState":
        z_odd = ScalarField2D.zeros(grid, Parity.ODD)
        z_even = ScalarField2D.zeros(grid, Parity.EVEN)
        return cls(z_odd, z_odd, z_even, z_odd, t, grid)


@dataclass(frozen=True)
class MHDState:
    """Limiting magnetohydrodynamic state."""

    omega_theta: ScalarField2D
    B_theta: ScalarField2D
    t: float
    grid: GridSpec

    def __post_init__(self) -> None:
        self.omega_theta.require(Parity.ODD, "omega_theta")
        self.B_theta.require(Parity.ODD, "B_theta")
        for f in (self.omega_theta, self.B_theta):
            if f.values.shape != self.grid.shape:
                raise ValueError("field shape does not match grid")

    @classmethod
    def zeros(cls, grid: GridSpec, t: float = 0.0) -> "MHDState":
        z_odd = ScalarField2D.zeros(grid, Parity.ODD)
        return cls(z_odd, z_odd, t, grid)


@dataclass(frozen=True)
class DerivedFields:
    """Stream function, velocity, current, and the renormalized unknowns.

    u_r = -(1/r) dz(psi) and u_z = (1/r) dr(psi) hold discretely by
    construction; Gamma = B_theta/r and Omega = omega_theta/r use the
    Hardy-safe division with one-sided axis limits.
    """

    psi: ScalarField2D
    u_r: ScalarField2D
    u_z: ScalarField2D
    j_r: ScalarField2D
    j_z: ScalarField2D
    Gamma: ScalarField2D
    Omega: ScalarField2D


@dataclass(frozen=True)
class StepReport:
    """Per-step diagnostics emitted by the solvers."""

    t: float
    dt_used: float
    cfl_advective: float
    energy_total: float
    energy_balance_residual: float
    ampere_residual_L2: float
    div_E_residual: float
