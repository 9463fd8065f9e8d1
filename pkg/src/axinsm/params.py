"""Physical constants and run controls."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

from .grid import GridSpec


class MaxwellScheme(enum.Enum):
    CRANK_NICOLSON = "crank_nicolson"
    EXACT_SPLIT = "exact_split"


@dataclass(frozen=True)
class Params:
    """Viscosity, conductivity, light speed, and time-stepping controls.

    The advective CFL bound is checked at runtime by the solvers, not here:
    it depends on the evolving velocity field.
    """

    nu: float
    sigma: float
    c: float
    grid: GridSpec
    dt: float
    t_end: float
    maxwell_scheme: MaxwellScheme = MaxwellScheme.CRANK_NICOLSON

    def __post_init__(self) -> None:
        if self.nu <= 0:
            raise ValueError(f"nu must be positive, got {self.nu}")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.c <= 0:
            raise ValueError(f"c must be positive, got {self.c}")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end < 0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")

    def with_c(self, c: float) -> "Params":
        return replace(self, c=c)

    def with_dt(self, dt: float) -> "Params":
        return replace(self, dt=dt)


def default_params(
    Nr: int = 128,
    Nz: int = 128,
    R: float = 6.0,
    Lz: float = 12.0,
    nu: float = 0.05,
    sigma: float = 2.0,
    c: float = 16.0,
    dt: float = 2.0e-3,
    t_end: float = 1.0,
    maxwell_scheme: MaxwellScheme = MaxwellScheme.CRANK_NICOLSON,
) -> Params:
    """Desk-scale defaults: minutes-scale sweeps on a 128x128 half-strip."""
    return Params(
        nu=nu,
        sigma=sigma,
        c=c,
        grid=GridSpec(Nr=Nr, Nz=Nz, R=R, Lz=Lz),
        dt=dt,
        t_end=t_end,
        maxwell_scheme=maxwell_scheme,
    )
