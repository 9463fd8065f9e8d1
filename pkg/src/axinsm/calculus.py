"""Finite-difference cylindrical calculus on the (r, z) lattice.

Derivatives are second-order centered differences; the axis is handled by
ghost-point parity reflection (odd f gives f(-dr, z) = -f(dr, z)), the
wall r = R by one-sided second-order stencils.  Division by r is only
defined for odd fields (vanishing axis trace) and takes the one-sided
derivative limit on the axis, in the spirit of Hardy's inequality.

Curls of the two axisymmetric field classes:

    pure swirl  B = b e_theta:      curl B = (-dz b) e_r + (dr b + b/r) e_z
    no swirl    E = (E_r, E_z):     curl E = (dz E_r - dr E_z) e_theta

The z-component of curl-of-swirl and the r-derivative inside
curl-of-no-swirl use the compatible kernel pair from `modal`, so that
<curl B, E> = <B, curl E> holds exactly for wall-supported fields.
Elliptic solves (stream function, Poisson, Leray projection) are direct
per axial wavenumber.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, Parity, ParityError, ScalarField2D, weighted_l2
from .modal import (
    ddz_values,
    hardy_values,
    kg_values,
    ks_values,
    operators_for,
)


class SolveError(RuntimeError):
    """Elliptic solve failed to meet its residual tolerance."""


@dataclass(frozen=True)
class NoSwirlVec2:
    """Axisymmetric vector field without swirl: f = f_r e_r + f_z e_z."""

    f_r: ScalarField2D
    f_z: ScalarField2D

    def __post_init__(self) -> None:
        self.f_r.require(Parity.ODD, "f_r")
        self.f_z.require(Parity.EVEN, "f_z")


def ddr(f: ScalarField2D, grid: GridSpec) -> ScalarField2D:
    """Radial derivative; parity flips."""
    v = f.values
    dr = grid.dr
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / (2.0 * dr)
    if f.is_odd:
        out[0] = v[1] / dr  # ghost: f(-dr) = -f(dr)
    else:
        out[0] = 0.0  # ghost: f(-dr) = f(dr)
    out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * dr)
    if f.is_odd:
        return ScalarField2D.even(out)
    return ScalarField2D.odd(out)


def ddz(f: ScalarField2D, grid: GridSpec) -> ScalarField2D:
    """Periodic axial derivative; parity preserved."""
    return ScalarField2D(ddz_values(f.values, grid.dz), f.parity)


def divide_by_r(f: ScalarField2D, grid: GridSpec) -> ScalarField2D:
    """Hardy-safe f/r for odd f; the axis row is the limit dr(f)(0, z)."""
    if not f.is_odd:
        raise ParityError("Hardy division requires vanishing trace")
    return ScalarField2D.even(hardy_values(f.values, grid))


def lap_minus(f: ScalarField2D, grid: GridSpec) -> ScalarField2D:
    """(Delta - 1/r^2) f for odd f, realized as -curl(curl(f e_theta)).

    Expanding the kernels gives d_rr + (1/r) d_r + d_zz - 1/r^2 to second
    order; the factored form is what the implicit solvers invert, so the
    viscous dissipation identity <f, lap_minus f> = -|curl(f e_theta)|^2
    holds exactly.
    """
    v = f.require(Parity.ODD, "lap_minus input")
    out = kg_values(ks_values(v, grid, "one_sided"), grid, "one_sided")
    out += ddz_values(ddz_values(v, grid.dz), grid.dz)
    out[0] = 0.0
    return ScalarField2D(out, Parity.ODD)


def lap_plus(f: ScalarField2D, grid: GridSpec) -> ScalarField2D:
    """(Delta + d_r/r) f for even f: d_rr + (3/r) d_r + d_zz.

    This is the diffusion operator of the renormalized unknowns Omega and
    Gamma; on the axis the limit is 4 d_rr + d_zz.
    """
    v = f.require(Parity.EVEN, "lap_plus input")
    dr, dz = grid.dr, grid.dz
    r = grid.rc
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / dr**2 + 3.0 * (
        (v[2:] - v[:-2]) / (2.0 * dr)
    ) / r[1:-1]
    out[0] = 8.0 * (v[1] - v[0]) / dr**2
    out[-1] = (v[-1] - 2.0 * v[-2] + v[-3]) / dr**2 + 3.0 * (
        (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * dr)
    ) / grid.R
    out += (np.roll(v, -1, axis=1) - 2.0 * v + np.roll(v, 1, axis=1)) / dz**2
    return ScalarField2D.even(out)


def curl_swirl(b_theta: ScalarField2D, grid: GridSpec) -> NoSwirlVec2:
    """curl of a pure-swirl field: (-dz b) e_r + (dr b + b/r) e_z."""
    v = b_theta.require(Parity.ODD, "curl_swirl input")
    fr = -ddz_values(v, grid.dz)
    fr[0] = 0.0
    fz = ks_values(v, grid, "one_sided")
    return NoSwirlVec2(ScalarField2D(fr, Parity.ODD), ScalarField2D.even(fz))


def curl_noswirl(e: NoSwirlVec2, grid: GridSpec) -> ScalarField2D:
    """curl of a no-swirl field: (dz E_r - dr E_z) e_theta."""
    out = ddz_values(e.f_r.values, grid.dz) - kg_values(e.f_z.values, grid, "one_sided")
    out[0] = 0.0
    return ScalarField2D(out, Parity.ODD)


def div_noswirl(f: NoSwirlVec2, grid: GridSpec) -> ScalarField2D:
    """dr(f_r) + f_r/r + dz(f_z) with the Hardy-safe axis limit."""
    out = ks_values(f.f_r.values, grid, "one_sided") + ddz_values(f.f_z.values, grid.dz)
    return ScalarField2D.even(out)


def solve_stream(
    omega_theta: ScalarField2D, grid: GridSpec, tol: float = 1.0e-10
) -> ScalarField2D:
    """Solve the axisymmetric stream-function problem for psi.

    The discrete problem is posed for the vector potential phi = psi/r:
    curl(curl(phi e_theta)) = omega e_theta with phi(0) = phi(R) = 0,
    solved directly per axial wavenumber.  Returns psi = r*phi with
    psi(0, z) = psi(R, z) = 0.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    w = omega_theta.require(Parity.ODD, "solve_stream input")
    ops = operators_for(grid)
    phi = ops.solve_stream_phi(w)
    scale = weighted_l2(grid.rc * w, grid)
    if scale > 0:
        res = grid.rc * (ops.apply_stream_operator(phi) - _interiorized(w))
        if weighted_l2(res, grid) > tol * scale:
            raise SolveError(
                f"stream solve residual {weighted_l2(res, grid):.3e} exceeds tol*|r w|"
            )
    return ScalarField2D.odd(grid.rc * phi)


def _interiorized(v: np.ndarray) -> np.ndarray:
    out = v.copy()
    out[0] = 0.0
    out[-1] = 0.0
    return out


def stream_potential(psi: ScalarField2D, grid: GridSpec) -> np.ndarray:
    """phi = psi/r for a stream function vanishing quadratically on the axis."""
    v = psi.require(Parity.ODD, "stream function")
    phi = np.empty_like(v)
    phi[1:] = v[1:] / grid.rc[1:]
    phi[0] = 0.0
    return phi


def velocity_from_stream(psi: ScalarField2D, grid: GridSpec) -> NoSwirlVec2:
    """u = curl((psi/r) e_theta): u_r = -(1/r) dz psi, u_z = (1/r) dr psi.

    Computed as the curl of the vector potential so the discrete
    divergence vanishes identically on all weighted rows.
    """
    phi = stream_potential(psi, grid)
    ur = -ddz_values(phi, grid.dz)
    ur[0] = 0.0
    uz = ks_values(phi, grid, "one_sided")
    return NoSwirlVec2(ScalarField2D(ur, Parity.ODD), ScalarField2D.even(uz))


def poisson_axisym(
    source: ScalarField2D, grid: GridSpec, tol: float = 1.0e-10
) -> ScalarField2D:
    """Solve Delta phi = source for an even scalar, Dirichlet at r = R.

    The k = 0 radial problem sees a natural Neumann condition on the axis
    (the axis row is the limit 2 d_rr + d_zz) and is anchored by the wall
    Dirichlet condition.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = source.require(Parity.EVEN, "poisson source")
    ops = operators_for(grid)
    q = ops.solve_poisson(s)
    scale = weighted_l2(s, grid)
    if scale > 0:
        res = ops.apply_poisson_operator(q) - _interiorized_wall(s)
        if weighted_l2(res, grid) > max(tol * scale, 1e-9 * scale):
            raise SolveError(
                f"poisson solve residual {weighted_l2(res, grid):.3e} exceeds tolerance"
            )
    return ScalarField2D.even(q)


def _interiorized_wall(v: np.ndarray) -> np.ndarray:
    out = v.copy()
    out[-1] = 0.0
    return out


def leray_project(f: NoSwirlVec2, grid: GridSpec, tol: float = 1.0e-10) -> NoSwirlVec2:
    """P f = f - grad(Delta^{-1} div f) restricted to no-swirl fields.

    The output's discrete divergence vanishes to solver precision on every
    weighted row; the projection is linear and idempotent.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    ops = operators_for(grid)
    gr, gz = ops.leray(f.f_r.values, f.f_z.values)
    gr[0] = 0.0
    return NoSwirlVec2(ScalarField2D(gr, Parity.ODD), ScalarField2D.even(gz))
