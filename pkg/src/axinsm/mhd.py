"""Reference solver for the limiting axisymmetric MHD system.

The formal large-c limit of the plasma system: the electric field slaves
to the fluid, the current becomes curl B, and the reduced unknowns obey

    dt(omega) + u.grad(omega) - nu (Delta - 1/r^2) omega
        = (u_r/r) omega - dz(Gamma * B_theta)
    dt(B) + u.grad(B) = (1/sigma) (Delta - 1/r^2) B + (u_r/r) B

with Gamma = B_theta / r.  Spatial operators and the IMEX time scheme are
shared with the plasma solver so that plasma-vs-MHD differences in the
c-sweep reflect the model gap, not scheme gaps.

The Lorentz source is discretized in the conservative form -dz(Gamma*B)
and the magnetic advection-stretch combination in the skew form; paired
with the flux-form vorticity advection these cancel exactly against the
magnetic stretching work, so the discrete energy identity

    d/dt (|u|^2 + |B|^2)/2 = -nu |curl u|^2 - (1/sigma) |curl B|^2

holds to round-off for the semi-discrete system and the ledger residual
is second order in dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .calculus import lap_plus
from .errors import CFLError, NumericalError
from .grid import Parity, ScalarField2D, weighted_l2, weighted_lp
from .ledger import NormLedger
from .modal import ddz_values, hardy_values, kg_values, ks_values, operators_for
from .nsm import ddr_even_values
from .params import Params
from .state import DerivedFields, MHDState, StepReport


@dataclass
class _Derived:
    phi: np.ndarray
    u_r: np.ndarray
    u_z: np.ndarray
    Omega: np.ndarray
    Gamma: np.ndarray


class MHDSolver:
    """Stepper for the limiting system; shares grid machinery with NSMSolver."""

    def __init__(self, params: Params, disable_b: bool = False):
        self.params = params
        self.grid = params.grid
        self.ops = operators_for(params.grid)
        # Pure Navier-Stokes code path used by equivalence tests.
        self.disable_b = disable_b

    # ---- derived -------------------------------------------------------------

    def _derive(self, omega: np.ndarray, B: np.ndarray) -> _Derived:
        grid = self.grid
        phi = self.ops.solve_stream_phi(omega)
        u_r = -ddz_values(phi, grid.dz)
        u_r[0] = 0.0
        u_z = ks_values(phi, grid, "zero")
        return _Derived(
            phi=phi,
            u_r=u_r,
            u_z=u_z,
            Omega=hardy_values(omega, grid),
            Gamma=hardy_values(B, grid),
        )

    def derived(self, state: MHDState) -> DerivedFields:
        d = self._derive(state.omega_theta.values, state.B_theta.values)
        # In the limit system the current is curl B.
        jr = -ddz_values(state.B_theta.values, self.grid.dz)
        jr[0] = 0.0
        jz = ks_values(state.B_theta.values, self.grid, "one_sided")
        return DerivedFields(
            psi=ScalarField2D.odd(self.grid.rc * d.phi),
            u_r=ScalarField2D(d.u_r, Parity.ODD),
            u_z=ScalarField2D.even(d.u_z),
            j_r=ScalarField2D(jr, Parity.ODD),
            j_z=ScalarField2D.even(jz),
            Gamma=ScalarField2D.even(d.Gamma),
            Omega=ScalarField2D.even(d.Omega),
        )

    # ---- right-hand sides -------------------------------------------------------

    def _omega_explicit(self, d: _Derived, B: np.ndarray) -> np.ndarray:
        grid = self.grid
        r = grid.rc
        psi = r * d.phi
        ut_z = np.zeros_like(psi)
        ut_z[1:-1] = kg_values(psi, grid, "zero")[1:-1] / r[1:-1]
        out = -r * (
            ks_values(d.u_r * d.Omega, grid, "zero") + ddz_values(ut_z * d.Omega, grid.dz)
        )
        if not self.disable_b:
            out -= ddz_values(d.Gamma * B, grid.dz)
        out[0] = 0.0
        out[-1] = 0.0
        return out

    def _b_explicit(self, d: _Derived, B: np.ndarray) -> np.ndarray:
        """Skew-form advection plus the stretch (u_r/r) B.

        The half-and-half advective/conservative average is exactly
        energy-neutral against B in the cylindrical product, leaving the
        stretch work to cancel the vorticity equation's Lorentz work.
        """
        grid = self.grid
        adv = -0.5 * (
            d.u_r * kg_values(B, grid, "zero")
            + d.u_z * ddz_values(B, grid.dz)
            + ks_values(d.u_r * B, grid, "zero")
            + ddz_values(d.u_z * B, grid.dz)
        )
        out = adv + d.u_r * d.Gamma
        out[0] = 0.0
        out[-1] = 0.0
        return out

    def _lap_minus(self, v: np.ndarray) -> np.ndarray:
        out = kg_values(ks_values(v, self.grid, "zero"), self.grid, "zero")
        out += ddz_values(ddz_values(v, self.grid.dz), self.grid.dz)
        out[0] = 0.0
        out[-1] = 0.0
        return out

    def mhd_rhs(
        self, state: MHDState, derived: DerivedFields
    ) -> tuple[tuple[ScalarField2D, ScalarField2D], tuple[ScalarField2D, ScalarField2D]]:
        """((omega explicit, omega viscous), (B explicit, B resistive))."""
        p = self.params
        omega, B = state.omega_theta.values, state.B_theta.values
        d = _Derived(
            phi=_phi_from_psi(derived.psi.values, self.grid),
            u_r=derived.u_r.values,
            u_z=derived.u_z.values,
            Omega=derived.Omega.values,
            Gamma=derived.Gamma.values,
        )
        om_e = self._omega_explicit(d, B)
        b_e = self._b_explicit(d, B)
        om_v = p.nu * self._lap_minus(omega)
        b_v = self._lap_minus(B) / p.sigma
        return (
            (ScalarField2D(om_e, Parity.ODD), ScalarField2D(om_v, Parity.ODD)),
            (ScalarField2D(b_e, Parity.ODD), ScalarField2D(b_v, Parity.ODD)),
        )

    # ---- stepping -----------------------------------------------------------------

    def step_mhd(self, state: MHDState, adapt_dt: bool = True) -> tuple[MHDState, StepReport]:
        p = self.params
        grid = self.grid
        w = grid.weight
        omega, B = state.omega_theta.values, state.B_theta.values

        d0 = self._derive(omega, B)
        rate = float(np.max(np.abs(d0.u_r))) / grid.dr + float(np.max(np.abs(d0.u_z))) / grid.dz
        if not np.isfinite(rate):
            raise NumericalError(f"NaN detected in velocity at t={state.t:.6g}")
        if adapt_dt:
            dt = min(p.dt, 0.5 / rate) if rate > 0 else p.dt
        else:
            if p.dt * rate > 1.0:
                raise CFLError(
                    f"CFL violation at t={state.t:.6g}: dt*rate={p.dt * rate:.3g} > 1; "
                    f"suggested dt={0.5 / rate:.3g}",
                    suggested_dt=0.5 / rate,
                )
            dt = p.dt

        kin0 = 0.5 * float(np.sum(w * d0.phi * omega))
        mag0 = 0.5 * float(np.sum(w * B * B))
        om0_sq = float(np.sum(w * omega * omega))
        cb0_sq = self._curl_b_sq(B)

        coef_om = p.nu * dt / 2.0
        coef_b = dt / (2.0 * p.sigma)
        n1_om = self._omega_explicit(d0, B)
        base_om = omega + coef_om * self._lap_minus(omega)
        omega_star = self.ops.solve_diffusion(base_om + dt * n1_om, coef_om)
        if self.disable_b:
            B_star = B
        else:
            n1_b = self._b_explicit(d0, B)
            base_b = B + coef_b * self._lap_minus(B)
            B_star = self.ops.solve_diffusion(base_b + dt * n1_b, coef_b)

        d_star = self._derive(omega_star, B_star)
        n2_om = self._omega_explicit(d_star, B_star)
        omega1 = self.ops.solve_diffusion(base_om + 0.5 * dt * (n1_om + n2_om), coef_om)
        if self.disable_b:
            B1 = B
        else:
            n2_b = self._b_explicit(d_star, B_star)
            B1 = self.ops.solve_diffusion(base_b + 0.5 * dt * (n1_b + n2_b), coef_b)

        if not (np.all(np.isfinite(omega1)) and np.all(np.isfinite(B1))):
            raise NumericalError(f"NaN detected after step at t={state.t:.6g}")

        phi1 = self.ops.solve_stream_phi(omega1)
        kin1 = 0.5 * float(np.sum(w * phi1 * omega1))
        mag1 = 0.5 * float(np.sum(w * B1 * B1))
        om1_sq = float(np.sum(w * omega1 * omega1))
        cb1_sq = self._curl_b_sq(B1)
        dissipation = dt * (
            p.nu * 0.5 * (om0_sq + om1_sq) + (1.0 / p.sigma) * 0.5 * (cb0_sq + cb1_sq)
        )
        residual = (kin1 + mag1) - (kin0 + mag0) + dissipation

        report = StepReport(
            t=state.t + dt,
            dt_used=dt,
            cfl_advective=dt * rate,
            energy_total=kin1 + mag1,
            energy_balance_residual=residual,
            ampere_residual_L2=0.0,
            div_E_residual=0.0,
        )
        new_state = MHDState(
            omega_theta=ScalarField2D(omega1, Parity.ODD),
            B_theta=ScalarField2D(B1, Parity.ODD),
            t=state.t + dt,
            grid=grid,
        )
        return new_state, report

    def _curl_b_sq(self, B: np.ndarray) -> float:
        """|grad B|^2 surrogate |curl(B e_theta)|^2, exact for the ledger."""
        csr = -ddz_values(B, self.grid.dz)
        csz = ks_values(B, self.grid, "zero")
        return float(np.sum(self.grid.weight * (csr**2 + csz**2)))

    # ---- runs ----------------------------------------------------------------------

    def run_mhd(
        self, initial: MHDState, sample_every: int = 15
    ) -> tuple[list[MHDState], NormLedger]:
        p = self.params
        ledger = NormLedger()
        snapshots: list[MHDState] = [initial]
        state = initial

        cum = {"residual": 0.0, "u_diss": 0.0, "b_diss": 0.0}
        w = self.grid.weight
        prev_om_sq = float(np.sum(w * initial.omega_theta.values ** 2))
        prev_cb_sq = self._curl_b_sq(initial.B_theta.values)
        self._ledger_sample(ledger, state, cum, dt_used=0.0, cfl=0.0)

        nsteps = int(round(p.t_end / p.dt))
        for n in range(nsteps):
            state, report = self.step_mhd(state)
            om_sq = float(np.sum(w * state.omega_theta.values ** 2))
            cb_sq = self._curl_b_sq(state.B_theta.values)
            cum["residual"] += report.energy_balance_residual
            cum["u_diss"] += report.dt_used * p.nu * (prev_om_sq + om_sq)
            cum["b_diss"] += report.dt_used * (1.0 / p.sigma) * (prev_cb_sq + cb_sq)
            prev_om_sq, prev_cb_sq = om_sq, cb_sq
            if (n + 1) % sample_every == 0 or n == nsteps - 1:
                snapshots.append(state)
                self._ledger_sample(
                    ledger, state, cum, dt_used=report.dt_used, cfl=report.cfl_advective
                )
        return snapshots, ledger

    def _ledger_sample(self, ledger, state, cum, dt_used, cfl) -> None:
        grid = self.grid
        w = grid.weight
        t = state.t
        omega, B = state.omega_theta.values, state.B_theta.values
        d = self._derive(omega, B)
        kin = 0.5 * float(np.sum(w * d.phi * omega))
        mag = 0.5 * float(np.sum(w * B * B))
        rows = {
            "dt_used": dt_used,
            "cfl_advective": cfl,
            "kinetic_energy": kin,
            "em_energy": mag,
            "energy_total": kin + mag,
            "energy_balance_residual": cum["residual"],
            "u_dissipation": cum["u_diss"],
            "b_dissipation": cum["b_diss"],
            "gamma_L2": weighted_lp(d.Gamma, grid, 2),
            "gamma_L3": weighted_lp(d.Gamma, grid, 3),
            "gamma_L4": weighted_lp(d.Gamma, grid, 4),
            "Omega_L2": weighted_l2(d.Omega, grid),
            "max_ur_over_r": float(np.max(np.abs(hardy_values(d.u_r, grid)))),
            "omega_L2": weighted_l2(omega, grid),
            "u_L2": math.sqrt(max(2.0 * kin, 0.0)),
            "B_L2": weighted_l2(B, grid),
            "B_H1": math.sqrt(self._curl_b_sq(B)),
            "Gamma_H1_grid": float(
                np.sqrt(
                    np.sum(
                        w
                        * (
                            ddr_even_values(d.Gamma, grid) ** 2
                            + ddz_values(d.Gamma, grid.dz) ** 2
                        )
                    )
                )
            ),
        }
        for name, value in rows.items():
            ledger.add(t, name, value)

    # ---- diagnostics ------------------------------------------------------------------

    def gamma_evolution_check(self, trajectory: list[MHDState]) -> tuple[list[float], list[float]]:
        """Time-difference residual of the Gamma transport-diffusion equation.

        dt(Gamma) + u.grad(Gamma) - (1/sigma)(Delta + dr/r) Gamma should
        vanish along the limit flow; central differencing the sampled
        trajectory leaves an O(dt_sample^2 + h^2) residual, reported in
        the weighted L^2 norm at each interior sample.
        """
        if len(trajectory) < 3:
            raise ValueError("gamma_evolution_check needs at least 3 samples")
        grid = self.grid
        p = self.params
        times: list[float] = []
        residuals: list[float] = []
        gammas = [hardy_values(s.B_theta.values, grid) for s in trajectory]
        for n in range(1, len(trajectory) - 1):
            sm, s0, sp = trajectory[n - 1], trajectory[n], trajectory[n + 1]
            dt_m = s0.t - sm.t
            dt_p = sp.t - s0.t
            if not math.isclose(dt_m, dt_p, rel_tol=1e-9):
                raise ValueError("gamma_evolution_check needs uniform sampling")
            d = self._derive(s0.omega_theta.values, s0.B_theta.values)
            g = gammas[n]
            dgdt = (gammas[n + 1] - gammas[n - 1]) / (dt_m + dt_p)
            advect = d.u_r * ddr_even_values(g, grid) + d.u_z * ddz_values(g, grid.dz)
            diffuse = lap_plus(ScalarField2D.even(g), grid).values / p.sigma
            res = dgdt + advect - diffuse
            times.append(s0.t)
            residuals.append(float(np.sqrt(np.sum(grid.weight * res * res))))
        return times, residuals


def _phi_from_psi(psi: np.ndarray, grid) -> np.ndarray:
    phi = np.empty_like(psi)
    phi[1:] = psi[1:] / grid.rc[1:]
    phi[0] = 0.0
    return phi
