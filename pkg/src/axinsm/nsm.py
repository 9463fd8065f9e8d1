"""Time integration of the reduced Navier-Stokes-Maxwell system.

Evolved unknowns: azimuthal vorticity omega_theta and the electromagnetic
triple (E_r, E_z, B_theta).  One step performs

  1. an IMEX update of the vorticity transport equation

         dt(omega) + u.grad(omega) - nu (Delta - 1/r^2) omega
             = (u_r/r) omega + j_r B/r - j.grad(B)

     with Heun's method on the explicit part (advection in conservative
     flux form for Omega = omega/r, Lorentz source as the azimuthal curl
     of the pointwise j x B) and trapezoidal viscous treatment;

  2. a c-uniformly stable update of the linear Maxwell subsystem

         (1/c) dt(E) - curl B + sigma c E = -sigma P(u x B)
         (1/c) dt(B) + curl E = 0

     with the source frozen at an Adams-Bashforth midpoint extrapolation.
     The default trapezoidal scheme is unconditionally stable in c; the
     Strang-split alternative damps E by the exact factor exp(-sigma c^2 dt)
     and is kept as a cross-validation oracle.

Ohm's law j = sigma(c E + P(u x B)) closes the system algebraically, and
the Ampere residual curl B - j equals (1/c) dt(E) on solutions without
any time differencing, which is how the singular-limit diagnostics
measure that quantity.

Every energy pairing between the subsystems (kinetic against Lorentz
work, wave transport, Ohmic closure) cancels exactly in the discrete
cylindrical inner product, so the semi-discrete system satisfies the
energy identity to round-off and the ledger's balance residual is a pure
time-stepping quantity, second order in dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .calculus import NoSwirlVec2
from .errors import CFLError, NumericalError
from .grid import GridSpec, Parity, ScalarField2D, weighted_l2, weighted_lp
from .ledger import NormLedger
from .modal import (
    GridOperators,
    ddz_values,
    hardy_values,
    kg_values,
    ks_values,
    operators_for,
)
from .params import MaxwellScheme, Params
from .state import DerivedFields, NSMState, StepReport

# The stiff relaxation of E toward its slaved value lasts O(1/(sigma c^2));
# inside that window the Maxwell update is substepped so the initial layer
# contributes its true O(1/c) share to time-integrated residual norms.
LAYER_EFOLDS = 12.0
LAYER_TARGET = 0.01
LAYER_MAX_SUBSTEPS = 128


def layer_substeps(params: Params, t: float) -> int:
    rate = params.sigma * params.c**2
    if t * rate >= LAYER_EFOLDS:
        return 1
    return int(min(LAYER_MAX_SUBSTEPS, max(1, math.ceil(rate * params.dt / LAYER_TARGET))))


def stream_phi_from_psi(psi: np.ndarray, grid: GridSpec) -> np.ndarray:
    phi = np.empty_like(psi)
    phi[1:] = psi[1:] / grid.rc[1:]
    phi[0] = 0.0
    return phi


def ddr_even_values(v: np.ndarray, grid: GridSpec) -> np.ndarray:
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / (2.0 * grid.dr)
    out[0] = 0.0
    out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * grid.dr)
    return out


@dataclass
class _Derived:
    """Raw-array derived bundle used inside the stepper."""

    phi: np.ndarray
    u_r: np.ndarray
    u_z: np.ndarray
    pf_r: np.ndarray  # P(u x B)
    pf_z: np.ndarray
    j_r: np.ndarray
    j_z: np.ndarray
    Omega: np.ndarray
    Gamma: np.ndarray


class NSMSolver:
    """Stepper for one parameter set; caches all per-mode factorizations."""

    def __init__(self, params: Params, lift_n: int = 64):
        self.params = params
        self.grid = params.grid
        self.ops: GridOperators = operators_for(params.grid)
        self.lift_n = lift_n
        self.last_source: tuple[np.ndarray, np.ndarray] | None = None

    # ---- derived fields ----------------------------------------------------

    def _derive(self, omega, Er, Ez, B) -> _Derived:
        p = self.params
        grid = self.grid
        phi = self.ops.solve_stream_phi(omega)
        u_r = -ddz_values(phi, grid.dz)
        u_r[0] = 0.0
        u_z = ks_values(phi, grid, "zero")
        pf_r, pf_z = self.ops.leray(-u_z * B, u_r * B)
        pf_r[0] = 0.0
        return _Derived(
            phi=phi,
            u_r=u_r,
            u_z=u_z,
            pf_r=pf_r,
            pf_z=pf_z,
            j_r=p.sigma * (p.c * Er + pf_r),
            j_z=p.sigma * (p.c * Ez + pf_z),
            Omega=hardy_values(omega, grid),
            Gamma=hardy_values(B, grid),
        )

    def derived(self, state: NSMState) -> DerivedFields:
        """Stream function, velocity, Ohm current, and Gamma/Omega."""
        d = self._derive(
            state.omega_theta.values, state.E_r.values, state.E_z.values, state.B_theta.values
        )
        return DerivedFields(
            psi=ScalarField2D.odd(self.grid.rc * d.phi),
            u_r=ScalarField2D(d.u_r, Parity.ODD),
            u_z=ScalarField2D.even(d.u_z),
            j_r=ScalarField2D.odd(d.j_r),
            j_z=ScalarField2D.even(d.j_z),
            Gamma=ScalarField2D.even(d.Gamma),
            Omega=ScalarField2D.even(d.Omega),
        )

    # ---- right-hand sides ----------------------------------------------------

    def _explicit_rhs(self, omega: np.ndarray, B: np.ndarray, d: _Derived) -> np.ndarray:
        """Advection plus Lorentz source of the vorticity equation.

        Advection is the conservative flux form -r div(u~ Omega) with the
        advecting velocity taken as the rotated discrete gradient of psi,
        the unique choice orthogonal to grad(psi) pointwise on the
        lattice; the Lorentz source is the azimuthal curl of j x B.  Both
        pair against the stream potential without discretization defect,
        which is what keeps the energy ledger clean.
        """
        grid = self.grid
        r = grid.rc
        psi = r * d.phi
        ut_z = np.zeros_like(psi)
        ut_z[1:-1] = kg_values(psi, grid, "zero")[1:-1] / r[1:-1]
        adv = -r * (
            ks_values(d.u_r * d.Omega, grid, "zero") + ddz_values(ut_z * d.Omega, grid.dz)
        )
        lor = ddz_values(-d.j_z * B, grid.dz) - kg_values(d.j_r * B, grid, "zero")
        out = adv + lor
        out[0] = 0.0
        out[-1] = 0.0
        return out

    def vorticity_rhs(
        self, state: NSMState, derived: DerivedFields
    ) -> tuple[ScalarField2D, ScalarField2D]:
        """(explicit advection/stretch/Lorentz part, implicit viscous part)."""
        omega = state.omega_theta.values
        B = state.B_theta.values
        d = _Derived(
            phi=stream_phi_from_psi(derived.psi.values, self.grid),
            u_r=derived.u_r.values,
            u_z=derived.u_z.values,
            pf_r=omega,  # unused here
            pf_z=omega,
            j_r=derived.j_r.values,
            j_z=derived.j_z.values,
            Omega=derived.Omega.values,
            Gamma=derived.Gamma.values,
        )
        expl = self._explicit_rhs(omega, B, d)
        visc = self.params.nu * self._lap_minus(omega)
        return ScalarField2D(expl, Parity.ODD), ScalarField2D(visc, Parity.ODD)

    def _lap_minus(self, v: np.ndarray) -> np.ndarray:
        out = kg_values(ks_values(v, self.grid, "zero"), self.grid, "zero")
        out += ddz_values(ddz_values(v, self.grid.dz), self.grid.dz)
        out[0] = 0.0
        out[-1] = 0.0
        return out

    # ---- Maxwell subsystem -----------------------------------------------------

    def _maxwell_advance(self, Er, Ez, B, S_r, S_z, dt, substeps=1):
        p = self.params
        if p.maxwell_scheme is MaxwellScheme.CRANK_NICOLSON:
            dt_sub = dt / substeps
            step = self.ops.maxwell_stepper(p.c, p.sigma, dt_sub)
            er, ez, b = self.ops.to_modes(Er), self.ops.to_modes(Ez), self.ops.to_modes(B)
            sr, sz = self.ops.to_modes(S_r), self.ops.to_modes(S_z)
            for _ in range(substeps):
                er, ez, b, *_ = step(er, ez, b, sr, sz)
            return self.ops.from_modes(er), self.ops.from_modes(ez), self.ops.from_modes(b)
        return self._maxwell_split(Er, Ez, B, S_r, S_z, dt)

    def _maxwell_split(self, Er, Ez, B, S_r, S_z, dt):
        """Strang splitting: exact Ohmic damping around trapezoidal wave substeps.

        Substep count follows the advertised c*dt*k_max rule for accuracy;
        each wave substep is itself unconditionally stable.
        """
        p = self.params
        grid = self.grid
        k_max = math.hypot(math.pi / grid.dr, math.pi / grid.dz)
        n_wave = max(1, math.ceil(p.c * dt * k_max))

        def damp(er, ez, frac):
            f = math.exp(-p.sigma * p.c**2 * dt * frac)
            g = (1.0 - f) / (p.sigma * p.c)
            return er * f + g * S_r, ez * f + g * S_z

        Er, Ez = damp(Er, Ez, 0.5)
        step = self.ops.maxwell_stepper(p.c, 0.0, dt / n_wave)
        er, ez, b = self.ops.to_modes(Er), self.ops.to_modes(Ez), self.ops.to_modes(B)
        zero = np.zeros_like(er)
        for _ in range(n_wave):
            er, ez, b, *_ = step(er, ez, b, zero, zero)
        Er, Ez, B = self.ops.from_modes(er), self.ops.from_modes(ez), self.ops.from_modes(b)
        Er, Ez = damp(Er, Ez, 0.5)
        return Er, Ez, B

    def maxwell_update(
        self, state: NSMState, source: NoSwirlVec2, dt: float
    ) -> tuple[ScalarField2D, ScalarField2D, ScalarField2D]:
        """Advance only the linear Maxwell subsystem by dt with a frozen source.

        The source is -sigma P(u x B) in the coupled system; it must be
        discretely divergence-free (projected) so div E is preserved.
        """
        Er, Ez, B = self._maxwell_advance(
            state.E_r.values,
            state.E_z.values,
            state.B_theta.values,
            source.f_r.values,
            source.f_z.values,
            dt,
            substeps=layer_substeps(self.params, state.t),
        )
        return ScalarField2D.odd(Er), ScalarField2D.even(Ez), ScalarField2D.odd(B)

    # ---- norms and residual fields ----------------------------------------------

    def _norm_w(self, v: np.ndarray) -> float:
        return float(np.sqrt(np.sum(self.grid.weight * v * v)))

    def _energies(self, omega, phi, Er, Ez, B) -> tuple[float, float]:
        w = self.grid.weight
        kinetic = 0.5 * float(np.sum(w * phi * omega))
        em = 0.5 * float(np.sum(w * (Er * Er + Ez * Ez + B * B)))
        return kinetic, em

    def _ampere_fields(self, B, j_r, j_z) -> tuple[np.ndarray, np.ndarray]:
        """curl B - j, equal to (1/c) dt(E) on solutions of Ampere's law."""
        res_r = -ddz_values(B, self.grid.dz) - j_r
        res_z = ks_values(B, self.grid, "zero") - j_z
        res_r[0] = 0.0
        return res_r, res_z

    def ampere_residual(self, state: NSMState, derived: DerivedFields, s: float = 0.0) -> float:
        """|| curl B - j ||_{H^s} for s in {0, 1/2} (lift-based for s = 1/2)."""
        res_r, res_z = self._ampere_fields(
            state.B_theta.values, derived.j_r.values, derived.j_z.values
        )
        if s == 0.0:
            return float(np.sqrt(np.sum(self.grid.weight * (res_r**2 + res_z**2))))
        if s == 0.5:
            return self._lift_sobolev_noswirl(res_r, res_z, 0.5)
        raise ValueError("ampere_residual supports s in {0, 1/2}")

    def _lift_sobolev_noswirl(self, fr: np.ndarray, fz: np.ndarray, s: float) -> float:
        from .spectral import lift_noswirl_arrays, sobolev_norm

        field = lift_noswirl_arrays(fr, fz, self.grid, self.lift_n, self.grid.R)
        return sobolev_norm(field, s)

    # ---- stepping ------------------------------------------------------------------

    def step(
        self,
        state: NSMState,
        prev_source: tuple[np.ndarray, np.ndarray] | None = None,
        adapt_dt: bool = True,
        dt: float | None = None,
    ) -> tuple[NSMState, StepReport]:
        """One IMEX step.  Returns the new state and its diagnostics.

        `prev_source` is the projected u x B from the previous step (for
        the Adams-Bashforth source extrapolation); the first step falls
        back to the current value.  The step's own projected source is
        left in `self.last_source` for the caller to thread.
        """
        p = self.params
        grid = self.grid
        omega = state.omega_theta.values
        Er, Ez, B = state.E_r.values, state.E_z.values, state.B_theta.values
        dt_req = p.dt if dt is None else dt

        d0 = self._derive(omega, Er, Ez, B)
        rate = float(np.max(np.abs(d0.u_r))) / grid.dr + float(np.max(np.abs(d0.u_z))) / grid.dz
        if not np.isfinite(rate):
            raise NumericalError(f"NaN detected in velocity at t={state.t:.6g}")
        if adapt_dt:
            dt = min(dt_req, 0.5 / rate) if rate > 0 else dt_req
        else:
            if dt_req * rate > 1.0:
                raise CFLError(
                    f"CFL violation at t={state.t:.6g}: dt*(max|u_r|/dr + max|u_z|/dz)"
                    f"={dt_req * rate:.3g} > 1; suggested dt={0.5 / rate:.3g}",
                    suggested_dt=0.5 / rate,
                )
            dt = dt_req

        w = grid.weight
        kin0, em0 = self._energies(omega, d0.phi, Er, Ez, B)
        j0_sq = float(np.sum(w * (d0.j_r**2 + d0.j_z**2)))
        om0_sq = float(np.sum(w * omega * omega))

        f_now = (d0.pf_r, d0.pf_z)
        f_prev = prev_source if prev_source is not None else f_now
        S_r = -p.sigma * (1.5 * f_now[0] - 0.5 * f_prev[0])
        S_z = -p.sigma * (1.5 * f_now[1] - 0.5 * f_prev[1])

        Er1, Ez1, B1 = self._maxwell_advance(Er, Ez, B, S_r, S_z, dt)

        coef = p.nu * dt / 2.0
        n1 = self._explicit_rhs(omega, B, d0)
        base = omega + coef * self._lap_minus(omega)
        omega_star = self.ops.solve_diffusion(base + dt * n1, coef)
        d_star = self._derive(omega_star, Er1, Ez1, B1)
        n2 = self._explicit_rhs(omega_star, B1, d_star)
        omega1 = self.ops.solve_diffusion(base + 0.5 * dt * (n1 + n2), coef)

        if not (
            np.all(np.isfinite(omega1))
            and np.all(np.isfinite(Er1))
            and np.all(np.isfinite(Ez1))
            and np.all(np.isfinite(B1))
        ):
            raise NumericalError(f"NaN detected after step at t={state.t:.6g}")

        # Energy ledger: trapezoidal dissipation between the step endpoints.
        # The endpoint current reuses the corrector-stage projection (the
        # difference against the exact endpoint current is O(dt^2) and does
        # not disturb the second-order balance residual).
        phi1 = self.ops.solve_stream_phi(omega1)
        kin1, em1 = self._energies(omega1, phi1, Er1, Ez1, B1)
        j1_r = p.sigma * (p.c * Er1 + d_star.pf_r)
        j1_z = p.sigma * (p.c * Ez1 + d_star.pf_z)
        j1_sq = float(np.sum(w * (j1_r**2 + j1_z**2)))
        om1_sq = float(np.sum(w * omega1 * omega1))
        dissipation = dt * (
            p.nu * 0.5 * (om0_sq + om1_sq) + (1.0 / p.sigma) * 0.5 * (j0_sq + j1_sq)
        )
        residual = (kin1 + em1) - (kin0 + em0) + dissipation

        divE = self.ops.divergence(Er1, Ez1)
        divE[0] = 0.0
        res_r, res_z = self._ampere_fields(B1, j1_r, j1_z)

        report = StepReport(
            t=state.t + dt,
            dt_used=dt,
            cfl_advective=dt * rate,
            energy_total=kin1 + em1,
            energy_balance_residual=residual,
            ampere_residual_L2=float(np.sqrt(np.sum(w * (res_r**2 + res_z**2)))),
            div_E_residual=self._norm_w(divE),
        )
        new_state = NSMState(
            omega_theta=ScalarField2D(omega1, Parity.ODD),
            E_r=ScalarField2D(Er1, Parity.ODD),
            E_z=ScalarField2D.even(Ez1),
            B_theta=ScalarField2D(B1, Parity.ODD),
            t=state.t + dt,
            grid=grid,
        )
        self.last_source = f_now
        return new_state, report

    # ---- runs ------------------------------------------------------------------------

    def run(
        self,
        initial: NSMState,
        sample_every: int = 15,
        with_h12: bool = True,
    ) -> tuple[list[NSMState], NormLedger]:
        """Integrate to t_end, sampling snapshots and the norm ledger.

        Inside the initial stiff layer (duration ~ 1/(sigma c^2), during
        which E relaxes onto its slaved value from arbitrary data) each
        nominal step is split into coupled ministeps so that both the
        trajectory and the time-integrated residual norms resolve the
        layer uniformly in c.  Time integrals use the trapezoid rule at
        ministep resolution.
        """
        p = self.params
        ledger = NormLedger()
        snapshots: list[NSMState] = [initial]
        state = initial

        acc = _RunAccumulators(self, with_h12)
        acc.prime(state)
        self._ledger_sample(ledger, state, acc, dt_used=0.0, cfl=0.0)

        nsteps = int(round(p.t_end / p.dt))
        prev_source = None
        for n in range(nsteps):
            m = layer_substeps(p, state.t)
            for _ in range(m):
                state, report = self.step(state, prev_source=prev_source, dt=p.dt / m)
                prev_source = self.last_source
                acc.after_step(state, report)
            if (n + 1) % sample_every == 0 or n == nsteps - 1:
                snapshots.append(state)
                self._ledger_sample(
                    ledger, state, acc, dt_used=report.dt_used, cfl=report.cfl_advective
                )
        return snapshots, ledger

    def _ledger_sample(self, ledger, state, acc, dt_used: float, cfl: float) -> None:
        grid = self.grid
        t = state.t
        w = grid.weight
        d = acc.d
        omega = state.omega_theta.values
        Er, Ez, B = state.E_r.values, state.E_z.values, state.B_theta.values
        gam, om = d.Gamma, d.Omega
        csr = -ddz_values(B, grid.dz)
        csz = ks_values(B, grid, "zero")
        omega_l2 = weighted_l2(omega, grid)
        omega_h1 = math.sqrt(
            float(
                np.sum(
                    w
                    * (
                        ddr_even_values(omega, grid) ** 2
                        + ddz_values(omega, grid.dz) ** 2
                        + hardy_values(omega, grid) ** 2
                    )
                )
            )
        )
        rows = {
            "dt_used": dt_used,
            "cfl_advective": cfl,
            "kinetic_energy": acc.kin,
            "em_energy": acc.em,
            "energy_total": acc.kin + acc.em,
            "energy_balance_residual": acc.cum_residual,
            "u_dissipation": acc.cum_u_diss,
            "j_dissipation": acc.cum_j_diss,
            "ampere_residual_L2": acc.last_res_l2,
            "ampere_residual_H12": acc.last_res_h12,
            "ampere_residual_L2t_L2": math.sqrt(max(acc.int_res_l2_sq, 0.0)),
            "ampere_residual_L2t_H12": math.sqrt(max(acc.int_res_h12_sq, 0.0)),
            "div_E_residual": acc.last_dive,
            "gamma_L2": weighted_lp(gam, grid, 2),
            "gamma_L3": weighted_lp(gam, grid, 3),
            "gamma_L4": weighted_lp(gam, grid, 4),
            "Omega_L2": weighted_l2(om, grid),
            "max_ur_over_r": float(np.max(np.abs(hardy_values(d.u_r, grid)))),
            "omega_L2": omega_l2,
            "omega_H1": omega_h1,
            "omega_Omega_L2": math.sqrt(omega_l2**2 + weighted_l2(om, grid) ** 2),
            "u_L2": math.sqrt(max(2.0 * acc.kin, 0.0)),
            "E_L2": float(np.sqrt(np.sum(w * (Er**2 + Ez**2)))),
            "B_L2": weighted_l2(B, grid),
            "j_L2": float(np.sqrt(np.sum(w * (d.j_r**2 + d.j_z**2)))),
            "B_H1": float(np.sqrt(np.sum(w * (csr**2 + csz**2)))),
            "B_H2_grid": self._norm_w(self._lap_minus(B)),
            "Gamma_H1_grid": float(
                np.sqrt(
                    np.sum(
                        w
                        * (ddr_even_values(gam, grid) ** 2 + ddz_values(gam, grid.dz) ** 2)
                    )
                )
            ),
            "B_L2t_H1": math.sqrt(max(acc.int_b_h1_sq, 0.0)),
            "Gamma_L2t_H1": math.sqrt(max(acc.int_gamma_h1_sq, 0.0)),
        }
        for name, value in rows.items():
            ledger.add(t, name, value)


class _RunAccumulators:
    """Trapezoidal time integrals tracked across a run."""

    def __init__(self, solver: NSMSolver, with_h12: bool):
        self.solver = solver
        self.with_h12 = with_h12
        self.cum_residual = 0.0
        self.cum_u_diss = 0.0
        self.cum_j_diss = 0.0
        self.int_res_l2_sq = 0.0
        self.int_res_h12_sq = 0.0
        self.int_b_h1_sq = 0.0
        self.int_gamma_h1_sq = 0.0
        self.kin = 0.0
        self.em = 0.0
        self.last_res_l2 = 0.0
        self.last_res_h12 = 0.0
        self.last_dive = 0.0
        self.d: _Derived | None = None
        self._prev_t = 0.0
        self._prev = {}

    def _residual_norms(self, B, j_r, j_z) -> tuple[float, float]:
        s = self.solver
        res_r, res_z = s._ampere_fields(B, j_r, j_z)
        l2_sq = float(np.sum(s.grid.weight * (res_r**2 + res_z**2)))
        h12_sq = s._lift_sobolev_noswirl(res_r, res_z, 0.5) ** 2 if self.with_h12 else 0.0
        return l2_sq, h12_sq

    def _state_norms(self, state: NSMState, d: _Derived) -> dict[str, float]:
        s = self.solver
        grid = s.grid
        w = grid.weight
        B = state.B_theta.values
        omega = state.omega_theta.values
        res_l2_sq, res_h12_sq = self._residual_norms(B, d.j_r, d.j_z)
        csr = -ddz_values(B, grid.dz)
        csz = ks_values(B, grid, "zero")
        gam = d.Gamma
        return {
            "res_l2_sq": res_l2_sq,
            "res_h12_sq": res_h12_sq,
            "b_h1_sq": float(np.sum(w * (csr**2 + csz**2))),
            "gam_h1_sq": float(
                np.sum(w * (ddr_even_values(gam, grid) ** 2 + ddz_values(gam, grid.dz) ** 2))
            ),
            "om_sq": float(np.sum(w * omega * omega)),
            "j_sq": float(np.sum(w * (d.j_r**2 + d.j_z**2))),
        }

    def prime(self, state: NSMState) -> None:
        s = self.solver
        d = s._derive(
            state.omega_theta.values, state.E_r.values, state.E_z.values, state.B_theta.values
        )
        self.d = d
        self.kin, self.em = s._energies(
            state.omega_theta.values,
            d.phi,
            state.E_r.values,
            state.E_z.values,
            state.B_theta.values,
        )
        self._prev = self._state_norms(state, d)
        self.last_res_l2 = math.sqrt(self._prev["res_l2_sq"])
        self.last_res_h12 = math.sqrt(self._prev["res_h12_sq"])
        dive = s.ops.divergence(state.E_r.values, state.E_z.values)
        dive[0] = 0.0
        self.last_dive = s._norm_w(dive)
        self._prev_t = state.t

    def after_step(self, state: NSMState, report: StepReport) -> None:
        s = self.solver
        p = s.params
        d = s._derive(
            state.omega_theta.values, state.E_r.values, state.E_z.values, state.B_theta.values
        )
        self.d = d
        now = self._state_norms(state, d)

        full = state.t - self._prev_t
        self.int_res_l2_sq += 0.5 * full * (self._prev["res_l2_sq"] + now["res_l2_sq"])
        self.int_res_h12_sq += 0.5 * full * (self._prev["res_h12_sq"] + now["res_h12_sq"])
        self.int_b_h1_sq += 0.5 * full * (self._prev["b_h1_sq"] + now["b_h1_sq"])
        self.int_gamma_h1_sq += 0.5 * full * (self._prev["gam_h1_sq"] + now["gam_h1_sq"])
        self.cum_u_diss += full * p.nu * (self._prev["om_sq"] + now["om_sq"])
        self.cum_j_diss += full * (1.0 / p.sigma) * (self._prev["j_sq"] + now["j_sq"])
        self.cum_residual += report.energy_balance_residual
        self.kin, self.em = s._energies(
            state.omega_theta.values,
            d.phi,
            state.E_r.values,
            state.E_z.values,
            state.B_theta.values,
        )
        self.last_res_l2 = math.sqrt(now["res_l2_sq"])
        self.last_res_h12 = math.sqrt(now["res_h12_sq"])
        self.last_dive = report.div_E_residual
        self._prev = now
        self._prev_t = state.t
