"""Radial operator kernels and per-axial-mode direct solvers.

Discrete vector calculus on the half-strip is built from three radial
derivative flavours plus the periodic centered z-derivative:

    KS f = dr(f) + f/r        divergence-type, acts on odd fields
    KG q = ((r q)' - q)/r     gradient-type, acts on even fields
    H  f = f/r                Hardy division of an odd field

with the centered difference dr and products against the lattice radii
taken literally.  KS and -KG are exact adjoints in the cylindrical inner
product (weight 2*pi*r*dr*dz) for fields vanishing at the wall, which is
the property the solvers rely on: curls, divergence, gradient and the
vector Laplacian (Delta - 1/r^2) = -curl(curl) built from these kernels
satisfy the summation-by-parts identities exactly, so the semi-discrete
energy balance closes to round-off and the reported balance residuals
measure time discretization only.

Elliptic problems (stream function, Poisson, implicit diffusion, the
trapezoidal Maxwell update) diagonalize over axial wavenumbers: the
centered z-derivative has symbol i*sin(k~*dz)/dz, leaving one small dense
radial system per mode whose inverse is computed once and cached.
"""

from __future__ import annotations

import numpy as np

from .grid import GridSpec


def ddz_values(v: np.ndarray, dz: float) -> np.ndarray:
    """Periodic centered z-derivative along axis 1."""
    return (np.roll(v, -1, axis=1) - np.roll(v, 1, axis=1)) / (2.0 * dz)


def hardy_values(v: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Divide an odd field by r; axis row is the one-sided limit dr(f)(0)."""
    r = grid.rc
    out = np.empty_like(v)
    out[1:] = v[1:] / r[1:]
    out[0] = (4.0 * v[1] - v[2]) / (2.0 * grid.dr)
    return out


def ks_values(v: np.ndarray, grid: GridSpec, wall: str = "zero") -> np.ndarray:
    """Divergence-type radial derivative dr(f) + f/r of an odd field.

    Axis row carries the limit 2*dr(f)(0); the wall row is zeroed inside
    solver compositions (Dirichlet) or one-sided for diagnostics.
    """
    dr = grid.dr
    r = grid.rc
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / (2.0 * dr) + v[1:-1] / r[1:-1]
    out[0] = (6.0 * v[1] - v[2]) / (2.0 * dr)
    if wall == "zero":
        out[-1] = 0.0
    else:
        out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * dr) + v[-1] / grid.R
    return out


def kg_values(v: np.ndarray, grid: GridSpec, wall: str = "zero") -> np.ndarray:
    """Gradient-type radial derivative ((r q)' - q)/r of an even field.

    Exact negative adjoint of ks_values in the cylindrical inner product.
    The axis row is zero (odd output).
    """
    dr = grid.dr
    r = grid.rc
    out = np.empty_like(v)
    out[1:-1] = ((r[2:] * v[2:] - r[:-2] * v[:-2]) / (2.0 * dr) - v[1:-1]) / r[1:-1]
    out[0] = 0.0
    if wall == "zero":
        out[-1] = 0.0
    else:
        out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * dr)
    return out


def lap_minus_values(v: np.ndarray, grid: GridSpec, wall: str = "zero") -> np.ndarray:
    """(Delta - 1/r^2) of an odd field as -curl(curl), energy-compatible."""
    return kg_values(ks_values(v, grid, wall), grid, wall) + ddz_values(
        ddz_values(v, grid.dz), grid.dz
    )


def _kernel_matrix(kernel, grid: GridSpec) -> np.ndarray:
    """Materialize a radial kernel as a dense (Nr+1)x(Nr+1) matrix."""
    eye = np.eye(grid.Nr + 1)
    return kernel(eye, grid)


class GridOperators:
    """Cached per-mode direct solvers for one lattice."""

    def __init__(self, grid: GridSpec):
        self.grid = grid
        n = grid.Nr + 1
        self.n = n
        self.nmodes = grid.Nz // 2 + 1
        # Symbol of the periodic centered z-derivative: i * s_k.
        k = np.arange(self.nmodes)
        self.s_k = np.sin(2.0 * np.pi * k / grid.Nz) / grid.dz
        self.KS = _kernel_matrix(lambda e, g: ks_values(e, g, "zero"), grid)
        self.KG = _kernel_matrix(lambda e, g: kg_values(e, g, "zero"), grid)
        self.KGKS = self.KG @ self.KS
        self.KSKG = self.KS @ self.KG
        self._stream_inv: np.ndarray | None = None
        self._pois_inv: np.ndarray | None = None
        self._diffusion_inv: dict[float, np.ndarray] = {}
        self._maxwell_cache: dict[tuple[float, float, float], tuple] = {}

    # -- mode transforms -------------------------------------------------

    def to_modes(self, v: np.ndarray) -> np.ndarray:
        """(Nr+1, Nz) real -> (nmodes, Nr+1) complex."""
        return np.fft.rfft(v, axis=1).T.copy()

    def from_modes(self, m: np.ndarray) -> np.ndarray:
        return np.fft.irfft(m.T, n=self.grid.Nz, axis=1)

    @staticmethod
    def _batch_solve(inv: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        # Real cached inverses applied to complex mode data: two batched
        # real GEMMs are much faster than a complex einsum here.
        if np.iscomplexobj(rhs):
            parts = np.empty(rhs.shape + (2,))
            parts[..., 0] = rhs.real
            parts[..., 1] = rhs.imag
            out = inv @ parts
            return out[..., 0] + 1j * out[..., 1]
        return (inv @ rhs[..., None])[..., 0]

    def _dirichlet_rows(self, mat: np.ndarray, rows: tuple[int, ...]) -> None:
        for r in rows:
            mat[:, r, :] = 0.0
            mat[:, r, r] = 1.0

    # -- stream function --------------------------------------------------

    def _mode_stack(self, radial: np.ndarray, sign_s2: float) -> np.ndarray:
        stack = np.broadcast_to(radial, (self.nmodes, self.n, self.n)).copy()
        idx = np.arange(self.n)
        stack[:, idx, idx] += sign_s2 * (self.s_k**2)[:, None]
        return stack

    def stream_inverse(self) -> np.ndarray:
        """Inverse of the vector-potential operator s^2 - KG KS, Dirichlet ends."""
        if self._stream_inv is None:
            stack = self._mode_stack(-self.KGKS, +1.0)
            self._dirichlet_rows(stack, (0, self.n - 1))
            self._stream_inv = np.linalg.inv(stack)
        return self._stream_inv

    def solve_stream_phi(self, omega: np.ndarray) -> np.ndarray:
        """Solve curl(curl(phi e_theta)) = omega e_theta for the potential phi."""
        rhs = self.to_modes(omega)
        rhs[:, 0] = 0.0
        rhs[:, -1] = 0.0
        phi = self.from_modes(self._batch_solve(self.stream_inverse(), rhs))
        phi[0] = 0.0
        phi[-1] = 0.0
        return phi

    def apply_stream_operator(self, phi: np.ndarray) -> np.ndarray:
        """omega = (s^2 - KG KS) phi, the exact forward map of the solve."""
        out = -(self.KGKS @ phi) - ddz_values(ddz_values(phi, self.grid.dz), self.grid.dz)
        out[0] = 0.0
        out[-1] = 0.0
        return out

    # -- Poisson / Leray ---------------------------------------------------

    def pois_inverse(self) -> np.ndarray:
        """Inverse of div(grad(.)) on even scalars, Dirichlet at the wall.

        The axis row of KS KG is inconsistent for the even-field Taylor
        family, so it is replaced by the direct axis limit of the
        axisymmetric Laplacian, 2*d_rr + d_zz.
        """
        if self._pois_inv is None:
            stack = self._mode_stack(self.KSKG, -1.0)
            dr2 = self.grid.dr**2
            stack[:, 0, :] = 0.0
            stack[:, 0, 0] = -4.0 / dr2 - self.s_k**2
            stack[:, 0, 1] = 4.0 / dr2
            self._dirichlet_rows(stack, (self.n - 1,))
            self._pois_inv = np.linalg.inv(stack)
        return self._pois_inv

    def solve_poisson(self, source: np.ndarray) -> np.ndarray:
        rhs = self.to_modes(source)
        rhs[:, -1] = 0.0
        q = self.from_modes(self._batch_solve(self.pois_inverse(), rhs))
        q[-1] = 0.0
        return q

    def apply_poisson_operator(self, q: np.ndarray) -> np.ndarray:
        """Forward map of solve_poisson: div(grad q) with the direct axis row."""
        dzz = ddz_values(ddz_values(q, self.grid.dz), self.grid.dz)
        out = self.KSKG @ q + dzz
        out[0] = 4.0 * (q[1] - q[0]) / self.grid.dr**2 + dzz[0]
        out[-1] = q[-1]
        return out

    def divergence(self, fr: np.ndarray, fz: np.ndarray) -> np.ndarray:
        return ks_values(fr, self.grid, "zero") + ddz_values(fz, self.grid.dz)

    def gradient(self, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return kg_values(q, self.grid, "zero"), ddz_values(q, self.grid.dz)

    def leray(self, fr: np.ndarray, fz: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Remove the discrete gradient part; output divergence vanishes
        exactly on all weighted rows (the zero-weight axis row may drift)."""
        q = self.solve_poisson(self.divergence(fr, fz))
        gr, gz = self.gradient(q)
        return fr - gr, fz - gz

    # -- implicit diffusion ------------------------------------------------

    def diffusion_inverse(self, coef: float) -> np.ndarray:
        """Inverse of I - coef*(Delta - 1/r^2), Dirichlet ends; coef = nu*dt/2."""
        inv = self._diffusion_inv.get(coef)
        if inv is None:
            stack = self._mode_stack(self.KGKS, -1.0)
            stack *= -coef
            idx = np.arange(self.n)
            stack[:, idx, idx] += 1.0
            self._dirichlet_rows(stack, (0, self.n - 1))
            inv = np.linalg.inv(stack)
            self._diffusion_inv[coef] = inv
        return inv

    def solve_diffusion(self, rhs_grid: np.ndarray, coef: float) -> np.ndarray:
        rhs = self.to_modes(rhs_grid)
        rhs[:, 0] = 0.0
        rhs[:, -1] = 0.0
        out = self.from_modes(self._batch_solve(self.diffusion_inverse(coef), rhs))
        out[0] = 0.0
        out[-1] = 0.0
        return out

    # -- trapezoidal Maxwell -----------------------------------------------

    def maxwell_stepper(self, c: float, sigma: float, dt: float):
        """One Crank-Nicolson step of the damped Maxwell system.

        Eliminating the midpoint electric field leaves a real radial system
        for the midpoint magnetic field per mode:

            [2a + (s^2 - KG KS)/(2 beta)] Bbar = 2a B + (a/beta)(-i s Er + KG Ez)
                                                 + (-i s Sr + KG Sz)/(2 beta)

        with a = 1/(c dt), beta = a + sigma*c/2.  The unconditional
        stability in c comes from the trapezoidal treatment of the full
        linear operator.
        """
        key = (c, sigma, dt)
        cached = self._maxwell_cache.get(key)
        if cached is None:
            a = 1.0 / (c * dt)
            beta = a + sigma * c / 2.0
            stack = self._mode_stack(-self.KGKS, +1.0)
            stack /= 2.0 * beta
            idx = np.arange(self.n)
            stack[:, idx, idx] += 2.0 * a
            self._dirichlet_rows(stack, (0, self.n - 1))
            cached = (np.linalg.inv(stack), a, beta)
            self._maxwell_cache[key] = cached
        mb_inv, a, beta = cached

        def step(er, ez, b, sr, sz):
            """Advance mode arrays (nmodes, Nr+1) by dt; returns new and midpoint."""
            mu = 1j * self.s_k[:, None]
            rhs = (
                2.0 * a * b
                + (a / beta) * (-mu * er + ez @ self.KG.T)
                + (-mu * sr + sz @ self.KG.T) / (2.0 * beta)
            )
            rhs[:, 0] = 0.0
            rhs[:, -1] = 0.0
            bbar = self._batch_solve(mb_inv, rhs)
            # Structural zeros (parity at the axis, wall Dirichlet) are kept
            # exact; the cached inverses only honor them to round-off.
            bbar[:, 0] = 0.0
            bbar[:, -1] = 0.0
            ebar_r = (a * er + 0.5 * (-mu * bbar + sr)) / beta
            ebar_z = (a * ez + 0.5 * (bbar @ self.KS.T + sz)) / beta
            ebar_r[:, 0] = 0.0
            ebar_r[:, -1] = 0.0
            ebar_z[:, -1] = 0.0
            return (
                2.0 * ebar_r - er,
                2.0 * ebar_z - ez,
                2.0 * bbar - b,
                ebar_r,
                ebar_z,
                bbar,
            )

        return step


_OPERATOR_CACHE: dict[GridSpec, GridOperators] = {}


def operators_for(grid: GridSpec) -> GridOperators:
    ops = _OPERATOR_CACHE.get(grid)
    if ops is None:
        ops = GridOperators(grid)
        _OPERATOR_CACHE[grid] = ops
    return ops
