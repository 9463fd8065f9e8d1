"""Fourier-side diagnostics on a periodic 3-D lift of axisymmetric fields.

Axisymmetric (r, z) fields are lifted to a periodic cube (side 2*R_box,
N samples per side) where dyadic Littlewood-Paley analysis, Besov and
Sobolev norms, the high/low frequency split at sigma*c, the Leray
projector and Bony paraproducts are exact Fourier-multiplier objects.

Two related dyadic families are used:

* block multipliers m_j with sum_j m_j(xi)^2 = 1 on the resolvable band
  (an L^2-tight partition).  Block energies are then exactly additive,
  sum_j ||D_j f||^2 = ||f||^2, and applying the family twice
  reconstructs f; these back the Besov/Chemin-Lerner norms.
* bump multipliers p_j = m_j^2 with sum_j p_j = 1, the partition of
  unity used for the Bony decomposition, where completeness of
  T_FG + T_GF + R(F, G) against the pointwise product is the identity
  under test.

Each m_j is a smooth radial annular bump supported in
[2^(j-1), 2^(j+1)], following the classical dyadic convention.

Sobolev norms use the sharp multiplier |xi|^s (exact per mode); the
documented bump-versus-sharp discrepancy of Besov sums against them is a
constant factor per shell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import GridSpec


class LiftError(ValueError):
    """Field support does not fit in the lift cube."""


class DealiasError(ValueError):
    """Inputs carry too much spectrum for exact grid products."""


# ---------------------------------------------------------------------------
# cube container and wavenumber helpers
# ---------------------------------------------------------------------------


@dataclass
class CartesianField3D:
    """Three N^3 sample lattices on a periodic cube of side 2*r_box."""

    fx: np.ndarray
    fy: np.ndarray
    fz: np.ndarray
    r_box: float

    def __post_init__(self) -> None:
        n = self.fx.shape[0]
        for a in (self.fx, self.fy, self.fz):
            if a.shape != (n, n, n):
                raise ValueError("CartesianField3D components must be cubic and equal")
        if n & (n - 1) != 0:
            raise ValueError("cube resolution must be a power of two")
        if not (
            np.all(np.isfinite(self.fx))
            and np.all(np.isfinite(self.fy))
            and np.all(np.isfinite(self.fz))
        ):
            raise ValueError("non-finite samples in CartesianField3D")

    @property
    def n(self) -> int:
        return self.fx.shape[0]

    @property
    def box(self) -> float:
        return 2.0 * self.r_box

    def components(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.fx, self.fy, self.fz


def cube_coords(n: int, r_box: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    x = -r_box + (2.0 * r_box / n) * np.arange(n)
    return np.meshgrid(x, x, x, indexing="ij")


def _wavenumbers(n: int, box: float):
    k1 = 2.0 * np.pi * np.fft.fftfreq(n, d=box / n)
    kr = 2.0 * np.pi * np.fft.rfftfreq(n, d=box / n)
    kx = k1[:, None, None]
    ky = k1[None, :, None]
    kz = kr[None, None, :]
    return kx, ky, kz


def _kmag(n: int, box: float) -> np.ndarray:
    kx, ky, kz = _wavenumbers(n, box)
    return np.sqrt(kx**2 + ky**2 + kz**2)


def _rfft_weights(n: int) -> np.ndarray:
    """Multiplicity of each rfftn mode when summing |f^|^2 over the full grid."""
    w = np.full(n // 2 + 1, 2.0)
    w[0] = 1.0
    w[-1] = 1.0
    return w[None, None, :]


def _parseval_factor(n: int, box: float) -> float:
    # ||f||_{L^2(cube)}^2 = (box^3 / n^6) * sum_k mult_k |f^_k|^2 for rfftn.
    return box**3 / float(n) ** 6


# ---------------------------------------------------------------------------
# lifting axisymmetric lattice fields to the cube
# ---------------------------------------------------------------------------


def _interp_table(grid: GridSpec, n: int, r_box: float):
    """Bilinear interpolation stencil from the (r, z) lattice to the cube."""
    if n & (n - 1) != 0:
        raise ValueError("lift resolution must be a power of two")
    box = 2.0 * r_box
    ratio = box / grid.Lz
    if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
        raise LiftError(
            f"lift cube side {box} must be an integer number of axial periods {grid.Lz}"
        )
    X, Y, Z = cube_coords(n, r_box)
    rho = np.sqrt(X**2 + Y**2)
    zz = np.mod(Z, grid.Lz)
    ir = rho / grid.dr
    i0 = np.floor(ir).astype(np.int64)
    tr = ir - i0
    iz = zz / grid.dz
    k0 = np.floor(iz).astype(np.int64) % grid.Nz
    tz = iz - np.floor(iz)
    k1 = (k0 + 1) % grid.Nz
    outside = i0 >= grid.Nr
    i0c = np.clip(i0, 0, grid.Nr - 1)
    return rho, X, Y, i0c, tr, k0, k1, tz, outside


def _interp_scalar(values: np.ndarray, tab) -> np.ndarray:
    _, _, _, i0, tr, k0, k1, tz, outside = tab
    v00 = values[i0, k0]
    v01 = values[i0, k1]
    v10 = values[i0 + 1, k0]
    v11 = values[i0 + 1, k1]
    out = (1 - tr) * ((1 - tz) * v00 + tz * v01) + tr * ((1 - tz) * v10 + tz * v11)
    out[outside] = 0.0
    return out


def _support_check(values: np.ndarray, grid: GridSpec, r_box: float) -> None:
    margin = 2.0 * grid.dr
    scale = float(np.max(np.abs(values)))
    if scale == 0.0:
        return
    mask = grid.r >= r_box - margin
    if np.any(mask) and float(np.max(np.abs(values[mask]))) > 1e-10 * scale:
        raise LiftError("lift clipping: field support reaches the cube boundary")


def lift_swirl_arrays(
    b_theta: np.ndarray, grid: GridSpec, n: int, r_box: float
) -> CartesianField3D:
    """Lift a pure-swirl field B_theta e_theta to the cube.

    Uses the smooth even quotient g = B_theta / r so the components
    (-g y, g x, 0) are regular through the axis and exactly orthogonal to
    e_r and e_z at every grid point.
    """
    from .modal import hardy_values

    _support_check(b_theta, grid, r_box)
    tab = _interp_table(grid, n, r_box)
    g = _interp_scalar(hardy_values(b_theta, grid), tab)
    _, X, Y, *_ = tab
    return CartesianField3D(-g * Y, g * X, np.zeros_like(g), r_box)


def lift_noswirl_arrays(
    f_r: np.ndarray, f_z: np.ndarray, grid: GridSpec, n: int, r_box: float
) -> CartesianField3D:
    """Lift a no-swirl field (f_r, f_z) to the cube via g = f_r / r."""
    from .modal import hardy_values

    _support_check(f_r, grid, r_box)
    _support_check(f_z, grid, r_box)
    tab = _interp_table(grid, n, r_box)
    g = _interp_scalar(hardy_values(f_r, grid), tab)
    fz = _interp_scalar(f_z, tab)
    _, X, Y, *_ = tab
    return CartesianField3D(g * X, g * Y, fz, r_box)


def lift_scalar_arrays(
    f: np.ndarray, grid: GridSpec, n: int, r_box: float
) -> CartesianField3D:
    """Lift an even axisymmetric scalar as the z-component of a cube field."""
    _support_check(f, grid, r_box)
    tab = _interp_table(grid, n, r_box)
    g = _interp_scalar(f, tab)
    return CartesianField3D(np.zeros_like(g), np.zeros_like(g), g, r_box)


def lift(
    field,
    grid: GridSpec,
    swirl: bool,
    n: int = 64,
    r_box: float | None = None,
) -> CartesianField3D:
    """Lift an axisymmetric field to the periodic cube.

    `field` is a ScalarField2D for swirl=True (the theta component) or a
    NoSwirlVec2 for swirl=False.
    """
    r_box = grid.R if r_box is None else r_box
    if swirl:
        return lift_swirl_arrays(field.values, grid, n, r_box)
    return lift_noswirl_arrays(field.f_r.values, field.f_z.values, grid, n, r_box)


# ---------------------------------------------------------------------------
# dyadic blocks
# ---------------------------------------------------------------------------


def _smoothstep(t: np.ndarray) -> np.ndarray:
    """C^inf transition: 1 for t <= 0, 0 for t >= 1."""

    def f(s):
        out = np.zeros_like(s)
        pos = s > 0
        out[pos] = np.exp(-1.0 / s[pos])
        return out

    a = f(1.0 - t)
    b = f(t)
    return a / (a + b + 1e-300)


def _lowpass(kmag: np.ndarray, cutoff: float) -> np.ndarray:
    """Smooth radial low-pass: 1 below cutoff/2, 0 above cutoff."""
    t = 2.0 * kmag / cutoff - 1.0
    return _smoothstep(t)


@dataclass
class BlockSpectrum:
    """Map j -> ||D_j f||_{L^2} over the resolvable dyadic range."""

    norms: dict[int, float]
    j_range: tuple[int, int]
    j_c: int
    sigma_c: float
    total_l2: float = 0.0
    t: float = field(default=0.0)

    def blocks(self) -> list[int]:
        return sorted(self.norms)


def resolvable_range(n: int, box: float) -> tuple[int, int]:
    """Shells whose annulus lies inside the Nyquist ball."""
    k_fund = 2.0 * np.pi / box
    k_nyq = k_fund * (n / 2.0)
    j_min = math.floor(math.log2(k_fund))
    j_max = math.floor(math.log2(k_nyq / 2.0))
    return j_min, j_max


def coverage_range(n: int, box: float) -> tuple[int, int]:
    """Shells needed to cover every nonzero lattice mode (corners included)."""
    k_fund = 2.0 * np.pi / box
    k_corner = k_fund * (n / 2.0) * math.sqrt(3.0)
    return math.floor(math.log2(k_fund)), math.ceil(math.log2(k_corner))


def block_multipliers(n: int, box: float) -> dict[int, np.ndarray]:
    """Tight-frame dyadic multipliers m_j on the rfftn lattice.

    m_j^2 = S_{j+1}^2 - S_j^2 with smooth low-passes S_j cutting between
    2^(j-1) and 2^j, so m_j is supported in [2^(j-1), 2^(j+1)] and the
    family covers every nonzero lattice mode: sum_j m_j(xi)^2 = 1 for
    all xi != 0 (the zero mode is the unresolved low tail).
    """
    kmag = _kmag(n, box)
    j_min, j_max = coverage_range(n, box)
    mults: dict[int, np.ndarray] = {}
    s_prev = _lowpass(kmag, 2.0**j_min) ** 2
    for j in range(j_min, j_max + 1):
        s_next = _lowpass(kmag, 2.0 ** (j + 1)) ** 2
        mults[j] = np.sqrt(np.maximum(s_next - s_prev, 0.0))
        s_prev = s_next
    return mults


_MULT_CACHE: dict[tuple[int, float], dict[int, np.ndarray]] = {}


def _mults_for(n: int, box: float) -> dict[int, np.ndarray]:
    key = (n, round(box, 12))
    if key not in _MULT_CACHE:
        _MULT_CACHE[key] = block_multipliers(n, box)
    return _MULT_CACHE[key]


def dyadic_blocks(f: CartesianField3D, sigma_c: float = math.inf, t: float = 0.0) -> BlockSpectrum:
    """Dyadic block norms of a cube field; the split index j_c marks the
    first shell with 2^j >= sigma*c."""
    n, box = f.n, f.box
    mults = _mults_for(n, box)
    wts = _rfft_weights(n)
    fac = _parseval_factor(n, box)
    spectra = [np.abs(np.fft.rfftn(c)) ** 2 * wts for c in f.components()]
    norms = {}
    total = 0.0
    for j, m in mults.items():
        s = sum(float(np.sum(m**2 * sp)) for sp in spectra)
        norms[j] = math.sqrt(fac * s)
    total = math.sqrt(fac * sum(float(np.sum(sp)) for sp in spectra))
    j_min, j_max = resolvable_range(n, box)
    j_c = math.ceil(math.log2(sigma_c)) if np.isfinite(sigma_c) else j_max + 1
    return BlockSpectrum(norms=norms, j_range=(j_min, j_max), j_c=j_c, sigma_c=sigma_c, total_l2=total, t=t)


def block_fields(f: CartesianField3D, partition_of_unity: bool = False) -> dict[int, CartesianField3D]:
    """Inverse-transformed block fields D_j f (p_j = m_j^2 if requested)."""
    n, box = f.n, f.box
    mults = _mults_for(n, box)
    hats = [np.fft.rfftn(c) for c in f.components()]
    out = {}
    for j, m in mults.items():
        mm = m**2 if partition_of_unity else m
        comps = [np.fft.irfftn(mm * h, s=(n, n, n), axes=(0, 1, 2)) for h in hats]
        out[j] = CartesianField3D(*comps, f.r_box)
    return out


def reconstruct_from_blocks(f: CartesianField3D) -> CartesianField3D:
    """Apply the tight frame twice: sum_j D_j(D_j f) = resolved part of f."""
    n, box = f.n, f.box
    mults = _mults_for(n, box)
    msq = sum(m**2 for m in mults.values())
    comps = [np.fft.irfftn(msq * np.fft.rfftn(c), s=(n, n, n), axes=(0, 1, 2)) for c in f.components()]
    return CartesianField3D(*comps, f.r_box)


def band_limit(f: CartesianField3D, k_max: float) -> CartesianField3D:
    """Smooth radial low-pass: passband below k_max/2, zero above k_max.

    The taper must be smooth: a sharp spectral ball has a slowly decaying
    kernel whose periodized copies are no longer radial and visibly break
    the axisymmetric structure of swirl fields; the smooth kernel decays
    fast enough that the wrap-around sits at round-off.
    """
    mult = _lowpass(_kmag(f.n, f.box), k_max)
    comps = [np.fft.irfftn(mult * np.fft.rfftn(c), s=(f.n,) * 3, axes=(0, 1, 2)) for c in f.components()]
    return CartesianField3D(*comps, f.r_box)


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------


def l2_norm(f: CartesianField3D) -> float:
    fac = (f.box / f.n) ** 3
    return math.sqrt(
        fac * float(sum(np.sum(c**2) for c in f.components()))
    )


def sobolev_norm(f: CartesianField3D, s: float) -> float:
    """Homogeneous H^s norm via the sharp multiplier |xi|^s (exact per mode)."""
    n, box = f.n, f.box
    kmag = _kmag(n, box)
    wts = _rfft_weights(n)
    fac = _parseval_factor(n, box)
    mult = kmag ** (2.0 * s) if s >= 0 else np.where(kmag > 0, kmag, np.inf) ** (2.0 * s)
    total = 0.0
    for c in f.components():
        total += float(np.sum(mult * wts * np.abs(np.fft.rfftn(c)) ** 2))
    return math.sqrt(fac * total)


def besov_norm(spec: BlockSpectrum, s: float, q: float) -> float:
    """Homogeneous Besov B^s_{2,q} norm from block norms, q in {1, 2, inf}."""
    terms = [2.0 ** (j * s) * nrm for j, nrm in sorted(spec.norms.items())]
    if q == 1:
        return float(sum(terms))
    if q == 2:
        return math.sqrt(float(sum(t * t for t in terms)))
    if q == math.inf:
        return float(max(terms)) if terms else 0.0
    raise ValueError("besov_norm supports q in {1, 2, inf}")


def freq_split(spec: BlockSpectrum, s: float, q: float) -> tuple[float, float]:
    """Besov seminorm split into blocks below / at-or-above sigma*c."""
    low = BlockSpectrum(
        norms={j: v for j, v in spec.norms.items() if 2.0**j < spec.sigma_c},
        j_range=spec.j_range,
        j_c=spec.j_c,
        sigma_c=spec.sigma_c,
    )
    high = BlockSpectrum(
        norms={j: v for j, v in spec.norms.items() if 2.0**j >= spec.sigma_c},
        j_range=spec.j_range,
        j_c=spec.j_c,
        sigma_c=spec.sigma_c,
    )
    return besov_norm(low, s, q), besov_norm(high, s, q)


def chemin_lerner(
    series: list[BlockSpectrum], r_time: float, s: float, q: float,
    blocks: str = "all",
) -> float:
    """Chemin-Lerner norm: the time-Lebesgue norm is taken per block
    (trapezoid over uniform samples), then the weighted l^q sum.

    `blocks` selects "all", "low" or "high" relative to sigma*c.
    """
    if not series:
        raise ValueError("chemin_lerner needs a nonempty series")
    if len(series) < 2 and r_time != math.inf:
        raise ValueError("chemin_lerner needs at least 2 samples for time integrals")
    times = [sp.t for sp in series]
    dts = np.diff(times)
    if len(dts) and not np.allclose(dts, dts[0], rtol=1e-8):
        raise ValueError("chemin_lerner needs uniform sampling")
    names = sorted(series[0].norms)
    sigma_c = series[0].sigma_c

    def keep(j: int) -> bool:
        if blocks == "all":
            return True
        if blocks == "low":
            return 2.0**j < sigma_c
        return 2.0**j >= sigma_c

    terms = []
    for j in names:
        if not keep(j):
            continue
        vals = np.array([sp.norms[j] for sp in series])
        if r_time == math.inf:
            tnorm = float(np.max(vals))
        else:
            tnorm = float(np.trapz(vals**r_time, times) ** (1.0 / r_time))
        terms.append(2.0 ** (j * s) * tnorm)
    if q == 1:
        return float(sum(terms))
    if q == 2:
        return math.sqrt(float(sum(t * t for t in terms)))
    if q == math.inf:
        return float(max(terms)) if terms else 0.0
    raise ValueError("chemin_lerner supports q in {1, 2, inf}")


# ---------------------------------------------------------------------------
# Fourier-multiplier vector calculus
# ---------------------------------------------------------------------------


def _vec_hats(f: CartesianField3D):
    return [np.fft.rfftn(c) for c in f.components()]


def _vec_fields(hats, n, r_box) -> CartesianField3D:
    return CartesianField3D(*[np.fft.irfftn(h, s=(n, n, n), axes=(0, 1, 2)) for h in hats], r_box)


def leray3d(f: CartesianField3D) -> CartesianField3D:
    """P = Id - xi xi^T / |xi|^2 per mode; the zero mode is untouched."""
    n, box = f.n, f.box
    kx, ky, kz = _wavenumbers(n, box)
    hats = _vec_hats(f)
    k2 = kx**2 + ky**2 + kz**2
    k2 = np.where(k2 > 0, k2, 1.0)
    kdotf = kx * hats[0] + ky * hats[1] + kz * hats[2]
    out = [hats[0] - kx * kdotf / k2, hats[1] - ky * kdotf / k2, hats[2] - kz * kdotf / k2]
    return _vec_fields(out, n, f.r_box)


def curl3d(f: CartesianField3D) -> CartesianField3D:
    n, box = f.n, f.box
    kx, ky, kz = _wavenumbers(n, box)
    hx, hy, hz = _vec_hats(f)
    out = [
        1j * (ky * hz - kz * hy),
        1j * (kz * hx - kx * hz),
        1j * (kx * hy - ky * hx),
    ]
    return _vec_fields(out, n, f.r_box)


def div3d_spectrum_norm(f: CartesianField3D) -> float:
    """L^2 norm of the spectral divergence."""
    n, box = f.n, f.box
    kx, ky, kz = _wavenumbers(n, box)
    hx, hy, hz = _vec_hats(f)
    div = 1j * (kx * hx + ky * hy + kz * hz)
    fac = _parseval_factor(n, box)
    return math.sqrt(fac * float(np.sum(_rfft_weights(n) * np.abs(div) ** 2)))


def inv_laplace_curl(f: CartesianField3D) -> CartesianField3D:
    """(-Delta)^{-1} curl f, the operator of the colinearity identity."""
    n, box = f.n, f.box
    kx, ky, kz = _wavenumbers(n, box)
    hx, hy, hz = _vec_hats(f)
    k2 = kx**2 + ky**2 + kz**2
    k2 = np.where(k2 > 0, k2, np.inf)
    out = [
        1j * (ky * hz - kz * hy) / k2,
        1j * (kz * hx - kx * hz) / k2,
        1j * (kx * hy - ky * hx) / k2,
    ]
    return _vec_fields(out, n, f.r_box)


def grad_tensor(f: CartesianField3D):
    """All partial derivatives d_i f_j as a 3x3 nest of arrays."""
    n, box = f.n, f.box
    kx, ky, kz = _wavenumbers(n, box)
    hats = _vec_hats(f)
    ks = (kx, ky, kz)
    return [
        [np.fft.irfftn(1j * ks[i] * hats[j], s=(n, n, n), axes=(0, 1, 2)) for j in range(3)]
        for i in range(3)
    ]


def cross(a: CartesianField3D, b: CartesianField3D) -> CartesianField3D:
    ax, ay, az = a.components()
    bx, by, bz = b.components()
    return CartesianField3D(
        ay * bz - az * by, az * bx - ax * bz, ax * by - ay * bx, a.r_box
    )


def max_spectral_k(f: CartesianField3D, rel_tol: float = 1e-12) -> float:
    """Largest |xi| carrying more than rel_tol of the peak spectral amplitude."""
    n, box = f.n, f.box
    kmag = _kmag(n, box)
    amp = sum(np.abs(np.fft.rfftn(c)) for c in f.components())
    peak = float(np.max(amp))
    if peak == 0.0:
        return 0.0
    act = kmag[amp > rel_tol * peak]
    return float(np.max(act)) if act.size else 0.0


# ---------------------------------------------------------------------------
# Bony decomposition and the structural identities
# ---------------------------------------------------------------------------


def bony_decompose(
    f: CartesianField3D, g: CartesianField3D
) -> tuple[CartesianField3D, CartesianField3D, CartesianField3D]:
    """Paraproduct pieces of the cross product F x G.

    T_F G collects blocks with j_F < k_G - 2, T_G F the transpose, and
    R(F, G) the near-diagonal remainder |j - k| <= 2; their sum equals
    the pointwise cross product of the resolved fields exactly.  Inputs
    must leave dealiasing headroom (spectra within a third of Nyquist).
    """
    n, box = f.n, f.box
    k_nyq = 2.0 * np.pi / box * (n / 2.0)
    headroom = max(max_spectral_k(f), max_spectral_k(g))
    if headroom > (2.0 / 3.0) * k_nyq:
        raise DealiasError(
            f"bony_decompose inputs reach |xi|={headroom:.3g}, above the 2/3 "
            f"dealiasing bound {(2.0 / 3.0) * k_nyq:.3g}"
        )
    fb = block_fields(f, partition_of_unity=True)
    gb = block_fields(g, partition_of_unity=True)
    js = sorted(fb)
    zero = lambda: CartesianField3D(
        np.zeros((n, n, n)), np.zeros((n, n, n)), np.zeros((n, n, n)), f.r_box
    )

    def add(acc: CartesianField3D, piece: CartesianField3D) -> CartesianField3D:
        return CartesianField3D(
            acc.fx + piece.fx, acc.fy + piece.fy, acc.fz + piece.fz, acc.r_box
        )

    def partial_sum(blocks, upto):
        acc = zero()
        for j in js:
            if j <= upto:
                acc = add(acc, blocks[j])
        return acc

    t_fg = zero()
    t_gf = zero()
    rem = zero()
    for k in js:
        low_f = partial_sum(fb, k - 3)
        low_g = partial_sum(gb, k - 3)
        t_fg = add(t_fg, cross(low_f, gb[k]))
        t_gf = add(t_gf, cross(fb[k], low_g))
        for j in js:
            if abs(j - k) <= 2:
                rem = add(rem, cross(fb[j], gb[k]))
    return t_fg, t_gf, rem


def colinearity_identity_residual(f: CartesianField3D, g: CartesianField3D) -> float:
    """Relative L^2 gap between P(F x G) and its curl-form reduction.

    For divergence-free F whose curl is everywhere colinear with G (the
    axisymmetric no-swirl / pure-swirl pairing),

        P(F x G) = (-Delta)^{-1} curl(-F x curl G - 2 (F.grad) G + F div G).

    Generic pairs violate the colinearity and leave an O(1) residual.
    """
    lhs = leray3d(cross(f, g))
    curl_g = curl3d(g)
    fx_cg = cross(f, curl_g)
    gt = grad_tensor(g)
    fx, fy, fz = f.components()
    adv = [fx * gt[0][j] + fy * gt[1][j] + fz * gt[2][j] for j in range(3)]
    n, box = g.n, g.box
    kx, ky, kz = _wavenumbers(n, box)
    hg = _vec_hats(g)
    div_g = np.fft.irfftn(1j * (kx * hg[0] + ky * hg[1] + kz * hg[2]), s=(n, n, n), axes=(0, 1, 2))
    inner = CartesianField3D(
        -fx_cg.fx - 2.0 * adv[0] + fx * div_g,
        -fx_cg.fy - 2.0 * adv[1] + fy * div_g,
        -fx_cg.fz - 2.0 * adv[2] + fz * div_g,
        f.r_box,
    )
    rhs = inv_laplace_curl(inner)
    # The curl form annihilates the cube's zero mode while the projector
    # leaves it untouched (the whole-space identity concerns decaying
    # fields); compare the mean-free parts.
    diff = CartesianField3D(
        lhs.fx - np.mean(lhs.fx) - rhs.fx,
        lhs.fy - np.mean(lhs.fy) - rhs.fy,
        lhs.fz - np.mean(lhs.fz) - rhs.fz,
        f.r_box,
    )
    lhs0 = CartesianField3D(
        lhs.fx - np.mean(lhs.fx), lhs.fy - np.mean(lhs.fy), lhs.fz - np.mean(lhs.fz), f.r_box
    )
    scale = l2_norm(lhs0)
    return l2_norm(diff) / scale if scale > 0 else 0.0


def swirl_preservation_check(g: CartesianField3D, multiplier: np.ndarray) -> float:
    """Apply a Fourier multiplier and measure the residual swirl purity.

    Returns max over the grid of |result.e_r| + |result.e_z| relative to
    the field's own scale; radial multipliers preserve pure swirl, so the
    residual collapses to interpolation/aliasing level, while non-radial
    multipliers leave an O(1) residual.
    """
    n = g.n
    hats = _vec_hats(g)
    out = [np.fft.irfftn(multiplier * h, s=(n, n, n), axes=(0, 1, 2)) for h in hats]
    X, Y, _ = cube_coords(n, g.r_box)
    rho = np.sqrt(X**2 + Y**2)
    rho_safe = np.where(rho > 0, rho, 1.0)
    e_r = (out[0] * X + out[1] * Y) / rho_safe
    # Swirl purity is measured on rho <= r_box/2, where lifted data are
    # allowed to live: the periodic surrogate has no single symmetry axis
    # further out, and multiplier kernels reaching the neighbouring
    # images' bulk would dominate the max there.
    inside = rho <= 0.5 * g.r_box
    scale = max(float(np.max(np.abs(out[0]))), float(np.max(np.abs(out[1]))), 1e-300)
    resid = float(np.max((np.abs(e_r) + np.abs(out[2]))[inside]))
    return resid / scale


def radial_bump_multiplier(n: int, box: float, j: int) -> np.ndarray:
    """The dyadic bump p_j = m_j^2 as a ready-made radial multiplier."""
    return _mults_for(n, box)[j] ** 2


def halfspace_multiplier(n: int, box: float) -> np.ndarray:
    """Non-radial control multiplier: indicator of the half-space k_x > 0."""
    kx, _, _ = _wavenumbers(n, box)
    return (kx > 0).astype(float) + 0.0 * kx


def gauss_taper(f: CartesianField3D, sigma_k: float | None = None) -> CartesianField3D:
    """Gaussian radial low-pass with a box-local convolution kernel.

    Exact structure preservation on the periodic cube needs analytic
    multipliers: the taper exp(-|xi|^2/(2 sigma_k^2)) has a Gaussian
    kernel whose periodic wrap-around is below round-off when sigma_k is
    balanced between spectral support (dealiasing) and kernel locality;
    the default takes the geometric compromise between the two.
    """
    n, box = f.n, f.box
    k_nyq = 2.0 * np.pi / box * (n / 2.0)
    if sigma_k is None:
        sigma_k = math.sqrt((2.0 / 3.0) * k_nyq / (box / 2.0))
    mult = np.exp(-_kmag(n, box) ** 2 / (2.0 * sigma_k**2))
    comps = [
        np.fft.irfftn(mult * np.fft.rfftn(c), s=(n, n, n), axes=(0, 1, 2))
        for c in f.components()
    ]
    return CartesianField3D(*comps, f.r_box)


def gaussian_annulus_multiplier(n: int, box: float, j: int, order: int = 2) -> np.ndarray:
    """Radial bump at the dyadic scale 2^j, analytic in |xi|^2.

    (s e^(1-s))^m with s = |xi|^2 / 4^j peaks at |xi| = 2^j and is an
    entire function of the wavevector, so its kernel is box-local; a
    Gaussian in (|xi| - 2^j) would carry a cone singularity at the origin
    and algebraic kernel tails that visibly break structure checks.
    """
    kmag = _kmag(n, box)
    s = (kmag / 2.0**j) ** 2
    return (s * np.exp(1.0 - s)) ** order


# ---------------------------------------------------------------------------
# random structured fields for the lemma verifiers
# ---------------------------------------------------------------------------


def _random_axisym_scalar(n, r_box, rng, n_bumps=3, kz_max=2):
    """Smooth random axisymmetric scalar h(rho, z), even in rho.

    Everything is built from polynomials in rho^2 under a Gaussian
    envelope: a profile like exp(-(rho-c)^2/w^2) with c != 0 has a cone
    singularity on the axis as a function of (x, y) and would radiate
    algebraic spectral tails, ruining the structural identities.  The
    support scale keeps both the cube-face values and the aliased
    spectrum far below the identity tolerances.
    """
    X, Y, Z = cube_coords(n, r_box)
    rho2 = X**2 + Y**2
    out = np.zeros_like(X)
    for _ in range(n_bumps):
        a0, a1, a2 = rng.uniform(-1.0, 1.0, size=3)
        width = rng.uniform(0.08, 0.115) * r_box
        z0 = rng.uniform(-0.25 * r_box, 0.25 * r_box)
        m = rng.integers(0, kz_max + 1)
        phase = rng.uniform(0, 2 * np.pi)
        s = rho2 / width**2
        radial = (a0 + a1 * s + 0.5 * a2 * s * s) * np.exp(-s)
        wave = np.cos(np.pi * m * (Z - z0) / r_box + phase)
        out += radial * wave
    decay = np.exp(-(Z**2) / (0.15 * r_box) ** 2)
    return out * decay


def random_pure_swirl(
    n: int, r_box: float, rng: np.random.Generator, k_cut: float | None = None
) -> CartesianField3D:
    """Gaussian-tapered pure-swirl field g(rho, z) e_theta.

    `k_cut`, when given, is the Gaussian taper scale sigma_k.
    """
    X, Y, _ = cube_coords(n, r_box)
    h = _random_axisym_scalar(n, r_box, rng)
    g = CartesianField3D(-h * Y, h * X, np.zeros_like(h), r_box)
    return gauss_taper(g, k_cut)


def random_noswirl_divfree(
    n: int, r_box: float, rng: np.random.Generator, k_cut: float | None = None
) -> CartesianField3D:
    """Band-limited axisymmetric no-swirl divergence-free field.

    Built as the spectral curl of a pure-swirl potential, so the
    divergence vanishes to round-off and the swirl component is zero by
    structure.
    """
    a = random_pure_swirl(n, r_box, rng, k_cut)
    return curl3d(a)


def random_generic(n: int, r_box: float, rng: np.random.Generator) -> CartesianField3D:
    """Smooth band-limited field with no axisymmetric structure (control)."""
    X, Y, Z = cube_coords(n, r_box)
    comps = []
    for _ in range(3):
        w = rng.uniform(0.3, 0.6) * r_box
        x0, y0, z0 = rng.uniform(-0.4 * r_box, 0.4 * r_box, size=3)
        comps.append(
            np.exp(-((X - x0) ** 2 + (Y - y0) ** 2 + (Z - z0) ** 2) / w**2)
            * np.cos(2 * np.pi * (X + 0.7 * Y - 0.3 * Z) / r_box)
        )  # not axisymmetric: negative control material
    f = CartesianField3D(*[c - np.mean(c) for c in comps], r_box)
    return gauss_taper(f)
