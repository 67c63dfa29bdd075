"""Fourier transform pairs on de Sitter space and on the null cone, the
Mellin pair, and wavepacket synthesis.

Three transforms live here:

* the hyperbolic-chart pair: mode coefficients chi against the plane waves
  of the planewave module, with the measure cosh^{n-1}(beta) dbeta dOmega
  (unit radius).  The inverse rho-integral carries the spectral density
  rho/2 by default: the normalized modes have continuum weight 2/rho, so
  the weighted measure is what makes forward/inverse an exact pair (see
  fourier_hyper_inverse for the literal unweighted variant);
* the cone pair: Mellin transform along the generators tensored with the
  angular intertwiner kernel |a|^{-(n-1)/2 -+ i rho} and its Theta-phase
  terms, realized as matrices on a uniform circle grid (n = 2 desk scale);
* the plain Mellin pair on (0, infinity).

Wavepackets are |d(mu')|^2-weighted cap integrals of ambient plane waves
against a smooth bump profile on the absolute.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from . import specfun
from .errors import UnsupportedCaseError
from .geometry import sphere_point
from .planewave import HyperWave, PrincipalMass, radial_profile
from .specfun import HarmonicIndex, harmonic_indices, hypersph_Y

__all__ = [
    "SphereGrid",
    "QuadratureGrid",
    "AbsoluteProfile",
    "WavepacketSpec",
    "WavepacketReport",
    "HyperCoeffs",
    "ConeFunction",
    "ConeGrid",
    "ConeSpectrum",
    "wavepacket_ambient",
    "wavepacket_hyper",
    "fourier_hyper_forward",
    "fourier_hyper_inverse",
    "eval_on_grid",
    "mellin_forward",
    "mellin_inverse",
    "cone_fourier_forward",
    "cone_fourier_inverse",
    "intertwiner_symbol",
]


# ----------------------------------------------------------------- grids


@dataclass(frozen=True, eq=False)
class SphereGrid:
    """Product quadrature on S^{n-1} in chart angles.

    Polar angles use Gauss-Jacobi nodes in cos(phi_k), exact for the
    sin^{n-1-k} density; the azimuth a uniform grid.  ``weights`` carry the
    full measure including the density, so sum(w * f(nodes)) integrates f
    over the round sphere.
    """

    n: int
    phis: tuple[np.ndarray, ...]
    phi: np.ndarray
    weights: np.ndarray

    @staticmethod
    def build(n: int, n_polar: int = 24, n_azimuth: int = 48) -> "SphereGrid":
        grids = []
        weights = []
        for k in range(1, n - 1):  # polar angle phi_k, density sin^{n-1-k}
            a = 0.5 * (n - 2 - k)  # (1 - x^2)^a after x = cos(phi_k)
            x, w = roots_jacobi(n_polar, a, a)
            grids.append(np.arccos(x))
            weights.append(w)
        az = np.arange(n_azimuth) * (2.0 * math.pi / n_azimuth)
        az_w = np.full(n_azimuth, 2.0 * math.pi / n_azimuth)
        mesh = np.meshgrid(*grids, az, indexing="ij")
        wmesh = np.meshgrid(*weights, az_w, indexing="ij")
        total_w = np.ones_like(mesh[0])
        for wm in wmesh:
            total_w = total_w * wm
        phis = tuple(m.ravel() for m in mesh[:-1])
        return SphereGrid(n, phis, mesh[-1].ravel(), total_w.ravel())

    @property
    def size(self) -> int:
        return self.phi.size

    def points(self) -> np.ndarray:
        """Unit vectors of all nodes, shape (size, n)."""
        out = np.empty((self.size, self.n))
        for i in range(self.size):
            out[i] = sphere_point(self.n, [p[i] for p in self.phis], self.phi[i])
        return out


def _beta_panels(beta_max: float, n_nodes: int, panel: float = 1.0):
    """Gauss-Legendre panels covering [-beta_max, beta_max]."""
    edges = np.linspace(-beta_max, beta_max, max(2, int(2 * beta_max / panel) + 1))
    x, w = roots_legendre(n_nodes)
    nodes = []
    weights = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        nodes.append(0.5 * (hi - lo) * x + 0.5 * (hi + lo))
        weights.append(0.5 * (hi - lo) * w)
    return np.concatenate(nodes), np.concatenate(weights)


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Node bundle for the hyperbolic transforms (sphere x beta x rho)."""

    sphere: SphereGrid
    beta_nodes: np.ndarray
    beta_weights: np.ndarray
    rho_nodes: np.ndarray
    rho_weights: np.ndarray
    l_max: int
    m_max: int | None = None

    @staticmethod
    def build(n: int, beta_max: float = 12.0, n_beta: int = 10,
              rho_window: tuple[float, float] = (0.25, 4.0), n_rho: int = 48,
              l_max: int = 4, m_max: int | None = None,
              n_polar: int = 24, n_azimuth: int = 48) -> "QuadratureGrid":
        bn, bw = _beta_panels(beta_max, n_beta)
        x, w = roots_legendre(n_rho)
        lo, hi = rho_window
        rn = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        rw = 0.5 * (hi - lo) * w
        return QuadratureGrid(SphereGrid.build(n, n_polar, n_azimuth),
                              bn, bw, rn, rw, l_max, m_max)

    def resolution_report(self) -> dict:
        """Recorded resolution limits of the node bundle.

        beta_bandwidth is the largest |rho - rho'| the window can separate
        (pi over the window half-length), rho_bandwidth the largest 'time'
        e^{i rho beta} content the rho spacing resolves, and azimuth_modes
        the largest |m| integrated exactly.
        """
        window = float(self.beta_nodes.max() - self.beta_nodes.min())
        drho = float(np.min(np.diff(np.sort(self.rho_nodes)))) \
            if self.rho_nodes.size > 1 else float("inf")
        return {
            "beta_window": window,
            "beta_bandwidth": 2.0 * math.pi / window,
            "rho_spacing": drho,
            "rho_bandwidth": math.pi / drho if drho > 0 else float("inf"),
            "azimuth_modes": int(
                len(np.unique(np.round(self.sphere.phi, 12))) // 2),
            "beta_nodes": int(self.beta_nodes.size),
            "sphere_nodes": int(self.sphere.size),
            "rho_nodes": int(self.rho_nodes.size),
        }


# ----------------------------------------------------------- wavepackets


@dataclass(frozen=True)
class AbsoluteProfile:
    """Smooth bump on the absolute, supported in a cap of radius delta.

    On the xi_0 = 1 section the value at direction u is
    amplitude * exp(shape * (1 - 1/(1 - (theta/delta)^2)))
    for theta = angle(u, center) < delta and 0 outside; compactly supported
    with all derivatives vanishing at the cap edge.
    """

    center: tuple[float, ...]
    delta: float
    amplitude: float = 1.0
    shape: float = 1.0

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        if abs(np.linalg.norm(c) - 1.0) > 1e-10:
            raise ValueError("profile center must be a unit vector")
        if not (0.0 < self.delta < math.pi):
            raise ValueError("cap radius must lie in (0, pi)")

    def value(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        c = np.asarray(self.center, dtype=float)
        ct = np.clip(u @ c, -1.0, 1.0)
        theta = np.arccos(ct)
        t2 = (theta / self.delta) ** 2
        out = np.zeros_like(theta)
        inside = t2 < 1.0
        out[inside] = self.amplitude * np.exp(
            self.shape * (1.0 - 1.0 / (1.0 - t2[inside])))
        return out


def _orthonormal_frame(u0: np.ndarray) -> np.ndarray:
    """Rows: u0 followed by an orthonormal basis of its complement."""
    n = u0.size
    frame = np.eye(n)
    idx = int(np.argmax(np.abs(u0)))
    frame[[0, idx]] = frame[[idx, 0]]
    frame[0] = u0
    q, _ = np.linalg.qr(frame.T)
    if q[:, 0] @ u0 < 0:
        q[:, 0] = -q[:, 0]
    return q.T


@dataclass(frozen=True)
class WavepacketSpec:
    """Profile + principal mass + cap quadrature resolution.

    d_sector picks the (j, k) parity sector whose |d| value normalizes the
    packet (the sectors differ only for odd n, and only by a constant).
    """

    profile: AbsoluteProfile
    mass: PrincipalMass
    n_theta: int = 20
    n_sub_polar: int = 12
    n_sub_azimuth: int = 24
    d_sector: tuple[int, int] = (0, 0)

    def cap_nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """(covectors xi = (1, u) on the cap, weights incl. the cone 1/2)."""
        n = self.mass.cfg.n
        u0 = np.asarray(self.profile.center, dtype=float)
        x, w = roots_legendre(self.n_theta)
        theta = 0.5 * self.profile.delta * (x + 1.0)
        wt = 0.5 * self.profile.delta * w
        if n == 2:
            ang0 = math.atan2(u0[0], u0[1])  # chart convention u = (sin, cos)
            ths = np.concatenate([ang0 - theta[::-1], ang0 + theta])
            ws = np.concatenate([wt[::-1], wt])
            us = np.stack([np.sin(ths), np.cos(ths)], axis=1)
            xi = np.concatenate([np.ones((us.shape[0], 1)), us], axis=1)
            return xi, 0.5 * ws
        sub = SphereGrid.build(n - 1, self.n_sub_polar, self.n_sub_azimuth)
        omega = sub.points()                      # (ns, n-1)
        frame = _orthonormal_frame(u0)            # rows: u0, e_1..e_{n-1}
        ct = np.cos(theta)
        st = np.sin(theta)
        u = (ct[:, None, None] * u0[None, None, :]
             + st[:, None, None] * (omega @ frame[1:])[None, :, :])
        wfull = (wt * np.sin(theta) ** (n - 2))[:, None] * sub.weights[None, :]
        u = u.reshape(-1, n)
        wfull = wfull.reshape(-1)
        xi = np.concatenate([np.ones((u.shape[0], 1)), u], axis=1)
        return xi, 0.5 * wfull


@dataclass
class WavepacketReport:
    """Bookkeeping from a synthesis call."""

    dropped_nodes: int = 0
    total_nodes: int = 0
    noise_estimate: float = 0.0


def wavepacket_ambient(spec: WavepacketSpec, x, full_output: bool = False):
    """Synthesize f(x) = |d(mu')|^2 integral of fhat(xi) Psi_mu(x, xi) dA.

    x may be one ambient point or an array of row points.  Quadrature nodes
    falling exactly on x.xi = 0 are dropped and counted in the report; the
    noise estimate is the roundoff scale of the node sum.
    """
    mass = spec.mass
    cfg = mass.cfg
    xi, w = spec.cap_nodes()
    fhat = spec.profile.value(xi[:, 1:])
    d2 = specfun.d_abs(cfg.n, spec.d_sector[0], spec.d_sector[1],
                       mass.mu_prime) ** 2
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = x[None, :] if single else x
    s = -np.outer(pts[:, 0], xi[:, 0]) + pts[:, 1:] @ xi[:, 1:].T  # (np, nxi)
    wmod = np.abs(s) / (mass.mu * cfg.R)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.exp(mass.sigma * np.log(wmod))
    damp = np.exp(-math.pi * (0.5j * (cfg.n - 1) + mass.mu_prime))
    vals = np.where(s > 0, vals, damp * vals)
    mask = s == 0.0
    vals = np.where(mask, 0.0, vals)
    out = d2 * (vals * (w * fhat)[None, :]).sum(axis=1)
    if full_output:
        rep = WavepacketReport(dropped_nodes=int(mask.sum()),
                               total_nodes=int(mask.size),
                               noise_estimate=float(
                                   d2 * np.abs(w * fhat).sum() * 1e-13))
        return (out[0], rep) if single else (out, rep)
    return out[0] if single else out


@dataclass
class HyperCoeffs:
    """Mode table chi[(alpha, m, ls)] at fixed rho, plus a tail indicator."""

    rho: float
    table: dict[tuple[int, int, tuple[int, ...]], complex] = field(default_factory=dict)
    tail_bound: float = 0.0

    def __getitem__(self, key):
        return self.table.get(key, 0.0 + 0.0j)

    def norm_sq(self) -> float:
        return float(sum(abs(v) ** 2 for v in self.table.values()))


def wavepacket_hyper(coeffs: HyperCoeffs, beta, phis, phi):
    """Sum chi * Psi over the table at the coefficients' rho; broadcasts."""
    total = 0.0 + 0.0j
    for (alpha, m, ls), chi in coeffs.table.items():
        if chi == 0.0:
            continue
        wave = HyperWave(alpha, coeffs.rho, HarmonicIndex(len(ls) + 2, m, ls))
        total = total + chi * (radial_profile(wave, beta)
                               * hypersph_Y(wave.idx, phis, phi))
    return total


# ------------------------------------------------- hyperbolic Fourier pair


_MODE_CACHE: "weakref.WeakKeyDictionary" = None  # set below


def _mode_matrix(n: int, rho: float, grid: QuadratureGrid,
                 alphas=(1, 2)) -> tuple[list, np.ndarray]:
    """Mode keys and Psi values on the product grid, shape (nmode, nb, ns).

    Cached per grid object: forward and inverse passes at the same rho
    nodes reuse the matrices.
    """
    global _MODE_CACHE
    if _MODE_CACHE is None:
        import weakref
        _MODE_CACHE = weakref.WeakKeyDictionary()
    store = _MODE_CACHE.setdefault(grid, {})
    key = (float(rho), tuple(alphas))
    if key in store:
        return store[key]
    modes = []
    sph = grid.sphere
    mats = []
    for alpha in alphas:
        for idx in harmonic_indices(n, grid.l_max, grid.m_max):
            wave = HyperWave(alpha, rho, idx)
            V = radial_profile(wave, grid.beta_nodes)
            Y = hypersph_Y(idx, sph.phis, sph.phi)
            modes.append((alpha, idx.m, idx.ls))
            mats.append(V[:, None] * Y[None, :])
    out = (modes, np.stack(mats, axis=0))
    store[key] = out
    return out


def eval_on_grid(f, grid: QuadratureGrid) -> np.ndarray:
    """Evaluate f(beta, phis, phi) on the product grid, shape (nb, ns)."""
    sph = grid.sphere
    B = grid.beta_nodes[:, None]
    phis = [p[None, :] for p in sph.phis]
    return np.asarray(f(B, phis, sph.phi[None, :]), dtype=complex) \
        * np.ones((grid.beta_nodes.size, sph.size))


def fourier_hyper_forward(f, rho: float, grid: QuadratureGrid,
                          alphas=(1, 2)) -> HyperCoeffs:
    """Coefficients chi = integral of conj(Psi) f over the chart window.

    f is either a broadcastable callable f(beta, phis, phi) or an already
    evaluated (n_beta, n_sphere) array on the grid.  Truncation and window
    errors show up as the returned tail indicator (smallest to largest
    retained |chi|).
    """
    n = grid.sphere.n
    F = f if isinstance(f, np.ndarray) else eval_on_grid(f, grid)
    meas = (grid.beta_weights * np.cosh(grid.beta_nodes) ** (n - 1))[:, None] \
        * grid.sphere.weights[None, :]
    modes, mats = _mode_matrix(n, rho, grid, alphas)
    vals = np.einsum("kbs,bs->k", np.conj(mats), F * meas)
    out = HyperCoeffs(rho=rho)
    for key, v in zip(modes, vals):
        out.table[key] = complex(v)
    mags = np.abs(vals)
    out.tail_bound = float(mags.min() / mags.max()) if mags.max() > 0 else 0.0
    return out


def fourier_hyper_inverse(coeff_field, grid: QuadratureGrid,
                          plancherel: bool = True) -> np.ndarray:
    """Field on the product grid from a rho-indexed coefficient field.

    coeff_field maps rho -> HyperCoeffs (a callable, or a sequence matching
    grid.rho_nodes).  plancherel=True weights the rho-measure with the
    spectral density rho/2 measured for the normalized modes, making the
    pair forward -> inverse the identity on band-limited fields; False is
    the literal unweighted integral (composition = multiplication by 2/rho).
    """
    n = grid.sphere.n
    out = np.zeros((grid.beta_nodes.size, grid.sphere.size), dtype=complex)
    tables = (list(coeff_field) if isinstance(coeff_field, (list, tuple))
              else [coeff_field(r) for r in grid.rho_nodes])
    for rho, w, coeffs in zip(grid.rho_nodes, grid.rho_weights, tables):
        if coeffs is None or not coeffs.table:
            continue
        weight = w * (0.5 * rho if plancherel else 1.0)
        alphas = tuple(sorted({k[0] for k in coeffs.table}))
        modes, mats = _mode_matrix(n, rho, grid, alphas)
        chi = np.array([coeffs[key] for key in modes])
        out += weight * np.einsum("k,kbs->bs", chi, mats)
    return out


# ------------------------------------------------------------ Mellin pair


def mellin_forward(h, n: int, rho, s_window=(1e-6, 1e6), n_nodes: int = 400):
    """varpi(rho) = integral of h(s) s^{(n-1)/2 - i rho} ds/s on a window.

    Uniform trapezoid in v = log s, spectrally accurate once the weighted
    integrand clears the window.  h must vectorize over s; rho may be an
    array.
    """
    v = np.linspace(math.log(s_window[0]), math.log(s_window[1]), n_nodes)
    dv = v[1] - v[0]
    s = np.exp(v)
    H = np.asarray(h(s), dtype=complex) * np.exp(0.5 * (n - 1) * v)
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    ker = np.exp(-1j * np.outer(rho, v))
    w = np.full(n_nodes, dv)
    w[0] *= 0.5
    w[-1] *= 0.5
    return ker @ (H * w)


def mellin_inverse(varpi, n: int, s, rho_window=(-40.0, 40.0),
                   n_nodes: int = 2000):
    """h(s) = (1/2 pi) integral of varpi(rho) s^{-(n-1)/2 + i rho} drho."""
    rho = np.linspace(rho_window[0], rho_window[1], n_nodes)
    dr = rho[1] - rho[0]
    P = np.asarray(varpi(rho), dtype=complex)
    w = np.full(n_nodes, dr)
    w[0] *= 0.5
    w[-1] *= 0.5
    s = np.atleast_1d(np.asarray(s, dtype=float))
    v = np.log(s)
    ker = np.exp(1j * np.outer(v, rho))
    return (ker @ (P * w)) * np.exp(-0.5 * (n - 1) * v) / (2.0 * math.pi)


# ------------------------------------------------------------- cone pair


@dataclass(frozen=True)
class ConeGrid:
    """Discretization of the cone: log-uniform s-grid x uniform circle.

    n = 2 desk scale: the sphere is a circle with n_theta nodes (even count
    so antipodes are on-grid), pole windows of half-width pole_halfwidth
    grid cells around the kernel zeros.
    """

    n: int = 2
    n_theta: int = 256
    s_window: tuple[float, float] = (1e-5, 1e5)
    n_s: int = 320
    pole_cells: int = 6
    fit_cells: int = 18
    fit_degree: int = 8
    filon_cells: int = 48

    def __post_init__(self):
        if self.n != 2:
            raise UnsupportedCaseError("cone transform implemented for n = 2")
        if self.n_theta % 2:
            raise ValueError("n_theta must be even")

    @property
    def thetas(self) -> np.ndarray:
        return np.arange(self.n_theta) * (2.0 * math.pi / self.n_theta)

    @property
    def s_nodes(self) -> np.ndarray:
        v = np.linspace(math.log(self.s_window[0]), math.log(self.s_window[1]),
                        self.n_s)
        return np.exp(v)

    def directions(self) -> np.ndarray:
        th = self.thetas
        return np.stack([np.sin(th), np.cos(th)], axis=1)


@dataclass(frozen=True)
class ConeFunction:
    """Function h(s, t', x') on the cone; fn broadcasts over s arrays."""

    n: int
    fn: object
    s_window: tuple[float, float] = (1e-5, 1e5)

    def __call__(self, s, tprime, xprime):
        return self.fn(s, tprime, xprime)


@dataclass
class ConeSpectrum:
    """psi(tau', theta_j, rho_r) sampled on a ConeGrid and a rho grid."""

    grid: ConeGrid
    rho_nodes: np.ndarray
    values: dict  # tauprime -> (n_theta, n_rho) complex array

    def __call__(self, tauprime, theta_index: int, rho_index: int) -> complex:
        return complex(self.values[tauprime][theta_index, rho_index])


def intertwiner_symbol(grid: ConeGrid, rho: float, forward: bool,
                       sector: int, j) -> np.ndarray:
    """Exact circle symbol of the angular intertwiner on mode e^{ij theta}.

    The kernel (2 sin^2(u/2))^E (sector +1, with the Theta phase) or
    (2 cos^2(u/2))^E (sector -1) has Fourier integrals
    [phase (-1)^j or 1] * 2^{-E} 2 pi Gamma(1+2E)/(Gamma(1+E+j)Gamma(1+E-j)),
    the exponent continuation of the classical |1 - e^{iu}|^{2s} expansion.
    """
    E = complex(-0.5 * (grid.n - 1), -rho if forward else rho)
    phase = complex(np.exp(1j * math.pi * (0.5 * (grid.n - 1)
                                           * (1 if forward else -1) + 1j * rho)))
    lg = specfun.ln_gamma
    j = np.atleast_1d(np.asarray(j, dtype=int))
    base = np.array([np.exp(lg(1 + 2 * E) - lg(1 + E + jj) - lg(1 + E - jj))
                     for jj in j], dtype=complex)
    base *= 2.0 ** (-E) * 2.0 * math.pi
    if sector == 1:
        return phase * (-1.0) ** np.abs(j) * base
    return base


def _intertwiner_matrix(grid: ConeGrid, rho: float, forward: bool,
                        sector: int, method: str = "direct") -> np.ndarray:
    """Circulant kernel matrix of the angular intertwiner on the circle.

    sector = t' tau' (+1 or -1) fixes the sign of a = -sector + cos(dtheta);
    rows are output angles, columns input angles.  method "direct" is the
    node-exclusion quadrature: the kernel's isolated zero (dtheta = 0 for
    sector +1, pi for sector -1) is handled by an analytic pole window
    where the smooth factor is fitted from nearby columns and the
    |u|^{2E+k} moments integrated in closed form, continued in the exponent
    (Re(2E+1) = 0 at n = 2 is the borderline homogeneity).  method
    "spectral" realizes the circulant from the exact symbol and serves as
    the oracle for the direct realization.
    """
    nt = grid.n_theta
    if method == "spectral":
        # row of the circulant = inverse DFT of the symbol on the frequencies
        freqs = np.fft.fftfreq(nt, d=1.0 / nt).astype(int)
        lam = intertwiner_symbol(grid, rho, forward, sector, np.abs(freqs))
        row = np.fft.ifft(lam)
        idx = (np.arange(nt)[None, :] - np.arange(nt)[:, None]) % nt
        return row[idx]
    dth = 2.0 * math.pi / nt
    E = complex(-0.5, -rho if forward else rho)
    phase = complex(np.exp(1j * math.pi * (0.5 * (grid.n - 1) * (1 if forward else -1)
                                           + 1j * rho)))
    offs = np.arange(nt) * dth
    a = -sector + np.cos(offs)
    with np.errstate(divide="ignore", invalid="ignore"):
        ker = np.where(a > 0, 1.0 + 0.0j, phase) * np.abs(a) ** E
    ker = np.nan_to_num(ker, nan=0.0)
    pole_at = 0 if sector == 1 else nt // 2
    branch = phase if sector == 1 else 1.0 + 0.0j

    w = grid.pole_cells * dth + 0.5 * dth  # window edge between cells
    row = ker * dth
    # zero out the window cells (pole cell and pole_cells neighbours each side)
    win_idx = [(pole_at + k) % nt for k in range(-grid.pole_cells, grid.pole_cells + 1)]
    for idx in win_idx:
        row[idx] = 0.0

    # product integration on the cells flanking the window: |u|^{2E}
    # oscillates in log u too fast there for plain midpoint weights, so the
    # kernel mass and first moment of each cell are integrated in closed
    # form, with the input's node value and central-difference slope
    span = min(grid.filon_cells, nt // 2 - 1)
    grads = np.zeros(nt, dtype=complex)
    for k in range(grid.pole_cells + 1, span + 1):
        for sgn in (1, -1):
            u_j = k * dth
            lo, hi = (k - 0.5) * dth, (k + 0.5) * dth
            mass = (hi ** (2 * E + 1.0) - lo ** (2 * E + 1.0)) / (2 * E + 1.0)
            mom1 = ((hi ** (2 * E + 2.0) - lo ** (2 * E + 2.0)) / (2 * E + 2.0)
                    - u_j * mass)
            q_j = 2.0 * math.sin(u_j / 2.0) ** 2 / u_j**2
            scale = branch * np.exp(E * np.log(q_j))
            row[(pole_at + sgn * k) % nt] = scale * mass
            # slope term: d/d(theta) = sgn * d/du on this side of the pole
            grad = sgn * scale * mom1 / (2.0 * dth)
            grads[(pole_at + sgn * k + 1) % nt] += grad
            grads[(pole_at + sgn * k - 1) % nt] -= grad
    row = row + grads

    # pole-window correction: fit g(u) from the fit_cells nearest columns on
    # each side (outside the window), integrate g(u) q(u)^E |u|^{2E} over
    # |u| <= w with q(u) = 2 sin^2(u/2)/u^2
    fit_off = np.array([k for k in range(-grid.fit_cells, grid.fit_cells + 1)
                        if abs(k) > grid.pole_cells])
    u_fit = fit_off * dth
    q = 2.0 * np.sin(np.abs(u_fit) / 2.0) ** 2 / u_fit**2
    qE = np.exp(E * np.log(q))
    scale = grid.fit_cells * dth
    V = np.vander(u_fit / scale, grid.fit_degree + 1, increasing=True)
    P = np.linalg.pinv(V)  # coefficients = P @ g_samples
    # moments integral |u|^{2E} (u/scale)^k over (-w, w): odd k vanish
    mom = np.zeros(grid.fit_degree + 1, dtype=complex)
    for k in range(0, grid.fit_degree + 1, 2):
        mom[k] = 2.0 * w ** (2.0 * E + k + 1.0) / ((2.0 * E + k + 1.0) * scale**k)
    # weights applied to the sampled columns; q^E folds into the fit samples
    wfit = branch * (mom @ P) * qE
    cols = [(pole_at + k) % nt for k in fit_off]
    row = row.astype(complex)
    for c, wf in zip(cols, wfit):
        row[c] += wf

    # circulant: entry [i_out, j_in] = row[(j - i) mod nt]
    idx = (np.arange(nt)[None, :] - np.arange(nt)[:, None]) % nt
    return row[idx]


def cone_fourier_forward(h: ConeFunction, rho_nodes,
                         grid: ConeGrid | None = None,
                         tau_weight: str = "unsigned",
                         method: str = "direct") -> ConeSpectrum:
    """Cone Fourier transform psi(tau', chi', rho) on the grid.

    Mellin transform along the generators (exponent (n-1)/2 - i rho)
    followed by the angular intertwiner with the forward Theta-phase.
    tau_weight "unsigned" sums both t' = +-1 sheets with weight one (the
    convention the round trip and the parity identities confirm); "signed"
    weights the t' = -1 sheet by -1.
    """
    grid = grid or ConeGrid(n=h.n, s_window=h.s_window)
    rho_nodes = np.asarray(rho_nodes, dtype=float)
    dirs = grid.directions()
    varpi = {}
    for tprime in (1, -1):
        rows = []
        for d in dirs:
            rows.append(mellin_forward(lambda s: h(s, tprime, d), grid.n,
                                       rho_nodes, grid.s_window, grid.n_s))
        varpi[tprime] = np.stack(rows, axis=0)  # (n_theta, n_rho)
    values = {1: np.zeros((grid.n_theta, rho_nodes.size), dtype=complex),
              -1: np.zeros((grid.n_theta, rho_nodes.size), dtype=complex)}
    for r, rho in enumerate(rho_nodes):
        mats = {s: _intertwiner_matrix(grid, rho, True, s, method)
                for s in (1, -1)}
        for tauprime in (1, -1):
            acc = np.zeros(grid.n_theta, dtype=complex)
            for tprime in (1, -1):
                sgn = tprime if tau_weight == "signed" else 1.0
                acc += sgn * mats[tprime * tauprime] @ varpi[tprime][:, r]
            values[tauprime][:, r] = acc
    return ConeSpectrum(grid, rho_nodes, values)


def _d2_signed(n: int, j: int, k: int, rho: float) -> float:
    """|d(rho)|^2 continued to signed rho for the inverse spectral weight.

    The case factors of the closed form are analytic in rho (for example
    1 + tanh(pi rho) for even n); continuing them to rho < 0 multiplies
    the positive-rho value by e^{-2 pi |rho|}, uniformly in n.  Only with
    this continuation does the forward/inverse pair compose to the
    identity on the negative-rho half line.
    """
    base = specfun.d_abs(n, j, k, abs(rho)) ** 2
    return base if rho > 0 else base * math.exp(-2.0 * math.pi * abs(rho))


def cone_fourier_inverse(psi: ConeSpectrum, rho_weights,
                         tau_weight: str = "unsigned",
                         d_sector: tuple[int, int] = (0, 0),
                         method: str = "direct") -> dict:
    """Inverse cone transform on the grid: h(s_i, t', theta_j).

    (1/2 pi) sum over the rho nodes (with the supplied weights) of |d|^2
    (signed-rho continuation) times the inverse-phase angular kernel times
    s^{-(n-1)/2 + i rho}.  The rho grid may cover both half lines or a
    band on one of them.  Returns tauprime -> (n_s, n_theta).
    """
    grid = psi.grid
    rho_nodes = psi.rho_nodes
    rho_weights = np.asarray(rho_weights, dtype=float)
    s = grid.s_nodes
    out = {1: np.zeros((s.size, grid.n_theta), dtype=complex),
           -1: np.zeros((s.size, grid.n_theta), dtype=complex)}
    for r, (rho, wr) in enumerate(zip(rho_nodes, rho_weights)):
        d2 = _d2_signed(grid.n, d_sector[0], d_sector[1], rho)
        mats = {sec: _intertwiner_matrix(grid, rho, False, sec, method)
                for sec in (1, -1)}
        radial = s ** complex(-0.5 * (grid.n - 1), rho)
        for tprime in (1, -1):
            acc = np.zeros(grid.n_theta, dtype=complex)
            for tauprime in (1, -1):
                sgn = tauprime if tau_weight == "signed" else 1.0
                acc += sgn * mats[tprime * tauprime] @ psi.values[tauprime][:, r]
            out[tprime] += (wr * d2 / (2.0 * math.pi)) * radial[:, None] * acc[None, :]
    return out
