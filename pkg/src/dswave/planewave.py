"""Principal-series plane waves in ambient and hyperbolic form, with the
finite-difference verification engines for the wave equation.

The ambient wave is the boundary-value combination
Theta(x.xi) |x.xi/(mu R)|^sigma + e^{-pi(i(n-1)/2 + mu')} Theta(-x.xi)
|x.xi/(mu R)|^sigma with sigma = -(n-1)/2 + i mu'; the branch handling is
exactly this two-term form, never a complex log of a negative number.

The hyperbolic waves carry the prefactor (cosh beta)^{-(n-1)/2 + i rho} and
hypergeometric factors with parameters
    even:  a = (-i rho + l + (n-1)/2)/2,  b = (-i rho - l - (n-3)/2)/2,  c = 1/2
    odd:   a = (-i rho + l + (n+1)/2)/2,  b = (-i rho - l - (n-5)/2)/2,  c = 3/2
(l the top chain label).  The sign of i rho inside a, b is opposite to the
prefactor's: that pairing is the one that solves the radial equation, as the
residual engines below verify; `mirror_params=True` evaluates the other
pairing for comparison (see ode_variant_report).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import ComplementarySeriesError, OnSingularSurfaceError
from .geometry import HyperChart, SpacetimeConfig, minkowski_dot
from .specfun import HarmonicIndex, SpecFunConfig

__all__ = [
    "PrincipalMass",
    "principal_mass",
    "principal_mass_from_rho",
    "AmbientWave",
    "psi_ambient",
    "HyperWave",
    "hyper_2f1_params",
    "psi_hyper",
    "radial_profile",
    "connection_constants",
    "asymptotic_leading",
    "parity",
    "radial_ode_residual",
    "dalembert_residual",
    "dalembert_horo_residual",
    "ode_variant_report",
]


@dataclass(frozen=True)
class PrincipalMass:
    """Mass bookkeeping (mu, mu', sigma) of a principal-series wave."""

    cfg: SpacetimeConfig
    mu: float
    mu_prime: float
    sigma: complex


def principal_mass(cfg: SpacetimeConfig, mu: float) -> PrincipalMass:
    """Build the (mu, mu', sigma) triple; requires mu >= (n-1)/(2R).

    mu'^2 = mu^2 R^2 - (n-1)^2/4, sigma = -(n-1)/2 + i mu' (positive root).
    """
    if mu < cfg.mu_min:
        raise ComplementarySeriesError(
            f"mu = {mu} below the principal-series minimum {cfg.mu_min}; "
            "the complementary series is not supported")
    half = 0.5 * (cfg.n - 1)
    mu_prime = np.sqrt(max((mu * cfg.R) ** 2 - half**2, 0.0))
    return PrincipalMass(cfg, float(mu), float(mu_prime), complex(-half, mu_prime))


def principal_mass_from_rho(cfg: SpacetimeConfig, rho: float) -> PrincipalMass:
    """Principal mass with mu' = rho (the hyperbolic-label identification)."""
    if rho < 0:
        raise ValueError("rho must be non-negative")
    half = 0.5 * (cfg.n - 1)
    mu = np.sqrt(rho**2 + half**2) / cfg.R
    return PrincipalMass(cfg, float(mu), float(rho), complex(-half, rho))


@dataclass(frozen=True)
class AmbientWave:
    """Plane wave labeled by a null covector xi (xi_0 > 0) and a mass."""

    xi: tuple[float, ...]
    mass: PrincipalMass

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        if xi[0] <= 0:
            raise ValueError("covector must have xi_0 > 0")
        if abs(minkowski_dot(xi, xi)) > 1e-9 * float(xi @ xi):
            raise ValueError("covector must be null")


def psi_ambient(wave: AmbientWave, x):
    """Evaluate the ambient plane wave; broadcasts over rows of x.

    Raises OnSingularSurfaceError only for scalar input exactly on
    x.xi = 0; for array input the caller is expected to mask such nodes.
    """
    mass = wave.mass
    cfg = mass.cfg
    xi = np.asarray(wave.xi, dtype=float)
    s = minkowski_dot(np.asarray(x, dtype=float), xi)
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if scalar and s[0] == 0.0:
        raise OnSingularSurfaceError("x.xi = 0")
    w = np.abs(s) / (mass.mu * cfg.R)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.exp(mass.sigma * np.log(w))
    damp = np.exp(-np.pi * (0.5j * (cfg.n - 1) + mass.mu_prime))
    out = np.where(s > 0, val, damp * val)
    out = np.where(s == 0, np.nan + 0j, out)
    return out[0] if scalar else out


@dataclass(frozen=True)
class HyperWave:
    """Hyperbolic-family wave: parity label alpha, spectral rho, mode index."""

    alpha: int
    rho: float
    idx: HarmonicIndex

    def __post_init__(self):
        if self.alpha not in (1, 2):
            raise ValueError("alpha must be 1 (odd) or 2 (even)")
        if self.rho <= 0:
            raise ValueError("rho must be positive")

    @property
    def n(self) -> int:
        return self.idx.n


def hyper_2f1_params(wave: HyperWave, mirror_params: bool = False):
    """(a, b, c) of the wave's hypergeometric factor."""
    n, l, rho = wave.n, wave.idx.top, wave.rho
    ir = 1j * rho if mirror_params else -1j * rho
    if wave.alpha == 2:
        return (ir + l + 0.5 * (n - 1)) / 2, (ir - l - 0.5 * (n - 3)) / 2, 0.5
    return (ir + l + 0.5 * (n + 1)) / 2, (ir - l - 0.5 * (n - 5)) / 2, 1.5


def radial_profile(wave: HyperWave, beta, mirror_params: bool = False,
                   cfg: SpecFunConfig | None = None):
    """Radial factor V(beta), including the K-normalization prefactor."""
    sf = cfg or SpecFunConfig()
    a, b, c = hyper_2f1_params(wave, mirror_params)
    n, l, rho = wave.n, wave.idx.top, wave.rho
    K = specfun.norm_K(wave.alpha, n, l, rho)
    beta = np.asarray(beta, dtype=float)
    v = np.tanh(beta) ** 2
    w = 1.0 / np.cosh(beta) ** 2  # 1 - v to full precision at large beta
    f = specfun.gauss_2f1_array(a, b, c, np.atleast_1d(v), sf,
                                one_minus_v=np.atleast_1d(w)).reshape(v.shape)
    env = np.cosh(beta) ** complex(-0.5 * (n - 1), rho)
    if wave.alpha == 2:
        return f * env / np.sqrt(K)
    return 2.0 * np.tanh(beta) * f * env / np.sqrt(K)


def psi_hyper(wave: HyperWave, chart: HyperChart, mirror_params: bool = False,
              cfg: SpecFunConfig | None = None) -> complex:
    """Hyperbolic plane wave at a chart point."""
    Y = specfun.hypersph_Y(wave.idx, chart.phis, chart.phi)
    return complex(radial_profile(wave, chart.beta, mirror_params, cfg) * Y)


def connection_constants(wave: HyperWave) -> tuple[complex, complex]:
    """Large-beta constants (D1, D2) of the hypergeometric factor.

    2F1(a,b;c;v) -> D1 + D2 (1-v)^{c-a-b} as v -> 1, so the radial factor
    behaves like (cosh b)^{-(n-1)/2} [D1 (cosh b)^{i rho} + D2 (cosh b)^{-i rho}]
    times the normalization; D1 = conj(D2).
    """
    a, b, c = hyper_2f1_params(wave)
    lg = specfun.ln_gamma
    D1 = np.exp(lg(c) + lg(c - a - b) - lg(c - a) - lg(c - b))
    D2 = np.exp(lg(c) + lg(a + b - c) - lg(a) - lg(b))
    return complex(D1), complex(D2)


def asymptotic_leading(wave: HyperWave, beta, phis, phi,
                       beta0: float = 5.0, window: float = 4.0,
                       samples: int = 160) -> complex:
    """Forward component of the large-beta asymptotics.

    Returns D' (cosh beta)^{-(n-1)/2 + i rho} Y(angles), with D' fitted once
    per wave by projecting the radial factor onto the forward mode over a
    window around beta0 (a plain point fit would be contaminated by the
    counter-rotating component of equal modulus).
    """
    n, rho = wave.n, wave.rho
    bs = np.linspace(beta0 - window / 2, beta0 + window / 2, samples)
    # fit the envelope-normalized profile on both rotating components and
    # keep the forward one (a plain point fit or single-mode projection is
    # contaminated by the counter-rotating part of equal modulus)
    W = radial_profile(wave, bs) * np.cosh(bs) ** (0.5 * (n - 1))
    basis = np.stack([np.cosh(bs) ** complex(0.0, rho),
                      np.cosh(bs) ** complex(0.0, -rho)], axis=1)
    coef, *_ = np.linalg.lstsq(basis, W, rcond=None)
    Dp = coef[0]
    Y = specfun.hypersph_Y(wave.idx, phis, phi)
    return complex(Dp * np.cosh(beta) ** complex(-0.5 * (n - 1), rho) * Y)


def parity(wave: HyperWave) -> str:
    """'even' if alpha + top label is even, else 'odd' (antipodal parity)."""
    return "even" if (wave.alpha + wave.idx.top) % 2 == 0 else "odd"


def _d2(f, t, h, richardson):
    if richardson:
        c = (f(t + h) - 2 * f(t) + f(t - h)) / h**2
        fine = (f(t + h / 2) - 2 * f(t) + f(t - h / 2)) / (h / 2) ** 2
        return (4 * fine - c) / 3
    return (f(t + h) - 2 * f(t) + f(t - h)) / h**2


def _d1(f, t, h, richardson):
    if richardson:
        c = (f(t + h) - f(t - h)) / (2 * h)
        fine = (f(t + h / 2) - f(t - h / 2)) / h
        return (4 * fine - c) / 3
    return (f(t + h) - f(t - h)) / (2 * h)


def radial_ode_residual(wave: HyperWave, beta_grid, h: float = 1e-3,
                        richardson: bool = False, ell: str = "top",
                        mirror_params: bool = False) -> float:
    """Max relative residual of the separated radial equation on a grid.

    The equation tested is
    V'' + (n-1) tanh(b) V' + [rho^2 + (n-1)^2/4 + L/cosh^2(b)] V = 0
    with L = l(l + n - 2); ell = "top" uses the highest chain label (the
    value the waves satisfy), ell = "l1" the lowest one.
    """
    n, rho = wave.n, wave.rho
    chain = (abs(wave.idx.m),) + wave.idx.ls
    l = wave.idx.top if ell == "top" else (chain[1] if len(chain) > 1 else chain[0])
    L = l * (l + n - 2)

    def V(b):
        return radial_profile(wave, b, mirror_params=mirror_params)

    grid = np.atleast_1d(np.asarray(beta_grid, dtype=float))
    vmax = float(np.max(np.abs(V(grid))))
    worst = 0.0
    for b in grid:
        r = (_d2(V, b, h, richardson)
             + (n - 1) * np.tanh(b) * _d1(V, b, h, richardson)
             + (rho**2 + 0.25 * (n - 1) ** 2 + L / np.cosh(b) ** 2) * V(b))
        worst = max(worst, abs(complex(r)))
    return worst / vmax


def _sphere_laplacian_fd(F, phis, phi, n, h, richardson):
    """Recursive-form Laplacian of F(phis, phi) on S^{n-1} by differences."""
    phis = list(phis)
    acc = 0.0 + 0.0j
    sin_prod = 1.0
    for k in range(n - 2):  # polar angle phi_{k+1}; weight (sin)^{n-2-k}
        p = n - 2 - k

        def along(t, k=k):
            a = phis.copy()
            a[k] = t
            return F(a, phi)

        t0 = phis[k]
        d1 = _d1(along, t0, h, richardson)
        d2 = _d2(along, t0, h, richardson)
        term = d2 + p * (np.cos(t0) / np.sin(t0)) * d1
        acc += term / sin_prod**2
        sin_prod *= np.sin(t0)

    def along_phi(t):
        return F(phis, t)

    acc += _d2(along_phi, phi, h, richardson) / sin_prod**2
    return acc


def dalembert_residual(wave: HyperWave, chart: HyperChart, h: float = 1e-3,
                       richardson: bool = False) -> float:
    """Relative residual of (box - mu^2) psi at a hyperbolic chart point.

    box = -d^2/db^2 - (n-1) tanh(b) d/db + Delta/cosh^2(b) in unit-radius
    coordinates, with mu^2 = rho^2 + (n-1)^2/4.  Angular coordinate
    singularities (sin(phi_k) = 0) raise.
    """
    n, rho = wave.n, wave.rho
    for p in chart.phis:
        if abs(np.sin(p)) < 1e-8:
            raise ValueError("chart point on an angular coordinate singularity")
    mu2 = rho**2 + 0.25 * (n - 1) ** 2

    def F(phis, phi):
        return psi_hyper(wave, HyperChart(chart.beta, tuple(phis), phi))

    def along_beta(b):
        return psi_hyper(wave, HyperChart(b, chart.phis, chart.phi))

    b = chart.beta
    lap = _sphere_laplacian_fd(F, chart.phis, chart.phi, n, h, richardson)
    box = (-_d2(along_beta, b, h, richardson)
           - (n - 1) * np.tanh(b) * _d1(along_beta, b, h, richardson)
           + lap / np.cosh(b) ** 2)
    val = psi_hyper(wave, chart)
    return abs(box - mu2 * val) / abs(val)


def dalembert_horo_residual(cfg: SpacetimeConfig, F, tau: float, y,
                            mu: float, h: float = 1e-3,
                            richardson: bool = False) -> float:
    """Relative residual of (box - mu^2) F in the horospheric chart.

    The chart metric is -dtau^2 + e^{-2 tau/R} |dy|^2, so
    box = -d_tau^2 + ((n-1)/R) d_tau + e^{2 tau/R} sum_i d_{y_i}^2.
    F is a callable F(tau, y) -> complex; used for ambient plane waves and
    synthesized wavepacket fields alike.
    """
    y = np.asarray(y, dtype=float)
    R = cfg.R

    def along_tau(t):
        return F(t, y)

    box = (-_d2(along_tau, tau, h, richardson)
           + ((cfg.n - 1) / R) * _d1(along_tau, tau, h, richardson))
    for i in range(cfg.n - 1):
        def along_y(t, i=i):
            yy = y.copy()
            yy[i] = t
            return F(tau, yy)

        box += np.exp(2 * tau / R) * _d2(along_y, y[i], h, richardson)
    val = F(tau, y)
    return abs(box - mu**2 * val) / abs(val)


def ode_variant_report(n: int = 4, rho: float = 0.8,
                       ls: tuple[int, ...] = (0, 2), m: int = 0,
                       beta_grid=None, h: float = 1e-3) -> dict[str, float]:
    """Residuals of both parameter pairings against both ODE variants.

    Keys are '<params>/<ell>' with params in {solution, mirror} and ell in
    {top, l1}.  At n >= 4 with l_1 != l_{n-2} only 'solution/top' is small,
    which pins down both conventions at once.
    """
    if beta_grid is None:
        beta_grid = np.linspace(0.35, 1.8, 7)
    report = {}
    for alpha in (1, 2):
        wave = HyperWave(alpha, rho, HarmonicIndex(n, m, ls))
        for label, mirrored in (("solution", False), ("mirror", True)):
            for ell in ("top", "l1"):
                r = radial_ode_residual(wave, beta_grid, h=h, ell=ell,
                                        mirror_params=mirrored)
                report[f"alpha{alpha}/{label}/{ell}"] = float(r)
    return report
