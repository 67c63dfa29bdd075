"""Verification engines for the asymptotic claims: absence of stationary
phase and fast decrease, the flat (large radius) limit of plane waves and
of the Casimir action, and the brute-force oracle for the intertwiner
constant |d(rho)|.

Everything here produces measurements (tables, fitted slopes, residuals)
rather than proofs; the acceptance suite asserts on the fitted numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_legendre

from . import specfun
from .errors import AccuracyError, OnSingularSurfaceError
from .geometry import HoroChart, SpacetimeConfig, from_horo, minkowski_dot
from .planewave import AmbientWave, principal_mass, psi_ambient

__all__ = [
    "minkowski_covector",
    "minkowski_pair",
    "phase_gradient",
    "phase_gradient_min",
    "DecayFit",
    "decay_fit",
    "flat_limit_deviation",
    "off_shell_damping",
    "casimir_action_limit",
    "gamma_phase_split",
    "gamma_gradient_shell",
    "spectral_smearing_contrast",
    "bessel_pair_integral",
    "appendix_d_oracle",
]


# ------------------------------------------------------------ flat-side data


def minkowski_covector(xi, mu: float | None = None, tol: float = 1e-10) -> np.ndarray:
    """Flat-space covector (xi_0, -xi_1, ..., -xi_{n-1}) from an absolute one.

    When mu is given, checks the mass-shell identity xibar.xibar = -mu^2
    (equivalent to xi_n = mu for a null xi).
    """
    xi = np.asarray(xi, dtype=float)
    xibar = np.concatenate(([xi[0]], -xi[1:-1]))
    if mu is not None:
        q = -xibar[0] ** 2 + float(xibar[1:] @ xibar[1:])
        if abs(q + mu**2) > tol * max(mu**2, 1.0):
            raise ValueError(f"xibar.xibar = {q} is not -mu^2 = {-mu**2}")
    return xibar


def minkowski_pair(y, xibar) -> float:
    """Flat pairing y.xibar = -y_0 xibar_0 + sum_i y_i xibar_i."""
    y = np.asarray(y, dtype=float)
    xibar = np.asarray(xibar, dtype=float)
    return float(-y[0] * xibar[0] + y[1:] @ xibar[1:])


# --------------------------------------------------------- stationary phase


def phase_gradient(cfg: SpacetimeConfig, x, xi) -> np.ndarray:
    """Gradient of the plane-wave phase profile over the absolute.

    (1/((|x_0| + |x|)(x.xi))) * (x_1 - x_0 xi_1/xi_0, ..., x_n - x_0 xi_n/xi_0)
    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    dot = minkowski_dot(x, xi)
    if dot == 0.0:
        raise OnSingularSurfaceError("x.xi = 0")
    s = abs(x[0]) + float(np.linalg.norm(x[1:]))
    return (x[1:] - x[0] * xi[1:] / xi[0]) / (s * dot)


def phase_gradient_min(cfg: SpacetimeConfig, points, directions) -> float:
    """Min over (x, xi) grids of |grad Phi|; positive means no fixed point."""
    best = np.inf
    for x in points:
        for u in directions:
            xi = np.concatenate(([1.0], u))
            g = phase_gradient(cfg, x, xi)
            best = min(best, float(np.linalg.norm(g)))
    return best


# -------------------------------------------------------------- decay fits


@dataclass
class DecayFit:
    """Windowed power-law fit of a decaying field sample.

    slopes[i] is the fitted d log|f| / d log s on window i (sign flipped so
    a decay like s^-p reports p); envelope fitting uses window maxima to
    ride over modulus oscillations.
    """

    s_windows: list[tuple[float, float]] = field(default_factory=list)
    slopes: list[float] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    non_decreasing: bool = True
    status: str = "ok"

    def max_exponent(self) -> float:
        return max(self.slopes) if self.slopes else float("nan")


def decay_fit(s_values, f_values, n_windows: int = 4,
              noise_floor: float = 0.0, envelope: bool = True,
              bin_width: float | None = None) -> DecayFit:
    """Fit per-window decay exponents of |f| against s.

    The sample is split into n_windows log-spaced windows; within each
    window the samples are grouped into log-s bins of width bin_width
    (in log s), reduced to bin maxima when envelope=True, and fitted by
    least squares.  For oscillating moduli, bin_width must cover at least
    one oscillation period so the maxima trace the envelope (for the
    hyperbolic standing waves that period is pi/rho in beta = log s).
    Windows whose amplitude falls below noise_floor mark the fit
    noise-limited.
    """
    s = np.asarray(s_values, dtype=float)
    f = np.abs(np.asarray(f_values))
    if np.all(f == 0.0):
        return DecayFit(status="zero-field")
    out = DecayFit()
    log_lo, log_hi = math.log(s.min()), math.log(s.max())
    if bin_width is None:
        bin_width = (log_hi - log_lo) / (n_windows * 8.0)
    edges = np.geomspace(s.min(), s.max(), n_windows + 1)
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (s >= lo) & (s <= hi)
        if sel.sum() < 6:
            continue
        ss, ff = s[sel], f[sel]
        if np.max(ff) <= noise_floor:
            out.status = "noise-limited"
            break
        if envelope:
            nbins = max(3, int(round(math.log(hi / lo) / bin_width)))
            bins = np.geomspace(lo, hi, nbins + 1)
            which = np.digitize(ss, bins)
            ss_env, ff_env = [], []
            for b in np.unique(which):
                m = which == b
                j = np.argmax(ff[m])
                ss_env.append(ss[m][j])
                ff_env.append(ff[m][j])
            ss, ff = np.asarray(ss_env), np.asarray(ff_env)
        good = ff > 0
        if good.sum() < 3:
            continue
        coef, res = np.polyfit(np.log(ss[good]), np.log(ff[good]), 1, full=True)[:2]
        out.s_windows.append((float(lo), float(hi)))
        out.slopes.append(float(-coef[0]))
        out.residuals.append(float(res[0]) if len(res) else 0.0)
    out.non_decreasing = all(b >= a - 0.05 for a, b in zip(out.slopes, out.slopes[1:]))
    return out


# ---------------------------------------------------------------- flat limit


def _on_shell_wave(n: int, R: float, mu: float, xi) -> AmbientWave:
    cfg = SpacetimeConfig(n=n, R=R)
    return AmbientWave(tuple(np.asarray(xi, dtype=float)), principal_mass(cfg, mu))


def flat_limit_deviation(n: int, mu: float, xi, y, R_values) -> dict:
    """|Psi_mu(x(y; R), xi) - e^{i y.xibar}| per R, with a log-log rate fit.

    xi must be null with xi_n = mu; y = (tau, y_vec) is held fixed in the
    horospheric chart (eps = +1) while R grows.  Returns a dict with the
    deviation table and the fitted slope (expected near -1).
    """
    xi = np.asarray(xi, dtype=float)
    y = np.asarray(y, dtype=float)
    if abs(xi[-1] - mu) > 1e-12 * max(mu, 1.0):
        raise ValueError("flat_limit_deviation expects the on-shell slice xi_n = mu")
    xibar = minkowski_covector(xi, mu=mu)
    target = np.exp(1j * (-y[0] * xibar[0] + y[1:] @ xibar[1:]))
    devs = []
    for R in R_values:
        cfg = SpacetimeConfig(n=n, R=float(R))
        x = from_horo(cfg, HoroChart(tau=float(y[0]), y=tuple(y[1:]), eps=1))
        wave = _on_shell_wave(n, float(R), mu, xi)
        devs.append(abs(psi_ambient(wave, x) - target))
    devs = np.asarray(devs)
    R_arr = np.asarray(list(R_values), dtype=float)
    good = devs > 1e-14
    slope = float(np.polyfit(np.log(R_arr[good]), np.log(devs[good]), 1)[0]) \
        if good.sum() >= 2 else float("nan")
    return {"R": R_arr, "deviation": devs, "slope": slope}


def off_shell_damping(n: int, mu: float, xi_spatial, y, R_values,
                      window: tuple[float, float] = (1.1, 1.6),
                      n_nodes: int = 96) -> dict:
    """Window-averaged |<Psi>| over an off-shell xi_n interval, per R.

    The family xi(nu) = (sqrt(|xi_vec|^2 + nu^2), xi_vec, nu) is averaged
    with a smooth bump over nu in [mu*window[0], mu*window[1]].  Pointwise
    |Psi| stays order one; the average decays like 1/R (the weak limit).
    The node count grows with R to resolve the O(R) phase sweep across
    the window.
    """
    xi_sp = np.asarray(xi_spatial, dtype=float)  # length n-1
    y = np.asarray(y, dtype=float)
    lo, hi = mu * window[0], mu * window[1]
    out = []
    for R in R_values:
        nodes = max(n_nodes, int(0.8 * float(R) * math.log(hi / lo)) + 32)
        x_nodes, w_nodes = roots_legendre(nodes)
        nus = 0.5 * (hi - lo) * x_nodes + 0.5 * (hi + lo)
        ws = 0.5 * (hi - lo) * w_nodes
        t = (2.0 * (nus - lo) / (hi - lo)) - 1.0
        bump = np.exp(1.0 - 1.0 / (1.0 - t**2))
        cfg = SpacetimeConfig(n=n, R=float(R))
        x = from_horo(cfg, HoroChart(tau=float(y[0]), y=tuple(y[1:]), eps=1))
        mass = principal_mass(cfg, mu)
        acc = 0.0 + 0.0j
        for nu, w, b in zip(nus, ws, bump):
            xi = np.concatenate(([math.hypot(*xi_sp, nu)], xi_sp, [nu]))
            acc += w * b * psi_ambient(AmbientWave(tuple(xi), mass), x)
        out.append(abs(acc) / float(ws @ bump))
    return {"R": np.asarray(list(R_values), dtype=float),
            "averaged": np.asarray(out)}


def _horo_wave_value(n: int, R: float, mu: float, xi):
    cfg = SpacetimeConfig(n=n, R=R)
    mass = principal_mass(cfg, mu)
    wave = AmbientWave(tuple(xi), mass)

    def F(tau, yvec):
        x = from_horo(cfg, HoroChart(tau=float(tau), y=tuple(yvec), eps=1))
        return psi_ambient(wave, x)

    return F


def casimir_action_limit(n: int, mu: float, xi, y, R_values, h_values=(2e-3, 1e-3),
                         combined: bool = True) -> dict:
    """Difference-operator check of the contracted Casimir action.

    In the horospheric chart (a = iR(d_tau + sum (y_i/R) d_{y_i}),
    n_i = iR d_{y_i}) the scaled squares are applied to the plane wave by
    central differences; per (R, h) the table records
        r_n  = max_i |n'_i n'_i Psi - xi_i^2 Psi|,
        r_a  = |a'^2 Psi - xi_0^2 Psi|,
        r_c  = |(sum n'^2 - a'^2) Psi + mu^2 Psi|   (on-shell only)
    all relative to |Psi|.  A two-parameter fit r = c1/R + c2 h^2 per
    residual family is returned.
    """
    xi = np.asarray(xi, dtype=float)
    y = np.asarray(y, dtype=float)
    tau, yvec = float(y[0]), y[1:]
    rows = []
    for R in R_values:
        F = _horo_wave_value(n, float(R), mu, xi)
        for h in h_values:
            val = F(tau, yvec)

            def d_tau(k=1):
                if k == 1:
                    return (F(tau + h, yvec) - F(tau - h, yvec)) / (2 * h)
                return (F(tau + h, yvec) - 2 * val + F(tau - h, yvec)) / h**2

            def d_y(i, k=1):
                yp, ym = yvec.copy(), yvec.copy()
                yp[i] += h
                ym[i] -= h
                if k == 1:
                    return (F(tau, yp) - F(tau, ym)) / (2 * h)
                return (F(tau, yp) - 2 * val + F(tau, ym)) / h**2

            def d_tau_y(i):
                yp, ym = yvec.copy(), yvec.copy()
                yp[i] += h
                ym[i] -= h
                return (F(tau + h, yp) - F(tau + h, ym)
                        - F(tau - h, yp) + F(tau - h, ym)) / (4 * h**2)

            # n'_i n'_i = -d_{y_i}^2 ; a'^2 = -(d_tau + (y/R).d_y)^2
            r_n = 0.0
            nsum = 0.0 + 0.0j
            for i in range(n - 1):
                v = -d_y(i, 2)
                nsum += v
                r_n = max(r_n, abs(v - xi[1 + i] ** 2 * val) / abs(val))
            w = yvec / float(R)
            a2 = d_tau(2)
            for i in range(n - 1):
                a2 += 2 * w[i] * d_tau_y(i)
                a2 += (w[i] / float(R)) * d_y(i, 1)
                for j in range(n - 1):
                    if i == j:
                        a2 += w[i] * w[j] * d_y(i, 2)
                    else:
                        yp = yvec.copy(); yp[i] += h; yp[j] += h
                        ym = yvec.copy(); ym[i] -= h; ym[j] -= h
                        ya = yvec.copy(); ya[i] += h; ya[j] -= h
                        yb = yvec.copy(); yb[i] -= h; yb[j] += h
                        a2 += w[i] * w[j] * (F(tau, yp) + F(tau, ym)
                                             - F(tau, ya) - F(tau, yb)) / (4 * h**2)
            a2 = -a2
            r_a = abs(a2 - xi[0] ** 2 * val) / abs(val)
            row = {"R": float(R), "h": float(h), "r_n": float(r_n), "r_a": float(r_a)}
            if combined and abs(xi[-1] - mu) < 1e-12 * max(mu, 1.0):
                row["r_c"] = float(abs((nsum - a2) + mu**2 * val) / abs(val))
            rows.append(row)

    def fit(key):
        A = np.array([[1.0 / r["R"], r["h"] ** 2] for r in rows if key in r])
        b = np.array([r[key] for r in rows if key in r])
        if len(b) < 2:
            return None
        coef, *_ = np.linalg.lstsq(A, b, rcond=None)
        return {"c_R": float(coef[0]), "c_h2": float(coef[1])}

    return {"table": rows, "fits": {k: fit(k) for k in ("r_n", "r_a", "r_c")}}


def gamma_phase_split(n: int, mu: float, xi, y, R: float) -> tuple[float, float]:
    """Split the plane-wave phase rate into (bracket, Gamma_y(xibar)).

    Gamma_y = (1/s) mu R log(1 + y.xibar/(mu R)); the bracket term
    mu R Phi_x(xi) - Gamma_y tends to 0 as R grows.
    """
    xi = np.asarray(xi, dtype=float)
    y = np.asarray(y, dtype=float)
    cfg = SpacetimeConfig(n=n, R=float(R))
    x = from_horo(cfg, HoroChart(tau=float(y[0]), y=tuple(y[1:]), eps=1))
    s = abs(x[0]) + float(np.linalg.norm(x[1:]))
    dot = minkowski_dot(x, xi)
    phi = math.log(abs(dot / (mu * R))) / s
    xibar = minkowski_covector(xi)
    ydot = float(-y[0] * xibar[0] + y[1:] @ xibar[1:])
    gamma = mu * R * math.log1p(ydot / (mu * R)) / s
    return mu * R * phi - gamma, gamma


def gamma_gradient_shell(mu: float, y, xibar1: float,
                         R: float = 1e6, s: float = 1.0) -> float:
    """d Gamma_y / d xibar_1 restricted to the flat mass shell (1+1 case).

    Parametrize xibar = (sqrt(mu^2 + q^2), q); zeros locate the stationary
    directions of the flat-limit phase, at q/e = y_1/tau inside the cone.
    """
    q = xibar1
    e = math.hypot(mu, q)
    ydot = -y[0] * e + y[1] * q
    dydot = -y[0] * q / e + y[1]
    return dydot / (s * (1.0 + ydot / (mu * R)))


def spectral_smearing_contrast(n: int = 2, rho_center: float = 2.5,
                               widths=(0.0, 0.6, 1.2),
                               beta_span: tuple[float, float] = (2.5, 16.0),
                               n_beta: int = 1200) -> dict:
    """Decay exponents of fixed-rho versus rho-smeared radial packets.

    A superposition at sharp rho decays exactly at the envelope rate
    (n-1)/2; smearing rho over a smooth window of increasing width makes
    the decay beat the envelope (non-stationary phase in the spectral
    variable).  Returns width -> per-window maxima of the
    envelope-normalized modulus |f| e^{(n-1)beta/2}: constant for the
    sharp packet, decaying ever faster with the smearing width.
    """
    from .planewave import HyperWave, radial_profile
    from .specfun import HarmonicIndex

    idx = HarmonicIndex(n, 0, tuple([0] * (n - 2)))
    betas = np.linspace(beta_span[0], beta_span[1], n_beta)
    out = {}
    edges = np.linspace(beta_span[0], beta_span[1], 4)
    for w in widths:
        if w == 0.0:
            field = radial_profile(HyperWave(2, rho_center, idx), betas)
        else:
            nodes, wts = roots_legendre(48)
            rhos = rho_center + 0.5 * w * nodes
            bump = np.exp(1.0 - 1.0 / (1.0 - nodes**2))
            field = np.zeros(betas.size, dtype=complex)
            for r, ww, b in zip(rhos, 0.5 * w * wts, bump):
                field += ww * b * radial_profile(HyperWave(2, float(r), idx), betas)
        norm = np.abs(field) * np.exp(0.5 * (n - 1) * betas)
        peaks = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            sel = (betas >= lo) & (betas <= hi)
            peaks.append(float(norm[sel].max()))
        out[w] = peaks
    return out


# ------------------------------------------------------- appendix |d| oracle


def _bessel_product_series(eta: float, nu: float, terms: int = 24) -> np.ndarray:
    """Coefficients a_p of J_eta(y) J_nu(y) = (y/2)^{eta+nu} sum_p a_p (y/2)^{2p}."""
    def coeffs(order):
        c = np.zeros(terms)
        for m in range(terms):
            c[m] = (-1.0) ** m / (math.gamma(m + 1) * math.gamma(order + m + 1))
        return c

    ca, cb = coeffs(eta), coeffs(nu)
    prod = np.convolve(ca, cb)[:terms]
    return prod


def bessel_pair_integral(n: int, j: int, k: int, rho: float, eps: float,
                         y_split: float = 2.0, panel: float = math.pi / 2.0,
                         n_nodes: int = 16, damp_span: float = 34.0) -> complex:
    """Regularized integral of y^{i rho} J_eta(y) J_nu(y) e^{-eps y}.

    eta = (n + 2j - 2)/2 and nu = -1/2 (k even) or +1/2 (k odd).  The
    oscillatory-at-the-origin factor y^{i rho} is handled by a power-series
    panel on [0, y_split] (term-wise closed-form integration); the tail by
    Gauss panels out to where the damping has cut off.
    """
    eta = 0.5 * (n + 2 * j - 2)
    nu = 0.5 if k % 2 else -0.5
    a_p = _bessel_product_series(eta, nu)
    # series panel: sum_p a_p 2^{-(eta+nu+2p)} sum_r (-eps)^r/r! *
    #               y_split^{w+1}/(w+1),  w = eta+nu+2p+r+i rho
    val = 0.0 + 0.0j
    for p, ap in enumerate(a_p):
        if ap == 0.0:
            continue
        base = eta + nu + 2 * p
        scale = ap * 2.0 ** (-base)
        fr = 1.0
        for r in range(18):
            w = base + r + 1j * rho
            val += scale * fr * y_split ** (w + 1.0) / (w + 1.0)
            fr *= (-eps) / (r + 1)
    # Gauss panels for the tail
    ymax = max(damp_span / eps, y_split + 20.0)
    xg, wg = roots_legendre(n_nodes)
    edges = np.arange(y_split, ymax + panel, panel)
    los, his = edges[:-1], edges[1:]
    yy = 0.5 * (his - los)[:, None] * xg[None, :] + 0.5 * (his + los)[:, None]
    ww = 0.5 * (his - los)[:, None] * wg[None, :]
    f = (yy ** (1j * rho) * specfun.bessel_j(eta, yy) * specfun.bessel_j(nu, yy)
         * np.exp(-eps * yy))
    return val + complex(np.sum(ww * f))


def appendix_d_oracle(n: int, j: int, k: int, rho: float,
                      eps_values=None, fit_order: int = 3,
                      rel_check: float = 5e-4) -> float:
    """|d(rho)| from the intertwiner integrals, independent of the formula.

    The regularized Bessel-pair integral I(eps) contains a bounded
    non-convergent piece ~ eps^{-i rho} (the integrand's DC tail), so the
    eps -> 0 value is extracted by least squares against the basis
    {eps^m, eps^{m - i rho}}, m = 0..fit_order; |d| is then assembled as
    |Gamma((n-1)/2 + i rho)| e^{pi rho/2} / ((2 pi)^{(n+1)/2} |I|).

    Raises AccuracyError when the extrapolation is unstable (leave-one-out
    spread above rel_check).
    """
    if eps_values is None:
        eps_values = np.geomspace(2e-3, 1.5e-1, 10)
    eps = np.asarray(eps_values, dtype=float)
    vals = np.array([bessel_pair_integral(n, j, k, rho, e) for e in eps])
    cols = []
    for m in range(fit_order + 1):
        cols.append(eps ** m)
        cols.append(eps ** (m - 1j * rho))
    A = np.array(cols).T

    def solve(mask):
        coef, *_ = np.linalg.lstsq(A[mask], vals[mask], rcond=None)
        return coef[0]

    full = solve(np.ones(len(eps), dtype=bool))
    drops = []
    for i in range(len(eps)):
        mask = np.ones(len(eps), dtype=bool)
        mask[i] = False
        drops.append(solve(mask))
    spread = max(abs(d - full) for d in drops) / max(abs(full), 1e-300)
    if spread > rel_check:
        raise AccuracyError(f"eps-extrapolation unstable: spread {spread:.2e}")
    gam = math.sqrt(specfun.abs_gamma_sq(0.5 * (n - 1) + 1j * rho))
    return gam * math.exp(0.5 * math.pi * rho) / (
        (2.0 * math.pi) ** (0.5 * (n + 1)) * abs(full))
