"""Special-function kernel: complex log-Gamma, Gauss 2F1, Legendre/Gegenbauer
functions, hyperspherical harmonics, Bessel J, and the normalization
constants of the hyperbolic plane waves and of the cone intertwiner.

The 2F1 evaluator uses the direct power series below a switch point v* and
the 1-v connection formula above it; the principal-series parameters always
have non-integer c-a-b, which keeps the connection formula non-degenerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import jv as _scipy_jv

from .errors import AccuracyError, PoleError, UnsupportedCaseError

__all__ = [
    "SpecFunConfig",
    "HarmonicIndex",
    "ln_gamma",
    "abs_gamma_sq",
    "gauss_2f1",
    "gauss_2f1_array",
    "gauss_2f1_regularized",
    "assoc_legendre_P",
    "gegenbauer_C",
    "hypersph_Y",
    "harmonic_indices",
    "sphere_laplacian_eigenvalue",
    "bessel_j",
    "norm_K",
    "d_abs",
]


@dataclass(frozen=True)
class SpecFunConfig:
    """Tolerances for the series kernels.

    series_tol is the relative tail target of power series, max_terms the
    hard term cap, connection_switch the argument v* at which 2F1 changes
    from the direct series to the 1-v connection formula.
    """

    series_tol: float = 1e-15
    max_terms: int = 40000
    connection_switch: float = 0.5

    def __post_init__(self):
        if not (0.0 < self.series_tol < 1e-6):
            raise ValueError("series_tol must lie in (0, 1e-6)")
        if not (0.3 <= self.connection_switch <= 0.7):
            raise ValueError("connection_switch must lie in [0.3, 0.7]")


_DEFAULT = SpecFunConfig()

# Lanczos coefficients, g = 607/128, 15 terms (double-precision standard set)
_LANCZOS_G = 607.0 / 128.0
_LANCZOS = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def ln_gamma(z: complex) -> complex:
    """Principal-branch log Gamma via the Lanczos approximation.

    Accurate to about 1e-13 relative in exp(ln_gamma) over the tested
    strip |Im z| <= 30; poles at non-positive integers raise PoleError.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == int(z.real):
        raise PoleError(f"log Gamma pole at z = {z}")
    if z.real < 0.5:
        # reflection: log Gamma(z) = log(pi / sin(pi z)) - log Gamma(1 - z)
        return (math.log(math.pi) - _log_sin_pi(z)) - ln_gamma(1.0 - z)
    zm = z - 1.0
    acc = _LANCZOS[0]
    for k in range(1, len(_LANCZOS)):
        acc += _LANCZOS[k] / (zm + k)
    t = zm + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (zm + 0.5) * np.log(t) - t + np.log(acc)


def _log_sin_pi(z: complex) -> complex:
    """log(sin(pi z)) computed to avoid overflow for large |Im z|."""
    iz = complex(0.0, 1.0) * math.pi * z
    # sin(pi z) = (e^{i pi z} - e^{-i pi z}) / (2i)
    if z.imag > 0:
        return -iz + np.log(np.expm1(2 * iz) + 0.0j) - np.log(2j)
    return iz + np.log(-np.expm1(-2 * iz) + 0.0j) - np.log(2j)


def abs_gamma_sq(z: complex) -> float:
    """|Gamma(z)|^2 = exp(2 Re log Gamma(z))."""
    return float(np.exp(2.0 * ln_gamma(z).real))


def _is_nonpositive_int(z: complex, tol: float = 1e-12) -> bool:
    return abs(z.imag) < tol and z.real < 0.5 and abs(z.real - round(z.real)) < tol


def _series_2f1(a, b, c, v, cfg: SpecFunConfig) -> complex:
    term = 1.0 + 0.0j
    acc = 1.0 + 0.0j
    for k in range(cfg.max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * v
        acc += term
        if abs(term) <= cfg.series_tol * max(abs(acc), 1e-300):
            return acc
    raise AccuracyError(f"2F1 series did not converge in {cfg.max_terms} terms")


def gauss_2f1(a: complex, b: complex, c: complex, v: float,
              cfg: SpecFunConfig = _DEFAULT) -> complex:
    """Gauss hypergeometric 2F1(a, b; c; v) on v in [0, 1).

    Direct series for v <= v*; for v > v* the two-term connection formula
    in 1-v, which needs c-a-b not an integer (always true on the principal
    series, where c-a-b = +-i rho).
    """
    if not (0.0 <= v < 1.0):
        raise ValueError(f"argument must lie in [0, 1), got {v}")
    if _is_nonpositive_int(c):
        raise PoleError(f"2F1 parameter c = {c} is a non-positive integer")
    if v == 0.0:
        return 1.0 + 0.0j
    if v <= cfg.connection_switch:
        return _series_2f1(a, b, c, v, cfg)
    s = c - a - b
    if abs(s - round(s.real)) < 1e-10 and abs(s.imag) < 1e-10:
        raise UnsupportedCaseError(
            f"connection formula degenerate: c-a-b = {s} is an integer")
    w = 1.0 - v
    f1 = _series_2f1(a, b, a + b + 1.0 - c, w, cfg)
    f2 = _series_2f1(c - a, c - b, 1.0 + c - a - b, w, cfg)
    g1 = np.exp(ln_gamma(c) + ln_gamma(s) - ln_gamma(c - a) - ln_gamma(c - b))
    g2 = np.exp(ln_gamma(c) + ln_gamma(-s) - ln_gamma(a) - ln_gamma(b))
    return g1 * f1 + g2 * w ** s * f2


def _series_2f1_array(a, b, c, v: np.ndarray, cfg: SpecFunConfig) -> np.ndarray:
    term = np.ones_like(v, dtype=complex)
    acc = np.ones_like(v, dtype=complex)
    for k in range(cfg.max_terms):
        term = term * ((a + k) * (b + k) / ((c + k) * (k + 1))) * v
        acc += term
        if np.all(np.abs(term) <= cfg.series_tol * np.maximum(np.abs(acc), 1e-300)):
            return acc
    raise AccuracyError(f"2F1 series did not converge in {cfg.max_terms} terms")


def gauss_2f1_array(a: complex, b: complex, c: complex, v,
                    cfg: SpecFunConfig = _DEFAULT,
                    one_minus_v=None) -> np.ndarray:
    """Vectorized gauss_2f1 over an array of arguments in [0, 1).

    one_minus_v may supply 1 - v to full precision (needed when v is so
    close to 1 that the subtraction underflows, e.g. tanh^2 of a large
    argument paired with sech^2); the connection branch then runs on it.
    """
    v = np.asarray(v, dtype=float)
    w_all = 1.0 - v if one_minus_v is None else np.asarray(one_minus_v, dtype=float)
    if np.any((v < 0.0) | (w_all <= 0.0)):
        raise ValueError("arguments must lie in [0, 1)")
    out = np.empty(v.shape, dtype=complex)
    lo = v <= cfg.connection_switch
    if np.any(lo):
        out[lo] = _series_2f1_array(a, b, c, v[lo], cfg)
    if np.any(~lo):
        s = c - a - b
        if abs(s - round(s.real)) < 1e-10 and abs(s.imag) < 1e-10:
            raise UnsupportedCaseError(
                f"connection formula degenerate: c-a-b = {s} is an integer")
        w = w_all[~lo]
        f1 = _series_2f1_array(a, b, a + b + 1.0 - c, w, cfg)
        f2 = _series_2f1_array(c - a, c - b, 1.0 + c - a - b, w, cfg)
        g1 = np.exp(ln_gamma(c) + ln_gamma(s) - ln_gamma(c - a) - ln_gamma(c - b))
        g2 = np.exp(ln_gamma(c) + ln_gamma(-s) - ln_gamma(a) - ln_gamma(b))
        out[~lo] = g1 * f1 + g2 * w ** s * f2
    return out


def gauss_2f1_regularized(a: complex, b: complex, c: complex, v: float,
                          cfg: SpecFunConfig = _DEFAULT) -> complex:
    """Regularized series 2F1(a,b;c;v)/Gamma(c), entire in c.

    Handles non-positive integer c (the series then starts at k = 1 - c).
    Converges for |v| < 1; slowly near v = 1.
    """
    if not (0.0 <= v < 1.0):
        raise ValueError(f"argument must lie in [0, 1), got {v}")
    if _is_nonpositive_int(c):
        m = int(round(1 - c.real))  # first index with c + k = 1
        lead = 1.0 + 0.0j
        for p in range(m):  # (a)_m (b)_m / m!
            lead *= (a + p) * (b + p) / (p + 1)
        term = lead * v ** m
        acc = term
        k = m
        for _ in range(cfg.max_terms):
            term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * v
            acc += term
            k += 1
            if abs(term) <= cfg.series_tol * max(abs(acc), 1e-300):
                return acc
        raise AccuracyError("regularized 2F1 series did not converge")
    return _series_2f1(a, b, c, v, cfg) * np.exp(-ln_gamma(c))


def assoc_legendre_P(degree: float, order: float, u: float,
                     cfg: SpecFunConfig = _DEFAULT) -> float:
    """Ferrers associated Legendre function P^order_degree(u) on (-1, 1).

    Uses the hypergeometric representation
    P^mu_nu(u) = ((1+u)/(1-u))^{mu/2} * 2F1(-nu, nu+1; 1-mu; (1-u)/2)/Gamma(1-mu)
    with the regularized series, so integer orders are included.
    """
    if not (-1.0 < u < 1.0):
        raise ValueError(f"argument must lie in (-1, 1), got {u}")
    pref = ((1.0 + u) / (1.0 - u)) ** (order / 2.0)
    val = gauss_2f1_regularized(-degree, degree + 1.0, 1.0 - order,
                                (1.0 - u) / 2.0, cfg)
    return float((pref * val).real)


def gegenbauer_C(lam: float, k: int, x):
    """Gegenbauer polynomial C^(lam)_k(x) by the three-term recurrence."""
    if k < 0:
        raise ValueError("polynomial degree must be non-negative")
    x = np.asarray(x, dtype=float)
    c_prev = np.ones_like(x)
    if k == 0:
        return c_prev
    c = 2.0 * lam * x
    for m in range(1, k):
        c, c_prev = (2.0 * (m + lam) * x * c - (m + 2.0 * lam - 1.0) * c_prev) / (m + 1.0), c
    return c


@dataclass(frozen=True)
class HarmonicIndex:
    """Mode labels (m, l_1 <= ... <= l_{n-2}) of a harmonic on S^{n-1}."""

    n: int
    m: int
    ls: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("sphere S^{n-1} needs n >= 2")
        if len(self.ls) != self.n - 2:
            raise ValueError(f"expected {self.n - 2} chain labels, got {len(self.ls)}")
        chain = (abs(self.m),) + self.ls
        for lo, hi in zip(chain[:-1], chain[1:]):
            if lo > hi:
                raise ValueError(f"index chain must be non-decreasing, got {chain}")
        if any(l < 0 for l in self.ls):
            raise ValueError("chain labels must be non-negative")

    @property
    def top(self) -> int:
        """Highest label (total angular momentum); |m| when n = 2."""
        return self.ls[-1] if self.ls else abs(self.m)


def _block_norm(lam: float, kappa: int) -> float:
    # 1 / sqrt of  integral_0^pi [C^(lam)_kappa(cos t)]^2 (sin t)^{2 lam} dt
    ln_h = (math.log(math.pi) + (1.0 - 2.0 * lam) * math.log(2.0)
            + float(ln_gamma(kappa + 2.0 * lam).real)
            - math.log(kappa + lam) - float(ln_gamma(kappa + 1.0).real)
            - 2.0 * float(ln_gamma(lam).real))
    return math.exp(-0.5 * ln_h)


def hypersph_Y(idx: HarmonicIndex, phis, phi) -> complex:
    """Orthonormal hyperspherical harmonic on S^{n-1}.

    Built recursively from Gegenbauer blocks; the q-th polar angle carries
    (sin)^l C^(l + (d-1)/2)_{L-l}(cos) with unit L2 norm, and the azimuth
    carries e^{i m phi}/sqrt(2 pi).  Eigenvalue of the sphere Laplacian is
    -top*(top + n - 2).

    Angles broadcast: phis is a sequence of n-2 arrays (or scalars), phi an
    array (or scalar).
    """
    n = idx.n
    phis = [np.asarray(p, dtype=float) for p in phis]
    if len(phis) != n - 2:
        raise ValueError(f"expected {n - 2} polar angles, got {len(phis)}")
    phi = np.asarray(phi, dtype=float)
    out = np.exp(1j * idx.m * phi) / math.sqrt(2.0 * math.pi)
    chain = (abs(idx.m),) + idx.ls  # (l_0 = |m|, l_1, ..., l_{n-2})
    # angle phis[q-1] lives on the sphere S^{d} with d = n - q, pairing
    # (L, l) = (chain[d-1], chain[d-2])
    for q in range(1, n - 1):
        d = n - q
        L = chain[d - 1]
        l = chain[d - 2]
        lam = l + 0.5 * (d - 1)
        theta = phis[q - 1]
        block = (_block_norm(lam, L - l) * np.sin(theta) ** l
                 * gegenbauer_C(lam, L - l, np.cos(theta)))
        out = out * block
    return out


def harmonic_indices(n: int, l_max: int, m_max: int | None = None) -> list[HarmonicIndex]:
    """All index chains with top label <= l_max (and |m| <= m_max if given)."""
    cap = l_max if m_max is None else min(l_max, m_max)
    out: list[HarmonicIndex] = []

    def chains(prefix: tuple[int, ...], remaining: int):
        if remaining == 0:
            mm = min(prefix[0], cap) if prefix else cap
            for m in range(-mm, mm + 1):
                out.append(HarmonicIndex(n, m, prefix))
            return
        hi = prefix[0] if prefix else l_max
        for l in range(0, hi + 1):
            chains((l,) + prefix, remaining - 1)

    chains((), n - 2)
    return out


def sphere_laplacian_eigenvalue(idx: HarmonicIndex) -> float:
    """Eigenvalue -top(top + n - 2) of the S^{n-1} Laplacian on the mode."""
    return -float(idx.top * (idx.top + idx.n - 2))


def bessel_j(nu: float, x):
    """Bessel function of the first kind J_nu(x), nu >= -1/2, x >= 0."""
    if nu < -0.5:
        raise ValueError(f"order must be >= -1/2, got {nu}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("argument must be non-negative")
    return _scipy_jv(nu, x)


def norm_K(alpha: int, n: int, l: int, rho: float) -> float:
    """Normalization constants of the hyperbolic plane waves.

    alpha = 1 is the odd family, alpha = 2 the even one.  Both expressions
    carry sinh(pi rho) in the denominator, so rho = 0 is a pole.
    """
    if alpha not in (1, 2):
        raise ValueError("alpha must be 1 or 2")
    if rho <= 0:
        raise PoleError("normalization constants need rho > 0")
    cosf = math.cos((n - 1) * math.pi / 2.0)
    g_lo = abs_gamma_sq(0.5 * (1j * rho + l + 0.5 * (n - 1)))
    g_hi = abs_gamma_sq(0.5 * (1j * rho + l + 0.5 * (n + 1)))
    sign = (-1.0) ** l
    if alpha == 1:
        return math.pi * (math.cosh(math.pi * rho) - sign * cosf) * g_lo / (
            math.sinh(math.pi * rho) * g_hi)
    return math.pi * (math.cosh(math.pi * rho) + sign * cosf) * g_hi / (
        math.sinh(math.pi * rho) * g_lo)


def d_abs(n: int, j: int, k: int, rho: float) -> float:
    """Modulus of the cone-intertwiner constant d(rho).

    |d| = (2 pi)^{-(n+1)/2} |Gamma((n-1)/2 + i rho)| / |Gamma(-i rho)| times
    a parity factor: pi sqrt(2 (1 + tanh(pi rho))) for even n, and
    pi (1 + tanh(pi rho / 2)) or pi (1 + coth(pi rho / 2)) for odd n
    according to whether n - 1 + 2(j - k) is a multiple of 4.

    The even-n factor carries tanh (the value the intertwiner integrals
    actually produce); see the accompanying oracle in the limits module.
    """
    if rho <= 0:
        raise PoleError("d(rho) needs rho > 0")
    base = ((2.0 * math.pi) ** (-0.5 * (n + 1))
            * math.sqrt(abs_gamma_sq(0.5 * (n - 1) + 1j * rho)
                        / abs_gamma_sq(-1j * rho)))
    if n % 2 == 0:
        factor = math.pi * math.sqrt(2.0 * (1.0 + math.tanh(math.pi * rho)))
    elif (n - 1 + 2 * (j - k)) % 4 == 0:
        factor = math.pi * (1.0 + math.tanh(math.pi * rho / 2.0))
    else:
        factor = math.pi * (1.0 + 1.0 / math.tanh(math.pi * rho / 2.0))
    return base * factor
