"""Radial heat kernels of the fractional and relativistic free operators.

The kernels are computed by radial Fourier (Hankel-type) inversion of the
momentum symbol.  Off-diagonal evaluations integrate between consecutive
oscillation nodes with iterated averaging (Euler) acceleration of the
resulting alternating series, which converges even when the symbol decays
slowly compared to the oscillation (large separation, small time).
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln, jv

from .errors import ComputationError, DomainError

_GL_NODES, _GL_WEIGHTS = leggauss(16)
_SYMBOL_LOG_CUT = 64.0  # integrate until t*symbol(p) reaches this
_MAX_SEGMENTS = 600
_EULER_MIN_TERMS = 6


@dataclass(frozen=True)
class KernelQuery:
    """Spatial arguments of a kernel evaluation: |x|, |y| and |x - y|."""

    d: int
    alpha: float
    t: float
    x_abs: float
    y_abs: float
    separation: float

    def __post_init__(self):
        if self.d < 1 or int(self.d) != self.d:
            raise DomainError(f"dimension must be a positive integer, got {self.d}")
        if not 0.0 < self.alpha < min(2.0, self.d) + 1e-15:
            raise DomainError(f"alpha must lie in (0, min(2, d)), got {self.alpha}")
        if self.t <= 0.0:
            raise DomainError(f"time must be positive, got {self.t}")
        if self.x_abs < 0.0 or self.y_abs < 0.0 or self.separation < 0.0:
            raise DomainError("spatial arguments must be nonnegative")
        lo = abs(self.x_abs - self.y_abs)
        hi = self.x_abs + self.y_abs
        if not lo - 1e-12 * (1.0 + hi) <= self.separation <= hi + 1e-12 * (1.0 + hi):
            raise DomainError(
                f"separation {self.separation} violates the triangle inequality "
                f"for |x| = {self.x_abs}, |y| = {self.y_abs}"
            )

    @classmethod
    def diagonal(cls, d, alpha, t, x_abs):
        return cls(d=d, alpha=alpha, t=t, x_abs=x_abs, y_abs=x_abs, separation=0.0)


def _sphere_area(d):
    return 2.0 * math.pi ** (d / 2.0) / math.exp(gammaln(d / 2.0))


def _panel_integral(f, lo, hi):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    return half * float(np.sum(_GL_WEIGHTS * f(mid + half * _GL_NODES)))


def _smooth_integral(f, p_hi, n_oct=48):
    """Geometric-panel quadrature of f on (0, p_hi] for non-oscillatory f."""
    edges = p_hi * 2.0 ** (-np.arange(n_oct + 1, dtype=float)[::-1])
    total = _panel_integral(f, 0.0, edges[0])
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += _panel_integral(f, lo, hi)
    return total


def _euler_sum(terms):
    """Iterated averaging of partial sums of an alternating series."""
    s = np.cumsum(terms)
    while s.size > 1:
        s = 0.5 * (s[:-1] + s[1:])
    return float(s[0])


def _oscillatory_integral(f, rho, bessel_order, p_hi):
    """integral_0^p_hi f(p) dp where f oscillates like J_mu(p rho).

    Segments between (approximate McMahon) oscillation nodes form an
    alternating series.  If the envelope decays within the segment budget
    the series is summed directly; otherwise iterated averaging (Euler
    acceleration) extrapolates the remaining alternating tail, which works
    for the slowly varying envelopes produced by the symbols here.
    """
    mu = bessel_order
    # McMahon nodes of J_mu: z_j ~ (j + mu/2 - 1/4) pi
    def node(j):
        return max((j + mu / 2.0 - 0.25) * math.pi, 0.25 * math.pi)

    head = _panel_integral(f, 0.0, min(node(1) / rho, p_hi))
    terms = []
    lo = node(1) / rho
    j = 1
    covered = lo >= p_hi
    while not covered and j < _MAX_SEGMENTS:
        hi = min(node(j + 1) / rho, p_hi)
        terms.append(_panel_integral(f, lo, hi))
        lo = hi
        j += 1
        covered = lo >= p_hi
        if len(terms) > _EULER_MIN_TERMS:
            scale = abs(head) + abs(terms[0]) + 1e-300
            if abs(terms[-1]) <= 1e-17 * scale:
                covered = True
    if covered or len(terms) < 2 * _EULER_MIN_TERMS:
        return head + math.fsum(terms)
    return head + _euler_sum(np.asarray(terms))


def _radial_inversion(symbol_log, d, t, rho, p_hi):
    """(2 pi)^{-d/2} rho^{1-d/2} int_0^inf e^{-t sym(p)} p^{d/2} J_{d/2-1}(p rho) dp."""
    mu = d / 2.0 - 1.0

    def f(p):
        p = np.asarray(p, dtype=float)
        out = np.zeros_like(p)
        pos = p > 0.0
        pp = p[pos]
        out[pos] = np.exp(-t * symbol_log(pp)) * pp ** (d / 2.0) * jv(mu, pp * rho)
        return out

    if rho * p_hi <= 8.0 * math.pi:
        integral = _smooth_integral(f, p_hi)
    else:
        integral = _oscillatory_integral(f, rho, mu, p_hi)
    return (2.0 * math.pi) ** (-d / 2.0) * rho ** (1.0 - d / 2.0) * integral


def _diagonal_value(symbol_kind, d, alpha, t):
    """Closed form at separation zero; for the massive symbol, by quadrature."""
    if symbol_kind == "free":
        # int e^{-t p^alpha} p^{d-1} dp = Gamma(d/alpha) / (alpha t^{d/alpha})
        lg = gammaln(d / alpha) - math.log(alpha) - (d / alpha) * math.log(t)
        return _sphere_area(d) / (2.0 * math.pi) ** d * math.exp(lg)
    p_hi = _massive_cutoff(t)
    integral = _smooth_integral(
        lambda p: np.exp(-t * (np.sqrt(1.0 + p * p) - 1.0)) * p ** (d - 1.0), p_hi
    )
    return _sphere_area(d) / (2.0 * math.pi) ** d * integral


def _free_cutoff(t, alpha):
    return (_SYMBOL_LOG_CUT / t) ** (1.0 / alpha)


def _massive_cutoff(t):
    u = _SYMBOL_LOG_CUT / t + 1.0
    return math.sqrt(u * u - 1.0)


def free_kernel(q):
    """Heat kernel of the fractional Laplacian power, evaluated radially."""
    rho = q.separation
    if rho == 0.0:
        return _diagonal_value("free", q.d, q.alpha, q.t)
    val = _radial_inversion(
        lambda p: p**q.alpha, q.d, q.t, rho, _free_cutoff(q.t, q.alpha)
    )
    return max(val, 0.0)


def relativistic_kernel(q):
    """Heat kernel of sqrt(1 - Laplacian) - 1 at d = 3, alpha = 1."""
    if q.d != 3 or q.alpha != 1.0:
        raise DomainError("the massive relativistic kernel is computed for d = 3, alpha = 1")
    rho = q.separation
    if rho == 0.0:
        return _diagonal_value("massive", q.d, q.alpha, q.t)
    val = _radial_inversion(
        lambda p: np.sqrt(1.0 + p * p) - 1.0, q.d, q.t, rho, _massive_cutoff(q.t)
    )
    return max(val, 0.0)


def comparability_envelope(d, alpha, t, separation):
    """The two-sided comparability shape t / (t + separation)^{d + alpha}."""
    if t <= 0.0 or separation < 0.0:
        raise DomainError("need t > 0 and separation >= 0")
    return t / (t + separation) ** (d + alpha)


def hardy_kernel_envelope(d, alpha, eta, t, x_abs, y_abs, separation):
    """Singular-weighted free kernel: the two-sided shape of the Hardy semigroup."""
    if not 0.0 < eta <= (d - alpha) / 2.0 + 1e-12:
        raise DomainError(f"eta must lie in (0, (d - alpha)/2], got {eta}")
    q = KernelQuery(d=d, alpha=alpha, t=t, x_abs=x_abs, y_abs=y_abs, separation=separation)
    tpow = t ** (1.0 / alpha)
    wx = min(1.0, x_abs / tpow) ** (-eta) if x_abs > 0 else math.inf
    wy = min(1.0, y_abs / tpow) ** (-eta) if y_abs > 0 else math.inf
    return wx * wy * free_kernel(q)


def radial_kernel_envelope(d_ell, alpha, t, r, s):
    """Two-term envelope of the reduced radial free kernel in dimension d_ell."""
    if r <= 0.0 or s <= 0.0 or t <= 0.0:
        raise DomainError("need r, s, t > 0")
    tpow = t ** (1.0 / alpha)
    denom = abs(r - s) ** (1.0 + alpha) * (r + s) ** (d_ell - 1.0)
    denom += t ** ((1.0 + alpha) / alpha) * (tpow + r + s) ** (d_ell - 1.0)
    return t / denom


def diagonal_density_majorant(d, alpha, eta, t, x_abs):
    """e^t t^{-d/alpha} (1 ^ |x|/t^{1/alpha})^{-2 eta}: the diagonal projector bound."""
    if x_abs <= 0.0 or t <= 0.0:
        raise DomainError("need |x| > 0 and t > 0")
    tpow = t ** (1.0 / alpha)
    return math.exp(t) * t ** (-d / alpha) * min(1.0, x_abs / tpow) ** (-2.0 * eta)
