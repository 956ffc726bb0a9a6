"""The Hardy-coupling dictionary.

``phi(d, alpha, eta)`` maps the singularity exponent eta to the Coulomb
coupling kappa through a ratio of four gamma factors; it is symmetric about
eta = (d - alpha)/2 where it attains the critical coupling
``kappa_critical(d, alpha)``.  ``eta_from_kappa`` inverts the monotone
branch, which is what turns a coupling strength into a density exponent.
"""

import math
from dataclasses import dataclass

from .errors import DomainError, RangeError

_ETA_TOL = 1e-12
_KAPPA_SLACK = 1e-12
_UNDERFLOW_LOG = -745.0


@dataclass(frozen=True)
class HardyCoupling:
    """A consistent quadruple (d, alpha, eta, kappa) with kappa = phi(d, alpha, eta)."""

    d: int
    alpha: float
    eta: float
    kappa: float

    @classmethod
    def from_eta(cls, d, alpha, eta):
        return cls(d=d, alpha=alpha, eta=eta, kappa=phi(d, alpha, eta))

    @classmethod
    def from_kappa(cls, d, alpha, kappa):
        return cls(d=d, alpha=alpha, eta=eta_from_kappa(d, alpha, kappa), kappa=kappa)

    @property
    def critical(self):
        return kappa_critical(self.d, self.alpha)


@dataclass(frozen=True)
class ChannelGeometry:
    """Angular momentum channel of dimension d: effective dimension and multiplicity."""

    d: int
    ell: int

    def __post_init__(self):
        if self.d < 1:
            raise DomainError(f"dimension must be >= 1, got {self.d}")
        if self.ell < 0:
            raise DomainError(f"angular momentum must be >= 0, got {self.ell}")
        if self.d == 1 and self.ell not in (0, 1):
            raise DomainError("for d = 1 only ell in {0, 1} occurs")

    @property
    def d_ell(self):
        return self.d + 2 * self.ell

    @property
    def mult(self):
        return multiplicity(self.d, self.ell)


def _signed_log_gamma(x):
    """(ln|Gamma(x)|, sign) for real non-pole x; (inf, 0) at a pole."""
    if x > 0.0:
        return math.lgamma(x), 1.0
    if x == math.floor(x):
        return math.inf, 0.0
    # sign of Gamma on (-m-1, -m) alternates: positive on (-2,-1) is false;
    # Gamma is positive on (0,inf), negative on (-1,0), positive on (-2,-1), ...
    m = math.floor(-x)
    sign = 1.0 if m % 2 == 1 else -1.0
    return math.lgamma(x), sign


def _is_nonpositive_int(x, tol=1e-13):
    return x <= tol and abs(x - round(x)) <= tol * max(1.0, abs(x))


def phi(d, alpha, eta):
    """The coupling 2^alpha G((eta+alpha)/2) G((d-eta)/2) / (G(eta/2) G((d-eta-alpha)/2)).

    Evaluated through signed log-gamma; returns exactly 0 at eta = 0 and at
    the other zeros forced by poles of the denominator.
    """
    if d < 1 or int(d) != d:
        raise DomainError(f"dimension must be a positive integer, got {d}")
    if not 0.0 < alpha < d:
        raise DomainError(f"order must satisfy 0 < alpha < d, got {alpha}")
    if not -alpha < eta < d:
        raise DomainError(f"eta must lie in (-{alpha}, {d}), got {eta}")
    if eta == 0.0:
        return 0.0
    args_num = ((eta + alpha) / 2.0, (d - eta) / 2.0)
    args_den = (eta / 2.0, (d - eta - alpha) / 2.0)
    for t in args_den:
        if _is_nonpositive_int(t):
            return 0.0
    log_val = alpha * math.log(2.0)
    sign = 1.0
    for t in args_num:
        lg, s = _signed_log_gamma(t)
        log_val += lg
        sign *= s
    for t in args_den:
        lg, s = _signed_log_gamma(t)
        log_val -= lg
        sign *= s
    if log_val < _UNDERFLOW_LOG:
        return 0.0
    return sign * math.exp(log_val)


def kappa_critical(d, alpha):
    """The critical coupling 2^alpha Gamma((d+alpha)/4)^2 / Gamma((d-alpha)/4)^2."""
    if d < 1 or int(d) != d:
        raise DomainError(f"dimension must be a positive integer, got {d}")
    if not 0.0 < alpha < d:
        raise DomainError(f"order must satisfy 0 < alpha < d, got {alpha}")
    return math.exp(
        alpha * math.log(2.0)
        + 2.0 * math.lgamma((d + alpha) / 4.0)
        - 2.0 * math.lgamma((d - alpha) / 4.0)
    )


def eta_from_kappa(d, alpha, kappa):
    """The unique eta in (0, (d-alpha)/2] with phi(d, alpha, eta) = kappa.

    Bisection on the strictly increasing branch, absolute tolerance 1e-12.
    """
    if kappa <= 0.0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    kc = kappa_critical(d, alpha)
    top = (d - alpha) / 2.0
    if kappa > kc * (1.0 + _KAPPA_SLACK) + _KAPPA_SLACK:
        raise RangeError(f"kappa = {kappa} exceeds the critical coupling {kc}")
    if kappa >= kc * (1.0 - _KAPPA_SLACK):
        return top
    lo, hi = 0.0, top
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if phi(d, alpha, mid) < kappa:
            lo = mid
        else:
            hi = mid
        if hi - lo <= _ETA_TOL:
            break
    return 0.5 * (lo + hi)


def eta_ell(kappa, ell):
    """Per-channel exponent at d = 3, alpha = 1: eta for dimension 3 + 2*ell.

    Well-defined for 0 < kappa <= 2/pi because the critical coupling grows
    with the channel dimension.
    """
    if ell < 0 or int(ell) != ell:
        raise DomainError(f"angular momentum must be a nonnegative integer, got {ell}")
    if kappa > 2.0 / math.pi + _KAPPA_SLACK:
        raise RangeError(f"kappa = {kappa} exceeds 2/pi")
    return eta_from_kappa(3 + 2 * int(ell), 1.0, kappa)


def multiplicity(d, ell):
    """dim of the degree-ell spherical harmonic space in d dimensions (exact)."""
    if d < 2 or int(d) != d:
        raise DomainError(f"multiplicity requires d >= 2, got {d}")
    if ell < 0 or int(ell) != ell:
        raise DomainError(f"angular momentum must be a nonnegative integer, got {ell}")
    d, ell = int(d), int(ell)
    if ell == 0:
        return 1
    return (d + 2 * ell - 2) * math.factorial(d + ell - 3) // (
        math.factorial(ell) * math.factorial(d - 2)
    )
