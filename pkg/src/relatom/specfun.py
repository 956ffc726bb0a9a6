"""Special functions: log-gamma, generalized Laguerre polynomials and the
polynomial (negative-integer-parameter) Kummer function.

All heavy consumers assemble their constants in the log domain, so the
gamma function itself is never exposed, only ``log_gamma`` and the
difference ``log_gamma_ratio`` which stays accurate for large, nearby
arguments.
"""

import math
from dataclasses import dataclass

from ._backend import kernels
from .errors import DomainError

# Bernoulli tail of the Stirling series, B_{2k}/(2k(2k-1))
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)

_RATIO_SHIFT = 12.0  # promote both arguments above this before expanding
_RATIO_WIDTH = 64.0  # |a-b| window for the cancellation-free path


@dataclass(frozen=True)
class LaguerreEval:
    """One evaluation L_n^{(beta)}(x) together with its inputs."""

    n: int
    beta: float
    x: float
    value: float


def log_gamma(x):
    """ln Gamma(x) for x > 0."""
    if not x > 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def _stirling_tail(x):
    inv2 = 1.0 / (x * x)
    acc = 0.0
    term = 1.0 / x
    for c in _STIRLING:
        acc += c * term
        term *= inv2
    return acc


def log_gamma_ratio(a, b):
    """ln(Gamma(a)/Gamma(b)) for a, b > 0, stable for large nearby arguments.

    For |a-b| <= 64 the leading Stirling terms are recombined so that no
    difference of two large logs is ever formed; otherwise the plain
    lgamma difference is already well conditioned.
    """
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"log_gamma_ratio requires positive arguments, got ({a}, {b})")
    if abs(a - b) > _RATIO_WIDTH:
        return math.lgamma(a) - math.lgamma(b)
    delta = a - b
    # promote both arguments by the same integer so Stirling applies
    steps = 0
    while min(a, b) + steps < _RATIO_SHIFT:
        steps += 1
    aa, bb = a + steps, b + steps
    corr = 0.0
    for j in range(steps):
        corr += math.log1p(delta / (b + j))  # ln((a+j)/(b+j))
    # Stirling difference at (aa, bb); the 1/2 ln(2 pi) terms cancel and the
    # leading part is recombined so no large-log difference is formed
    lead = delta * math.log(bb) + (aa - 0.5) * math.log1p(delta / bb) - delta
    tail = _stirling_tail(aa) - _stirling_tail(bb)
    return lead + tail - corr


def laguerre(n, beta, x):
    """L_n^{(beta)}(x) by the standard upward recurrence in the degree."""
    if n < 0 or int(n) != n:
        raise DomainError(f"laguerre degree must be a nonnegative integer, got {n}")
    if beta <= -1.0:
        raise DomainError(f"laguerre order must exceed -1, got {beta}")
    if x < 0.0:
        raise DomainError(f"laguerre argument must be >= 0, got {x}")
    return kernels.laguerre_rec(int(n), float(beta), float(x))


def laguerre_eval(n, beta, x):
    """Like :func:`laguerre` but returning the full record."""
    return LaguerreEval(n=int(n), beta=float(beta), x=float(x), value=laguerre(n, beta, x))


def kummer_neg_int(n, b, z):
    """1F1(-n, b, z): the finite (n+1)-term series, compensated summation."""
    if n < 0 or int(n) != n:
        raise DomainError(f"kummer_neg_int requires a nonnegative integer n, got {n}")
    if b <= 0.0:
        raise DomainError(f"kummer_neg_int requires b > 0, got {b}")
    if z < 0.0:
        raise DomainError(f"kummer_neg_int requires z >= 0, got {z}")
    return kernels.kummer_sum(int(n), float(b), float(z))


def szego_log_bound(n, beta, x):
    """ln of the Szego envelope: |L_n^{(beta)}(x)| <= binom(n+beta,n) e^{x/2}, beta >= 0."""
    return log_gamma_ratio(n + beta + 1.0, beta + 1.0) - math.lgamma(n + 1.0) + 0.5 * x
