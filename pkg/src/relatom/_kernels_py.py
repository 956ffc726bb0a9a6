"""Pure-Python/NumPy fallback for the hot numerical kernels.

Mirrors the API of the compiled extension ``relatom._kernels``.  The channel
summation is the dominant cost (an O(n) polynomial recurrence per level, per
radius); here it is vectorised over the radial grid, which is typically one
to two orders of magnitude slower than the compiled loop.
"""

import math

import numpy as np

BACKEND = "python"

_RESCALE = 1e250
_LOG_RESCALE = math.log(_RESCALE)


def laguerre_rec(n, beta, x):
    """Generalized Laguerre polynomial by the upward three-term recurrence."""
    if n == 0:
        return 1.0
    lm1 = 1.0
    lj = beta + 1.0 - x
    for j in range(1, n):
        lm1, lj = lj, ((2.0 * j + beta + 1.0 - x) * lj - (j + beta) * lm1) / (j + 1.0)
    return lj


def kummer_sum(n, b, z):
    """Finite Kummer series 1F1(-n, b, z) with Neumaier-compensated summation."""
    term = 1.0
    total = 1.0
    comp = 0.0
    for j in range(n):
        term *= (j - n) * z / ((b + j) * (j + 1.0))
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
    return total + comp


def _level_constants(nu, k, n):
    """Per-level scalars: gamma, w = nu/p, p, E, nu + k*p, coefficient nu/p + k.

    The k < 0 combinations are evaluated through the cancellation-free forms
    nu + k*p = nu*n*(n+2g)/(w*(w+|k|)) and nu/p + k = n*(n+2g)/(w+|k|).
    """
    gam = math.sqrt(max(k * k - nu * nu, 0.0))
    w = math.sqrt(n * n + 2.0 * n * gam + k * k)
    p = nu / w
    E = (n + gam) / w
    if k > 0:
        nukp = nu + k * p
        coeff = w + k
    else:
        nukp = nu * n * (n + 2.0 * gam) / (w * (w + abs(k)))
        coeff = n * (n + 2.0 * gam) / (w + abs(k))
    return gam, w, p, E, nukp, coeff


def _log_norms(nu, k, n):
    """(ln N+, ln N-, gamma, p, E, coeff) for one level, all in log domain."""
    gam, w, p, E, nukp, coeff = _level_constants(nu, k, n)
    lgr = math.lgamma(n + 2.0 * gam + 1.0) - math.lgamma(n + 1.0)
    base = (
        (gam + 1.5) * math.log(2.0 * p)
        - math.log(4.0)
        - math.lgamma(2.0 * gam + 1.0)
        + 0.5 * (lgr - math.log(nu) - math.log(nukp))
    )
    ln_1pE = math.log1p(E)
    ln_1mE = 2.0 * math.log(p) - ln_1pE
    return base + 0.5 * ln_1pE, base + 0.5 * ln_1mE, gam, p, E, coeff


def _kummer_pair(n, beta, x):
    """(P_n, P_{n-1}, log_offset): P_j = 1F1(-j, beta+1, x) by scaled recurrence."""
    if n == 0:
        return 1.0, 0.0, 0.0
    pm1 = 1.0
    pj = (beta + 1.0 - x) / (beta + 1.0)
    off = 0.0
    for j in range(1, n):
        pm1, pj = pj, ((2.0 * j + beta + 1.0 - x) * pj - j * pm1) / (j + beta + 1.0)
        m = abs(pj) + abs(pm1)
        if m > _RESCALE:
            pj /= _RESCALE
            pm1 /= _RESCALE
            off += _LOG_RESCALE
        elif 0.0 < m < 1.0 / _RESCALE:
            pj *= _RESCALE
            pm1 *= _RESCALE
            off -= _LOG_RESCALE
    return pj, pm1, off


def dirac_psi_parts(nu, k, n, r):
    """Radial spinor components as (sign+, logmag+, sign-, logmag-)."""
    lnp, lnm, gam, p, E, coeff = _log_norms(nu, k, n)
    x = 2.0 * p * r
    pn, pnm1, off = _kummer_pair(n, 2.0 * gam, x)
    pref = gam * math.log(r) - p * r + off
    cp = coeff * pn - n * pnm1
    cm = -coeff * pn - n * pnm1
    lp = pref + lnp + (math.log(abs(cp)) if cp != 0.0 else -math.inf)
    lm = pref + lnm + (math.log(abs(cm)) if cm != 0.0 else -math.inf)
    return math.copysign(1.0, cp), lp, math.copysign(1.0, cm), lm


def dirac_summand(nu, k, n, r):
    """psi_plus^2 + psi_minus^2 for a single level."""
    sp, lp, sm, lm = dirac_psi_parts(nu, k, n, r)
    vp = math.exp(2.0 * lp) if lp > -np.inf else 0.0
    vm = math.exp(2.0 * lm) if lm > -np.inf else 0.0
    return vp + vm


def dirac_channel_block(nu, k, n0, n1, r):
    """Sum of dirac_summand over n in [n0, n1]."""
    total = 0.0
    for n in range(n0, n1 + 1):
        total += dirac_summand(nu, k, n, r)
    return total


def dirac_channel_block_grid(nu, k, n0, n1, r, out):
    """Accumulate the level sums onto ``out`` for a whole radial grid.

    Vectorised over r; the polynomial recurrence is rerun per level because
    its argument 2*p_n*r changes with n.
    """
    r = np.asarray(r, dtype=float)
    lnr = np.log(r)
    for n in range(n0, n1 + 1):
        lnp, lnm, gam, p, E, coeff = _log_norms(nu, k, n)
        x = 2.0 * p * r
        beta = 2.0 * gam
        off = np.zeros_like(r)
        if n == 0:
            pn = np.ones_like(r)
            pnm1 = np.zeros_like(r)
        else:
            pm1 = np.ones_like(r)
            pj = (beta + 1.0 - x) / (beta + 1.0)
            for j in range(1, n):
                pm1, pj = pj, ((2.0 * j + beta + 1.0 - x) * pj - j * pm1) / (j + beta + 1.0)
                m = np.abs(pj) + np.abs(pm1)
                big = m > _RESCALE
                if big.any():
                    pj[big] /= _RESCALE
                    pm1[big] /= _RESCALE
                    off[big] += _LOG_RESCALE
                small = (m < 1.0 / _RESCALE) & (m > 0.0)
                if small.any():
                    pj[small] *= _RESCALE
                    pm1[small] *= _RESCALE
                    off[small] -= _LOG_RESCALE
            pn, pnm1 = pj, pm1
        pref = gam * lnr - p * r + off
        cp = coeff * pn - n * pnm1
        cm = -coeff * pn - n * pnm1
        with np.errstate(divide="ignore"):
            vp = np.exp(2.0 * (pref + lnp + np.log(np.abs(cp), where=cp != 0.0, out=np.full_like(r, -np.inf))))
            vm = np.exp(2.0 * (pref + lnm + np.log(np.abs(cm), where=cm != 0.0, out=np.full_like(r, -np.inf))))
        out += np.where(cp != 0.0, vp, 0.0) + np.where(cm != 0.0, vm, 0.0)
    return 0
