# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: Laguerre/Kummer recurrences and channel-density sums."""

from libc.math cimport exp, fabs, log, log1p, lgamma, sqrt, INFINITY

import numpy as np

BACKEND = "compiled"

cdef double _RESCALE = 1e250
cdef double _LOG_RESCALE = log(1e250)


def laguerre_rec(int n, double beta, double x):
    """Generalized Laguerre polynomial by the upward three-term recurrence."""
    cdef double lm1, lj, tmp
    cdef int j
    if n == 0:
        return 1.0
    lm1 = 1.0
    lj = beta + 1.0 - x
    for j in range(1, n):
        tmp = ((2.0 * j + beta + 1.0 - x) * lj - (j + beta) * lm1) / (j + 1.0)
        lm1 = lj
        lj = tmp
    return lj


def kummer_sum(int n, double b, double z):
    """Finite Kummer series 1F1(-n, b, z) with Neumaier-compensated summation."""
    cdef double term = 1.0, total = 1.0, comp = 0.0, t
    cdef int j
    for j in range(n):
        term *= (j - n) * z / ((b + j) * (j + 1.0))
        t = total + term
        if fabs(total) >= fabs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
    return total + comp


cdef struct LevelC:
    double gam
    double w
    double p
    double E
    double nukp
    double coeff
    double lnp
    double lnm


cdef LevelC _level(double nu, int k, int n) nogil:
    cdef LevelC lv
    cdef double ak = fabs(<double> k)
    cdef double g2 = k * k - nu * nu
    cdef double lgr, base, ln1pE
    lv.gam = sqrt(g2) if g2 > 0.0 else 0.0
    lv.w = sqrt(n * <double> n + 2.0 * n * lv.gam + k * <double> k)
    lv.p = nu / lv.w
    lv.E = (n + lv.gam) / lv.w
    if k > 0:
        lv.nukp = nu + k * lv.p
        lv.coeff = lv.w + k
    else:
        lv.nukp = nu * n * (n + 2.0 * lv.gam) / (lv.w * (lv.w + ak))
        lv.coeff = n * (n + 2.0 * lv.gam) / (lv.w + ak)
    lgr = lgamma(n + 2.0 * lv.gam + 1.0) - lgamma(n + 1.0)
    base = (lv.gam + 1.5) * log(2.0 * lv.p) - log(4.0) - lgamma(2.0 * lv.gam + 1.0) \
        + 0.5 * (lgr - log(nu) - log(lv.nukp))
    ln1pE = log1p(lv.E)
    lv.lnp = base + 0.5 * ln1pE
    lv.lnm = base + 0.5 * (2.0 * log(lv.p) - ln1pE)
    return lv


cdef int _kummer_pair(int n, double beta, double x,
                      double *pn, double *pnm1, double *off) nogil:
    cdef double pm1, pj, tmp, m
    cdef int j
    if n == 0:
        pn[0] = 1.0
        pnm1[0] = 0.0
        off[0] = 0.0
        return 0
    pm1 = 1.0
    pj = (beta + 1.0 - x) / (beta + 1.0)
    off[0] = 0.0
    for j in range(1, n):
        tmp = ((2.0 * j + beta + 1.0 - x) * pj - j * pm1) / (j + beta + 1.0)
        pm1 = pj
        pj = tmp
        m = fabs(pj) + fabs(pm1)
        if m > _RESCALE:
            pj /= _RESCALE
            pm1 /= _RESCALE
            off[0] += _LOG_RESCALE
        elif 0.0 < m < 1.0 / _RESCALE:
            pj *= _RESCALE
            pm1 *= _RESCALE
            off[0] -= _LOG_RESCALE
    pn[0] = pj
    pnm1[0] = pm1
    return 0


cdef double _summand(double nu, int k, int n, double r, LevelC *lv) nogil:
    cdef double pn, pnm1, off, pref, cp, cm, vp, vm
    _kummer_pair(n, 2.0 * lv.gam, 2.0 * lv.p * r, &pn, &pnm1, &off)
    pref = lv.gam * log(r) - lv.p * r + off
    cp = lv.coeff * pn - n * pnm1
    cm = -lv.coeff * pn - n * pnm1
    vp = exp(2.0 * (pref + lv.lnp + log(fabs(cp)))) if cp != 0.0 else 0.0
    vm = exp(2.0 * (pref + lv.lnm + log(fabs(cm)))) if cm != 0.0 else 0.0
    return vp + vm


def dirac_psi_parts(double nu, int k, int n, double r):
    """Radial spinor components as (sign+, logmag+, sign-, logmag-)."""
    cdef LevelC lv = _level(nu, k, n)
    cdef double pn, pnm1, off, pref, cp, cm, lp, lm
    _kummer_pair(n, 2.0 * lv.gam, 2.0 * lv.p * r, &pn, &pnm1, &off)
    pref = lv.gam * log(r) - lv.p * r + off
    cp = lv.coeff * pn - n * pnm1
    cm = -lv.coeff * pn - n * pnm1
    lp = pref + lv.lnp + (log(fabs(cp)) if cp != 0.0 else -INFINITY)
    lm = pref + lv.lnm + (log(fabs(cm)) if cm != 0.0 else -INFINITY)
    return (1.0 if cp >= 0.0 else -1.0), lp, (1.0 if cm >= 0.0 else -1.0), lm


def dirac_summand(double nu, int k, int n, double r):
    """psi_plus^2 + psi_minus^2 for a single level."""
    cdef LevelC lv = _level(nu, k, n)
    return _summand(nu, k, n, r, &lv)


def dirac_channel_block(double nu, int k, int n0, int n1, double r):
    """Sum of level summands over n in [n0, n1]."""
    cdef double total = 0.0
    cdef int n
    cdef LevelC lv
    with nogil:
        for n in range(n0, n1 + 1):
            lv = _level(nu, k, n)
            total += _summand(nu, k, n, r, &lv)
    return total


def dirac_channel_block_grid(double nu, int k, int n0, int n1,
                             double[::1] r, double[::1] out):
    """Accumulate level sums over a radial grid onto ``out``."""
    cdef int n, q, nr = r.shape[0]
    cdef LevelC lv
    cdef double val
    with nogil:
        for q in range(nr):
            val = 0.0
            for n in range(n0, n1 + 1):
                lv = _level(nu, k, n)
                val += _summand(nu, k, n, r[q], &lv)
            out[q] += val
    return 0
