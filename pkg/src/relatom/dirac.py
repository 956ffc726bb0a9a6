"""Dirac-Coulomb bound states and densities.

Each angular channel k (nonzero integer) carries a discrete family of
levels indexed by n; energies, momenta and normalization constants are in
closed form, and the channel density is the square sum of the normalized
two-component radial eigenfunctions over all levels.

Truncation accounting comes in two flavours.  In ``certified`` mode every
reported value carries an explicit upper bound on the discarded remainder,
built from the Szego envelope of the Laguerre factors plus integral
comparison; this is affordable whenever the envelope scale r^{2 gamma_k}
is not astronomically above the true channel value (small and moderate
radii, or |k| either 1 or >> sqrt(r)).  In ``estimated`` mode the level
sum is instead stopped by the observed geometric decay of successive
blocks, with the extrapolated remainder reported; this is the only
practical option for 2 <= |k| <~ sqrt(8 r) at large r, where the envelope
bound overshoots the true value exponentially.  The discarded high-|k|
channels of the total density are always certified, using the
superexponential decay of the per-channel envelope in gamma_k.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import digamma

from ._backend import kernels, thread_count
from .errors import ComputationError, DomainError
from .report import (
    SlopeFit,
    VerificationReport,
    fit_growth_constants,
    fit_loglog_slope,
    fit_min_envelope_constant,
)

_LOG_HUGE = 709.0
_LOG_TINY = -745.0
_DEFAULT_N_CAP = 10**6
_DEFAULT_K_CAP = 512
_FIRST_BLOCK = 32
_KTAIL_MIN_K = 8
_KTAIL_DEGREE_MARGIN = 9.0
_EST_BLOCK_FRACTION = 0.05  # block contribution considered converged
_EST_RATIO_CAP = 0.9


def _safe_exp(t):
    if t >= _LOG_HUGE:
        return math.inf
    if t <= _LOG_TINY:
        return 0.0
    return math.exp(t)


def sigma_nu(nu):
    """Total-density singularity exponent coefficient: 1 - sqrt(1 - nu^2)."""
    return 1.0 - math.sqrt(max(0.0, 1.0 - nu * nu))


@dataclass(frozen=True)
class DiracChannel:
    """One angular channel: coupling nu in (0, 1], nonzero integer k."""

    nu: float
    k: int

    def __post_init__(self):
        if not 0.0 < self.nu <= 1.0:
            raise DomainError(f"nu must lie in (0, 1], got {self.nu}")
        if self.k == 0 or int(self.k) != self.k:
            raise DomainError(f"k must be a nonzero integer, got {self.k}")

    @property
    def gamma(self):
        return math.sqrt(max(self.k * self.k - self.nu * self.nu, 0.0))

    @property
    def n_start(self):
        return 0 if self.k > 0 else 1

    @property
    def degenerate(self):
        """True for the boundary channel nu = 1, |k| = 1 (gamma = 0)."""
        return self.nu == 1.0 and abs(self.k) == 1


@dataclass(frozen=True)
class DiracLevel:
    channel: DiracChannel
    n: int
    energy: float
    momentum: float
    log_norm_plus: float
    log_norm_minus: float

    @property
    def degenerate(self):
        return self.channel.degenerate and self.n == 0


@dataclass
class DensityProfile:
    """Sampled radial density with per-sample truncation remainder bounds."""

    radii: np.ndarray
    values: np.ndarray
    tail_bounds: np.ndarray
    meta: dict = field(default_factory=dict)


def _level_scalars(nu, k, n):
    """gamma, w = nu/p, p, E, nu + k p, coefficient nu/p + k (stable forms)."""
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


def level(channel, n):
    """Construct the (nu, k, n) level with log-domain normalizations."""
    if n < channel.n_start or int(n) != n:
        raise DomainError(
            f"n = {n} is outside the index set of channel k = {channel.k} "
            f"(starts at {channel.n_start})"
        )
    nu, k = channel.nu, channel.k
    gam, w, p, E, nukp, _ = _level_scalars(nu, k, int(n))
    lgr = math.lgamma(n + 2.0 * gam + 1.0) - math.lgamma(n + 1.0)
    base = (
        (gam + 1.5) * math.log(2.0 * p)
        - math.log(4.0)
        - math.lgamma(2.0 * gam + 1.0)
        + 0.5 * (lgr - math.log(nu) - math.log(nukp))
    )
    ln_1pE = math.log1p(E)
    ln_1mE = 2.0 * math.log(p) - ln_1pE
    return DiracLevel(
        channel=channel,
        n=int(n),
        energy=E,
        momentum=p,
        log_norm_plus=base + 0.5 * ln_1pE,
        log_norm_minus=base + 0.5 * ln_1mE,
    )


def eigenfunction(lvl, r, log_cap=700.0):
    """Two radial components (psi_plus, psi_minus) at r > 0."""
    if r <= 0.0:
        raise DomainError(f"radius must be positive, got {r}")
    ch = lvl.channel
    sp, lp, sm, lm = kernels.dirac_psi_parts(ch.nu, ch.k, lvl.n, float(r))
    if lp > log_cap or lm > log_cap:
        raise ComputationError(
            f"eigenfunction magnitude overflow at nu={ch.nu}, k={ch.k}, n={lvl.n}, r={r}"
        )
    return sp * _safe_exp(lp), sm * _safe_exp(lm)


def szego_majorant(lvl, r):
    """Explicit upper bound for this level's contribution to the channel density.

    The minus component uses the plain Szego envelope.  The plus component
    takes the smaller of the contiguous-recombination bound (with a
    corrected constant when 2 gamma < 1, where the order 2 gamma - 1
    envelope needs its (-1, 0) variant) and an exact r-dependent bound
    obtained by peeling one series derivative, which stays summable even in
    the degenerate gamma = 0 channel.
    """
    ch = lvl.channel
    nu, k, n = ch.nu, ch.k, lvl.n
    gam, w, p, E, nukp, coeff = _level_scalars(nu, k, n)
    x = 2.0 * p * r
    f_minus = (abs(coeff) + n) ** 2
    b_rdep = (abs(coeff - n) + n * x / (2.0 * gam + 1.0)) ** 2
    if gam > 0.0:
        if 2.0 * gam >= 1.0 or n == 0:
            s_fac = 1.0
        else:
            lc = math.lgamma(n + 2.0 * gam) - math.lgamma(2.0 * gam) - math.lgamma(n + 1.0)
            s_fac = 2.0 * math.exp(-lc) - 1.0
        b_rfree = (abs(coeff - n - 2.0 * gam) + 2.0 * gam * s_fac) ** 2
        f_plus = min(b_rfree, b_rdep)
    else:
        f_plus = b_rdep
    lr2g = 2.0 * gam * math.log(r)
    term_p = _safe_exp(lr2g + 2.0 * lvl.log_norm_plus + math.log(f_plus)) if f_plus > 0 else 0.0
    term_m = _safe_exp(lr2g + 2.0 * lvl.log_norm_minus + math.log(f_minus)) if f_minus > 0 else 0.0
    return term_p + term_m


def _poly_tail(deg, a, power, n_from):
    """integral_N^inf (s+a)^deg / s^power ds for deg < power - 1."""
    total = 0.0
    for m in range(deg + 1):
        c = math.comb(deg, m) * a ** (deg - m)
        total += c * n_from ** (m - power + 1) / (power - 1 - m)
    return total


def _channel_tail_log(nu, k, n_from, r):
    """log of a certified bound on the sum of level majorants for n > n_from >= 1."""
    gam = math.sqrt(max(k * k - nu * nu, 0.0))
    ak = abs(k)
    # G_{n,k} <= (2 nu (n+1+2g)/(n+g))^{2g} / Gamma(2g+1)^2, decreasing in n
    g_arg = 2.0 * nu * (n_from + 1.0 + 2.0 * gam) / (n_from + 1.0 + gam)
    ghat_log = 2.0 * gam * math.log(g_arg) - 2.0 * math.lgamma(2.0 * gam + 1.0)
    if k > 0:
        f_rdep = (gam + ak + nu * nu + 2.0 * nu * r / (2.0 * gam + 1.0)) ** 2
        f_rfree = (2.0 * nu * nu + 2.0 * gam) ** 2
        fhat = min(f_rfree, f_rdep) if 2.0 * gam >= 1.0 else f_rdep
        bracket = 2.0 * fhat * nu**3 * _poly_tail(0, 0.0, 3, n_from)
        bracket += 4.0 * nu**5 * _poly_tail(2, ak, 5, n_from)
    else:
        f_rdep = (2.0 * nu * nu + 2.0 * nu * r / (2.0 * gam + 1.0)) ** 2
        f_rfree = (ak + 3.0 * gam) ** 2
        fhat = min(f_rfree, f_rdep) if 2.0 * gam >= 1.0 else f_rdep
        bracket = 4.0 * fhat * nu**3 * _poly_tail(2, ak, 5, n_from)
        bracket += 8.0 * nu**5 * _poly_tail(4, ak, 7, n_from)
    return 2.0 * gam * math.log(r) + ghat_log + math.log(bracket / (2.0 * nu * nu))


def channel_tail_bound(channel, n_from, r):
    """Certified upper bound on the discarded remainder past level n_from (>= 1)."""
    if n_from < 1:
        raise DomainError("the tail bound requires n_from >= 1")
    return _safe_exp(_channel_tail_log(channel.nu, channel.k, n_from, r))


def _block_schedule(n_start, n_cap):
    lo = n_start
    size = _FIRST_BLOCK
    while lo <= n_cap:
        hi = min(lo + size - 1, n_cap)
        yield lo, hi
        lo = hi + 1
        size *= 2


def _estimate_tail(prev_block, last_block):
    """Geometric extrapolation of the remainder from the last two block sums."""
    if last_block <= 0.0:
        return 0.0
    if prev_block <= 0.0:
        return last_block
    q = min(last_block / prev_block, _EST_RATIO_CAP)
    return last_block * q / (1.0 - q)


def channel_density(
    channel,
    r,
    rel_tol=1e-6,
    abs_tol=1e-300,
    n_cap=_DEFAULT_N_CAP,
    mode="certified",
):
    """(value, tail): adaptively truncated channel density at one radius.

    ``value`` underestimates the exact sum.  In ``certified`` mode the
    returned tail is a rigorous remainder bound and value + tail
    overestimates; in ``estimated`` mode the certified bound is used when
    it already meets the tolerances, otherwise summation continues past the
    semiclassical hump (n ~ 2 nu r) until successive blocks decay
    geometrically, and the extrapolated remainder is returned.
    """
    if r <= 0.0:
        raise DomainError(f"radius must be positive, got {r}")
    if rel_tol <= 0.0 or abs_tol <= 0.0:
        raise DomainError("tolerances must be positive")
    if mode not in ("certified", "estimated"):
        raise DomainError(f"unknown mode {mode!r}")
    nu, k = channel.nu, channel.k
    value = 0.0
    prev_block = -1.0
    n_hump = max(64.0, 8.0 * nu * r)
    for lo, hi in _block_schedule(channel.n_start, n_cap):
        block = kernels.dirac_channel_block(nu, k, lo, hi, float(r))
        value += block
        if not math.isfinite(value):
            raise ComputationError(f"channel density overflow at nu={nu}, k={k}, r={r}")
        budget = rel_tol * value + abs_tol
        tail = _safe_exp(_channel_tail_log(nu, k, max(hi, 1), r))
        if tail <= budget:
            return value, tail
        if mode == "estimated" and hi >= n_hump and prev_block >= 0.0:
            est = _estimate_tail(prev_block, block)
            if block <= _EST_BLOCK_FRACTION * budget and est <= budget:
                return value, est
        prev_block = block
    raise ComputationError(
        f"channel density did not converge below tolerances by n = {n_cap} "
        f"(nu={nu}, k={k}, r={r}, mode={mode})"
    )


def channel_density_grid(
    channel,
    radii,
    rel_tol=1e-6,
    abs_tol=1e-300,
    n_cap=_DEFAULT_N_CAP,
    mode="certified",
):
    """Vectorised channel density over a radial grid with shared truncation."""
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0.0):
        raise DomainError("all radii must be positive")
    if mode not in ("certified", "estimated"):
        raise DomainError(f"unknown mode {mode!r}")
    nu, k = channel.nu, channel.k
    values = np.zeros_like(radii)
    tails = np.full_like(radii, math.inf)
    prev_blocks = np.full_like(radii, -1.0)
    active = np.arange(radii.size)
    for lo, hi in _block_schedule(channel.n_start, n_cap):
        sub = np.ascontiguousarray(radii[active])
        block = np.zeros_like(sub)
        kernels.dirac_channel_block_grid(nu, k, lo, hi, sub, block)
        values[active] += block
        budgets = rel_tol * values[active] + abs_tol
        cert = np.array(
            [_safe_exp(_channel_tail_log(nu, k, max(hi, 1), rr)) for rr in sub]
        )
        done = cert <= budgets
        tails[active] = np.where(done, cert, tails[active])
        if mode == "estimated":
            hump = np.maximum(64.0, 8.0 * nu * sub)
            ests = np.array(
                [_estimate_tail(pb, bb) for pb, bb in zip(prev_blocks[active], block)]
            )
            est_ok = (
                (hi >= hump)
                & (prev_blocks[active] >= 0.0)
                & (block <= _EST_BLOCK_FRACTION * budgets)
                & (ests <= budgets)
            )
            take = est_ok & ~done
            tails[active] = np.where(take, ests, tails[active])
            done = done | est_ok
        prev_blocks[active] = block
        active = active[~done]
        if active.size == 0:
            return values, tails
    raise ComputationError(
        f"channel density grid did not converge below tolerances by n = {n_cap} "
        f"(nu={nu}, k={k}, mode={mode})"
    )


def channel_profile(channel, radii, rel_tol=1e-6, abs_tol=1e-300,
                    n_cap=_DEFAULT_N_CAP, mode="certified"):
    values, tails = channel_density_grid(channel, radii, rel_tol, abs_tol, n_cap, mode)
    meta = {
        "nu": channel.nu,
        "k": channel.k,
        "rel_tol": rel_tol,
        "abs_tol": abs_tol,
        "mode": mode,
        "degenerate": channel.degenerate,
    }
    return DensityProfile(np.asarray(radii, float), values, tails, meta)


def _channel_majorant_total(nu, k, r):
    """Certified bound on the full channel density at r (O(1) per channel)."""
    ch = DiracChannel(nu, k)
    n0 = ch.n_start
    n_expl = max(n0 + 3, 1)
    total = 0.0
    for n in range(n0, n_expl + 1):
        total += szego_majorant(level(ch, n), r)
    return total + _safe_exp(_channel_tail_log(nu, k, n_expl, r))


def _k_tail_bound(nu, k_max, x_abs):
    """Certified bound on the channels |k| > k_max of the total density.

    Valid once the per-step decay of the channel majorant (driven by
    1/Gamma(2 gamma + 1)^2) dominates its polynomial k-growth; returns inf
    while the condition is not yet met.
    """
    if k_max < _KTAIL_MIN_K:
        return math.inf
    gam_next = math.sqrt((k_max + 1.0) ** 2 - nu * nu)
    lam = 4.0 * digamma(2.0 * gam_next + 1.0) - 2.0 * math.log(4.0 * nu * x_abs)
    margin = _KTAIL_DEGREE_MARGIN / (k_max + 1.0)
    if lam < math.log(2.0) + margin:
        return math.inf
    ratio = math.exp(-(lam - margin))
    lead = _channel_majorant_total(nu, k_max + 1, x_abs)
    lead += _channel_majorant_total(nu, -(k_max + 1), x_abs)
    weight = (k_max + 1.0) / (2.0 * math.pi * x_abs * x_abs)
    return weight * lead / (1.0 - ratio)


def total_density(
    nu,
    x_abs,
    rel_tol=1e-6,
    abs_tol=1e-300,
    k_cap=_DEFAULT_K_CAP,
    mode="certified",
):
    """(value, tail): full density at |x|, channels summed in increasing |k|.

    The k-truncation remainder is always certified; the per-channel level
    tails follow ``mode``.  The returned tail bounds (or, in estimated
    mode, estimates) the sum of both remainders.
    """
    if x_abs <= 0.0:
        raise DomainError(f"|x| must be positive, got {x_abs}")
    if rel_tol <= 0.0 or abs_tol <= 0.0:
        raise DomainError("tolerances must be positive")
    pref_denom = 2.0 * math.pi * x_abs * x_abs
    value = 0.0
    channel_tails = 0.0
    for kk in range(1, k_cap + 1):
        for k in (kk, -kk):
            abs_k = 0.05 * (rel_tol * value + abs_tol) * pref_denom / kk**3
            abs_k = max(abs_k, 1e-300)
            v, t = channel_density(
                DiracChannel(nu, k), x_abs, rel_tol / 4.0, abs_k, mode=mode
            )
            value += kk / pref_denom * v
            channel_tails += kk / pref_denom * t
        k_tail = _k_tail_bound(nu, kk, x_abs)
        if channel_tails + k_tail <= rel_tol * value + abs_tol:
            return value, channel_tails + k_tail
    raise ComputationError(
        f"total density did not converge below tolerances by |k| = {k_cap} "
        f"(nu={nu}, x={x_abs})"
    )


def total_profile(nu, x_grid, rel_tol=1e-6, abs_tol=1e-300, k_cap=_DEFAULT_K_CAP,
                  mode="certified"):
    """Density profile over an |x| grid; grid points evaluated in parallel."""
    x_grid = np.asarray(x_grid, dtype=float)
    workers = min(thread_count(), max(1, x_grid.size))

    def _one(x):
        return total_density(nu, float(x), rel_tol, abs_tol, k_cap, mode=mode)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one, x_grid))
    else:
        results = [_one(x) for x in x_grid]
    values = np.array([v for v, _ in results])
    tails = np.array([t for _, t in results])
    meta = {
        "nu": nu,
        "mode": mode,
        "rel_tol": rel_tol,
        "abs_tol": abs_tol,
        "k_cap": k_cap,
    }
    return DensityProfile(x_grid, values, tails, meta)


def total_envelope(nu, x_abs):
    """Shape of the sharp global bound: |x|^{-2 sigma} inside, |x|^{-3/2} outside."""
    if x_abs <= 0.0:
        raise DomainError(f"|x| must be positive, got {x_abs}")
    if x_abs <= 1.0:
        return x_abs ** (-2.0 * sigma_nu(nu))
    return x_abs ** (-1.5)


def channel_envelope(nu, k, r, B):
    """Shape of the per-channel bound: min{(B/gamma)^{4 gamma} r^{2 gamma}, 1/|k|}.

    The gamma -> 0 limit of the first branch is 1.
    """
    if r <= 0.0 or B <= 0.0:
        raise DomainError("r and B must be positive")
    gam = DiracChannel(nu, k).gamma
    if gam == 0.0:
        first = 1.0
    else:
        first = _safe_exp(4.0 * gam * math.log(B / gam) + 2.0 * gam * math.log(r))
    return min(first, 1.0 / abs(k))


def log_g_constant(nu, k, n):
    """ln G_{n,k}: the gamma-ratio growth factor of the normalization chain."""
    gam, w, p, _, _, _ = _level_scalars(nu, k, n)
    return (
        2.0 * gam * math.log(2.0 * p)
        + math.lgamma(n + 2.0 * gam + 1.0)
        - 2.0 * math.lgamma(2.0 * gam + 1.0)
        - math.lgamma(n + 1.0)
    )


def verify_bounds(
    nu,
    r_grid=None,
    k_list=None,
    rel_tol=1e-4,
    small_window=(1e-4, 1e-2),
    large_window=(20.0, 200.0),
    include_large=False,
    slope_tol_channel=0.01,
    slope_tol_total=0.02,
    slope_tol_large=0.10,
    mode="estimated",
):
    """Fit envelope constants and exponents against the computed densities.

    Returns (channel_report, total_report).
    """
    if k_list is None:
        k_list = [1, -1, 2, -2, 3, -3, 4, -4]
    if r_grid is None:
        r_grid = np.geomspace(small_window[0], 1e2, 49)
    r_grid = np.asarray(r_grid, dtype=float)

    workers = min(thread_count(), len(k_list))

    def _channel(k):
        ch = DiracChannel(nu, k)
        values, _ = channel_density_grid(ch, r_grid, rel_tol=rel_tol, mode=mode)
        return k, ch.gamma, values

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chans = list(pool.map(_channel, k_list))
    else:
        chans = [_channel(k) for k in k_list]

    ch_report = VerificationReport(target="dirac-channel")
    gammas, log_sups, flat_sups = [], [], []
    for k, gam, values in chans:
        slope, err, win = fit_loglog_slope(r_grid, values, small_window)
        ch_report.slope_fits.append(
            SlopeFit(
                name=f"channel k={k} small-r",
                exponent=slope,
                stderr=err,
                window=win,
                target=2.0 * gam,
                tolerance=slope_tol_channel * max(2.0 * gam, 1.0),
            )
        )
        with np.errstate(divide="ignore"):
            log_ratio = np.log(values) - 2.0 * gam * np.log(r_grid)
        finite = np.isfinite(log_ratio)
        gammas.append(max(gam, 1e-3))
        log_sups.append(float(np.max(log_ratio[finite])) if finite.any() else -math.inf)
        flat_sups.append(abs(k) * float(np.max(values)))
        if DiracChannel(nu, k).degenerate:
            ch_report.notes.append(
                f"channel k={k}: boundary coupling nu = 1, gamma = 0 (flagged)"
            )
    a_fit, b_fit = fit_growth_constants(np.array(gammas), np.array(log_sups))
    ch_report.fitted_constants["A_growth"] = a_fit
    ch_report.fitted_constants["B_growth"] = b_fit
    ch_report.fitted_constants["A_flat"] = max(flat_sups)
    big = [s for k, s in zip([k for k, _, _ in chans], flat_sups) if abs(k) >= 2]
    if len(big) >= 2:
        spread = max(big) / min(big)
        ch_report.fitted_constants["flat_spread"] = spread
        ch_report.passes["uniformity_spread_lt_10"] = spread < 10.0
    ch_report.provenance = {
        "nu": nu,
        "k_list": list(k_list),
        "rel_tol": rel_tol,
        "mode": mode,
        "r_grid": [float(r_grid[0]), float(r_grid[-1]), int(r_grid.size)],
    }

    x_grid = r_grid if include_large else r_grid[r_grid <= 1.0]
    prof = total_profile(nu, x_grid, rel_tol=rel_tol, mode=mode)
    tot_report = VerificationReport(target="dirac-total")
    slope, err, win = fit_loglog_slope(prof.radii, prof.values, small_window)
    tot_report.slope_fits.append(
        SlopeFit(
            name="total small-x",
            exponent=slope,
            stderr=err,
            window=win,
            target=-2.0 * sigma_nu(nu),
            tolerance=slope_tol_total * max(2.0 * sigma_nu(nu), 0.5),
        )
    )
    if include_large:
        slope_l, err_l, win_l = fit_loglog_slope(prof.radii, prof.values, large_window)
        tot_report.slope_fits.append(
            SlopeFit(
                name="total large-x",
                exponent=slope_l,
                stderr=err_l,
                window=win_l,
                target=-1.5,
                tolerance=slope_tol_large * 1.5,
            )
        )
    env = np.array([total_envelope(nu, x) for x in prof.radii])
    tot_report.fitted_constants["A_envelope"] = fit_min_envelope_constant(prof.values, env)
    tot_report.passes["tails_below_rel_tol"] = bool(
        np.all(prof.tail_bounds <= rel_tol * prof.values + 1e-290)
    )
    tot_report.provenance = dict(ch_report.provenance)
    return ch_report, tot_report
