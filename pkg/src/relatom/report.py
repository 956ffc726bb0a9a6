"""Verification reports: slope fits, envelope-constant fits, JSON schema."""

import json
import math
from dataclasses import dataclass, field

import numpy as np

SCHEMA_VERSION = 1

TARGETS = (
    "chandra-total",
    "chandra-channel",
    "dirac-total",
    "dirac-channel",
    "hardy-envelope",
    "heat-domination",
)


@dataclass(frozen=True)
class SlopeFit:
    name: str
    exponent: float
    stderr: float
    window: tuple
    target: float
    tolerance: float

    @property
    def ok(self):
        return math.isfinite(self.exponent) and abs(self.exponent - self.target) <= self.tolerance

    def to_dict(self):
        return {
            "name": self.name,
            "exponent": self.exponent,
            "stderr": self.stderr,
            "window": list(self.window),
            "target": self.target,
            "tolerance": self.tolerance,
            "ok": self.ok,
        }


@dataclass
class VerificationReport:
    target: str
    fitted_constants: dict = field(default_factory=dict)
    slope_fits: list = field(default_factory=list)
    passes: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValueError(f"unknown report target {self.target!r}")

    @property
    def ok(self):
        slopes_ok = all(s.ok for s in self.slope_fits)
        consts_ok = all(math.isfinite(v) for v in self.fitted_constants.values())
        return slopes_ok and consts_ok and all(self.passes.values())

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "target": self.target,
            "fitted_constants": dict(sorted(self.fitted_constants.items())),
            "slope_fits": [s.to_dict() for s in self.slope_fits],
            "pass": {**{k: bool(v) for k, v in sorted(self.passes.items())}, "overall": self.ok},
            "provenance": self.provenance,
            "notes": list(self.notes),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def validate_report_dict(doc):
    """Schema check for an emitted report; raises ValueError on violation."""
    if not isinstance(doc, dict):
        raise ValueError("report must be an object")
    required = {"schema_version", "target", "fitted_constants", "slope_fits", "pass", "provenance"}
    missing = required - doc.keys()
    if missing:
        raise ValueError(f"report missing keys: {sorted(missing)}")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {doc['schema_version']}")
    if doc["target"] not in TARGETS:
        raise ValueError(f"unknown target {doc['target']!r}")
    if not isinstance(doc["fitted_constants"], dict):
        raise ValueError("fitted_constants must be an object")
    for name, val in doc["fitted_constants"].items():
        if not isinstance(val, (int, float)) or not math.isfinite(val):
            raise ValueError(f"fitted constant {name} is not finite")
    for fit in doc["slope_fits"]:
        keys = {"name", "exponent", "stderr", "window", "target", "tolerance", "ok"}
        if not keys <= fit.keys():
            raise ValueError(f"slope fit missing keys: {sorted(keys - fit.keys())}")
    if not isinstance(doc["pass"], dict) or "overall" not in doc["pass"]:
        raise ValueError("pass must be an object with an 'overall' entry")
    return True


def fit_loglog_slope(x, y, window):
    """Weighted least-squares slope of ln y vs ln x restricted to a window.

    Returns (slope, stderr, (lo, hi)).  Points with nonpositive y are skipped.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lo, hi = window
    mask = (x >= lo) & (x <= hi) & (y > 0.0) & np.isfinite(y)
    if mask.sum() < 3:
        return math.nan, math.inf, (lo, hi)
    lx = np.log(x[mask])
    ly = np.log(y[mask])
    n = lx.size
    mx, my = lx.mean(), ly.mean()
    sxx = ((lx - mx) ** 2).sum()
    slope = ((lx - mx) * (ly - my)).sum() / sxx
    resid = ly - my - slope * (lx - mx)
    var = (resid**2).sum() / max(n - 2, 1)
    stderr = math.sqrt(var / sxx)
    return float(slope), float(stderr), (lo, hi)


def fit_min_envelope_constant(values, envelopes):
    """Smallest A with values <= A * envelopes pointwise (nan-safe)."""
    values = np.asarray(values, dtype=float)
    envelopes = np.asarray(envelopes, dtype=float)
    mask = np.isfinite(values) & np.isfinite(envelopes) & (envelopes > 0.0)
    if not mask.any():
        return math.inf
    return float(np.max(values[mask] / envelopes[mask]))


def fit_growth_constants(gammas, log_sups):
    """Smallest (A, B) with log_sup_k <= ln A + 4 gamma_k ln(B / gamma_k).

    Scans a log-spaced B grid and picks the B minimising the required A.
    Returns (A, B).
    """
    gammas = np.asarray(gammas, dtype=float)
    log_sups = np.asarray(log_sups, dtype=float)
    mask = np.isfinite(log_sups)
    if not mask.any():
        return math.inf, math.inf
    g = gammas[mask]
    ls = log_sups[mask]
    lnb_grid = np.linspace(np.log(max(g.min(), 1e-2)) - 2.0, np.log(g.max()) + 4.0, 400)
    best = (math.inf, math.inf)
    for lnb in lnb_grid:
        ln_a = np.max(ls - 4.0 * g * (lnb - np.log(g)))
        if ln_a < 700 and math.exp(ln_a) < best[0]:
            best = (math.exp(ln_a), math.exp(lnb))
    return best
