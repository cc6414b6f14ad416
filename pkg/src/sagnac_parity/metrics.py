"""Fringe metrology: sensitivity, visibility, width, super-resolution.

Sensitivity follows from error propagation on the parity expectation E(phi),

    delta_phi = sqrt(1 - E^2) / |dE/dphi|,

with the variance term computed through expm1 so the phi -> 0 limit (where
E -> 1 and both numerator and derivative vanish) stays accurate.  The
derivative is analytic whenever at most one imperfection family is active
and a Richardson-extrapolated central difference for genuinely composed
profiles.  Points where the fringe is stationary are reported as +inf, a
deliberate sentinel distinct from any overflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import (
    ImperfectionProfile,
    InterferometerSpec,
    dark_port_mean,
    parity_derivative_dark,
    parity_derivative_efficiency,
    parity_derivative_ideal,
    parity_derivative_loss,
    parity_derivative_prep,
    parity_expectation,
)

__all__ = [
    "ParityCurve",
    "SensitivityCurve",
    "parity_curve",
    "sensitivity",
    "sensitivity_curve",
    "min_sensitivity",
    "visibility",
    "fwhm",
    "super_resolution_factor",
    "count_fringe_peaks",
]

# Below this derivative magnitude the working point is treated as stationary.
STATIONARY_DERIVATIVE = 1e-15

# Central-difference step for composed-profile derivatives (radians).
FD_STEP = 1e-6


@dataclass(frozen=True)
class ParityCurve:
    """A sampled parity-expectation curve E(phi) on an increasing grid."""

    phi_grid: np.ndarray
    values: np.ndarray
    spec: InterferometerSpec | None = None
    profile: ImperfectionProfile | None = None

    def __post_init__(self):
        phi = np.asarray(self.phi_grid, dtype=float)
        val = np.asarray(self.values, dtype=float)
        if phi.ndim != 1 or phi.shape != val.shape or phi.size < 2:
            raise ValueError("phi_grid and values must be matching 1-D arrays")
        if np.any(np.diff(phi) <= 0):
            raise ValueError("phi_grid must be strictly increasing")
        if np.any(val <= 0.0) or np.any(val > 1.0 + 1e-12):
            raise ValueError("parity expectations must lie in (0, 1]")
        object.__setattr__(self, "phi_grid", phi)
        object.__setattr__(self, "values", val)


@dataclass(frozen=True)
class SensitivityCurve:
    """Sampled sensitivity delta_phi(phi) plus its refined minimum."""

    phi_grid: np.ndarray
    values: np.ndarray
    minimum: tuple[float, float] = field(default=(math.nan, math.inf))

    def __post_init__(self):
        phi = np.asarray(self.phi_grid, dtype=float)
        val = np.asarray(self.values, dtype=float)
        if phi.ndim != 1 or phi.shape != val.shape:
            raise ValueError("phi_grid and values must be matching 1-D arrays")
        if np.any(val[np.isfinite(val)] <= 0.0):
            raise ValueError("sensitivities must be positive")
        object.__setattr__(self, "phi_grid", phi)
        object.__setattr__(self, "values", val)


def parity_curve(spec, profile, phi_grid):
    """Sample parity_expectation on a grid and package it as a ParityCurve."""
    phi = np.asarray(phi_grid, dtype=float)
    return ParityCurve(
        phi_grid=phi,
        values=parity_expectation(spec, phi, profile),
        spec=spec,
        profile=profile,
    )


def _stable_variance(spec, phi, profile):
    # 1 - E^2 as (1 - E)(1 + E); 1 - E assembled from nonnegative expm1
    # pieces so it never cancels even when E is within 1e-16 of 1.
    mu = dark_port_mean(spec, phi, profile.t_a, profile.t_b, profile.kappa)
    r_eff = profile.effective_dark_rate
    a = math.exp(-2.0 * r_eff)
    one_minus = -math.expm1(-2.0 * r_eff) + a * profile.eta * (-np.expm1(-2.0 * mu))
    e = a * (profile.eta * np.exp(-2.0 * mu) + (1.0 - profile.eta))
    return one_minus * (1.0 + e), e


def _richardson_derivative(f, x, h=FD_STEP):
    d_h = (f(x + h) - f(x - h)) / (2.0 * h)
    d_half = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h
    return (4.0 * d_half - d_h) / 3.0


def _derivative(spec, phi, profile):
    families = profile.active_imperfections()
    if len(families) == 0:
        return parity_derivative_ideal(spec, phi)
    if families == ("prep",):
        return parity_derivative_prep(spec, phi, profile.eta)
    if families == ("loss",):
        return parity_derivative_loss(spec, phi, profile.t_a, profile.t_b)
    if families == ("efficiency",):
        return parity_derivative_efficiency(spec, phi, profile.kappa)
    if families == ("dark",):
        return parity_derivative_dark(spec, phi, profile.dark_rate, profile.jitter_factor)
    return _richardson_derivative(lambda x: parity_expectation(spec, x, profile), phi)


def sensitivity(spec, profile, phi):
    """Angular sensitivity delta_phi at a working point (scalar or array).

    Stationary points of the fringe return +inf.
    """
    phi = np.asarray(phi, dtype=float)
    var, _ = _stable_variance(spec, phi, profile)
    d = _derivative(spec, phi, profile)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(np.abs(d) <= STATIONARY_DERIVATIVE, np.inf, np.sqrt(var) / np.abs(d))
    if out.ndim == 0:
        return float(out)
    return out


def _golden_min(f, lo, hi, tol):
    # plain golden-section shrink; endpoints are never evaluated, so an
    # infinite sentinel at a bracket edge is harmless
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    best = (x1, f1) if f1 <= f2 else (x2, f2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = f(x1)
            if f1 < best[1]:
                best = (x1, f1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = f(x2)
            if f2 < best[1]:
                best = (x2, f2)
    return best


def min_sensitivity(spec, profile, grid_points=1024):
    """Global minimum of delta_phi over one fringe period.

    Grid scan plus golden-section refinement; returns (phi_star, delta_phi).
    A profile whose fringe is flat everywhere (eta -> 0 leaves no signal)
    has no working point and returns (nan, inf).
    """
    period = spec.fringe_period
    grid = np.linspace(0.0, period, grid_points, endpoint=False)
    vals = sensitivity(spec, profile, grid)
    finite = np.isfinite(vals)
    if not finite.any():
        return (math.nan, math.inf)
    i = int(np.flatnonzero(finite)[np.argmin(vals[finite])])
    step = period / grid_points
    lo, hi = grid[i] - step, grid[i] + step
    phi_star, best = _golden_min(
        lambda x: sensitivity(spec, profile, float(x)), lo, hi, tol=1e-12 * max(period, 1.0)
    )
    if vals[i] < best:
        phi_star, best = float(grid[i]), float(vals[i])
    return (float(phi_star), float(best))


def sensitivity_curve(spec, profile, phi_grid, grid_points=1024):
    """Sample the sensitivity on a grid, bundling the refined minimum."""
    phi = np.asarray(phi_grid, dtype=float)
    vals = sensitivity(spec, profile, phi)
    return SensitivityCurve(phi_grid=phi, values=vals, minimum=min_sensitivity(spec, profile, grid_points))


def visibility(curve, period=None):
    """Fringe visibility (max - min)/(max + min) over at least one period."""
    if period is None:
        if curve.spec is None:
            raise ValueError("curve carries no spec; pass the fringe period explicitly")
        period = curve.spec.fringe_period
    span = curve.phi_grid[-1] - curve.phi_grid[0]
    if span < period * (1.0 - 1e-9):
        raise ValueError(f"grid spans {span:g} rad, less than one period {period:g} rad")
    hi = float(curve.values.max())
    lo = float(curve.values.min())
    return (hi - lo) / (hi + lo)


def _profile_floor(profile):
    # additive offset of the composed fringe: the non-OAM fraction survives
    # dark-count scaling but never interferes
    if profile is None:
        return 0.0
    return math.exp(-2.0 * profile.effective_dark_rate) * (1.0 - profile.eta)


def _cross(phis, vals, j, k, level):
    # linear interpolation of the level crossing between samples j and k
    v0, v1 = vals[j], vals[k]
    if v1 == v0:
        return float(phis[j])
    t = (level - v0) / (v1 - v0)
    return float(phis[j] + t * (phis[k] - phis[j]))


def fwhm(curve, floor=None):
    """Full width at half maximum of the tallest fringe peak, in radians.

    The half level is referenced to the curve's additive floor,
    level = floor + (max - floor)/2, so constant offsets from imperfect
    preparation or dark counts do not corrupt the width.  ``floor`` defaults
    to the offset implied by the curve's profile (zero for purely
    multiplicative curves).  Both crossings must lie inside the grid.
    """
    if floor is None:
        floor = _profile_floor(curve.profile)
    vals = curve.values
    phis = curve.phi_grid
    peak = float(vals.max())
    if not floor < peak:
        raise ValueError("floor is not below the curve maximum")
    level = floor + 0.5 * (peak - floor)
    i = int(np.argmax(vals))
    j = i
    while j > 0 and vals[j] > level:
        j -= 1
    if vals[j] > level:
        raise ValueError("curve never falls to the half level left of the peak")
    left = _cross(phis, vals, j, j + 1, level)
    k = i
    last = len(vals) - 1
    while k < last and vals[k] > level:
        k += 1
    if vals[k] > level:
        raise ValueError("curve never falls to the half level right of the peak")
    right = _cross(phis, vals, k - 1, k, level)
    return right - left


def super_resolution_factor(curve, floor=None):
    """pi / FWHM: width gain over a classical single-photon fringe.

    The classical reference fringe (1 + cos phi)/2 has period 2 pi and a
    half-maximum width of pi, so the ratio is the super-resolution factor.
    """
    return math.pi / fwhm(curve, floor=floor)


def count_fringe_peaks(values):
    """Number of strict local maxima of a cyclically sampled curve."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 3:
        raise ValueError("need a 1-D array of at least 3 samples")
    left = np.roll(v, 1)
    right = np.roll(v, -1)
    return int(np.count_nonzero((v > left) & (v > right)))
