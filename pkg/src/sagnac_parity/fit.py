"""Weighted least-squares fitting of measured parity fringes.

The model is the three-parameter family

    m(phi) = a * exp(-b * sin^2(2 ell (phi - phi0))) + c,

the exact shape of every closed-form fringe in this package, with the floor
c frozen at zero unless explicitly requested.  Amplitude and decay
reparameterize as a = exp(-2 r) and b = 2 n_bar, so a fit recovers the mean
photon number at the detector and the effective dark rate of the apparatus.

Derived quantities (visibility, width, super-resolution factor) are always
recomputed from the fitted model through :mod:`sagnac_parity.metrics` rather
than entered independently.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from . import metrics
from .metrics import STATIONARY_DERIVATIVE, ParityCurve, _golden_min
from .model import InterferometerSpec

__all__ = [
    "FringeModel",
    "FitResult",
    "FitConvergenceError",
    "fit_fringe",
    "error_bars",
    "sensitivity_from_fit",
    "min_sensitivity_from_fit",
    "load_fringe_data",
]


class FitConvergenceError(RuntimeError):
    """Raised when the optimizer hits the iteration cap before converging.

    The best iterate reached so far is attached as ``best`` (may be None if
    it cannot even be packaged as a valid model).
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class FringeModel:
    """Parity fringe model a*exp(-b sin^2(2 ell (phi - offset))) + floor."""

    amplitude: float
    decay: float
    offset: float
    ell: int
    floor: float = 0.0

    def __post_init__(self):
        if isinstance(self.ell, bool) or not isinstance(self.ell, (int, np.integer)) or self.ell < 1:
            raise ValueError(f"ell must be an integer >= 1, got {self.ell!r}")
        if not (self.amplitude > 0.0):
            raise ValueError(f"amplitude must be positive, got {self.amplitude}")
        if not (self.decay >= 0.0):
            raise ValueError(f"decay must be >= 0, got {self.decay}")
        if not (self.floor >= 0.0):
            raise ValueError(f"floor must be >= 0, got {self.floor}")
        if self.amplitude + self.floor > 1.0 + 1e-12:
            raise ValueError("amplitude + floor exceeds 1; not a parity expectation")
        if not math.isfinite(self.offset):
            raise ValueError("offset must be finite")

    @property
    def period(self) -> float:
        return math.pi / (2.0 * self.ell)

    def __call__(self, phi):
        phi = np.asarray(phi, dtype=float)
        s = np.sin(2 * self.ell * (phi - self.offset))
        return self.amplitude * np.exp(-self.decay * s * s) + self.floor

    def derivative(self, phi):
        """Analytic dm/dphi."""
        phi = np.asarray(phi, dtype=float)
        delta = phi - self.offset
        s = np.sin(2 * self.ell * delta)
        envelope = self.amplitude * np.exp(-self.decay * s * s)
        return -2.0 * self.ell * self.decay * np.sin(4 * self.ell * delta) * envelope


@dataclass(frozen=True)
class FitResult:
    """Fitted model plus goodness-of-fit and derived physical quantities."""

    model: FringeModel
    residual_rms: float
    derived: dict
    param_stderr: dict


def _as_data(data):
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[1] not in (2, 3) or arr.shape[0] < 4:
        raise ValueError("data must be an (n>=4, 2|3) array of (phi, value[, sigma]) rows")
    if arr.shape[1] == 2:
        arr = np.column_stack([arr, np.ones(arr.shape[0])])
    if np.any(arr[:, 2] <= 0):
        raise ValueError("sigmas must be positive")
    if not np.all(np.isfinite(arr)):
        raise ValueError("data contains non-finite entries")
    return arr[np.argsort(arr[:, 0])]


def _initial_guess(phi, y, ell, period):
    i = int(np.argmax(y))
    a0 = float(min(max(y[i], 1e-6), 1.0))
    phi0 = float(phi[i])
    level = 0.5 * (y.max() + y.min())
    # nearest half crossing on either side of the peak gives a width scale
    hwhm = None
    for j in range(i + 1, len(y)):
        if y[j] <= level:
            hwhm = phi[j] - phi[i]
            break
    if hwhm is None:
        for j in range(i - 1, -1, -1):
            if y[j] <= level:
                hwhm = phi[i] - phi[j]
                break
    if hwhm is None or hwhm <= 0:
        hwhm = period / 4.0
    s = math.sin(min(2 * ell * hwhm, math.pi / 2.0))
    b0 = math.log(2.0) / max(s * s, 1e-9)
    return a0, float(min(max(b0, 1e-3), 500.0)), phi0


def fit_fringe(data, ell, fit_floor=False, ftol=1e-10, max_iter=500):
    """Weighted least-squares fit of the fringe model to (phi, value[, sigma]) rows.

    Converges when the relative decrease of the weighted residual norm falls
    below ``ftol`` (default 1e-10) or raises FitConvergenceError after
    ``max_iter`` function evaluations.  Requires at least half a period of
    data; the reported offset is reduced to [0, pi/(2 ell)).  Fringes too
    shallow to reach their half level (decay < ln 2) fit normally but report
    nan for the derived width and resolution factor.
    """
    if isinstance(ell, bool) or not isinstance(ell, (int, np.integer)) or ell < 1:
        raise ValueError(f"ell must be an integer >= 1, got {ell!r}")
    arr = _as_data(data)
    phi, y, sig = arr[:, 0], arr[:, 1], arr[:, 2]
    period = math.pi / (2.0 * ell)
    if phi[-1] - phi[0] < 0.5 * period * (1.0 - 1e-9):
        raise ValueError("data spans less than half a fringe period")
    if y.max() - y.min() < 1e-12:
        raise ValueError("data has no fringe contrast to fit")

    a0, b0, phi0 = _initial_guess(phi, y, ell, period)
    x0 = [a0, b0, phi0]
    lower = [1e-12, 0.0, phi0 - period / 2.0]
    upper = [1.0, 1000.0, phi0 + period / 2.0]
    if fit_floor:
        x0.append(float(max(y.min(), 0.0)))
        lower.append(0.0)
        upper.append(1.0)

    def unpack(p):
        c = p[3] if fit_floor else 0.0
        return p[0], p[1], p[2], c

    def residuals(p):
        a, b, p0, c = unpack(p)
        s = np.sin(2 * ell * (phi - p0))
        return (a * np.exp(-b * s * s) + c - y) / sig

    def jacobian(p):
        a, b, p0, c = unpack(p)
        delta = phi - p0
        s = np.sin(2 * ell * delta)
        core = np.exp(-b * s * s)
        cols = [
            core / sig,
            -a * s * s * core / sig,
            2.0 * ell * b * np.sin(4 * ell * delta) * a * core / sig,
        ]
        if fit_floor:
            cols.append(np.ones_like(phi) / sig)
        return np.column_stack(cols)

    # xtol near machine precision is the stop that fires on noiseless data,
    # where the cost hits zero and the ftol test (which needs a strictly
    # positive reduction) can never trigger
    res = least_squares(
        residuals,
        x0,
        jac=jacobian,
        bounds=(lower, upper),
        method="trf",
        ftol=ftol,
        xtol=1e-14,
        gtol=None,
        max_nfev=max_iter,
    )
    if res.status == 0:
        try:
            best = _package(res, ell, fit_floor, phi.size)
        except ValueError:
            best = None
        raise FitConvergenceError(
            f"no convergence within {max_iter} evaluations", best=best
        )
    return _package(res, ell, fit_floor, phi.size)


def _package(res, ell, fit_floor, n_points):
    a, b, p0 = res.x[:3]
    c = float(res.x[3]) if fit_floor else 0.0
    period = math.pi / (2.0 * ell)
    p0 = math.fmod(p0, period)
    if p0 < 0:
        p0 += period
    model = FringeModel(amplitude=float(a), decay=float(b), offset=p0, ell=int(ell), floor=c)

    # one full period centered on the peak, so both half-level crossings
    # are interior to the grid
    grid = model.offset + np.linspace(-period / 2.0, period / 2.0, 4097)
    curve = ParityCurve(
        phi_grid=grid,
        values=model(grid),
        spec=InterferometerSpec(ell=int(ell), mean_photons=float(b) / 2.0),
    )
    try:
        width = metrics.fwhm(curve, floor=model.floor)
    except ValueError:
        # a fringe with decay < ln 2 never reaches its half level, so it
        # has no width; nan propagates into the resolution factor too
        width = math.nan
    derived = {
        "n_bar": float(b) / 2.0,
        "r": -math.log(float(a)) / 2.0,
        "visibility": metrics.visibility(curve),
        "fwhm": width,
        "super_resolution_factor": math.pi / width,
    }

    jtj = res.jac.T @ res.jac
    cov_diag = np.diag(np.linalg.pinv(jtj))
    names = ["amplitude", "decay", "offset"] + (["floor"] if fit_floor else [])
    stderr = {k: float(math.sqrt(max(v, 0.0))) for k, v in zip(names, cov_diag)}

    return FitResult(
        model=model,
        residual_rms=float(np.sqrt(np.mean(res.fun**2))),
        derived=derived,
        param_stderr=stderr,
    )


def error_bars(phi, trials, model):
    """Expected standard error of a parity mean: sqrt((1 - m^2)/trials)."""
    phi = np.asarray(phi, dtype=float)
    n = np.asarray(trials)
    if not np.issubdtype(n.dtype, np.integer):
        if np.any(n != np.floor(n)):
            raise ValueError("trials must be positive integers")
        n = n.astype(np.int64)
    if np.any(n < 1):
        raise ValueError("trials must be positive integers")
    m = model(phi)
    return np.sqrt(np.clip(1.0 - m * m, 0.0, None) / n)


def _fit_variance(model, phi):
    # 1 - m^2 assembled without cancellation: 1 - m = (1 - a - c) + a(1 - core)
    phi = np.asarray(phi, dtype=float)
    s = np.sin(2 * model.ell * (phi - model.offset))
    u = s * s
    headroom = max(1.0 - model.amplitude - model.floor, 0.0)
    one_minus = headroom + model.amplitude * (-np.expm1(-model.decay * u))
    m = model.amplitude * np.exp(-model.decay * u) + model.floor
    return one_minus * (1.0 + m)


def sensitivity_from_fit(result, phi):
    """Sensitivity sqrt(1 - m^2)/|m'| of the fitted model; +inf where stationary."""
    model = result.model if isinstance(result, FitResult) else result
    phi = np.asarray(phi, dtype=float)
    var = _fit_variance(model, phi)
    d = model.derivative(phi)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(np.abs(d) <= STATIONARY_DERIVATIVE, np.inf, np.sqrt(var) / np.abs(d))
    if out.ndim == 0:
        return float(out)
    return out


def min_sensitivity_from_fit(result, grid_points=1024):
    """Minimum of sensitivity_from_fit over one period: (phi_star, value)."""
    model = result.model if isinstance(result, FitResult) else result
    period = model.period
    grid = model.offset + np.linspace(0.0, period, grid_points, endpoint=False)
    vals = sensitivity_from_fit(model, grid)
    finite = np.isfinite(vals)
    if not finite.any():
        return (math.nan, math.inf)
    i = int(np.flatnonzero(finite)[np.argmin(vals[finite])])
    step = period / grid_points
    phi_star, best = _golden_min(
        lambda x: float(sensitivity_from_fit(model, float(x))),
        grid[i] - step,
        grid[i] + step,
        tol=1e-12 * max(period, 1.0),
    )
    if vals[i] < best:
        phi_star, best = float(grid[i]), float(vals[i])
    return (float(phi_star), float(best))


# --- reading fringe data back from CLI output -----------------------------

_PHI_COLUMNS = ("phi_rad", "phi_deg", "phi")
_VALUE_COLUMNS = ("parity_mean", "expectation", "value")
_SIGMA_COLUMNS = ("parity_stderr", "sigma", "error_bar")


def _rows_from_columns(columns, rows):
    phi_col = next((c for c in _PHI_COLUMNS if c in columns), None)
    val_col = next((c for c in _VALUE_COLUMNS if c in columns), None)
    if phi_col is None or val_col is None:
        raise ValueError(f"no recognizable phi/value columns in {columns!r}")
    sig_col = next((c for c in _SIGMA_COLUMNS if c in columns), None)
    ip, iv = columns.index(phi_col), columns.index(val_col)
    out = []
    for row in rows:
        phi = float(row[ip])
        if phi_col == "phi_deg":
            phi = math.radians(phi)
        rec = [phi, float(row[iv])]
        if sig_col is not None:
            rec.append(float(row[columns.index(sig_col)]))
        out.append(rec)
    return np.asarray(out, dtype=float)


def load_fringe_data(source):
    """Read (phi, value[, sigma]) rows from a CLI-produced CSV or JSON table.

    Accepts a path or an open text stream.  Degrees columns are converted to
    radians here, at the boundary.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        if not os.path.exists(source):
            raise FileNotFoundError(source)
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    stripped = text.lstrip()
    if not stripped:
        raise ValueError("empty input")
    if stripped[0] in "{[":
        doc = json.loads(text)
        if not isinstance(doc, dict) or "columns" not in doc or "rows" not in doc:
            raise ValueError("JSON table must contain 'columns' and 'rows'")
        return _rows_from_columns(list(doc["columns"]), doc["rows"])
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        raise ValueError("empty CSV input")
    return _rows_from_columns([h.strip() for h in header], list(reader))
