"""Closed-form parity response of an OAM-fed Sagnac interferometer.

A coherent beam with mean photon number N and orbital angular momentum
quantum number ell enters a common-path loop where a Dove prism rotated by
phi imprints opposite phases +/- 2*ell*phi on the counter-propagating
directions.  The dark output port then carries a coherent state of mean
photon number N*sin^2(2*ell*phi), and photon-number parity read out on that
port oscillates with period pi/(2*ell): a 4*ell-fold super-resolved fringe.

Each ``parity_expectation_*`` function below is the exact parity expectation
under a single hardware imperfection; :func:`parity_expectation` composes all
of them.  Every function accepts a scalar or ndarray ``phi`` in radians and
is vectorized through numpy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "Protocol",
    "InterferometerSpec",
    "ImperfectionProfile",
    "dark_port_mean",
    "parity_expectation_ideal",
    "parity_expectation_prep",
    "parity_expectation_loss",
    "parity_expectation_efficiency",
    "parity_expectation_dark",
    "parity_expectation",
    "parity_derivative_ideal",
    "parity_derivative_prep",
    "parity_derivative_loss",
    "parity_derivative_efficiency",
    "parity_derivative_dark",
]


class Protocol(Enum):
    """Interferometer topology.

    The parity fringe formulas below describe the Sagnac loop; the topology
    matters for the quantum Fisher information (see :mod:`sagnac_parity.qfi`),
    where the single-pass Mach-Zehnder carries half the phase generator.
    """

    SAGNAC = "sagnac"
    MACH_ZEHNDER = "mach-zehnder"


@dataclass(frozen=True)
class InterferometerSpec:
    """Ideal interferometer configuration.

    Parameters
    ----------
    ell : int
        OAM quantum number of the probe beam, >= 1.
    mean_photons : float
        Mean photon number N = |alpha|^2 of the input coherent state, >= 0.
    protocol : Protocol
        Loop topology; defaults to the Sagnac ring.
    """

    ell: int
    mean_photons: float
    protocol: Protocol = Protocol.SAGNAC

    def __post_init__(self):
        if isinstance(self.ell, bool) or not isinstance(self.ell, (int, np.integer)):
            raise TypeError(f"ell must be an integer, got {self.ell!r}")
        if self.ell < 1:
            raise ValueError(f"ell must be >= 1, got {self.ell}")
        n = self.mean_photons
        if not (isinstance(n, (int, float, np.floating, np.integer)) and math.isfinite(n)):
            raise ValueError(f"mean_photons must be finite, got {n!r}")
        if n < 0:
            raise ValueError(f"mean_photons must be >= 0, got {n}")
        if not isinstance(self.protocol, Protocol):
            raise TypeError(f"protocol must be a Protocol, got {self.protocol!r}")

    @property
    def fringe_period(self) -> float:
        """Period of the parity fringe in phi: pi/(2*ell)."""
        return math.pi / (2.0 * self.ell)


@dataclass(frozen=True)
class ImperfectionProfile:
    """Hardware imperfections applied on top of an ideal interferometer.

    eta
        Preparation efficiency: fraction of the input prepared in the OAM
        mode; the remainder carries no OAM and exits bright, in (0, 1].
    t_a, t_b
        Path transmissions of the two counter-propagating directions, (0, 1].
    kappa
        Detection efficiency of the parity detector, (0, 1].
    dark_rate
        Mean dark count rate r per detection window, >= 0.
    jitter_factor
        Multiplier >= 1 on dark_rate modelling synchronization jitter
        widening the accept window.
    """

    eta: float = 1.0
    t_a: float = 1.0
    t_b: float = 1.0
    kappa: float = 1.0
    dark_rate: float = 0.0
    jitter_factor: float = 1.0

    def __post_init__(self):
        for name in ("eta", "t_a", "t_b", "kappa"):
            v = getattr(self, name)
            if not (0.0 < v <= 1.0):
                raise ValueError(f"{name} must be in (0, 1], got {v}")
        if not (self.dark_rate >= 0.0 and math.isfinite(self.dark_rate)):
            raise ValueError(f"dark_rate must be finite and >= 0, got {self.dark_rate}")
        if not (self.jitter_factor >= 1.0 and math.isfinite(self.jitter_factor)):
            raise ValueError(f"jitter_factor must be >= 1, got {self.jitter_factor}")

    @classmethod
    def ideal(cls) -> "ImperfectionProfile":
        return cls()

    @property
    def effective_dark_rate(self) -> float:
        """Dark rate after jitter widening, r_eff = jitter_factor * dark_rate."""
        return self.jitter_factor * self.dark_rate

    def active_imperfections(self) -> tuple[str, ...]:
        """Names of the imperfection families that differ from ideal."""
        active = []
        if self.eta < 1.0:
            active.append("prep")
        if self.t_a < 1.0 or self.t_b < 1.0:
            active.append("loss")
        if self.kappa < 1.0:
            active.append("efficiency")
        if self.effective_dark_rate > 0.0:
            active.append("dark")
        return tuple(active)


def dark_port_mean(spec, phi, t_a=1.0, t_b=1.0, kappa=1.0):
    """Mean photon number reaching the parity detector on the dark port.

    For unequal transmissions the interference contrast degrades and the
    port mean is kappa*N*(t_a + t_b - 2*sqrt(t_a*t_b)*cos(4*ell*phi))/4.
    The equal-transmission branch uses the sin^2 form so the ideal and
    efficiency-only cases degenerate bit-exactly.
    """
    phi = np.asarray(phi, dtype=float)
    n = spec.mean_photons
    if t_a == t_b:
        s = np.sin(2 * spec.ell * phi)
        return kappa * t_a * n * s * s
    c = np.cos(4 * spec.ell * phi)
    return kappa * n * (t_a + t_b - 2.0 * math.sqrt(t_a * t_b) * c) / 4.0


def parity_expectation_ideal(spec, phi):
    """Ideal parity fringe exp(-2 N sin^2(2 ell phi))."""
    return np.exp(-2.0 * dark_port_mean(spec, phi))


def parity_expectation_prep(spec, phi, eta):
    """Parity fringe with imperfect OAM preparation.

    A fraction eta of the input carries the OAM mode; the rest exits the
    bright port entirely, leaving the dark port in vacuum (always even):
    eta * exp(-2 N sin^2(2 ell phi)) + (1 - eta).
    """
    return eta * parity_expectation_ideal(spec, phi) + (1.0 - eta)


def parity_expectation_loss(spec, phi, t_a, t_b):
    """Parity fringe with unequal path transmissions t_a, t_b.

    exp(N sqrt(t_a t_b) cos(4 ell phi) - (N/2)(t_a + t_b)); reduces to the
    ideal fringe at t_a = t_b = 1.
    """
    phi = np.asarray(phi, dtype=float)
    n = spec.mean_photons
    c = np.cos(4 * spec.ell * phi)
    return np.exp(n * math.sqrt(t_a * t_b) * c - 0.5 * n * (t_a + t_b))


def parity_expectation_efficiency(spec, phi, kappa):
    """Parity fringe with detector efficiency kappa: ideal fringe at N -> kappa N."""
    return np.exp(-2.0 * dark_port_mean(spec, phi, kappa=kappa))


def parity_expectation_dark(spec, phi, dark_rate, jitter_factor=1.0):
    """Parity fringe scaled by dark counts: exp(-2 r_eff) times the ideal fringe.

    Dark counts flip the recorded parity independently of the light, which
    multiplies the expectation by exp(-2 r_eff) with
    r_eff = jitter_factor * dark_rate.
    """
    r_eff = jitter_factor * dark_rate
    return math.exp(-2.0 * r_eff) * parity_expectation_ideal(spec, phi)


def parity_expectation(spec, phi, profile):
    """Parity fringe with all imperfections of `profile` applied at once.

    Loss and detection efficiency act on the dark-port mean (N -> kappa N
    with the (t_a, t_b) interference form), the preparation mixture wraps
    that core, and dark counts multiply the result:

        exp(-2 r_eff) * [eta * exp(-2 mu(phi)) + (1 - eta)]

    Reduces exactly to each single-imperfection formula when only that
    imperfection is active, and bit-exactly to the ideal fringe for the
    ideal profile.
    """
    mu = dark_port_mean(spec, phi, profile.t_a, profile.t_b, profile.kappa)
    core = np.exp(-2.0 * mu)
    mixed = profile.eta * core + (1.0 - profile.eta)
    return math.exp(-2.0 * profile.effective_dark_rate) * mixed


# --- analytic phi-derivatives, one per imperfection family ---------------
#
# These are the closed-form d<Pi>/dphi used for sensitivity via error
# propagation.  They are deliberately written out per family (rather than
# derived from the composed expectation) so finite differences can
# cross-check them independently.


def parity_derivative_ideal(spec, phi):
    """d/dphi of the ideal fringe: -4 ell N sin(4 ell phi) exp(-2 N sin^2)."""
    phi = np.asarray(phi, dtype=float)
    el, n = spec.ell, spec.mean_photons
    return -4.0 * el * n * np.sin(4 * el * phi) * parity_expectation_ideal(spec, phi)


def parity_derivative_prep(spec, phi, eta):
    return eta * parity_derivative_ideal(spec, phi)


def parity_derivative_loss(spec, phi, t_a, t_b):
    phi = np.asarray(phi, dtype=float)
    el, n = spec.ell, spec.mean_photons
    amp = 4.0 * el * n * math.sqrt(t_a * t_b)
    return -amp * np.sin(4 * el * phi) * parity_expectation_loss(spec, phi, t_a, t_b)


def parity_derivative_efficiency(spec, phi, kappa):
    phi = np.asarray(phi, dtype=float)
    el, n = spec.ell, spec.mean_photons
    e = parity_expectation_efficiency(spec, phi, kappa)
    return -4.0 * el * kappa * n * np.sin(4 * el * phi) * e


def parity_derivative_dark(spec, phi, dark_rate, jitter_factor=1.0):
    r_eff = jitter_factor * dark_rate
    return math.exp(-2.0 * r_eff) * parity_derivative_ideal(spec, phi)
