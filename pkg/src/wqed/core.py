"""Domain types and closed-form time-domain term evaluation.

Units: hbar = v_g = 1. Rates are measured in units of the coupling J0
(gamma0 = 2*J0), lengths and times in units of 1/J0.

A closed-form amplitude is a sum of delayed terms

    Theta(t - t0) * poly(t - t0) * exp(-i*p*(t - t0)) * exp(-i*W*(t - t0)),

with Theta(0) = 0.5 by convention. Terms with Im(p) < 0 decay; anti-causal
terms (supported for the single-qubit backward-time check only) carry
Theta(t0 - t) instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels

#: Heaviside value at the step, applied uniformly across the package.
THETA_AT_ZERO = 0.5


@dataclass(frozen=True)
class ChainConfig:
    """Geometry and physical constants of the qubit chain."""

    num_qubits: int
    omega: float
    j0: float
    separation: float
    positions: tuple[float, ...] = ()

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("need at least one qubit")
        if self.omega < 0 or self.j0 <= 0 or self.separation < 0:
            raise ValueError("omega >= 0, j0 > 0, separation >= 0 required")
        if not self.positions:
            pos = tuple(m * self.separation for m in range(self.num_qubits))
            object.__setattr__(self, "positions", pos)
        if len(self.positions) != self.num_qubits:
            raise ValueError("positions must have one entry per qubit")
        if any(b <= a for a, b in zip(self.positions, self.positions[1:])):
            raise ValueError("positions must be strictly increasing")

    @property
    def gamma0(self) -> float:
        return 2.0 * self.j0

    @property
    def narrow_band(self) -> bool:
        """True when omega >= 10*j0, the regime the model physically assumes.

        The math below stays valid for any omega; this flag only signals
        that the rotating-wave premise is being stretched.
        """
        return self.omega >= 10.0 * self.j0

    @classmethod
    def fermi_pair(cls, j0: float, omega: float, separation: float) -> "ChainConfig":
        """Two identical qubits at -L/2 and +L/2 (the two-atom benchmark)."""
        half = separation / 2.0
        return cls(2, omega, j0, separation, positions=(-half, half))


@dataclass(frozen=True)
class PulseSpec:
    """Incident decaying-exponential pulse with a sharp front.

    The front starts a distance x0 > 0 outside the chain (left of the first
    qubit when moving right, right of the last when moving left), so no qubit
    sees any field at t = 0.
    """

    sigma: float
    x0: float
    direction: str = "right"

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.x0 <= 0:
            raise ValueError("x0 must be positive")
        if self.direction not in ("right", "left"):
            raise ValueError("direction must be 'right' or 'left'")


@dataclass(frozen=True)
class InitialCondition:
    """Single-excitation initial state: one excited qubit or one incident pulse."""

    kind: str  # "excited_qubit" | "pulse"
    qubit: int | None = None
    pulse: PulseSpec | None = None

    def __post_init__(self):
        if self.kind == "excited_qubit":
            if self.qubit is None:
                raise ValueError("excited_qubit needs a qubit index")
        elif self.kind == "pulse":
            if self.pulse is None:
                raise ValueError("pulse initial condition needs a PulseSpec")
        else:
            raise ValueError(f"unknown initial condition kind {self.kind!r}")

    @classmethod
    def excited(cls, qubit: int) -> "InitialCondition":
        return cls("excited_qubit", qubit=qubit)

    @classmethod
    def incident(cls, pulse: PulseSpec) -> "InitialCondition":
        return cls("pulse", pulse=pulse)


@dataclass(frozen=True)
class DelayedTerm:
    """One Theta * polynomial * exponential term of a time-domain amplitude.

    Value at time t, with tau = t - delay:

        causal:      Theta(tau)  * sum_m c_m tau^m * exp(-i*(pole+carrier)*tau)
        anti-causal: Theta(-tau) * sum_m c_m tau^m * exp(-i*(pole+carrier)*tau)
    """

    delay: float
    pole: complex
    poly_coeffs: tuple[complex, ...]
    carrier: float
    anti_causal: bool = False

    def __post_init__(self):
        if not self.poly_coeffs:
            raise ValueError("poly_coeffs must be non-empty")


def _theta(tau, anti_causal: bool):
    x = -tau if anti_causal else tau
    return np.where(x > 0, 1.0, np.where(x == 0, THETA_AT_ZERO, 0.0))


def eval_term(term: DelayedTerm, t):
    """Evaluate one delayed term at time(s) t (scalar or array)."""
    t = np.asarray(t, dtype=float)
    tau = t - term.delay
    poly = np.zeros_like(tau, dtype=complex)
    for c in reversed(term.poly_coeffs):
        poly = poly * tau + c
    rate = -1j * (term.pole + term.carrier)
    val = _theta(tau, term.anti_causal) * poly * np.exp(rate * tau)
    return val if val.ndim else complex(val)


@dataclass(frozen=True)
class TimeSeriesAmplitude:
    """A finite sum of delayed terms with a label naming the observable."""

    terms: tuple[DelayedTerm, ...]
    label: str = ""

    def __call__(self, t):
        return eval_series(self, t)

    def support_start(self) -> float:
        """Earliest time at which any causal term can be nonzero."""
        causal = [tm.delay for tm in self.terms if not tm.anti_causal]
        return min(causal) if causal else np.inf


def eval_series(series: TimeSeriesAmplitude, t):
    """Sum of eval_term over all terms; 0 for the empty series."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if not series.terms:
        out = np.zeros_like(t_arr, dtype=complex)
    else:
        out = _kernels.eval_terms_grid(_pack_terms(series.terms), t_arr)
    if np.ndim(t) == 0:
        return complex(out[0])
    return out


def _pack_terms(terms) -> _kernels.PackedTerms:
    delays = np.array([tm.delay for tm in terms], dtype=float)
    poles = np.array([tm.pole + tm.carrier for tm in terms], dtype=complex)
    anti = np.array([tm.anti_causal for tm in terms], dtype=np.bool_)
    npoly = max(len(tm.poly_coeffs) for tm in terms)
    coeffs = np.zeros((len(terms), npoly), dtype=complex)
    for i, tm in enumerate(terms):
        coeffs[i, : len(tm.poly_coeffs)] = tm.poly_coeffs
    return _kernels.PackedTerms(delays, poles, coeffs, anti)
