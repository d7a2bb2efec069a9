"""Scattering parameters, complex pole finding, and the no-upper-half-plane
pole check.

Causality of the chain shows up in the analytic structure of its scattering
parameters: all poles in the detuning plane must lie in the closed lower
half-plane. For rational functions the poles are read off directly; the
two-qubit round-trip (Fabry-Perot) transmission is transcendental and its
poles are found by Newton iteration seeded on a grid.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonConvergence
from .momentum import RationalFn

log = logging.getLogger(__name__)

#: default search rectangle in units of j0: re in [-20, 20], im in [-20, 2]
DEFAULT_WINDOW = (-20.0, 20.0, -20.0, 2.0)


@dataclass(frozen=True)
class TransferFn:
    """A scattering parameter: either rational in the detuning, or the
    two-qubit Fabry-Perot transmission."""

    kind: str                      # "rational" | "fabry_perot"
    rational: RationalFn | None = None
    j0: float = 0.0
    omega: float = 0.0
    L: float = 0.0
    window: tuple = field(default=None)

    def __post_init__(self):
        if self.kind not in ("rational", "fabry_perot"):
            raise ValueError("kind must be 'rational' or 'fabry_perot'")
        if self.kind == "rational" and self.rational is None:
            raise ValueError("rational kind needs a RationalFn")
        if self.window is None:
            scale = self.j0 if self.j0 > 0 else 1.0
            object.__setattr__(
                self, "window", tuple(w * scale for w in DEFAULT_WINDOW))

    def __call__(self, delta):
        if self.kind == "rational":
            return self.rational(delta)
        return self._fp_value(delta)

    def _round_trip(self, delta):
        delta = np.asarray(delta, dtype=complex)
        j0 = self.j0
        k = self.omega + delta
        r = -1j * j0 / (delta + 1j * j0)
        return r * r * np.exp(2j * k * self.L)

    def denominator(self, delta):
        """Zero exactly at the poles (for the fabry_perot kind)."""
        if self.kind == "rational":
            den = np.ones_like(np.asarray(delta, dtype=complex))
            for p, m in self.rational.poles:
                den = den * (np.asarray(delta, dtype=complex) - p) ** m
            return den
        # multiply through by (delta + i*j0)^2 to remove the removable
        # singularity of r^2 at the single-qubit pole
        delta = np.asarray(delta, dtype=complex)
        j0 = self.j0
        k = self.omega + delta
        return ((delta + 1j * j0) ** 2
                + j0 * j0 * np.exp(2j * k * self.L))

    def _fp_value(self, delta):
        delta = np.asarray(delta, dtype=complex)
        j0 = self.j0
        k = self.omega + delta
        t = delta / (delta + 1j * j0)
        val = t * t * np.exp(1j * k * self.L) / (1.0 - self._round_trip(delta))
        return val if val.ndim else complex(val)


def chain_transmission(j0: float, omega: float, L: float) -> TransferFn:
    """Transmission through two qubits separated by L.

    Geometric sum of all internal round trips:
    T = t^2 e^{ikL} / (1 - r^2 e^{2ikL}), k = omega + delta.
    """
    return TransferFn("fabry_perot", j0=j0, omega=omega, L=L)


def transmission_partial_sum(f: TransferFn, delta, n_max: int):
    """Truncated round-trip sum; cross-check of the geometric closed form."""
    delta = np.asarray(delta, dtype=complex)
    k = f.omega + delta
    t = delta / (delta + 1j * f.j0)
    rt = f._round_trip(delta)
    acc = np.zeros_like(delta)
    term = np.ones_like(delta)
    for _ in range(n_max + 1):
        acc = acc + term
        term = term * rt
    return t * t * np.exp(1j * k * f.L) * acc


def _newton(f: TransferFn, z0: complex, max_iter: int = 50,
            tol: float = 1e-12) -> complex:
    z = z0
    for _ in range(max_iter):
        h = 1e-7 * (1 + abs(z))
        d = f.denominator(z)
        dp = (f.denominator(z + h) - f.denominator(z - h)) / (2 * h)
        if dp == 0:
            raise NonConvergence(f"flat denominator at {z}")
        step = d / dp
        z = z - step
        if abs(step) < tol * (1 + abs(z)):
            return z
    raise NonConvergence(f"Newton did not converge from seed {z0}")


def find_poles(f: TransferFn, window: tuple | None = None,
               grid: int = 40) -> list[complex]:
    """Poles of f inside the window (re_lo, re_hi, im_lo, im_hi).

    Rational functions report their exact poles. The Fabry-Perot kind runs
    Newton iterations from a grid of seeds, deduplicates at 1e-8, and keeps
    only verified roots (|denominator| < 1e-10).
    """
    if window is None:
        window = f.window
    re_lo, re_hi, im_lo, im_hi = window

    def inside(z):
        return re_lo <= z.real <= re_hi and im_lo <= z.imag <= im_hi

    if f.kind == "rational":
        return sorted((p for p, _ in f.rational.poles if inside(p)),
                      key=lambda z: (z.real, z.imag))

    roots: list[complex] = []
    res = np.linspace(re_lo, re_hi, grid)
    ims = np.linspace(im_lo, im_hi, grid)
    for re in res:
        for im in ims:
            try:
                z = _newton(f, complex(re, im))
            except NonConvergence as exc:
                log.debug("seed (%g, %g): %s", re, im, exc)
                continue
            if not inside(z) or abs(f.denominator(z)) >= 1e-10:
                continue
            if all(abs(z - r) > 1e-8 for r in roots):
                roots.append(z)
    return sorted(roots, key=lambda z: (z.real, z.imag))


def check_no_uhp(f: TransferFn, window: tuple | None = None,
                 margin: float = 1e-9) -> dict:
    """Report whether every pole in the window sits at Im <= margin."""
    poles = find_poles(f, window)
    worst = max((p.imag for p in poles), default=-math.inf)
    return {"pass": worst <= margin, "poles": poles, "worst_im": worst}
