"""Nyquist sampling densities and Rayleigh antenna spacing for LOS MIMO."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import measure
from .kernels import Link


@dataclass(frozen=True)
class SpacingPlan:
    delta_s: float
    delta_r: float
    N_s: int
    N_r: int

    def __post_init__(self):
        if not (self.delta_s > 0 and self.delta_r > 0):
            raise ValueError("spacings must be positive")

    @property
    def N_max(self):
        return max(self.N_s, self.N_r)


def isotropic_support_measure(wavelength, n):
    """Measure of the disk ``||k|| <= 1/lam`` in n dimensions: ``2/lam`` or ``pi/lam^2``."""
    if n == 1:
        return 2.0 / wavelength
    if n == 2:
        return math.pi / wavelength**2
    raise ValueError("n must be 1 or 2")


def nyquist_density_nlos(mKr) -> float:
    """Samples per m^n at the receiver: equal to the wavenumber-support measure."""
    if mKr < 0:
        raise ValueError("support measure must be nonnegative")
    return float(mKr)


def nyquist_density_los(link: Link, side="receive") -> float:
    """``m(S) / (lam D)^n`` at the receiver; ``m(R) / (lam D)^n`` at the source."""
    far = link.source if side == "receive" else link.receive
    return measure(far) / link.lam_d ** link.n


def distance_for_density(far_measure, wavelength, density, n=1) -> float:
    """Range ``D`` at which the LOS density ``m / (lam D)^n`` equals ``density``."""
    return (far_measure / density) ** (1.0 / n) / wavelength


def rayleigh_product(link: Link, N_max: int, aliasing_limit=False) -> float:
    """``d_s d_r = lam D / N_max``, or ``lam D / (N_max - 1)`` with ``aliasing_limit``."""
    if aliasing_limit:
        if N_max < 2:
            raise ValueError("aliasing-limit form needs N_max >= 2")
        return link.lam_d / (N_max - 1)
    if N_max < 1:
        raise ValueError("N_max must be >= 1")
    return link.lam_d / N_max


def symmetric_spacing(link: Link, N_max: int, aliasing_limit=False) -> float:
    """Equal split ``sqrt(d_s d_r)``; a convention, the product alone is fixed."""
    return math.sqrt(rayleigh_product(link, N_max, aliasing_limit))


def rayleigh_plan(link: Link, N_s: int, N_r: int, aliasing_limit=False) -> SpacingPlan:
    d = symmetric_spacing(link, max(N_s, N_r), aliasing_limit)
    return SpacingPlan(d, d, N_s, N_r)
