"""Closed-form DOF formulas, Landau's second-order correction, the 1-D
time/band concentration operator and paraxial validity margins."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InvalidGeometryError, NumericalFailureError
from .geometry import measure
from .kernels import Link
from .spectra import Spectrum

EIG_UPPER_CLAMP = 1.0 + 1e-6


@dataclass(frozen=True)
class DofEstimate:
    closed_form: float
    sigma: float
    empirical: int | None
    landau_corrected: float


@dataclass(frozen=True)
class ConcentrationSpec:
    """Time interval ``T`` (s), one-sided bandwidth ``B`` (Hz) and grid size."""

    T: float
    B: float
    grid_points: int | None = None

    def __post_init__(self):
        if not (self.T > 0 and self.B > 0):
            raise ValueError("T and B must be positive")
        if self.grid_points is None:
            object.__setattr__(self, "grid_points", self.min_grid_points)
        if self.grid_points < self.min_grid_points:
            raise ValueError(
                f"grid_points={self.grid_points} below 8*ceil(2BT)={self.min_grid_points}")

    @property
    def time_bandwidth(self):
        return 2 * self.B * self.T

    @property
    def min_grid_points(self):
        # small tolerance so that e.g. 2*1*10.000000000000002 does not round up
        return 8 * math.ceil(self.time_bandwidth - 1e-9)


def dof_los_paraxial(link: Link) -> float:
    """``m(S) m(R) / (lam D)^n``."""
    if link.source.n != link.receive.n:
        raise InvalidGeometryError("source and receive dimensions differ")
    return measure(link.source) * measure(link.receive) / link.lam_d ** link.n


def dof_nlos_general(mKr, mCr, mKs, mCs) -> float:
    """``min(m(K_r) m(C_Ar), m(K_s) m(C_As))``."""
    if min(mKr, mCr, mKs, mCs) < 0:
        raise ValueError("measures must be nonnegative")
    return min(mKr * mCr, mKs * mCs)


def dof_nlos_isotropic_1d(Ls, Lr, wavelength) -> float:
    """``min(Ls, Lr) / (lam / 2)`` for isotropic scattering."""
    if min(Ls, Lr, wavelength) <= 0:
        raise ValueError("lengths and wavelength must be positive")
    k = 2.0 / wavelength
    return dof_nlos_general(k, Lr, k, Ls)


def los_wavenumber_measures(link: Link):
    """``(m(K_r), m(K_s))`` seen by the receiver and by the source in LOS."""
    scale = link.lam_d ** link.n
    return measure(link.source) / scale, measure(link.receive) / scale


def landau_dof_sigma(dof, sigma, scale_log) -> float:
    """``dof + ln((1-sigma)/sigma) * scale_log / pi^2`` (remainder dropped)."""
    if not 0 < sigma < 1:
        raise ValueError(f"sigma must lie in (0, 1), got {sigma}")
    return dof + math.log((1 - sigma) / sigma) * scale_log / math.pi**2


def plunge_slope(sigma) -> float:
    """Coefficient of the log-scale term, ``ln((1-sigma)/sigma) / pi^2``."""
    return landau_dof_sigma(0.0, sigma, 1.0)


def concentration_matrix(spec: ConcentrationSpec) -> np.ndarray:
    """Nystrom matrix ``dt * 2B sinc(2B (t_i - t_j))`` on an endpoint grid over [-T/2, T/2]."""
    N = spec.grid_points
    t = np.linspace(-spec.T / 2, spec.T / 2, N)
    dt = spec.T / (N - 1)
    return dt * 2 * spec.B * np.sinc(2 * spec.B * (t[:, None] - t[None, :]))


def concentration_eigs(spec: ConcentrationSpec) -> Spectrum:
    """Eigenvalues of the discretized time-limit/band-limit/time-limit operator."""
    K = concentration_matrix(spec)
    try:
        w = scipy.linalg.eigh(K, eigvals_only=True)
    except scipy.linalg.LinAlgError as exc:
        raise NumericalFailureError(str(exc)) from exc
    w = np.clip(w[::-1], 0.0, EIG_UPPER_CLAMP)
    return Spectrum(w, 1.0)


def crossing_count(spec: Spectrum, sigma) -> float:
    """Fractional count of normalized eigenvalues above ``sigma``.

    The crossing position is interpolated linearly in ``log(x / (1 - x))``
    between the last eigenvalue above ``sigma`` and the first one below, and
    shifted by one half so that rounding recovers the integer count.
    """
    x = np.clip(spec.normalized, 1e-300, 1 - 1e-16)
    k = int(np.count_nonzero(x > sigma))
    if k == 0 or k == len(x):
        return float(k)
    logit = np.log(x / (1 - x))
    a, b, s = logit[k - 1], logit[k], math.log(sigma / (1 - sigma))
    return (k - 1) + (a - s) / (a - b) + 0.5


def paraxial_margins(link: Link) -> dict:
    """Both ratios of the asymptotic-regime inequality.

    ``concentration`` is ``g / (D/lam)`` with ``g`` the n-th root of the
    product of electrical side lengths at both ends; ``paraxial`` is
    ``(D/lam) / max_i(L_i/lam)`` over all axes of both apertures (offset
    augmented). Both are ``>> 1`` deep inside the regime.
    """
    lam, D, n = link.wavelength, link.distance, link.n
    prod = np.prod(np.array(link.source.axis_lengths) / lam) * np.prod(
        np.array(link.receive.axis_lengths) / lam)
    g = prod ** (1.0 / n)
    longest = max(link.source.paraxial_extent + link.receive.paraxial_extent)
    return {"concentration": float(g / (D / lam)), "paraxial": float(D / longest)}


def paraxial_margin(link: Link, concentration_factor=1.0) -> float:
    """``min(concentration, paraxial) - concentration_factor``; positive is valid."""
    m = paraxial_margins(link)
    return min(m["concentration"], m["paraxial"]) - concentration_factor


def dof_estimate(link: Link, sigma, spec: Spectrum | None = None) -> DofEstimate:
    """Closed form, empirical count and Landau-corrected prediction for a LOS link.

    The log scale is ``ln det(A) + ln m(R)``, i.e. the log of the magnified
    receive measure ``m(R_A) = m(R) / (lam D)^n``.
    """
    from .spectra import empirical_dof

    dof = dof_los_paraxial(link)
    scale_log = math.log(measure(link.receive) / link.lam_d ** link.n)
    corrected = landau_dof_sigma(dof, sigma, scale_log)
    empirical = None if spec is None else empirical_dof(spec, sigma)
    return DofEstimate(dof, sigma, empirical, corrected)
