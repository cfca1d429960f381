"""Propagation kernels between transverse positions on two parallel apertures.

Three variants are provided:

* ``exact``   -- scalar free-space Green's function ``exp(i 2 pi r / lam) / (4 pi r)``
  with ``r = ||(r - s, -D)||``;
* ``fresnel`` -- paraxial kernel ``exp(-i pi ||r - s||^2 / (lam D))``;
* ``fourier`` -- Fresnel kernel with the two quadratic end phases removed,
  ``exp(i 2 pi s.r / (lam D))``.

Constant prefactors (``-i 2 pi eta / lam``, ``eta / (2 lam)`` and the global
phase ``exp(-i 2 pi D / lam)``) never enter matrix entries; they are
reported by :func:`kernel_constants`.

All kernels accept arrays of points with the transverse coordinate on the
last axis and broadcast over the leading axes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidGeometryError, SingularKernelError, UndefinedAgreementError
from .geometry import ArrayAperture, freq2wlen

FREE_SPACE_IMPEDANCE = 376.730
"Impedance of free space (ohm)."


class KernelKind(str, enum.Enum):
    EXACT = "exact"
    FRESNEL = "fresnel"
    FOURIER = "fourier"

    @property
    def paraxial(self):
        return self is not KernelKind.EXACT


@dataclass(frozen=True)
class Link:
    """Geometric scenario: two parallel apertures a distance ``D`` apart."""

    wavelength: float
    distance: float
    source: ArrayAperture
    receive: ArrayAperture
    impedance: float = FREE_SPACE_IMPEDANCE

    def __post_init__(self):
        if not self.wavelength > 0:
            raise InvalidGeometryError("wavelength must be positive")
        if not self.distance > 0:
            raise InvalidGeometryError("distance must be positive")

    @classmethod
    def from_frequency(cls, frequency, distance, source, receive, **kw):
        return cls(float(freq2wlen(frequency)), distance, source, receive, **kw)

    @property
    def n(self):
        return self.source.n

    @property
    def lam_d(self):
        """Product ``lambda * D`` (m^2), the Fresnel scale."""
        return self.wavelength * self.distance


def kernel_constants(link: Link) -> dict:
    """Prefactors omitted from every kernel value."""
    lam, D, eta = link.wavelength, link.distance, link.impedance
    return {
        "green_prefactor": complex(-1j * 2 * np.pi * eta / lam),
        "plane_wave_prefactor": eta / (2 * lam),
        "global_phase": complex(np.exp(-1j * 2 * np.pi * D / lam)),
    }


def kappa_z(k, wavelength):
    """Axial wavenumber for transverse wave vector(s) ``k`` (1/m, rescaled by 1/2pi).

    Real and nonnegative for ``||k|| <= 1/lam``; ``+i sqrt(||k||^2 - 1/lam^2)``
    beyond the cutoff. ``k`` may be a scalar norm or an array with the vector
    components on the last axis.
    """
    k = np.asarray(k, dtype=float)
    knorm = np.abs(k) if k.ndim == 0 else np.linalg.norm(k, axis=-1)
    inv2 = 1.0 / wavelength**2
    k2 = knorm**2
    prop = k2 <= inv2
    out = np.where(prop, np.sqrt(np.where(prop, inv2 - k2, 0.0)) + 0j,
                   1j * np.sqrt(np.where(prop, 0.0, k2 - inv2)))
    return out[()] if out.ndim == 0 else out


def _diff_sq(r, s):
    d = np.asarray(r, dtype=float) - np.asarray(s, dtype=float)
    return np.sum(d * d, axis=-1) if d.ndim else d * d


def _dot(r, s):
    p = np.asarray(r, dtype=float) * np.asarray(s, dtype=float)
    return np.sum(p, axis=-1) if p.ndim else p


def green_kernel(r, s, link: Link):
    """Scalar Green's function between receive point ``r`` and source point ``s``."""
    sep = np.sqrt(_diff_sq(r, s) + link.distance**2)
    if np.any(sep == 0):
        raise SingularKernelError("zero source-receiver separation")
    return np.exp(1j * 2 * np.pi * sep / link.wavelength) / (4 * np.pi * sep)


def quadratic_phase(x, link: Link):
    """End phase ``phi(x) = exp(-i pi ||x||^2 / (lam D))``."""
    return np.exp(-1j * np.pi * _diff_sq(x, 0.0) / link.lam_d)


def fresnel_kernel(r, s, link: Link):
    """Paraxial kernel; unit magnitude, depends only on ``r - s``."""
    return np.exp(-1j * np.pi * _diff_sq(r, s) / link.lam_d)


def compensate_phases(value, r, s, link: Link):
    """Divide out ``phi(r) phi(s)`` from a Fresnel kernel value."""
    # phi has unit modulus so division is multiplication by the conjugate
    return value * np.conj(quadratic_phase(r, link) * quadratic_phase(s, link))


def fourier_kernel(r, s, link: Link):
    """Reduced kernel ``exp(i 2 pi s.r / (lam D))``."""
    return np.exp(1j * 2 * np.pi * _dot(r, s) / link.lam_d)


KERNELS = {
    KernelKind.EXACT: green_kernel,
    KernelKind.FRESNEL: fresnel_kernel,
    KernelKind.FOURIER: fourier_kernel,
}


def evaluate(kind, r, s, link: Link):
    return KERNELS[KernelKind(kind)](r, s, link)


def kernel_agreement(H1, H2) -> float:
    """Normalized Frobenius inner-product modulus between two channel matrices.

    The metric ignores a global phase and the complex-conjugation ambiguity
    between time conventions: the exact Green kernel is written with
    ``exp(+ikr)`` while the paraxial kernels follow ``exp(-i...)``, and
    conjugating a matrix leaves its singular values untouched. The larger of
    ``|<H1, H2>|`` and ``|<conj H1, H2>|`` is returned.
    """
    A = np.asarray(getattr(H1, "entries", H1))
    B = np.asarray(getattr(H2, "entries", H2))
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    na, nb = np.linalg.norm(A), np.linalg.norm(B)
    if na == 0 or nb == 0:
        raise UndefinedAgreementError("agreement undefined for a zero matrix")
    direct = abs(np.vdot(A, B))
    conjugate = abs(np.vdot(np.conj(A), B))
    return float(min(1.0, max(direct, conjugate) / (na * nb)))
